use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::linalg::{frobenius_norm_c, from_faer, to_faer, unitarity_residual};
use crate::{Error, Result, C64};

/// Singular values closer than this relative gap are re-diagonalized together.
const CLUSTER_GAP: f64 = 1e-6;
/// Singular values below this fraction of the largest carry no gain.
const NULL_THRESHOLD: f64 = 1e-13;
/// Gains this close (relative) are treated as exactly tied for ordering.
const TIE_THRESHOLD: f64 = 1e-12;
/// Hermite-Gauss orders used to order exactly tied supermodes.
const HERMITE_ORDERS: usize = 32;

/// Unitary `V` (rows are supermodes) and descending gains with `V L V^T = diag(gains)`.
#[derive(Clone, Debug, PartialEq)]
pub struct SupermodeSet {
    modes: DMatrix<C64>,
    gains: Vec<f64>,
}

impl SupermodeSet {
    /// Checks unitarity to 1e-10 and that the gains are non-negative and sorted.
    pub fn new(modes: DMatrix<C64>, gains: Vec<f64>) -> Result<Self> {
        if !modes.is_square() || modes.nrows() != gains.len() {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} mode matrix with {} gains",
                modes.nrows(),
                modes.ncols(),
                gains.len()
            )));
        }
        if gains.iter().any(|g| !(*g >= 0.0)) || gains.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::Contract("gains must be non-negative and descending".into()));
        }
        let residual = unitarity_residual(&modes);
        if residual > 1e-10 * (modes.nrows() as f64).sqrt().max(1.0) {
            return Err(Error::Contract(format!(
                "supermode matrix is not unitary (residual {residual:e})"
            )));
        }
        Ok(Self { modes, gains })
    }

    /// Rows are supermode spectral amplitudes on the frequency grid.
    pub fn modes(&self) -> &DMatrix<C64> {
        &self.modes
    }

    pub fn gains(&self) -> &[f64] {
        &self.gains
    }

    pub fn len(&self) -> usize {
        self.gains.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gains.is_empty()
    }

    pub fn mode(&self, k: usize) -> Vec<C64> {
        self.modes.row(k).iter().copied().collect()
    }

    /// `|| V L V^T - diag(gains) ||_F`.
    pub fn congruence_residual(&self, l: &DMatrix<C64>) -> f64 {
        let mut d = &self.modes * l * self.modes.transpose();
        for (k, g) in self.gains.iter().enumerate() {
            d[(k, k)] -= C64::new(*g, 0.0);
        }
        frobenius_norm_c(&d)
    }

    pub fn unitarity_residual(&self) -> f64 {
        unitarity_residual(&self.modes)
    }
}

/// Autonne-Takagi factorization of a complex symmetric matrix.
///
/// From the SVD `L = A S B^dagger`, symmetry gives `B^* = A Z` with `Z`
/// unitary and block diagonal over groups of equal singular values. Isolated
/// singular values need only the phase `Z_kk^(1/2)`; each cluster of
/// (near-)equal values is re-diagonalized exactly through the real embedding
/// of the projected block `A_c^dagger L A_c^*`.
pub fn takagi_factorize(l: &DMatrix<C64>) -> Result<SupermodeSet> {
    if !l.is_square() {
        return Err(Error::DimensionMismatch(
            "Takagi factorization needs a square matrix".into(),
        ));
    }
    let n = l.nrows();
    let scale = frobenius_norm_c(l);
    let asymmetry = frobenius_norm_c(&(l - l.transpose()));
    if asymmetry > 1e-12 * scale {
        return Err(Error::Contract(format!(
            "matrix is not symmetric (||L - L^T|| = {asymmetry:e}, ||L|| = {scale:e})"
        )));
    }
    if scale == 0.0 {
        return Ok(SupermodeSet {
            modes: DMatrix::identity(n, n),
            gains: vec![0.0; n],
        });
    }

    let svd = to_faer(l)
        .svd()
        .map_err(|e| Error::Linalg(format!("SVD did not converge: {e:?}")))?;
    let a = from_faer(svd.U());
    let b = from_faer(svd.V());
    let s: Vec<f64> = (0..n).map(|k| svd.S().column_vector()[k].re).collect();
    let smax = s[0];

    let z_diag = |k: usize| -> C64 { (0..n).map(|i| (a[(i, k)] * b[(i, k)]).conj()).sum() };
    let half_phase = |z: C64| -> C64 {
        if z.norm() > 0.0 {
            C64::from_polar(1.0, 0.5 * z.arg())
        } else {
            C64::new(1.0, 0.0)
        }
    };

    let mut u = a.clone();
    let mut gains = s.clone();
    let mut start = 0;
    while start < n {
        if s[start] <= NULL_THRESHOLD * smax {
            for k in start..n {
                let phase = half_phase(z_diag(k));
                u.column_mut(k).scale_mut_c(phase);
            }
            break;
        }
        let mut end = start + 1;
        while end < n && s[end - 1] - s[end] <= CLUSTER_GAP * s[end - 1] {
            end += 1;
        }
        if end - start == 1 {
            let phase = half_phase(z_diag(start));
            u.column_mut(start).scale_mut_c(phase);
        } else {
            let a_c = a.columns(start, end - start).into_owned();
            let mut m = a_c.adjoint() * l * a_c.map(|z| z.conj());
            m = (&m + m.transpose()).map(|z| z * 0.5);
            let (block, block_gains) = block_takagi(&m);
            u.columns_mut(start, end - start).copy_from(&(&a_c * block));
            gains[start..end].copy_from_slice(&block_gains);
        }
        start = end;
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| gains[j].total_cmp(&gains[i]));
    let mut modes = DMatrix::zeros(n, n);
    for (row, &k) in order.iter().enumerate() {
        for i in 0..n {
            modes[(row, i)] = u[(i, k)].conj();
        }
    }
    let sorted: Vec<f64> = order.iter().map(|&k| gains[k].max(0.0)).collect();
    order_exact_ties(&mut modes, &sorted, smax);
    Ok(SupermodeSet { modes, gains: sorted })
}

/// Takagi factorization `M = U diag(g) U^T` of a small symmetric block via the
/// real symmetric embedding `[[X, Y], [Y, -X]]` of `M = X + iY`.
fn block_takagi(m: &DMatrix<C64>) -> (DMatrix<C64>, Vec<f64>) {
    let k = m.nrows();
    let mut h = DMatrix::<f64>::zeros(2 * k, 2 * k);
    for i in 0..k {
        for j in 0..k {
            let z = m[(i, j)];
            h[(i, j)] = z.re;
            h[(i, j + k)] = z.im;
            h[(i + k, j)] = z.im;
            h[(i + k, j + k)] = -z.re;
        }
    }
    let eig = SymmetricEigen::new(h);
    let mut idx: Vec<usize> = (0..2 * k).collect();
    idx.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let mut u = DMatrix::zeros(k, k);
    let mut g = Vec::with_capacity(k);
    for (col, &e) in idx.iter().take(k).enumerate() {
        for i in 0..k {
            u[(i, col)] = C64::new(eig.eigenvectors[(i, e)], eig.eigenvectors[(i + k, e)]);
        }
        g.push(eig.eigenvalues[e].max(0.0));
    }
    (u, g)
}

/// Within runs of exactly tied non-zero gains, orders rows by ascending mean
/// Hermite-Gauss order so the output does not depend on SVD internals. The
/// gains themselves stay sorted.
fn order_exact_ties(modes: &mut DMatrix<C64>, gains: &[f64], smax: f64) {
    let n = gains.len();
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && (gains[end - 1] - gains[end]).abs() <= TIE_THRESHOLD * smax {
            end += 1;
        }
        if end - start > 1 && gains[start] > NULL_THRESHOLD * smax {
            let keys: Vec<f64> = (start..end)
                .map(|r| hermite_order_key(&modes.row(r).transpose()))
                .collect();
            let mut local: Vec<usize> = (0..end - start).collect();
            local.sort_by(|&a, &b| keys[a].total_cmp(&keys[b]));
            let block = modes.rows(start, end - start).into_owned();
            for (dst, &src) in local.iter().enumerate() {
                modes.row_mut(start + dst).copy_from(&block.row(src));
            }
        }
        start = end;
    }
}

/// Power-weighted mean order of a mode expanded in Hermite-Gauss functions
/// centred on the grid with width `N / 8` samples.
fn hermite_order_key(v: &DVector<C64>) -> f64 {
    let n = v.len();
    let orders = HERMITE_ORDERS.min(n);
    let width = (n as f64 / 8.0).max(1.0);
    let mid = (n as f64 - 1.0) / 2.0;
    let mut weights = vec![0.0; orders];
    let mut overlaps = vec![C64::new(0.0, 0.0); orders];
    for (i, vi) in v.iter().enumerate() {
        let x = (i as f64 - mid) / width;
        let h0 = std::f64::consts::PI.powf(-0.25) * (-0.5 * x * x).exp();
        let mut prev = 0.0;
        let mut cur = h0;
        for (order, overlap) in overlaps.iter_mut().enumerate() {
            *overlap += vi * cur;
            let next =
                (2.0 / (order as f64 + 1.0)).sqrt() * x * cur - (order as f64 / (order as f64 + 1.0)).sqrt() * prev;
            prev = cur;
            cur = next;
        }
    }
    for (w, o) in weights.iter_mut().zip(&overlaps) {
        *w = o.norm_sqr();
    }
    let total: f64 = weights.iter().sum();
    if total <= 0.0 {
        return orders as f64;
    }
    weights.iter().enumerate().map(|(k, w)| k as f64 * w).sum::<f64>() / total
}

/// Rephases rows so that `v_k L v_k^T` is real and non-negative.
pub fn phase_normalize_supermodes(set: &SupermodeSet, l: &DMatrix<C64>) -> Result<SupermodeSet> {
    if l.nrows() != set.len() || l.ncols() != set.len() {
        return Err(Error::DimensionMismatch("supermodes and L differ in size".into()));
    }
    let mut modes = set.modes.clone();
    for k in 0..set.len() {
        let row = modes.row(k).transpose();
        let d = (row.transpose() * l * &row)[(0, 0)];
        if d.norm() > 0.0 && d.arg() != 0.0 {
            let phase = C64::from_polar(1.0, -0.5 * d.arg());
            modes.row_mut(k).scale_mut_c(phase);
        }
    }
    Ok(SupermodeSet {
        modes,
        gains: set.gains.clone(),
    })
}

trait ScaleComplex {
    fn scale_mut_c(&mut self, factor: C64);
}

impl<R: nalgebra::Dim, C: nalgebra::Dim, S: nalgebra::StorageMut<C64, R, C>> ScaleComplex
    for nalgebra::Matrix<C64, R, C, S>
{
    fn scale_mut_c(&mut self, factor: C64) {
        self.iter_mut().for_each(|z| *z *= factor);
    }
}
