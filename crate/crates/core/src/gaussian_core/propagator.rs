use nalgebra::{DMatrix, SymmetricEigen};

use super::SupermodeSet;
use crate::linalg::{real_representation, symplectic_form};
use crate::{Error, Result};

/// Real quadrature propagator `S` in (q, p) block ordering.
#[derive(Clone, Debug, PartialEq)]
pub struct SymplecticPropagator {
    matrix: DMatrix<f64>,
    gain_scale: f64,
}

impl SymplecticPropagator {
    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn gain_scale(&self) -> f64 {
        self.gain_scale
    }

    pub fn modes(&self) -> usize {
        self.matrix.nrows() / 2
    }

    /// `|| S Omega S^T - Omega ||_F`.
    pub fn symplectic_residual(&self) -> f64 {
        let omega = symplectic_form(self.modes());
        (&self.matrix * &omega * self.matrix.transpose() - omega).norm()
    }
}

/// Squeezing factors `K = diag(e^{g Lambda}, e^{-g Lambda})`, raised to `power`.
fn squeezing_diagonal(gains: &[f64], eta_t: f64, power: f64) -> Vec<f64> {
    let anti = gains.iter().map(|l| (power * eta_t * l).exp());
    let squeezed = gains.iter().map(|l| (-power * eta_t * l).exp());
    anti.chain(squeezed).collect()
}

/// `R1 diag(k) R1^T` for the real representation `R1` of `U`.
fn congruence_diag(u: &nalgebra::DMatrix<crate::C64>, k: &[f64]) -> DMatrix<f64> {
    let r = real_representation(u);
    let mut rk = r.clone();
    for (j, kj) in k.iter().enumerate() {
        rk.column_mut(j).scale_mut(*kj);
    }
    let out = rk * r.transpose();
    (&out + out.transpose()) * 0.5
}

/// `S = R1 K R1^T` with `R1` the real representation of `V^dagger`.
pub fn build_propagator(set: &SupermodeSet, eta_t: f64) -> Result<SymplecticPropagator> {
    check_gain_scale(eta_t)?;
    let k = squeezing_diagonal(set.gains(), eta_t, 1.0);
    Ok(SymplecticPropagator {
        matrix: congruence_diag(&set.modes().adjoint(), &k),
        gain_scale: eta_t,
    })
}

fn check_gain_scale(eta_t: f64) -> Result<()> {
    if !eta_t.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "gain scale must be finite, got {eta_t}"
        )));
    }
    Ok(())
}

/// Quadrature covariance in (q, p) block ordering with vacuum variance 1/2.
#[derive(Clone, Debug, PartialEq)]
pub struct CovarianceMatrix {
    gamma: DMatrix<f64>,
}

impl CovarianceMatrix {
    /// Checks shape and symmetry to 1e-12 relative.
    pub fn new(gamma: DMatrix<f64>) -> Result<Self> {
        if !gamma.is_square() || gamma.nrows() % 2 != 0 {
            return Err(Error::DimensionMismatch("covariance must be 2M x 2M".into()));
        }
        let asym = (&gamma - gamma.transpose()).norm();
        if asym > 1e-12 * gamma.norm().max(1.0) {
            return Err(Error::Contract(format!("covariance is not symmetric ({asym:e})")));
        }
        Ok(Self { gamma })
    }

    pub(crate) fn from_symmetric(gamma: DMatrix<f64>) -> Self {
        Self { gamma }
    }

    pub fn vacuum(modes: usize) -> Self {
        Self {
            gamma: DMatrix::identity(2 * modes, 2 * modes) * 0.5,
        }
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.gamma
    }

    pub fn modes(&self) -> usize {
        self.gamma.nrows() / 2
    }

    pub fn q_variance(&self, j: usize) -> f64 {
        self.gamma[(j, j)]
    }

    pub fn p_variance(&self, j: usize) -> f64 {
        let m = self.modes();
        self.gamma[(j + m, j + m)]
    }

    /// `ln det(2 Gamma)`, zero for pure states.
    pub fn log_det_2gamma(&self) -> Result<f64> {
        let chol = (&self.gamma * 2.0)
            .cholesky()
            .ok_or_else(|| Error::Linalg("covariance is not positive definite".into()))?;
        Ok(2.0 * chol.l().diagonal().iter().map(|d| d.ln()).sum::<f64>())
    }

    /// Symplectic eigenvalues in ascending order (all 1/2 for pure states).
    pub fn symplectic_eigenvalues(&self) -> Result<Vec<f64>> {
        let eig = SymmetricEigen::new(self.gamma.clone());
        if eig.eigenvalues.iter().any(|&e| e <= 0.0) {
            return Err(Error::Linalg("covariance is not positive definite".into()));
        }
        let root =
            &eig.eigenvectors * DMatrix::from_diagonal(&eig.eigenvalues.map(f64::sqrt)) * eig.eigenvectors.transpose();
        let a = &root * symplectic_form(self.modes()) * &root;
        let mut sv: Vec<f64> = a.singular_values().iter().copied().collect();
        sv.sort_by(f64::total_cmp);
        Ok(sv.into_iter().step_by(2).collect())
    }

    /// Smallest eigenvalue of the Hermitian matrix `Gamma + i Omega / 2`.
    pub fn uncertainty_margin(&self) -> f64 {
        let m = self.modes();
        let omega = symplectic_form(m) * 0.5;
        // Real embedding of the Hermitian matrix X + iY is [[X, -Y], [Y, X]].
        let mut h = DMatrix::zeros(4 * m, 4 * m);
        h.view_mut((0, 0), (2 * m, 2 * m)).copy_from(&self.gamma);
        h.view_mut((2 * m, 2 * m), (2 * m, 2 * m)).copy_from(&self.gamma);
        h.view_mut((0, 2 * m), (2 * m, 2 * m)).copy_from(&(-&omega));
        h.view_mut((2 * m, 0), (2 * m, 2 * m)).copy_from(&omega);
        SymmetricEigen::new(h).eigenvalues.min()
    }
}

/// `Gamma = S S^T / 2`.
pub fn covariance_from_propagator(propagator: &SymplecticPropagator) -> CovarianceMatrix {
    let s = propagator.matrix();
    let g = s * s.transpose() * 0.5;
    CovarianceMatrix::from_symmetric((&g + g.transpose()) * 0.5)
}

/// `Gamma = R1 K^2 R1^T / 2` without forming `S`.
pub fn covariance_from_supermodes(set: &SupermodeSet, eta_t: f64) -> Result<CovarianceMatrix> {
    check_gain_scale(eta_t)?;
    let k2: Vec<f64> = squeezing_diagonal(set.gains(), eta_t, 2.0)
        .iter()
        .map(|k| 0.5 * k)
        .collect();
    Ok(CovarianceMatrix::from_symmetric(congruence_diag(
        &set.modes().adjoint(),
        &k2,
    )))
}

/// Covariance of detection modes `D` (rows), `R_T K^2 R_T^T / 2` with
/// `T = D V^dagger`; never forms the full 2N x 2N matrix.
pub fn reduced_covariance(set: &SupermodeSet, eta_t: f64, d: &DMatrix<crate::C64>) -> Result<CovarianceMatrix> {
    check_gain_scale(eta_t)?;
    if d.ncols() != set.len() {
        return Err(Error::DimensionMismatch(format!(
            "mode matrix has {} columns, supermodes live on {} frequencies",
            d.ncols(),
            set.len()
        )));
    }
    let t = d * set.modes().adjoint();
    let k2: Vec<f64> = squeezing_diagonal(set.gains(), eta_t, 2.0)
        .iter()
        .map(|k| 0.5 * k)
        .collect();
    Ok(CovarianceMatrix::from_symmetric(congruence_diag(&t, &k2)))
}
