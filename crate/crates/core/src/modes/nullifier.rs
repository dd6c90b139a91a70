use nalgebra::DMatrix;

use super::{ClusterGraph, ModeMatrix};
use crate::gaussian_core::CovarianceMatrix;
use crate::linalg::real_representation;
use crate::{Error, Result, C64};

/// Local-oscillator amplitudes `W_jl = -r_j (i D_jl + sum_k G_jk D_kl)` whose
/// amplitude quadratures are the normalized nullifiers.
#[derive(Clone, Debug, PartialEq)]
pub struct NullifierModes {
    w: DMatrix<C64>,
    r: Vec<f64>,
}

impl NullifierModes {
    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.w
    }

    pub fn normalizations(&self) -> &[f64] {
        &self.r
    }
}

pub fn nullifier_modes(d: &ModeMatrix, graph: &ClusterGraph) -> Result<NullifierModes> {
    if graph.len() != d.len() {
        return Err(Error::DimensionMismatch(format!(
            "graph with {} nodes for {} modes",
            graph.len(),
            d.len()
        )));
    }
    let r = graph.normalizations();
    let g = graph.adjacency().map(|e| C64::new(e, 0.0));
    let mut w = d.matrix().map(|z| z * C64::new(0.0, 1.0)) + g * d.matrix();
    for (j, rj) in r.iter().enumerate() {
        w.row_mut(j).iter_mut().for_each(|z| *z *= -rj);
    }
    Ok(NullifierModes { w, r })
}

/// Covariance of the normalized nullifiers (first M rows) and their
/// conjugate quadratures (last M rows).
#[derive(Clone, Debug, PartialEq)]
pub struct NullifierCovariance {
    gamma: DMatrix<f64>,
}

impl NullifierCovariance {
    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.gamma
    }

    pub fn len(&self) -> usize {
        self.gamma.nrows() / 2
    }

    pub fn is_empty(&self) -> bool {
        self.gamma.nrows() == 0
    }

    pub fn nullifier_block(&self) -> DMatrix<f64> {
        let m = self.len();
        self.gamma.view((0, 0), (m, m)).into_owned()
    }

    pub fn cross_block(&self) -> DMatrix<f64> {
        let m = self.len();
        self.gamma.view((0, m), (m, m)).into_owned()
    }

    pub fn conjugate_block(&self) -> DMatrix<f64> {
        let m = self.len();
        self.gamma.view((m, m), (m, m)).into_owned()
    }

    pub fn variances(&self) -> Vec<f64> {
        (0..self.len()).map(|j| self.gamma[(j, j)]).collect()
    }

    pub fn mean_variance(&self) -> f64 {
        self.variances().iter().sum::<f64>() / self.len() as f64
    }
}

/// `R_W Gamma R_W^T`; `R_W` need not be orthogonal.
pub fn nullifier_covariance(gamma: &CovarianceMatrix, w: &NullifierModes) -> Result<NullifierCovariance> {
    if w.matrix().ncols() != gamma.modes() {
        return Err(Error::DimensionMismatch(format!(
            "nullifier modes over {} frequencies, covariance over {}",
            w.matrix().ncols(),
            gamma.modes()
        )));
    }
    let r = real_representation(w.matrix());
    let g = &r * gamma.matrix() * r.transpose();
    Ok(NullifierCovariance {
        gamma: (&g + g.transpose()) * 0.5,
    })
}

/// Nullifier variances as a function of per-node phases, evaluated on the
/// 2m x 2m covariance of the unrotated node modes.
///
/// Rotating node `k` by `theta_k` maps `q -> cos q - sin p` and
/// `p -> sin q + cos p`; nullifier `j` is `r_j (p'_j - sum_k G_jk q'_k)`.
#[derive(Clone, Debug)]
pub struct NullifierObjective {
    cov: DMatrix<f64>,
    neighbours: Vec<Vec<usize>>,
    r: Vec<f64>,
}

impl NullifierObjective {
    pub fn new(node_covariance: &CovarianceMatrix, graph: &ClusterGraph) -> Result<Self> {
        let m = graph.len();
        if node_covariance.modes() != m {
            return Err(Error::DimensionMismatch(format!(
                "covariance over {} modes for a {m}-node graph",
                node_covariance.modes()
            )));
        }
        let neighbours = (0..m)
            .map(|j| (0..m).filter(|&k| graph.has_edge(j, k)).collect())
            .collect();
        Ok(Self {
            cov: node_covariance.matrix().clone(),
            neighbours,
            r: graph.normalizations(),
        })
    }

    pub fn len(&self) -> usize {
        self.r.len()
    }

    pub fn is_empty(&self) -> bool {
        self.r.is_empty()
    }

    pub fn variances(&self, thetas: &[f64]) -> Vec<f64> {
        let m = self.len();
        let trig: Vec<(f64, f64)> = thetas.iter().map(|t| t.sin_cos()).collect();
        let mut a = vec![0.0; 2 * m];
        (0..m)
            .map(|j| {
                a.iter_mut().for_each(|x| *x = 0.0);
                let rj = self.r[j];
                let (s, c) = trig[j];
                a[j] += rj * s;
                a[m + j] += rj * c;
                for &k in &self.neighbours[j] {
                    let (sk, ck) = trig[k];
                    a[k] -= rj * ck;
                    a[m + k] += rj * sk;
                }
                let mut v = 0.0;
                for (x, ax) in a.iter().enumerate() {
                    if *ax == 0.0 {
                        continue;
                    }
                    let row: f64 = a.iter().enumerate().map(|(y, ay)| self.cov[(x, y)] * ay).sum();
                    v += ax * row;
                }
                v
            })
            .collect()
    }

    pub fn mean_variance(&self, thetas: &[f64]) -> f64 {
        self.variances(thetas).iter().sum::<f64>() / self.len() as f64
    }
}
