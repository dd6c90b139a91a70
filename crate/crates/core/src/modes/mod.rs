//! Detection-mode algebra: mode bases, frexels, cluster graphs, nullifiers
//! and the frexel phase/permutation searches.

mod frexels;
mod graph;
mod nullifier;
mod search;

use nalgebra::DMatrix;

use crate::gaussian_core::CovarianceMatrix;
use crate::linalg::{real_representation, unitarity_residual};
use crate::{Error, Result, C64};

pub use frexels::{build_frexels, FrexelSpec};
pub use graph::ClusterGraph;
pub use nullifier::{nullifier_covariance, nullifier_modes, NullifierCovariance, NullifierModes, NullifierObjective};
pub use search::{
    optimize_frexel_permutation, optimize_frexel_phases, optimize_permutation_reduced, optimize_phases_reduced,
    permutations, permute_covariance, PermutationOptimum, PermutationScore, PhaseOptimum, PhaseSearch,
};

/// Orthonormal detection modes; row `j` is the spectral amplitude of mode `j`.
#[derive(Clone, Debug, PartialEq)]
pub struct ModeMatrix {
    d: DMatrix<C64>,
}

impl ModeMatrix {
    pub fn new(d: DMatrix<C64>) -> Result<Self> {
        if d.nrows() == 0 || d.nrows() > d.ncols() {
            return Err(Error::DimensionMismatch(format!(
                "{} modes cannot be orthonormal on {} frequencies",
                d.nrows(),
                d.ncols()
            )));
        }
        let residual = unitarity_residual(&d);
        if residual > 1e-10 {
            return Err(Error::Contract(format!(
                "mode rows are not orthonormal (residual {residual:e})"
            )));
        }
        Ok(Self { d })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            d: DMatrix::identity(n, n),
        }
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.d
    }

    pub fn len(&self) -> usize {
        self.d.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.d.nrows() == 0
    }

    pub fn frequencies(&self) -> usize {
        self.d.ncols()
    }

    /// Row `j` of the result is row `perm[j]` of `self`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        check_permutation(perm, self.len())?;
        Ok(Self {
            d: DMatrix::from_fn(self.len(), self.frequencies(), |j, i| self.d[(perm[j], i)]),
        })
    }

    /// Multiplies row `j` by `exp(i thetas[j])`.
    pub fn with_phases(&self, thetas: &[f64]) -> Result<Self> {
        if thetas.len() != self.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} phases for {} modes",
                thetas.len(),
                self.len()
            )));
        }
        let mut d = self.d.clone();
        for (j, t) in thetas.iter().enumerate() {
            let phase = C64::from_polar(1.0, *t);
            d.row_mut(j).iter_mut().for_each(|z| *z *= phase);
        }
        Ok(Self { d })
    }
}

pub(crate) fn check_permutation(perm: &[usize], m: usize) -> Result<()> {
    let mut seen = vec![false; m];
    if perm.len() != m || perm.iter().any(|&p| p >= m || std::mem::replace(&mut seen[p], true)) {
        return Err(Error::InvalidParameter(format!(
            "{perm:?} is not a permutation of 0..{m}"
        )));
    }
    Ok(())
}

/// `R_D = [[Re D, -Im D], [Im D, Re D]]`, mapping frequency quadratures to
/// detection-mode quadratures.
pub fn quadrature_transform(d: &ModeMatrix) -> DMatrix<f64> {
    real_representation(d.matrix())
}

/// `Gamma_d = R_D Gamma R_D^T`.
pub fn mode_covariance(gamma: &CovarianceMatrix, d: &ModeMatrix) -> Result<CovarianceMatrix> {
    if gamma.modes() != d.frequencies() {
        return Err(Error::DimensionMismatch(format!(
            "covariance over {} modes, detection modes over {} frequencies",
            gamma.modes(),
            d.frequencies()
        )));
    }
    let r = quadrature_transform(d);
    let g = &r * gamma.matrix() * r.transpose();
    CovarianceMatrix::new((&g + g.transpose()) * 0.5)
}
