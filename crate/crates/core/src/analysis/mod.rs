//! Derived studies built on the core pipeline.

mod chirp;
mod phase;

use nalgebra::{DMatrix, Matrix2, SymmetricEigen};
use rayon::prelude::*;
use serde::Serialize;

use crate::gaussian_core::{calibrate_gain_scale, reduced_covariance, SupermodeSet};
use crate::modes::{optimize_phases_reduced, ClusterGraph, ModeMatrix, PhaseSearch};
use crate::{Error, Result, C64};

pub use chirp::{chirp_scan, temporal_duration, ChirpFamily, ChirpScanResult, ChirpScanRow};
pub use phase::{fit_spectral_phase, subtract_linear_phase, unwrap_phase, PhaseFit};

/// `(sum g^2)^2 / sum g^4`.
pub fn schmidt_number(gains: &[f64]) -> Result<f64> {
    let s2: f64 = gains.iter().map(|g| g * g).sum();
    if s2 == 0.0 {
        return Err(Error::InvalidParameter("Schmidt number of all-zero gains".into()));
    }
    let s4: f64 = gains.iter().map(|g| g.powi(4)).sum();
    Ok(s2 * s2 / s4)
}

/// Number of gains at or above `fraction` of the largest.
pub fn count_near_max(gains: &[f64], fraction: f64) -> usize {
    let max = gains.iter().copied().fold(0.0, f64::max);
    gains.iter().filter(|&&g| g >= fraction * max).count()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OverlapResult {
    pub k: usize,
    /// Real unit vector of supermode weights.
    pub coefficients: Vec<f64>,
    pub overlap: f64,
}

/// Best overlap of `target` with a real combination of the first `k` rows of
/// `supermodes`. With `g_k = <s_k, t>` the objective is `c^T (a a^T + b b^T) c`
/// for `a = Re g`, `b = Im g`, maximized on the span of `a` and `b`.
pub fn best_real_combination_overlap(target: &[C64], supermodes: &DMatrix<C64>, k: usize) -> Result<OverlapResult> {
    if k == 0 || k > supermodes.nrows() || target.len() != supermodes.ncols() {
        return Err(Error::DimensionMismatch(format!(
            "k = {k} of {} supermodes with a target of length {}",
            supermodes.nrows(),
            target.len()
        )));
    }
    let g: Vec<C64> = (0..k)
        .map(|r| supermodes.row(r).iter().zip(target).map(|(s, t)| s.conj() * t).sum())
        .collect();
    let a: Vec<f64> = g.iter().map(|z| z.re).collect();
    let b: Vec<f64> = g.iter().map(|z| z.im).collect();
    let dot = |x: &[f64], y: &[f64]| x.iter().zip(y).map(|(p, q)| p * q).sum::<f64>();
    let gram = Matrix2::new(dot(&a, &a), dot(&a, &b), dot(&a, &b), dot(&b, &b));
    let eig = SymmetricEigen::new(gram);
    let top = if eig.eigenvalues[0] >= eig.eigenvalues[1] { 0 } else { 1 };
    let lambda = eig.eigenvalues[top].max(0.0);
    let (x, y) = (eig.eigenvectors[(0, top)], eig.eigenvectors[(1, top)]);
    let mut c: Vec<f64> = a.iter().zip(&b).map(|(ai, bi)| x * ai + y * bi).collect();
    let norm = c.iter().map(|v| v * v).sum::<f64>().sqrt();
    if norm > 0.0 && lambda > 0.0 {
        c.iter_mut().for_each(|v| *v /= norm);
    } else {
        c = vec![0.0; k];
        c[0] = 1.0;
    }
    Ok(OverlapResult {
        k,
        coefficients: c,
        overlap: lambda.sqrt(),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScanPoint {
    pub leading_db: f64,
    pub gain_scale: f64,
    pub mean_variance: f64,
    pub variances: Vec<f64>,
    pub thetas: Vec<f64>,
}

/// Mean nullifier variance against leading-supermode squeezing for a fixed
/// pump shape, re-optimizing the node phases at every point.
pub fn squeezing_scan(
    set: &SupermodeSet,
    modes: &ModeMatrix,
    graph: &ClusterGraph,
    leading_db: &[f64],
    search: &PhaseSearch,
) -> Result<Vec<ScanPoint>> {
    leading_db
        .par_iter()
        .map(|&db| {
            let eta_t = calibrate_gain_scale(set, db)?;
            let cov = reduced_covariance(set, eta_t, modes.matrix())?;
            let opt = optimize_phases_reduced(&cov, graph, search)?;
            Ok(ScanPoint {
                leading_db: db,
                gain_scale: eta_t,
                mean_variance: opt.mean_variance,
                variances: opt.variances,
                thetas: opt.thetas,
            })
        })
        .collect()
}
