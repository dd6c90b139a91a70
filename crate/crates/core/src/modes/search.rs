use std::f64::consts::TAU;

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{check_permutation, mode_covariance, ClusterGraph, ModeMatrix, NullifierObjective};
use crate::gaussian_core::CovarianceMatrix;
use crate::Result;

/// Relative improvement below which a candidate does not replace the incumbent.
const IMPROVEMENT: f64 = 1e-12;

/// Deterministic multi-start search over node phases: an exhaustive coarse
/// grid, coordinate sweeps on a fine scan, then golden-section polishing.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PhaseSearch {
    pub coarse_points: usize,
    pub max_coarse_evaluations: usize,
    pub scan_points: usize,
    pub sweeps: usize,
    pub polish_rounds: usize,
}

impl Default for PhaseSearch {
    fn default() -> Self {
        Self {
            coarse_points: 12,
            max_coarse_evaluations: 100_000,
            scan_points: 720,
            sweeps: 2,
            polish_rounds: 3,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PhaseOptimum {
    pub thetas: Vec<f64>,
    pub mean_variance: f64,
    pub variances: Vec<f64>,
}

fn improves(candidate: f64, incumbent: f64) -> bool {
    candidate < incumbent - IMPROVEMENT * incumbent.abs()
}

/// Minimizes the mean nullifier variance over all node phases.
pub fn optimize_phases_reduced(
    node_covariance: &CovarianceMatrix,
    graph: &ClusterGraph,
    search: &PhaseSearch,
) -> Result<PhaseOptimum> {
    let objective = NullifierObjective::new(node_covariance, graph)?;
    let m = objective.len();
    let f = |t: &[f64]| objective.mean_variance(t);

    let mut best = vec![0.0; m];
    let mut best_value = f(&best);

    let per_axis = coarse_points_per_axis(search, m);
    if per_axis > 1 {
        let step = TAU / per_axis as f64;
        let mut index = vec![0usize; m];
        let mut theta = vec![0.0; m];
        'grid: loop {
            for (t, i) in theta.iter_mut().zip(&index) {
                *t = *i as f64 * step;
            }
            let v = f(&theta);
            if improves(v, best_value) {
                best_value = v;
                best.copy_from_slice(&theta);
            }
            for axis in (0..m).rev() {
                index[axis] += 1;
                if index[axis] < per_axis {
                    continue 'grid;
                }
                index[axis] = 0;
            }
            break;
        }
    }

    let scan = search.scan_points.max(1);
    let fine = TAU / scan as f64;
    let mut trial = best.clone();
    for _ in 0..search.sweeps {
        for j in 0..m {
            for i in 0..scan {
                trial[j] = i as f64 * fine;
                let v = f(&trial);
                if improves(v, best_value) {
                    best_value = v;
                    best[j] = trial[j];
                }
            }
            trial[j] = best[j];
        }
    }

    for _ in 0..search.polish_rounds {
        for j in 0..m {
            let (t, v) = golden_section(
                |x| {
                    trial[j] = x;
                    f(&trial)
                },
                best[j] - fine,
                best[j] + fine,
            );
            if improves(v, best_value) {
                best_value = v;
                best[j] = t;
            }
            trial[j] = best[j];
        }
    }

    let thetas: Vec<f64> = best.iter().map(|t| t.rem_euclid(TAU)).collect();
    Ok(PhaseOptimum {
        variances: objective.variances(&thetas),
        mean_variance: objective.mean_variance(&thetas),
        thetas,
    })
}

fn coarse_points_per_axis(search: &PhaseSearch, m: usize) -> usize {
    let mut p = search.coarse_points;
    while p > 1 && (p as f64).powi(m as i32) > search.max_coarse_evaluations as f64 {
        p -= 1;
    }
    p
}

fn golden_section(mut f: impl FnMut(f64) -> f64, mut a: f64, mut b: f64) -> (f64, f64) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..60 {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    if fc < fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

/// Phase optimization for detection modes `base` (node order) on the full
/// frequency covariance.
pub fn optimize_frexel_phases(
    gamma: &CovarianceMatrix,
    base: &ModeMatrix,
    graph: &ClusterGraph,
    search: &PhaseSearch,
) -> Result<PhaseOptimum> {
    optimize_phases_reduced(&mode_covariance(gamma, base)?, graph, search)
}

/// Covariance with node `j` carrying mode `perm[j]`.
pub fn permute_covariance(cov: &CovarianceMatrix, perm: &[usize]) -> Result<CovarianceMatrix> {
    let m = cov.modes();
    check_permutation(perm, m)?;
    let source = |i: usize| if i < m { perm[i] } else { m + perm[i - m] };
    let g = cov.matrix();
    CovarianceMatrix::new(DMatrix::from_fn(2 * m, 2 * m, |a, b| g[(source(a), source(b))]))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PermutationScore {
    /// Zero-based: node `j` carries mode `permutation[j]`.
    pub permutation: Vec<usize>,
    pub mean_variance: f64,
    pub thetas: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PermutationOptimum {
    pub best: PermutationScore,
    /// Every permutation in lexicographic order.
    pub ranking: Vec<PermutationScore>,
}

/// Exhaustive search over assignments of `modes` (band order) to graph nodes,
/// each with its own phase optimization. Ties go to the lexicographically
/// smallest permutation.
pub fn optimize_frexel_permutation(
    gamma: &CovarianceMatrix,
    modes: &ModeMatrix,
    graph: &ClusterGraph,
    search: &PhaseSearch,
) -> Result<PermutationOptimum> {
    optimize_permutation_reduced(&mode_covariance(gamma, modes)?, graph, search)
}

pub fn optimize_permutation_reduced(
    mode_cov: &CovarianceMatrix,
    graph: &ClusterGraph,
    search: &PhaseSearch,
) -> Result<PermutationOptimum> {
    let perms = permutations(mode_cov.modes());
    let ranking = perms
        .into_par_iter()
        .map(|perm| {
            let opt = optimize_phases_reduced(&permute_covariance(mode_cov, &perm)?, graph, search)?;
            Ok(PermutationScore {
                permutation: perm,
                mean_variance: opt.mean_variance,
                thetas: opt.thetas,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let mut best = &ranking[0];
    for score in &ranking[1..] {
        if improves(score.mean_variance, best.mean_variance) {
            best = score;
        }
    }
    Ok(PermutationOptimum {
        best: best.clone(),
        ranking,
    })
}

/// All permutations of `0..m` in lexicographic order.
pub fn permutations(m: usize) -> Vec<Vec<usize>> {
    let mut current: Vec<usize> = (0..m).collect();
    let mut out = vec![current.clone()];
    loop {
        let Some(i) = (1..m).rev().find(|&i| current[i - 1] < current[i]) else {
            return out;
        };
        let j = (i..m)
            .rev()
            .find(|&j| current[j] > current[i - 1])
            .expect("pivot exists");
        current.swap(i - 1, j);
        current[i..].reverse();
        out.push(current.clone());
    }
}
