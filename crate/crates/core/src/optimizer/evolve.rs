use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Resamples allowed per mutant when the objective is not finite.
pub const MAX_RESAMPLES: usize = 10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Maximize,
    Minimize,
}

impl Direction {
    /// True when `a` is strictly better than `b`.
    pub fn better(self, a: f64, b: f64) -> bool {
        match self {
            Direction::Maximize => a > b,
            Direction::Minimize => a < b,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvoConfig {
    pub dimension: usize,
    pub population: usize,
    pub parents: usize,
    pub initial_step: f64,
    pub max_generations: usize,
    pub seed: u64,
    /// Weight of the previous mean in the new mean.
    pub history_blend: f64,
}

impl EvoConfig {
    pub const DEFAULT_HISTORY_BLEND: f64 = 0.3;

    /// Population `4 + floor(3 ln n)`, half of it selected.
    pub fn new(dimension: usize, initial_step: f64, max_generations: usize, seed: u64) -> Self {
        let population = Self::default_population(dimension);
        Self {
            dimension,
            population,
            parents: population / 2,
            initial_step,
            max_generations,
            seed,
            history_blend: Self::DEFAULT_HISTORY_BLEND,
        }
    }

    pub fn default_population(dimension: usize) -> usize {
        4 + (3.0 * (dimension.max(1) as f64).ln()).floor() as usize
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        if self.dimension == 0 {
            return bad("dimension must be positive".into());
        }
        if self.population < 2 || self.parents == 0 || self.parents > self.population {
            return bad(format!(
                "need 1 <= parents ({}) <= population ({}) and population >= 2",
                self.parents, self.population
            ));
        }
        if !(self.initial_step > 0.0 && self.initial_step.is_finite()) {
            return bad(format!("initial step must be positive, got {}", self.initial_step));
        }
        if self.max_generations == 0 {
            return bad("max_generations must be at least 1".into());
        }
        if !(0.0..1.0).contains(&self.history_blend) {
            return bad(format!("history blend must lie in [0, 1), got {}", self.history_blend));
        }
        Ok(())
    }
}

/// Box constraints; infinite entries leave a coordinate free.
#[derive(Clone, Debug, PartialEq)]
pub struct Bounds {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl Bounds {
    pub fn unbounded(dimension: usize) -> Self {
        Self {
            lower: vec![f64::NEG_INFINITY; dimension],
            upper: vec![f64::INFINITY; dimension],
        }
    }

    fn clip(&self, x: &mut DVector<f64>) {
        for (i, xi) in x.iter_mut().enumerate() {
            *xi = xi.clamp(self.lower[i], self.upper[i]);
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Generation {
    pub index: usize,
    /// Best value seen so far, monotone in the optimization direction.
    pub best: f64,
    pub generation_best: f64,
    pub mean: f64,
    /// Step size used to sample this generation.
    pub step_size: f64,
    pub values: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EvoResult {
    pub best_point: Vec<f64>,
    pub best_value: f64,
    pub history: Vec<Generation>,
    pub evaluations: usize,
}

struct Mutant {
    step: DVector<f64>,
    point: DVector<f64>,
    value: f64,
    evaluations: usize,
}

/// Evolution strategy with rank-based recombination, covariance adaptation
/// and cumulative step-size control. The new mean blends the recombined
/// parents with the previous mean. Every mutant draws from its own seeded
/// stream, so results do not depend on evaluation order or thread count.
pub fn evolve<F>(
    objective: F,
    config: &EvoConfig,
    direction: Direction,
    start: &[f64],
    bounds: &Bounds,
) -> Result<EvoResult>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    config.validate()?;
    let n = config.dimension;
    if start.len() != n || bounds.lower.len() != n || bounds.upper.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "dimension {n}, start {}, bounds {}/{}",
            start.len(),
            bounds.lower.len(),
            bounds.upper.len()
        )));
    }
    let lambda = config.population;
    let mu = config.parents;
    let nf = n as f64;

    let raw: Vec<f64> = (1..=mu)
        .map(|i| ((mu as f64 + 1.0).ln() - (i as f64).ln()).max(0.0))
        .collect();
    let total: f64 = raw.iter().sum();
    let weights: Vec<f64> = raw.iter().map(|w| w / total).collect();
    let mu_eff = 1.0 / weights.iter().map(|w| w * w).sum::<f64>();

    let c_sigma = (mu_eff + 2.0) / (nf + mu_eff + 5.0);
    let d_sigma = 1.0 + 2.0 * (((mu_eff - 1.0) / (nf + 1.0)).sqrt() - 1.0).max(0.0) + c_sigma;
    let c_c = (4.0 + mu_eff / nf) / (nf + 4.0 + 2.0 * mu_eff / nf);
    let c_1 = 2.0 / ((nf + 1.3).powi(2) + mu_eff);
    let c_mu = (1.0 - c_1).min(2.0 * (mu_eff - 2.0 + 1.0 / mu_eff) / ((nf + 2.0).powi(2) + mu_eff));
    let chi_n = nf.sqrt() * (1.0 - 1.0 / (4.0 * nf) + 1.0 / (21.0 * nf * nf));
    let blend = config.history_blend;

    let mut mean = DVector::from_column_slice(start);
    bounds.clip(&mut mean);
    let mut sigma = config.initial_step;
    let mut cov = DMatrix::<f64>::identity(n, n);
    let mut p_sigma = DVector::<f64>::zeros(n);
    let mut p_c = DVector::<f64>::zeros(n);

    let mut best_point = mean.as_slice().to_vec();
    let mut best_value = f64::NAN;
    let mut history = Vec::with_capacity(config.max_generations);
    let mut evaluations = 0;

    for generation in 0..config.max_generations {
        let eig = SymmetricEigen::new(cov.clone());
        let axes = eig.eigenvectors;
        let scales = eig.eigenvalues.map(|e| e.max(1e-300).sqrt());
        let transform = &axes * DMatrix::from_diagonal(&scales);

        let mutants = (0..lambda)
            .into_par_iter()
            .map(|i| {
                let mut rng = ChaCha20Rng::seed_from_u64(config.seed);
                rng.set_stream(((generation as u64) << 32) | i as u64);
                for attempt in 0..=MAX_RESAMPLES {
                    let z = DVector::from_fn(n, |_, _| StandardNormal.sample(&mut rng));
                    let mut point = &mean + (&transform * z) * sigma;
                    bounds.clip(&mut point);
                    let value = objective(point.as_slice());
                    if value.is_finite() {
                        return Ok(Mutant {
                            step: (&point - &mean) / sigma,
                            point,
                            value,
                            evaluations: attempt + 1,
                        });
                    }
                }
                Err(Error::NonFiniteObjective(MAX_RESAMPLES))
            })
            .collect::<Result<Vec<_>>>()?;
        evaluations += mutants.iter().map(|m| m.evaluations).sum::<usize>();

        let mut order: Vec<usize> = (0..lambda).collect();
        order.sort_by(|&a, &b| {
            let (va, vb) = (mutants[a].value, mutants[b].value);
            match direction {
                Direction::Maximize => vb.total_cmp(&va),
                Direction::Minimize => va.total_cmp(&vb),
            }
        });
        let leader = &mutants[order[0]];
        if best_value.is_nan() || direction.better(leader.value, best_value) {
            best_value = leader.value;
            best_point = leader.point.as_slice().to_vec();
        }
        let values: Vec<f64> = mutants.iter().map(|m| m.value).collect();
        history.push(Generation {
            index: generation,
            best: best_value,
            generation_best: leader.value,
            mean: values.iter().sum::<f64>() / lambda as f64,
            step_size: sigma,
            values,
        });

        let mut y_w = DVector::<f64>::zeros(n);
        for (w, &idx) in weights.iter().zip(&order) {
            y_w += &mutants[idx].step * *w;
        }
        let recombined = &mean + &y_w * sigma;
        let new_mean = &recombined * (1.0 - blend) + &mean * blend;
        let shift = (&new_mean - &mean) / sigma;

        let inv_sqrt = &axes * DMatrix::from_diagonal(&scales.map(|s| 1.0 / s)) * axes.transpose();
        p_sigma = &p_sigma * (1.0 - c_sigma) + (&inv_sqrt * &shift) * (c_sigma * (2.0 - c_sigma) * mu_eff).sqrt();
        let norm_ps = p_sigma.norm();
        let decay = 1.0 - (1.0 - c_sigma).powi(2 * (generation as i32 + 1));
        let h_sigma = if norm_ps / decay.sqrt() < (1.4 + 2.0 / (nf + 1.0)) * chi_n {
            1.0
        } else {
            0.0
        };
        p_c = &p_c * (1.0 - c_c) + &shift * (h_sigma * (c_c * (2.0 - c_c) * mu_eff).sqrt());

        let mut rank_mu = DMatrix::<f64>::zeros(n, n);
        for (w, &idx) in weights.iter().zip(&order) {
            let y = &mutants[idx].step;
            rank_mu += (y * y.transpose()) * *w;
        }
        let correction = (1.0 - h_sigma) * c_c * (2.0 - c_c);
        cov = &cov * (1.0 - c_1 - c_mu + c_1 * correction) + (&p_c * p_c.transpose()) * c_1 + rank_mu * c_mu;
        cov = (&cov + cov.transpose()) * 0.5;

        sigma *= ((c_sigma / d_sigma) * (norm_ps / chi_n - 1.0)).exp();
        mean = new_mean;
    }

    Ok(EvoResult {
        best_point,
        best_value,
        history,
        evaluations,
    })
}
