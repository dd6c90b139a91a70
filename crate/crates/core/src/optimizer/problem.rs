use serde::Serialize;

use super::fitness::{fitness_flatten, fitness_flatten_bar, fitness_gap, fitness_gap_bar, FitnessKind, FitnessSpec};
use super::{Bounds, Direction};
use crate::gaussian_core::{calibrate_gain_scale, reduced_covariance, takagi_factorize};
use crate::jsa::PhaseMatching;
use crate::linalg::gram_singular_values;
use crate::modes::{optimize_phases_reduced, ClusterGraph, ModeMatrix, PhaseOptimum, PhaseSearch};
use crate::pump::{pump_power_weight, shaped_pump, PumpProfile, ShaperConfig};
use crate::{Error, Result};

/// Upper bound of the shaper amplitude controls during optimization.
pub const MAX_AMPLITUDE: f64 = 2.0;

/// Detection modes and graph whose nullifiers the nullifier fitnesses score.
#[derive(Clone, Debug)]
pub struct NullifierTarget {
    /// Node-ordered detection modes (permutation already applied).
    pub modes: ModeMatrix,
    pub graph: ClusterGraph,
    /// Leading-supermode squeezing every candidate pump is calibrated to.
    pub target_db: f64,
    pub search: PhaseSearch,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ShapingEvaluation {
    pub fitness: f64,
    pub weight: f64,
    pub gains: Vec<f64>,
    pub gain_scale: Option<f64>,
    pub nullifiers: Option<PhaseOptimum>,
}

/// Maps shaper parameters to a fitness value for a fixed crystal, grid and
/// reference pump.
#[derive(Clone, Debug)]
pub struct ShapingProblem {
    base: PumpProfile,
    phase_matching: PhaseMatching,
    n_control: usize,
    window_halfwidth_sigmas: f64,
    fitness: FitnessSpec,
    nullifier: Option<NullifierTarget>,
}

impl ShapingProblem {
    pub fn new(
        base: PumpProfile,
        phase_matching: PhaseMatching,
        n_control: usize,
        window_halfwidth_sigmas: f64,
        fitness: FitnessSpec,
        nullifier: Option<NullifierTarget>,
    ) -> Result<Self> {
        fitness.validate()?;
        ShaperConfig::identity(n_control, window_halfwidth_sigmas).validate()?;
        if fitness.kind == FitnessKind::Custom {
            return Err(Error::Config("custom fitness has no built-in evaluation".into()));
        }
        if fitness.kind.needs_nullifiers() && nullifier.is_none() {
            return Err(Error::Config(
                "nullifier fitness needs detection modes and a graph".into(),
            ));
        }
        if let Some(target) = &nullifier {
            if target.modes.frequencies() != phase_matching.len() || target.graph.len() != target.modes.len() {
                return Err(Error::DimensionMismatch(
                    "nullifier target does not fit the grid".into(),
                ));
            }
        }
        if matches!(fitness.kind, FitnessKind::FlattenF1 | FitnessKind::FlattenF1Bar)
            && fitness.k > phase_matching.len()
        {
            return Err(Error::InvalidParameter(format!(
                "k = {} exceeds the {} grid points",
                fitness.k,
                phase_matching.len()
            )));
        }
        Ok(Self {
            base,
            phase_matching,
            n_control,
            window_halfwidth_sigmas,
            fitness,
            nullifier,
        })
    }

    pub fn dimension(&self) -> usize {
        2 * self.n_control
    }

    pub fn direction(&self) -> Direction {
        self.fitness.kind.direction()
    }

    pub fn fitness_spec(&self) -> &FitnessSpec {
        &self.fitness
    }

    pub fn base(&self) -> &PumpProfile {
        &self.base
    }

    pub fn identity(&self) -> Vec<f64> {
        ShaperConfig::identity(self.n_control, self.window_halfwidth_sigmas).params
    }

    /// Amplitudes in `[0, MAX_AMPLITUDE]`, phases free.
    pub fn bounds(&self) -> Bounds {
        let n = self.n_control;
        let mut lower = vec![0.0; n];
        lower.extend(std::iter::repeat_n(f64::NEG_INFINITY, n));
        let mut upper = vec![MAX_AMPLITUDE; n];
        upper.extend(std::iter::repeat_n(f64::INFINITY, n));
        Bounds { lower, upper }
    }

    pub fn shaper(&self, params: &[f64]) -> Result<ShaperConfig> {
        ShaperConfig::new(self.n_control, self.window_halfwidth_sigmas, params.to_vec())
    }

    pub fn evaluate(&self, params: &[f64]) -> Result<ShapingEvaluation> {
        let shaper = self.shaper(params)?;
        let weight = pump_power_weight(&shaper, &self.base)?;
        let pump = shaped_pump(&self.base, &shaper)?;
        let l = self.phase_matching.jsa(&pump)?;
        let spec = &self.fitness;

        if let Some(target) = self.nullifier.as_ref().filter(|_| spec.kind.needs_nullifiers()) {
            let set = takagi_factorize(l.matrix())?;
            let eta_t = calibrate_gain_scale(&set, target.target_db)?;
            let cov = reduced_covariance(&set, eta_t, target.modes.matrix())?;
            let opt = optimize_phases_reduced(&cov, &target.graph, &target.search)?;
            let trace: f64 = opt.variances.iter().sum();
            let fitness = match spec.kind {
                FitnessKind::NullifierF3Bar => trace - spec.h * weight,
                _ => trace,
            };
            return Ok(ShapingEvaluation {
                fitness,
                weight,
                gains: set.gains().to_vec(),
                gain_scale: Some(eta_t),
                nullifiers: Some(opt),
            });
        }

        let gains = gram_singular_values(l.matrix())?;
        let fitness = match spec.kind {
            FitnessKind::FlattenF1 => fitness_flatten(&gains, spec.k)?,
            FitnessKind::FlattenF1Bar => fitness_flatten_bar(&gains, spec.k, &shaper, &self.base, spec.a, &spec.x)?,
            FitnessKind::GapF2 => fitness_gap(&gains)?,
            FitnessKind::GapF2Bar => fitness_gap_bar(&gains, &shaper, &self.base, spec.b, &spec.y)?,
            other => return Err(Error::Config(format!("{other:?} cannot be evaluated here"))),
        };
        Ok(ShapingEvaluation {
            fitness,
            weight,
            gains,
            gain_scale: None,
            nullifiers: None,
        })
    }

    /// Fitness value, NaN where the parameters are infeasible.
    pub fn objective(&self, params: &[f64]) -> f64 {
        self.evaluate(params).map(|e| e.fitness).unwrap_or(f64::NAN)
    }
}
