//! Derivative-free optimization of pulse-shaper settings.

mod evolve;
mod fitness;
mod problem;

pub use evolve::{evolve, Bounds, Direction, EvoConfig, EvoResult, Generation, MAX_RESAMPLES};
pub use fitness::{
    fitness_flatten, fitness_flatten_bar, fitness_gap, fitness_gap_bar, fitness_nullifier, fitness_nullifier_bar,
    FitnessKind, FitnessSpec, PenaltyShape,
};
pub use problem::{NullifierTarget, ShapingEvaluation, ShapingProblem, MAX_AMPLITUDE};
