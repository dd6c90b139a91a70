use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::Direction;
use crate::pump::{pump_power_weight, PumpProfile, ShaperConfig};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FitnessKind {
    FlattenF1,
    FlattenF1Bar,
    GapF2,
    GapF2Bar,
    NullifierF3,
    NullifierF3Bar,
    Custom,
}

impl FitnessKind {
    pub fn direction(self) -> Direction {
        match self {
            FitnessKind::NullifierF3 | FitnessKind::NullifierF3Bar => Direction::Minimize,
            _ => Direction::Maximize,
        }
    }

    pub fn needs_nullifiers(self) -> bool {
        matches!(self, FitnessKind::NullifierF3 | FitnessKind::NullifierF3Bar)
    }
}

/// Power penalty as a function of the transmitted weight `w`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "snake_case", deny_unknown_fields)]
pub enum PenaltyShape {
    /// `1 / (scale w)^power`.
    InversePower {
        scale: f64,
        power: i32,
    },
    Zero,
}

impl Default for PenaltyShape {
    fn default() -> Self {
        PenaltyShape::InversePower { scale: 5.0, power: 6 }
    }
}

impl PenaltyShape {
    pub fn eval(&self, w: f64) -> f64 {
        match *self {
            PenaltyShape::InversePower { scale, power } => 1.0 / (scale * w).powi(power),
            PenaltyShape::Zero => 0.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FitnessSpec {
    pub kind: FitnessKind,
    #[serde(default = "default_a")]
    pub a: f64,
    #[serde(default = "default_b")]
    pub b: f64,
    #[serde(default = "default_h")]
    pub h: f64,
    #[serde(default)]
    pub x: PenaltyShape,
    #[serde(default)]
    pub y: PenaltyShape,
    #[serde(default = "default_k")]
    pub k: usize,
}

fn default_a() -> f64 {
    3.0
}
fn default_b() -> f64 {
    1.0
}
fn default_h() -> f64 {
    1.35
}
fn default_k() -> usize {
    100
}

impl FitnessSpec {
    pub fn new(kind: FitnessKind) -> Self {
        Self {
            kind,
            a: default_a(),
            b: default_b(),
            h: default_h(),
            x: PenaltyShape::default(),
            y: PenaltyShape::default(),
            k: default_k(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("a", self.a), ("b", self.b), ("h", self.h)] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::InvalidParameter(format!(
                    "penalty {name} must be finite and non-negative"
                )));
            }
        }
        if self.k == 0 {
            return Err(Error::InvalidParameter("flatten count k must be positive".into()));
        }
        Ok(())
    }
}

/// `sum_{j <= k} Lambda_j / Lambda_1`.
pub fn fitness_flatten(gains: &[f64], k: usize) -> Result<f64> {
    let leading = leading_gain(gains)?;
    if k == 0 || k > gains.len() {
        return Err(Error::InvalidParameter(format!("k = {k} with {} gains", gains.len())));
    }
    Ok(gains[..k].iter().sum::<f64>() / leading)
}

/// `f1 - a x(w)`.
pub fn fitness_flatten_bar(
    gains: &[f64],
    k: usize,
    shaper: &ShaperConfig,
    base: &PumpProfile,
    a: f64,
    x: &PenaltyShape,
) -> Result<f64> {
    let w = pump_power_weight(shaper, base)?;
    Ok(fitness_flatten(gains, k)? - a * x.eval(w))
}

/// `Lambda_1 / Lambda_2`.
pub fn fitness_gap(gains: &[f64]) -> Result<f64> {
    let leading = leading_gain(gains)?;
    match gains.get(1) {
        Some(&second) if second > 0.0 => Ok(leading / second),
        _ => Err(Error::InvalidParameter(
            "second gain is zero; the gap is infinite".into(),
        )),
    }
}

/// `f2 - b y(w)`.
pub fn fitness_gap_bar(
    gains: &[f64],
    shaper: &ShaperConfig,
    base: &PumpProfile,
    b: f64,
    y: &PenaltyShape,
) -> Result<f64> {
    let w = pump_power_weight(shaper, base)?;
    Ok(fitness_gap(gains)? - b * y.eval(w))
}

/// Trace of the nullifier covariance block.
pub fn fitness_nullifier(nullifier_block: &DMatrix<f64>) -> f64 {
    nullifier_block.trace()
}

/// `Tr - h w`.
pub fn fitness_nullifier_bar(
    nullifier_block: &DMatrix<f64>,
    shaper: &ShaperConfig,
    base: &PumpProfile,
    h: f64,
) -> Result<f64> {
    Ok(fitness_nullifier(nullifier_block) - h * pump_power_weight(shaper, base)?)
}

fn leading_gain(gains: &[f64]) -> Result<f64> {
    match gains.first() {
        Some(&g) if g > 0.0 => Ok(g),
        _ => Err(Error::NoParametricGain),
    }
}
