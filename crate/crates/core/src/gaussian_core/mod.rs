//! Takagi supermodes, symplectic propagator, covariance matrices and gain
//! calibration.

mod propagator;
mod takagi;

use std::f64::consts::LN_10;

pub use propagator::{
    build_propagator, covariance_from_propagator, covariance_from_supermodes, reduced_covariance, CovarianceMatrix,
    SymplecticPropagator,
};
pub use takagi::{phase_normalize_supermodes, takagi_factorize, SupermodeSet};

use crate::{Error, Result};

/// Quadrature variance of the vacuum.
pub const SHOT_NOISE: f64 = 0.5;

/// Gain scale `eta t` putting the leading supermode at `target_db` of squeezing.
pub fn calibrate_gain_scale(set: &SupermodeSet, target_db: f64) -> Result<f64> {
    calibrate_from_leading_gain(set.gains().first().copied().unwrap_or(0.0), target_db)
}

pub fn calibrate_from_leading_gain(leading_gain: f64, target_db: f64) -> Result<f64> {
    if !target_db.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "target squeezing must be finite, got {target_db}"
        )));
    }
    if !(leading_gain > 0.0) {
        return Err(Error::NoParametricGain);
    }
    Ok(target_db * LN_10 / (20.0 * leading_gain))
}

/// `-10 log10(variance / 0.5)`; positive below shot noise.
pub fn squeezing_db(variance: f64) -> Result<f64> {
    if !(variance > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "variance must be positive, got {variance}"
        )));
    }
    Ok(-10.0 * (variance / SHOT_NOISE).log10())
}
