//! Frequency grid, reference Gaussian pump, chirp and the pulse-shaper model.

mod grid;
mod shaper;
pub mod spline;

use std::f64::consts::{LN_2, PI};

use serde::{Deserialize, Serialize};

use crate::dispersion::SPEED_OF_LIGHT;
use crate::{Error, Result, C64};

pub use grid::{build_grid, FrequencyGrid};
pub use shaper::{pump_power_weight, shaped_pump, transfer_function, ShaperConfig, TransferFunction};

/// Complex pump amplitude sampled on the pump axis of a [`FrequencyGrid`].
#[derive(Clone, Debug, PartialEq)]
pub struct PumpProfile {
    axis: Vec<f64>,
    amplitudes: Vec<C64>,
    center: f64,
    sigma_omega: f64,
}

impl PumpProfile {
    /// `center` is the carrier frequency used as chirp reference and
    /// `sigma_omega` the reference spectral width used to place shaper windows.
    pub fn from_samples(axis: Vec<f64>, amplitudes: Vec<C64>, center: f64, sigma_omega: f64) -> Result<Self> {
        if axis.len() != amplitudes.len() {
            return Err(Error::DimensionMismatch(format!(
                "pump axis has {} points but {} amplitudes were given",
                axis.len(),
                amplitudes.len()
            )));
        }
        if amplitudes.iter().any(|a| !a.re.is_finite() || !a.im.is_finite()) {
            return Err(Error::InvalidParameter("pump amplitudes must be finite".into()));
        }
        if !(sigma_omega > 0.0 && center > 0.0) {
            return Err(Error::InvalidParameter("pump center and width must be positive".into()));
        }
        Ok(Self {
            axis,
            amplitudes,
            center,
            sigma_omega,
        })
    }

    pub fn axis(&self) -> &[f64] {
        &self.axis
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn center(&self) -> f64 {
        self.center
    }

    pub fn sigma_omega(&self) -> f64 {
        self.sigma_omega
    }

    /// Discrete `sum |alpha|^2`.
    pub fn power(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn normalized(&self) -> Result<Self> {
        let norm = self.power().sqrt();
        if norm == 0.0 {
            return Err(Error::InvalidParameter("cannot normalize a zero pump".into()));
        }
        Ok(self.map(|_, a| a / norm))
    }

    /// Applies `f(omega, alpha)` sample by sample.
    pub fn map(&self, f: impl Fn(f64, C64) -> C64) -> Self {
        Self {
            amplitudes: self.axis.iter().zip(&self.amplitudes).map(|(&w, &a)| f(w, a)).collect(),
            ..self.clone()
        }
    }
}

/// Quadratic spectral phase (s^2) and the cubic coefficient reported by
/// phase fits (s^3).
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChirpSpec {
    pub phi2: f64,
    #[serde(default)]
    pub phi3: f64,
}

/// Intensity standard deviation in angular frequency for a Gaussian of
/// wavelength FWHM `delta_lambda` centred at `lambda0`.
pub fn sigma_omega_from_fwhm(lambda0: f64, delta_lambda: f64) -> f64 {
    let omega0 = 2.0 * PI * SPEED_OF_LIGHT / lambda0;
    omega0 * omega0 * delta_lambda / (4.0 * PI * SPEED_OF_LIGHT * (2.0 * LN_2).sqrt())
}

/// Temporal standard deviation `1 / (2 sigma_omega)` of a transform-limited pulse.
pub fn pulse_duration(sigma_omega: f64) -> f64 {
    0.5 / sigma_omega
}

/// Duration after a quadratic phase `phi2`.
pub fn chirped_duration(duration: f64, phi2: f64) -> f64 {
    let x = phi2 / (2.0 * duration * duration);
    duration * (1.0 + x * x).sqrt()
}

/// Transform-limited Gaussian `exp(-(w - w0)^2 / (4 sigma^2))` with unit
/// discrete norm.
pub fn gaussian_pump(grid: &FrequencyGrid, delta_lambda_fwhm: f64, lambda0: f64) -> Result<PumpProfile> {
    if !(delta_lambda_fwhm > 0.0 && lambda0 > 0.0) {
        return Err(Error::InvalidParameter(
            "pump FWHM and wavelength must be positive".into(),
        ));
    }
    let omega0 = 2.0 * PI * SPEED_OF_LIGHT / lambda0;
    gaussian_pump_with_width(grid, omega0, sigma_omega_from_fwhm(lambda0, delta_lambda_fwhm))
}

pub fn gaussian_pump_with_width(grid: &FrequencyGrid, omega0: f64, sigma_omega: f64) -> Result<PumpProfile> {
    if !(sigma_omega > 0.0 && sigma_omega.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "pump width must be positive, got {sigma_omega}"
        )));
    }
    let axis = grid.pump_axis();
    let amplitudes = axis
        .iter()
        .map(|w| {
            let x = (w - omega0) / sigma_omega;
            C64::new((-0.25 * x * x).exp(), 0.0)
        })
        .collect();
    PumpProfile::from_samples(axis, amplitudes, omega0, sigma_omega)?.normalized()
}

/// Multiplies by `exp(i phi2 (w - w0)^2 / 2)`.
pub fn apply_chirp(pump: &PumpProfile, phi2: f64) -> PumpProfile {
    if phi2 == 0.0 {
        return pump.clone();
    }
    let w0 = pump.center();
    pump.map(|w, a| a * C64::from_polar(1.0, 0.5 * phi2 * (w - w0) * (w - w0)))
}
