use serde::{Deserialize, Serialize};

use super::spline::NaturalSpline;
use super::PumpProfile;
use crate::{Error, Result, C64};

/// Programmable amplitude/phase mask. `params` holds the amplitude controls
/// followed by the phase controls, one of each per control frequency.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ShaperConfig {
    pub n_control: usize,
    pub window_halfwidth_sigmas: f64,
    pub params: Vec<f64>,
}

impl ShaperConfig {
    pub const DEFAULT_CONTROLS: usize = 32;

    pub fn new(n_control: usize, window_halfwidth_sigmas: f64, params: Vec<f64>) -> Result<Self> {
        let shaper = Self {
            n_control,
            window_halfwidth_sigmas,
            params,
        };
        shaper.validate()?;
        Ok(shaper)
    }

    /// Unit amplitude and zero phase everywhere.
    pub fn identity(n_control: usize, window_halfwidth_sigmas: f64) -> Self {
        let mut params = vec![1.0; n_control];
        params.extend(std::iter::repeat_n(0.0, n_control));
        Self {
            n_control,
            window_halfwidth_sigmas,
            params,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_control < 2 {
            return Err(Error::InvalidParameter(format!(
                "shaper needs at least 2 controls, got {}",
                self.n_control
            )));
        }
        if !(self.window_halfwidth_sigmas > 0.0 && self.window_halfwidth_sigmas.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "shaper window must be positive, got {}",
                self.window_halfwidth_sigmas
            )));
        }
        if self.params.len() != 2 * self.n_control {
            return Err(Error::DimensionMismatch(format!(
                "shaper with {} controls needs {} parameters, got {}",
                self.n_control,
                2 * self.n_control,
                self.params.len()
            )));
        }
        if self.params.iter().any(|p| !p.is_finite()) {
            return Err(Error::InvalidParameter("shaper parameters must be finite".into()));
        }
        if self.amplitudes().iter().any(|&a| a < 0.0) {
            return Err(Error::InvalidParameter("shaper amplitudes must be non-negative".into()));
        }
        Ok(())
    }

    pub fn amplitudes(&self) -> &[f64] {
        &self.params[..self.n_control]
    }

    pub fn phases(&self) -> &[f64] {
        &self.params[self.n_control..]
    }

    /// Control frequencies, uniform over `center +/- window * sigma`.
    pub fn control_frequencies(&self, center: f64, sigma_omega: f64) -> Vec<f64> {
        let half = self.window_halfwidth_sigmas * sigma_omega;
        let step = 2.0 * half / (self.n_control - 1) as f64;
        (0..self.n_control).map(|i| center - half + i as f64 * step).collect()
    }
}

/// Interpolated transfer function `I(w) = A(w) exp(i P(w))`.
#[derive(Clone, Debug, PartialEq)]
pub struct TransferFunction {
    amplitude: NaturalSpline,
    phase: NaturalSpline,
}

impl TransferFunction {
    pub fn new(shaper: &ShaperConfig, center: f64, sigma_omega: f64) -> Result<Self> {
        shaper.validate()?;
        let half = shaper.window_halfwidth_sigmas * sigma_omega;
        let step = 2.0 * half / (shaper.n_control - 1) as f64;
        let x0 = center - half;
        Ok(Self {
            amplitude: NaturalSpline::new(x0, step, shaper.amplitudes()),
            phase: NaturalSpline::new(x0, step, shaper.phases()),
        })
    }

    pub fn eval(&self, omega: f64) -> C64 {
        C64::from_polar(1.0, self.phase.eval(omega)) * self.amplitude.eval(omega)
    }
}

/// Transfer function sampled on the pump axis of `base`.
pub fn transfer_function(shaper: &ShaperConfig, base: &PumpProfile) -> Result<Vec<C64>> {
    let tf = TransferFunction::new(shaper, base.center(), base.sigma_omega())?;
    Ok(base.axis().iter().map(|&w| tf.eval(w)).collect())
}

/// `alpha_u = alpha_base * I_u`, deliberately not renormalized.
pub fn shaped_pump(base: &PumpProfile, shaper: &ShaperConfig) -> Result<PumpProfile> {
    let transfer = transfer_function(shaper, base)?;
    let amplitudes = base.amplitudes().iter().zip(&transfer).map(|(a, t)| a * t).collect();
    PumpProfile::from_samples(base.axis().to_vec(), amplitudes, base.center(), base.sigma_omega())
}

/// Transmitted power relative to `base`, after rescaling the transfer
/// function so that its peak magnitude is one.
pub fn pump_power_weight(shaper: &ShaperConfig, base: &PumpProfile) -> Result<f64> {
    let transfer = transfer_function(shaper, base)?;
    let peak = transfer.iter().map(|t| t.norm()).fold(0.0, f64::max);
    if peak == 0.0 {
        return Err(Error::DegenerateShaper);
    }
    let base_power = base.power();
    if base_power == 0.0 {
        return Err(Error::InvalidParameter("base pump carries no power".into()));
    }
    let shaped: f64 = base
        .amplitudes()
        .iter()
        .zip(&transfer)
        .map(|(a, t)| (a * t).norm_sqr())
        .sum();
    Ok(shaped / (peak * peak) / base_power)
}
