//! BiBO dispersion: Sellmeier indices, the type-I phase-matching angle and the
//! phase mismatch entering the joint spectral matrix.
//!
//! Wavelengths passed to the Sellmeier functions are in micrometres; every
//! other length is in metres and every frequency is an angular frequency in
//! rad/s.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Vacuum speed of light in m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Wavelength range (um) over which the Sellmeier fit is trusted.
pub const SELLMEIER_WINDOW_UM: (f64, f64) = (0.3, 1.1);

/// Bisection stops once the angle bracket is narrower than this (rad).
pub const ANGLE_TOLERANCE: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    X,
    Y,
    Z,
}

/// `n^2 = A + B / (lambda^2 - C) - D lambda^2` for one principal axis.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AxisCoefficients {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl AxisCoefficients {
    pub const fn new(a: f64, b: f64, c: f64, d: f64) -> Self {
        Self { a, b, c, d }
    }

    fn validate(&self, name: &str) -> Result<()> {
        let all = [self.a, self.b, self.c, self.d];
        if all.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "Sellmeier coefficients of axis {name} must be finite"
            )));
        }
        if self.a <= 0.0 || self.b < 0.0 || self.c < 0.0 || self.d < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "Sellmeier coefficients of axis {name} need A > 0 and B, C, D >= 0"
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SellmeierCoefficients {
    pub x: AxisCoefficients,
    pub y: AxisCoefficients,
    pub z: AxisCoefficients,
}

impl SellmeierCoefficients {
    pub fn new(x: AxisCoefficients, y: AxisCoefficients, z: AxisCoefficients) -> Result<Self> {
        let coeffs = Self { x, y, z };
        coeffs.validate()?;
        Ok(coeffs)
    }

    /// Bismuth triborate.
    pub const fn bibo() -> Self {
        Self {
            x: AxisCoefficients::new(3.07403, 0.03231, 0.03163, 0.013376),
            y: AxisCoefficients::new(3.16940, 0.03717, 0.03483, 0.01827),
            z: AxisCoefficients::new(3.6545, 0.05112, 0.03713, 0.02261),
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.x.validate("x")?;
        self.y.validate("y")?;
        self.z.validate("z")
    }

    pub fn axis(&self, axis: Axis) -> &AxisCoefficients {
        match axis {
            Axis::X => &self.x,
            Axis::Y => &self.y,
            Axis::Z => &self.z,
        }
    }
}

impl Default for SellmeierCoefficients {
    fn default() -> Self {
        Self::bibo()
    }
}

/// Principal refractive index along `axis` at `lambda_um` micrometres.
pub fn sellmeier_index(axis: Axis, lambda_um: f64, coeffs: &SellmeierCoefficients) -> Result<f64> {
    let (min, max) = SELLMEIER_WINDOW_UM;
    if !(min..=max).contains(&lambda_um) {
        return Err(Error::WavelengthOutOfRange { lambda_um, min, max });
    }
    let k = coeffs.axis(axis);
    let l2 = lambda_um * lambda_um;
    if l2 <= k.c {
        return Err(Error::SellmeierPole { lambda_um });
    }
    let n2 = k.a + k.b / (l2 - k.c) - k.d * l2;
    if n2 <= 0.0 || n2.is_nan() {
        return Err(Error::NegativeRadicand { lambda_um });
    }
    Ok(n2.sqrt())
}

/// Extraordinary index in the y-z plane at polar angle `theta`.
pub fn extraordinary_index(lambda_um: f64, theta: f64, coeffs: &SellmeierCoefficients) -> Result<f64> {
    let ny = sellmeier_index(Axis::Y, lambda_um, coeffs)?;
    let nz = sellmeier_index(Axis::Z, lambda_um, coeffs)?;
    let (s, c) = theta.sin_cos();
    Ok(1.0 / (c * c / (ny * ny) + s * s / (nz * nz)).sqrt())
}

/// Angle in (pi/2, pi) at which the degenerate signal at twice the pump
/// wavelength is phase matched to the x-polarized pump.
///
/// Bisection to [`ANGLE_TOLERANCE`]. If the residual vanishes at both ends of
/// the bracket every angle is a root and the midpoint is returned.
pub fn solve_phase_matching_angle(pump_wavelength: f64, coeffs: &SellmeierCoefficients) -> Result<f64> {
    let not_matchable = |e: Error| Error::NotPhaseMatchable(format!("pump at {pump_wavelength} m: {e}"));
    if !(pump_wavelength > 0.0 && pump_wavelength.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "pump wavelength must be positive, got {pump_wavelength}"
        )));
    }
    let lp = pump_wavelength * 1e6;
    let n_pump = sellmeier_index(Axis::X, lp, coeffs).map_err(not_matchable)?;
    let residual = |theta: f64| {
        extraordinary_index(2.0 * lp, theta, coeffs)
            .map(|ne| ne - n_pump)
            .map_err(not_matchable)
    };

    let (mut lo, mut hi) = (FRAC_PI_2, PI);
    let mut f_lo = residual(lo)?;
    let f_hi = residual(hi)?;
    if f_lo == 0.0 && f_hi == 0.0 {
        return Ok(0.5 * (lo + hi));
    }
    if f_lo * f_hi > 0.0 {
        return Err(Error::NotPhaseMatchable(format!(
            "no sign change of n_e(2 lambda_p) - n_x(lambda_p) on (pi/2, pi) for lambda_p = {pump_wavelength} m"
        )));
    }
    while hi - lo > ANGLE_TOLERANCE {
        let mid = 0.5 * (lo + hi);
        let f_mid = residual(mid)?;
        if f_mid == 0.0 {
            return Ok(mid);
        }
        if (f_mid > 0.0) == (f_lo > 0.0) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CrystalConfig {
    /// Crystal length in metres.
    pub length: f64,
    /// Polar angle of the optical axis in radians.
    pub theta: f64,
    /// Azimuthal angle, fixed to pi/2 for the y-z plane cut.
    pub phi: f64,
    /// Pump central wavelength in metres.
    pub pump_central_wavelength: f64,
}

impl CrystalConfig {
    pub fn new(length: f64, theta: f64, pump_central_wavelength: f64) -> Result<Self> {
        let crystal = Self {
            length,
            theta,
            phi: FRAC_PI_2,
            pump_central_wavelength,
        };
        crystal.validate()?;
        Ok(crystal)
    }

    /// Crystal cut at the solved phase-matching angle.
    pub fn phase_matched(length: f64, pump_central_wavelength: f64, coeffs: &SellmeierCoefficients) -> Result<Self> {
        let theta = solve_phase_matching_angle(pump_central_wavelength, coeffs)?;
        Self::new(length, theta, pump_central_wavelength)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.length > 0.0 && self.length.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "crystal length must be positive, got {}",
                self.length
            )));
        }
        if !(0.0..=PI).contains(&self.theta) {
            return Err(Error::InvalidParameter(format!(
                "theta must lie in [0, pi], got {}",
                self.theta
            )));
        }
        if !(self.pump_central_wavelength > 0.0 && self.pump_central_wavelength.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "pump wavelength must be positive, got {}",
                self.pump_central_wavelength
            )));
        }
        Ok(())
    }

    pub fn with_length(&self, length: f64) -> Result<Self> {
        Self::new(length, self.theta, self.pump_central_wavelength)
    }

    /// Degenerate signal angular frequency, half the pump central frequency.
    pub fn signal_center_frequency(&self) -> f64 {
        PI * SPEED_OF_LIGHT / self.pump_central_wavelength
    }
}

/// Vacuum wavelength in um for an angular frequency in rad/s.
pub fn wavelength_um(omega: f64) -> f64 {
    2.0 * PI * SPEED_OF_LIGHT / omega * 1e6
}

/// Wave number of the x-polarized pump.
pub fn pump_wavenumber(omega: f64, coeffs: &SellmeierCoefficients) -> Result<f64> {
    Ok(omega * sellmeier_index(Axis::X, wavelength_um(omega), coeffs)? / SPEED_OF_LIGHT)
}

/// Wave number of the extraordinary signal/idler field.
pub fn signal_wavenumber(omega: f64, theta: f64, coeffs: &SellmeierCoefficients) -> Result<f64> {
    Ok(omega * extraordinary_index(wavelength_um(omega), theta, coeffs)? / SPEED_OF_LIGHT)
}

/// `(k_p(w_j + w_k) - k_s(w_j) - k_s(w_k)) l / 2`.
pub fn phase_mismatch(
    omega_j: f64,
    omega_k: f64,
    crystal: &CrystalConfig,
    coeffs: &SellmeierCoefficients,
) -> Result<f64> {
    let kp = pump_wavenumber(omega_j + omega_k, coeffs)?;
    let ks = signal_wavenumber(omega_j, crystal.theta, coeffs)? + signal_wavenumber(omega_k, crystal.theta, coeffs)?;
    Ok((kp - ks) * crystal.length / 2.0)
}
