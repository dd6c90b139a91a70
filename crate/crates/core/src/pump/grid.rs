use std::f64::consts::PI;

use crate::dispersion::SPEED_OF_LIGHT;
use crate::{Error, Result};

/// Uniform signal-frequency axis (rad/s) on which `L` is sampled.
#[derive(Clone, Debug, PartialEq)]
pub struct FrequencyGrid {
    omegas: Vec<f64>,
    center: f64,
    spacing: f64,
}

impl FrequencyGrid {
    /// `n_points` frequencies spanning `center +/- halfwidth`, endpoints included.
    pub fn uniform(center: f64, halfwidth: f64, n_points: usize) -> Result<Self> {
        if n_points < 2 {
            return Err(Error::InvalidParameter(format!(
                "a grid needs at least 2 points, got {n_points}"
            )));
        }
        if !(halfwidth > 0.0 && halfwidth.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "grid half-width must be positive, got {halfwidth}"
            )));
        }
        if !(center > halfwidth && center.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "grid would reach non-positive frequencies (center {center}, half-width {halfwidth})"
            )));
        }
        let spacing = 2.0 * halfwidth / (n_points - 1) as f64;
        let mid = (n_points - 1) as f64 / 2.0;
        let omegas = (0..n_points).map(|i| center + (i as f64 - mid) * spacing).collect();
        Ok(Self {
            omegas,
            center,
            spacing,
        })
    }

    pub fn omegas(&self) -> &[f64] {
        &self.omegas
    }

    pub fn len(&self) -> usize {
        self.omegas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.omegas.is_empty()
    }

    pub fn center(&self) -> f64 {
        self.center
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn first(&self) -> f64 {
        self.omegas[0]
    }

    pub fn last(&self) -> f64 {
        self.omegas[self.omegas.len() - 1]
    }

    /// Vacuum wavelengths in metres, one per grid point.
    pub fn wavelengths(&self) -> Vec<f64> {
        self.omegas.iter().map(|w| 2.0 * PI * SPEED_OF_LIGHT / w).collect()
    }

    /// The 2N-1 distinct sums `w_j + w_k`, ascending; entry `j + k` is the
    /// pump frequency that couples signal `j` to idler `k`.
    pub fn pump_axis(&self) -> Vec<f64> {
        let n = self.len() as f64;
        (0..2 * self.len() - 1)
            .map(|m| 2.0 * self.center + (m as f64 - (n - 1.0)) * self.spacing)
            .collect()
    }
}

/// Grid centred on `2 pi c / center_wavelength_signal`, spanning
/// `+/- halfwidth_sigmas * sigma_omega`.
pub fn build_grid(
    center_wavelength_signal: f64,
    halfwidth_sigmas: f64,
    sigma_omega: f64,
    n_points: usize,
) -> Result<FrequencyGrid> {
    if !(center_wavelength_signal > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "signal wavelength must be positive, got {center_wavelength_signal}"
        )));
    }
    let center = 2.0 * PI * SPEED_OF_LIGHT / center_wavelength_signal;
    FrequencyGrid::uniform(center, halfwidth_sigmas * sigma_omega, n_points)
}
