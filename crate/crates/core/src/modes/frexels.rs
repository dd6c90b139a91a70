use std::f64::consts::PI;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::ModeMatrix;
use crate::dispersion::SPEED_OF_LIGHT;
use crate::pump::{sigma_omega_from_fwhm, FrequencyGrid};
use crate::{Error, Result, C64};

/// Frequency slices of a Gaussian envelope. Band `j` covers
/// `[band_edges[j], band_edges[j + 1])` (the last band is closed), so band 0
/// sits at the lowest frequency.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FrexelSpec {
    /// Strictly increasing angular frequencies, one more than the band count.
    pub band_edges: Vec<f64>,
    pub phases: Vec<f64>,
    /// Envelope centre wavelength in metres.
    pub envelope_center_wavelength: f64,
    /// Envelope intensity FWHM in metres of wavelength.
    pub envelope_fwhm: f64,
}

impl FrexelSpec {
    /// `bands` slices between two wavelengths with edges uniform in frequency.
    pub fn uniform_in_frequency(
        longest_wavelength: f64,
        shortest_wavelength: f64,
        bands: usize,
        envelope_center_wavelength: f64,
        envelope_fwhm: f64,
    ) -> Result<Self> {
        if bands == 0 || !(shortest_wavelength > 0.0 && longest_wavelength > shortest_wavelength) {
            return Err(Error::InvalidParameter(
                "frexels need at least one band between two ordered positive wavelengths".into(),
            ));
        }
        let lo = 2.0 * PI * SPEED_OF_LIGHT / longest_wavelength;
        let hi = 2.0 * PI * SPEED_OF_LIGHT / shortest_wavelength;
        let band_edges = (0..=bands).map(|j| lo + (hi - lo) * j as f64 / bands as f64).collect();
        let spec = Self {
            band_edges,
            phases: vec![0.0; bands],
            envelope_center_wavelength,
            envelope_fwhm,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Four bands from 808 nm to 782 nm under a 10 nm envelope at 795 nm.
    pub fn four_band_default() -> Self {
        Self::uniform_in_frequency(808e-9, 782e-9, 4, 795e-9, 10e-9).expect("valid default frexels")
    }

    pub fn len(&self) -> usize {
        self.phases.len()
    }

    pub fn is_empty(&self) -> bool {
        self.phases.is_empty()
    }

    pub fn validate(&self) -> Result<()> {
        if self.band_edges.len() != self.phases.len() + 1 || self.phases.is_empty() {
            return Err(Error::DimensionMismatch(format!(
                "{} band edges for {} phases",
                self.band_edges.len(),
                self.phases.len()
            )));
        }
        if self.band_edges.windows(2).any(|w| !(w[1] > w[0])) || !(self.band_edges[0] > 0.0) {
            return Err(Error::InvalidParameter(
                "band edges must be positive and strictly increasing".into(),
            ));
        }
        if !(self.envelope_center_wavelength > 0.0 && self.envelope_fwhm > 0.0) {
            return Err(Error::InvalidParameter(
                "frexel envelope must have positive centre and width".into(),
            ));
        }
        if self.phases.iter().any(|p| !p.is_finite()) {
            return Err(Error::InvalidParameter("frexel phases must be finite".into()));
        }
        Ok(())
    }

    pub fn with_phases(&self, phases: Vec<f64>) -> Result<Self> {
        let spec = Self { phases, ..self.clone() };
        spec.validate()?;
        Ok(spec)
    }
}

/// Normalized frexel rows in band order.
pub fn build_frexels(spec: &FrexelSpec, grid: &FrequencyGrid) -> Result<ModeMatrix> {
    spec.validate()?;
    let center = 2.0 * PI * SPEED_OF_LIGHT / spec.envelope_center_wavelength;
    let sigma = sigma_omega_from_fwhm(spec.envelope_center_wavelength, spec.envelope_fwhm);
    let m = spec.len();
    let mut d = DMatrix::<C64>::zeros(m, grid.len());
    for j in 0..m {
        let (lo, hi) = (spec.band_edges[j], spec.band_edges[j + 1]);
        let last = j + 1 == m;
        let mut norm2 = 0.0;
        for (i, &w) in grid.omegas().iter().enumerate() {
            let inside = w >= lo && (w < hi || (last && w <= hi));
            if inside {
                let x = (w - center) / sigma;
                let a = (-0.25 * x * x).exp();
                d[(j, i)] = C64::new(a, 0.0);
                norm2 += a * a;
            }
        }
        if norm2 == 0.0 {
            return Err(Error::EmptyBand(j));
        }
        let factor = C64::from_polar(1.0 / norm2.sqrt(), spec.phases[j]);
        d.row_mut(j).iter_mut().for_each(|z| *z *= factor);
    }
    ModeMatrix::new(d)
}
