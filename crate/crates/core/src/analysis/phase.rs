use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::{Error, Result, C64};

/// Samples below this fraction of the peak amplitude carry no phase.
const SUPPORT_THRESHOLD: f64 = 1e-3;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PhaseFit {
    pub reference: f64,
    /// `coefficients[k]` multiplies `(w - reference)^k`.
    pub coefficients: Vec<f64>,
    /// Linear coefficient, a pure time shift.
    pub delay: f64,
    /// `|v|^2`-weighted RMS deviation of the unwrapped phase from the fit.
    pub residual: f64,
}

/// Phase of `v`, unwrapped outward from the amplitude peak.
pub fn unwrap_phase(v: &[C64]) -> Vec<f64> {
    let mut phase: Vec<f64> = v.iter().map(|z| z.arg()).collect();
    let Some(peak) = v
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.norm().total_cmp(&b.1.norm()))
        .map(|(i, _)| i)
    else {
        return phase;
    };
    let tau = 2.0 * std::f64::consts::PI;
    let fix = |prev: f64, cur: f64| cur - tau * ((cur - prev) / tau).round();
    for i in peak + 1..phase.len() {
        phase[i] = fix(phase[i - 1], phase[i]);
    }
    for i in (0..peak).rev() {
        phase[i] = fix(phase[i + 1], phase[i]);
    }
    phase
}

/// Weighted least-squares polynomial fit of the unwrapped spectral phase.
pub fn fit_spectral_phase(omegas: &[f64], v: &[C64], reference: f64, max_degree: usize) -> Result<PhaseFit> {
    if omegas.len() != v.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} frequencies for {} amplitudes",
            omegas.len(),
            v.len()
        )));
    }
    let peak = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let phase = unwrap_phase(v);
    let support: Vec<usize> = (0..v.len())
        .filter(|&i| v[i].norm() > SUPPORT_THRESHOLD * peak)
        .collect();
    if peak == 0.0 || support.len() <= max_degree {
        return Err(Error::InvalidParameter(format!(
            "{} supported samples cannot fix a degree-{max_degree} phase",
            support.len()
        )));
    }

    let scale = support
        .iter()
        .map(|&i| (omegas[i] - reference).abs())
        .fold(0.0, f64::max)
        .max(f64::MIN_POSITIVE);
    let cols = max_degree + 1;
    let mut a = DMatrix::<f64>::zeros(support.len(), cols);
    let mut b = DVector::<f64>::zeros(support.len());
    for (r, &i) in support.iter().enumerate() {
        let sw = v[i].norm();
        let x = (omegas[i] - reference) / scale;
        let mut xp = 1.0;
        for c in 0..cols {
            a[(r, c)] = sw * xp;
            xp *= x;
        }
        b[r] = sw * phase[i];
    }
    let svd = a.clone().svd(true, true);
    let scaled = svd
        .solve(&b, 1e-12)
        .map_err(|e| Error::Linalg(format!("phase fit failed: {e}")))?;
    if svd.rank(1e-12 * svd.singular_values.max()) < cols {
        return Err(Error::InvalidParameter("phase support is degenerate".into()));
    }
    let fitted = &a * &scaled;
    let weight: f64 = support.iter().map(|&i| v[i].norm_sqr()).sum();
    let residual = ((&b - fitted).norm_squared() / weight).sqrt();
    let coefficients: Vec<f64> = scaled
        .iter()
        .enumerate()
        .map(|(k, c)| c / scale.powi(k as i32))
        .collect();
    Ok(PhaseFit {
        reference,
        delay: coefficients.get(1).copied().unwrap_or(0.0),
        coefficients,
        residual,
    })
}

/// Removes the fitted linear phase; returns the delay and the rephased mode.
pub fn subtract_linear_phase(omegas: &[f64], v: &[C64], reference: f64) -> Result<(f64, Vec<C64>)> {
    let fit = fit_spectral_phase(omegas, v, reference, 1)?;
    let rephased = omegas
        .iter()
        .zip(v)
        .map(|(w, z)| z * C64::from_polar(1.0, -fit.delay * (w - reference)))
        .collect();
    Ok((fit.delay, rephased))
}
