use rayon::prelude::*;
use rustfft::FftPlanner;
use serde::Serialize;

use crate::jsa::{total_gain_invariant, PhaseMatching};
use crate::linalg::singular_values;
use crate::pump::{apply_chirp, chirped_duration, pulse_duration, PumpProfile};
use crate::{Error, Result, C64};

/// Zero-padding factor for the temporal envelope.
const OVERSAMPLE: usize = 8;

/// Standard deviation of `|E(t)|^2` for the pump envelope, computed by FFT.
pub fn temporal_duration(pump: &PumpProfile) -> Result<f64> {
    let axis = pump.axis();
    if axis.len() < 2 {
        return Err(Error::InvalidParameter("need at least two pump samples".into()));
    }
    let spacing = axis[1] - axis[0];
    let len = (axis.len() * OVERSAMPLE).next_power_of_two();
    let mut buffer = vec![C64::new(0.0, 0.0); len];
    buffer[..axis.len()].copy_from_slice(pump.amplitudes());
    FftPlanner::new().plan_fft_inverse(len).process(&mut buffer);

    let intensity: Vec<f64> = buffer.iter().map(|z| z.norm_sqr()).collect();
    let peak = intensity
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, _)| i)
        .unwrap_or(0);
    let dt = 2.0 * std::f64::consts::PI / (len as f64 * spacing);
    let half = len as isize / 2;
    let (mut s0, mut s1, mut s2) = (0.0, 0.0, 0.0);
    for (i, p) in intensity.iter().enumerate() {
        let offset = (i as isize - peak as isize + half).rem_euclid(len as isize) - half;
        let t = offset as f64 * dt;
        s0 += p;
        s1 += p * t;
        s2 += p * t * t;
    }
    let mean = s1 / s0;
    Ok((s2 / s0 - mean * mean).max(0.0).sqrt())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ChirpFamily {
    Chirped,
    /// Transform-limited with the spectral width reduced to match the duration.
    Unchirped,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ChirpScanRow {
    pub family: ChirpFamily,
    /// Quadratic phase of the matching chirped row.
    pub phi2: f64,
    pub duration_ratio: f64,
    /// FFT duration of the simulated pump over the transform-limited one.
    pub measured_duration_ratio: f64,
    /// Leading gain over the unchirped reference.
    pub leading_gain: f64,
    /// Largest gains over the unchirped reference.
    pub top_gains: Vec<f64>,
    pub total_gain: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ChirpScanResult {
    pub reference_gain: f64,
    pub chirped: Vec<ChirpScanRow>,
    pub unchirped: Vec<ChirpScanRow>,
}

/// Gains for a chirped Gaussian pump and for transform-limited pumps of equal
/// duration, all at unit pump norm.
pub fn chirp_scan(
    phase_matching: &PhaseMatching,
    base: &PumpProfile,
    phi2_values: &[f64],
    top: usize,
) -> Result<ChirpScanResult> {
    let sigma = base.sigma_omega();
    let center = base.center();
    let dt0 = pulse_duration(sigma);
    let measured0 = temporal_duration(base)?;
    let reference_gain = singular_values(phase_matching.jsa(base)?.matrix())?[0];
    if reference_gain <= 0.0 {
        return Err(Error::NoParametricGain);
    }

    let row = |family: ChirpFamily, phi2: f64| -> Result<ChirpScanRow> {
        let ratio = chirped_duration(dt0, phi2) / dt0;
        let pump = match family {
            ChirpFamily::Chirped => apply_chirp(base, phi2),
            ChirpFamily::Unchirped => {
                let narrow = sigma / ratio;
                let amplitudes = base
                    .axis()
                    .iter()
                    .map(|w| {
                        let x = (w - center) / narrow;
                        C64::new((-0.25 * x * x).exp(), 0.0)
                    })
                    .collect();
                PumpProfile::from_samples(base.axis().to_vec(), amplitudes, center, narrow)?.normalized()?
            }
        };
        let l = phase_matching.jsa(&pump)?.into_matrix();
        let gains = singular_values(&l)?;
        Ok(ChirpScanRow {
            family,
            phi2,
            duration_ratio: ratio,
            measured_duration_ratio: temporal_duration(&pump)? / measured0,
            leading_gain: gains[0] / reference_gain,
            top_gains: gains.iter().take(top).map(|g| g / reference_gain).collect(),
            total_gain: total_gain_invariant(&l),
        })
    };

    let chirped = phi2_values
        .par_iter()
        .map(|&p| row(ChirpFamily::Chirped, p))
        .collect::<Result<Vec<_>>>()?;
    let unchirped = phi2_values
        .par_iter()
        .map(|&p| row(ChirpFamily::Unchirped, p))
        .collect::<Result<Vec<_>>>()?;
    Ok(ChirpScanResult {
        reference_gain,
        chirped,
        unchirped,
    })
}
