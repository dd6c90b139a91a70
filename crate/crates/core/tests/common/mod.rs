#![allow(dead_code)]

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use spdc_core::dispersion::{CrystalConfig, SellmeierCoefficients};
use spdc_core::jsa::PhaseMatching;
use spdc_core::pump::{build_grid, gaussian_pump, sigma_omega_from_fwhm, FrequencyGrid, PumpProfile};
use spdc_core::C64;

pub const PUMP_WAVELENGTH: f64 = 397.5e-9;
pub const SIGNAL_WAVELENGTH: f64 = 795e-9;
pub const PUMP_FWHM: f64 = 3.54e-9;
pub const GRID_HALFWIDTH_SIGMAS: f64 = 15.0;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_complex(rng: &mut impl Rng, rows: usize, cols: usize) -> DMatrix<C64> {
    DMatrix::from_fn(rows, cols, |_, _| {
        C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
    })
}

pub fn random_symmetric(rng: &mut impl Rng, n: usize) -> DMatrix<C64> {
    let a = random_complex(rng, n, n);
    (&a + a.transpose()).map(|z| z * 0.5)
}

/// Unitary from the QR factor of a random complex matrix.
pub fn random_unitary(rng: &mut impl Rng, n: usize) -> DMatrix<C64> {
    random_complex(rng, n, n).qr().q()
}

/// Scaling and squaring with a Taylor core, kept independent of the library.
pub fn expm(m: &DMatrix<C64>) -> DMatrix<C64> {
    let n = m.nrows();
    let norm = m.iter().map(|z| z.norm()).sum::<f64>();
    let squarings = if norm > 0.5 {
        (norm / 0.5).log2().ceil() as u32
    } else {
        0
    };
    let scaled = m.map(|z| z / 2f64.powi(squarings as i32));
    let mut result = DMatrix::<C64>::identity(n, n);
    let mut term = DMatrix::<C64>::identity(n, n);
    for k in 1..40 {
        term = &term * &scaled / C64::new(k as f64, 0.0);
        result += &term;
    }
    for _ in 0..squarings {
        result = &result * &result;
    }
    result
}

/// Real propagator `C^dagger expm(eta_t [[0, L], [L^*, 0]]) C` with
/// `C = [[I, iI], [I, -iI]] / sqrt 2`.
pub fn propagator_oracle(l: &DMatrix<C64>, eta_t: f64) -> DMatrix<f64> {
    let n = l.nrows();
    let mut lt = DMatrix::<C64>::zeros(2 * n, 2 * n);
    let mut c = DMatrix::<C64>::zeros(2 * n, 2 * n);
    let s = std::f64::consts::FRAC_1_SQRT_2;
    for i in 0..n {
        for j in 0..n {
            lt[(i, n + j)] = l[(i, j)] * eta_t;
            lt[(n + i, j)] = l[(i, j)].conj() * eta_t;
        }
        c[(i, i)] = C64::new(s, 0.0);
        c[(i, n + i)] = C64::new(0.0, s);
        c[(n + i, i)] = C64::new(s, 0.0);
        c[(n + i, n + i)] = C64::new(0.0, -s);
    }
    let full = c.adjoint() * expm(&lt) * c;
    let imag = full.iter().map(|z| z.im.abs()).fold(0.0, f64::max);
    assert!(imag < 1e-9, "oracle propagator is not real: {imag:e}");
    full.map(|z| z.re)
}

pub struct Setup {
    pub coeffs: SellmeierCoefficients,
    pub grid: FrequencyGrid,
    pub pump: PumpProfile,
    pub crystal: CrystalConfig,
    pub phase_matching: PhaseMatching,
}

pub fn setup(length: f64, n_points: usize) -> Setup {
    let coeffs = SellmeierCoefficients::bibo();
    let sigma = sigma_omega_from_fwhm(PUMP_WAVELENGTH, PUMP_FWHM);
    let grid = build_grid(SIGNAL_WAVELENGTH, GRID_HALFWIDTH_SIGMAS, sigma, n_points).unwrap();
    let pump = gaussian_pump(&grid, PUMP_FWHM, PUMP_WAVELENGTH).unwrap();
    let crystal = CrystalConfig::phase_matched(length, PUMP_WAVELENGTH, &coeffs).unwrap();
    let phase_matching = PhaseMatching::new(&grid, &crystal, &coeffs).unwrap();
    Setup {
        coeffs,
        grid,
        pump,
        crystal,
        phase_matching,
    }
}

pub fn max_abs_diff(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    (a - b).iter().map(|x| x.abs()).fold(0.0, f64::max)
}
