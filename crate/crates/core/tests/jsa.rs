mod common;

use common::*;
use nalgebra::DMatrix;
use proptest::prelude::*;
use spdc_core::dispersion::{phase_mismatch, CrystalConfig};
use spdc_core::jsa::*;
use spdc_core::pump::{apply_chirp, build_grid, gaussian_pump, sigma_omega_from_fwhm};
use spdc_core::{Error, C64};

#[test]
fn matrix_is_exactly_symmetric() {
    let s = setup(0.5e-3, 80);
    let l = s
        .phase_matching
        .jsa(&apply_chirp(&s.pump, 2700e-30))
        .unwrap()
        .into_matrix();
    assert_eq!(l, l.transpose());
}

#[test]
fn thin_crystal_gives_the_pump_hankel_matrix() {
    let s = setup(0.5e-3, 40);
    let thin = CrystalConfig::new(1e-12, s.crystal.theta, PUMP_WAVELENGTH).unwrap();
    let l = build_jsa(&s.grid, &s.pump, &thin, &s.coeffs).unwrap();
    let alpha = s.pump.amplitudes();
    for j in 0..40 {
        for k in 0..40 {
            assert!((l.matrix()[(j, k)] - alpha[j + k]).norm() < 1e-12);
        }
    }
}

#[test]
fn global_pump_phase_scales_the_matrix() {
    let s = setup(1e-3, 60);
    let phase = C64::from_polar(1.0, 0.7);
    let rotated = s.pump.map(|_, a| a * phase);
    let l = s.phase_matching.jsa(&s.pump).unwrap().into_matrix();
    let lr = s.phase_matching.jsa(&rotated).unwrap().into_matrix();
    assert!((&l * phase - &lr).norm() < 1e-14);
    let sv = l.singular_values();
    let svr = lr.singular_values();
    assert!((sv - svr).norm() < 1e-12);
}

#[test]
fn total_gain_matches_brute_force_sum() {
    let s = setup(0.5e-3, 150);
    let l = s.phase_matching.jsa(&s.pump).unwrap();
    let w = s.grid.omegas();
    let mut brute = 0.0;
    for j in 0..w.len() {
        for k in 0..w.len() {
            let phi = phase_mismatch(w[j], w[k], &s.crystal, &s.coeffs).unwrap();
            let sinc = if phi == 0.0 { 1.0 } else { phi.sin() / phi };
            brute += (sinc * s.pump.amplitudes()[j + k].norm()).powi(2);
        }
    }
    let fast = total_gain_invariant(l.matrix());
    assert!((fast - brute).abs() < 1e-12 * brute, "{fast} vs {brute}");
}

#[test]
fn total_gain_trivial_cases() {
    assert_eq!(total_gain_invariant(&DMatrix::zeros(3, 3)), 0.0);
    assert_eq!(total_gain_invariant(&DMatrix::identity(3, 3)), 3.0);
}

#[test]
fn total_gain_is_the_sum_of_squared_singular_values() {
    let s = setup(1.5e-3, 120);
    let l = s.phase_matching.jsa(&s.pump).unwrap().into_matrix();
    let from_svd: f64 = l.singular_values().iter().map(|x| x * x).sum();
    let total = total_gain_invariant(&l);
    assert!((total - from_svd).abs() < 1e-9 * total);
}

#[test]
fn sinc_is_exact_at_zero() {
    assert_eq!(sinc(0.0), 1.0);
    assert!((sinc(1e-5) - (1e-5f64).sin() / 1e-5).abs() < 4e-16);
    assert!((sinc(2.0) - 2f64.sin() / 2.0).abs() < 4e-16);
}

#[test]
fn pump_on_wrong_axis_is_a_configuration_error() {
    let s = setup(1e-3, 30);
    let sigma = sigma_omega_from_fwhm(PUMP_WAVELENGTH, PUMP_FWHM);
    let other = build_grid(SIGNAL_WAVELENGTH, 10.0, sigma, 30).unwrap();
    let pump = gaussian_pump(&other, PUMP_FWHM, PUMP_WAVELENGTH).unwrap();
    assert!(matches!(s.phase_matching.jsa(&pump), Err(Error::Config(_))));
    let short = gaussian_pump(
        &build_grid(SIGNAL_WAVELENGTH, 15.0, sigma, 20).unwrap(),
        PUMP_FWHM,
        PUMP_WAVELENGTH,
    )
    .unwrap();
    assert!(matches!(s.phase_matching.jsa(&short), Err(Error::Config(_))));
}

#[test]
fn binary_dump_round_trips() {
    let s = setup(1e-3, 12);
    let l = s.phase_matching.jsa(&s.pump).unwrap();
    let mut bytes = Vec::new();
    l.write_binary(&mut bytes).unwrap();
    assert_eq!(bytes.len(), 12 * 12 * 16);
    let back = JointSpectralMatrix::read_binary(bytes.as_slice(), 12).unwrap();
    assert_eq!(&back, l.matrix());
}

#[test]
fn asymmetric_matrices_are_rejected() {
    let mut m = DMatrix::<C64>::identity(3, 3);
    m[(0, 1)] = C64::new(1.0, 0.0);
    assert!(JointSpectralMatrix::from_matrix(m).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn chirp_leaves_total_gain_unchanged(phi2 in -1.2e-26f64..1.2e-26, length in 0.2e-3f64..2e-3) {
        let s = setup(length, 60);
        let base = total_gain_invariant(s.phase_matching.jsa(&s.pump).unwrap().matrix());
        let chirped = total_gain_invariant(s.phase_matching.jsa(&apply_chirp(&s.pump, phi2)).unwrap().matrix());
        prop_assert!((chirped - base).abs() <= 1e-10 * base);
    }
}
