mod common;

use std::f64::consts::{FRAC_PI_2, PI};

use proptest::prelude::*;
use spdc_core::dispersion::*;
use spdc_core::Error;

#[test]
fn ordinary_index_matches_high_precision_value() {
    let c = SellmeierCoefficients::bibo();
    let nx = sellmeier_index(Axis::X, 0.795, &c).unwrap();
    assert!((nx - 1.766_179_664_041_397_9).abs() < 1e-14, "{nx}");
    let nx_pump = sellmeier_index(Axis::X, 0.3975, &c).unwrap();
    assert!((nx_pump - 1.824_166_010_908_068_5).abs() < 1e-14, "{nx_pump}");
}

#[test]
fn principal_indices_are_ordered() {
    let c = SellmeierCoefficients::bibo();
    let n = |axis| sellmeier_index(axis, 0.795, &c).unwrap();
    assert!(n(Axis::Z) > n(Axis::Y) && n(Axis::Y) > n(Axis::X));
}

#[test]
fn extraordinary_index_limits() {
    let c = SellmeierCoefficients::bibo();
    for lambda in [0.5, 0.795, 1.0] {
        let ny = sellmeier_index(Axis::Y, lambda, &c).unwrap();
        let nz = sellmeier_index(Axis::Z, lambda, &c).unwrap();
        assert!((extraordinary_index(lambda, 0.0, &c).unwrap() - ny).abs() < 1e-15);
        assert!((extraordinary_index(lambda, FRAC_PI_2, &c).unwrap() - nz).abs() < 1e-15);
    }
}

#[test]
fn published_angle_matches_pump_index() {
    let c = SellmeierCoefficients::bibo();
    let ne = extraordinary_index(0.795, 2.63214, &c).unwrap();
    let nx = sellmeier_index(Axis::X, 0.3975, &c).unwrap();
    assert!(((ne - nx) / nx).abs() < 1e-6, "{ne} vs {nx}");
}

#[test]
fn solves_published_angle() {
    let c = SellmeierCoefficients::bibo();
    let theta = solve_phase_matching_angle(397.5e-9, &c).unwrap();
    assert!((theta - 2.63214).abs() < 1e-3, "{theta}");
    let residual = extraordinary_index(0.795, theta, &c).unwrap() - sellmeier_index(Axis::X, 0.3975, &c).unwrap();
    assert!(residual.abs() < 1e-10);
}

#[test]
fn root_at_400_nm_agrees_with_bracket_scan() {
    let c = SellmeierCoefficients::bibo();
    let f = |t: f64| extraordinary_index(0.8, t, &c).unwrap() - sellmeier_index(Axis::X, 0.4, &c).unwrap();
    let steps = 200_000;
    let h = FRAC_PI_2 / steps as f64;
    let cross = (0..steps)
        .map(|i| FRAC_PI_2 + i as f64 * h)
        .find(|&t| f(t).signum() != f(t + h).signum())
        .expect("sign change in (pi/2, pi)");
    let theta = solve_phase_matching_angle(400e-9, &c).unwrap();
    assert!(theta >= cross - 1e-12 && theta <= cross + h + 1e-12);
    assert!(f(theta).abs() < 1e-10);
}

#[test]
fn isotropic_crystal_returns_bracket_midpoint() {
    let bibo = SellmeierCoefficients::bibo();
    let nx = sellmeier_index(Axis::X, 0.3975, &bibo).unwrap();
    let flat = AxisCoefficients::new(nx * nx, 0.0, 0.0, 0.0);
    let c = SellmeierCoefficients::new(flat, flat, flat).unwrap();
    let theta = solve_phase_matching_angle(397.5e-9, &c).unwrap();
    assert!((theta - 0.75 * PI).abs() < 1e-12);
}

#[test]
fn unmatchable_pump_is_reported() {
    let c = SellmeierCoefficients::bibo();
    assert!(matches!(
        solve_phase_matching_angle(700e-9, &c),
        Err(Error::NotPhaseMatchable(_))
    ));
}

#[test]
fn mismatch_vanishes_at_degeneracy_and_scales_with_length() {
    let c = SellmeierCoefficients::bibo();
    let crystal = CrystalConfig::phase_matched(1e-3, 397.5e-9, &c).unwrap();
    let w0 = crystal.signal_center_frequency();
    assert!(phase_mismatch(w0, w0, &crystal, &c).unwrap().abs() < 1e-8);

    let w1 = w0 * 1.01;
    let w2 = w0 * 0.995;
    let short = phase_mismatch(w1, w2, &crystal, &c).unwrap();
    let long = phase_mismatch(w1, w2, &crystal.with_length(2e-3).unwrap(), &c).unwrap();
    assert!(short.abs() > 1e-3);
    assert!((long - 2.0 * short).abs() <= 1e-12 * long.abs());
}

#[test]
fn crystal_config_rejects_bad_geometry() {
    assert!(CrystalConfig::new(0.0, 2.6, 397.5e-9).is_err());
    assert!(CrystalConfig::new(1e-3, 3.5, 397.5e-9).is_err());
    assert!(CrystalConfig::new(1e-3, 2.6, -1.0).is_err());
}

proptest! {
    #[test]
    fn mismatch_is_symmetric(a in 0.97f64..1.03, b in 0.97f64..1.03) {
        let c = SellmeierCoefficients::bibo();
        let crystal = CrystalConfig::phase_matched(1.5e-3, 397.5e-9, &c).unwrap();
        let w0 = crystal.signal_center_frequency();
        let jk = phase_mismatch(a * w0, b * w0, &crystal, &c).unwrap();
        let kj = phase_mismatch(b * w0, a * w0, &crystal, &c).unwrap();
        prop_assert_eq!(jk, kj);
    }

    #[test]
    fn indices_decrease_with_wavelength(lambda in 0.35f64..0.999) {
        let c = SellmeierCoefficients::bibo();
        for axis in [Axis::X, Axis::Y, Axis::Z] {
            let n1 = sellmeier_index(axis, lambda, &c).unwrap();
            let n2 = sellmeier_index(axis, lambda + 1e-3, &c).unwrap();
            prop_assert!(n2 < n1);
            prop_assert!(n1 > 1.0);
        }
    }

    #[test]
    fn extraordinary_index_lies_between_principal_values(lambda in 0.35f64..1.0, theta in 0.0f64..PI) {
        let c = SellmeierCoefficients::bibo();
        let ny = sellmeier_index(Axis::Y, lambda, &c).unwrap();
        let nz = sellmeier_index(Axis::Z, lambda, &c).unwrap();
        let ne = extraordinary_index(lambda, theta, &c).unwrap();
        prop_assert!(ne >= ny - 1e-12 && ne <= nz + 1e-12);
    }
}
