mod common;

use common::*;
use nalgebra::DMatrix;
use proptest::prelude::*;
use spdc_core::gaussian_core::*;
use spdc_core::linalg::{real_representation, symplectic_form};
use spdc_core::modes::{mode_covariance, ModeMatrix};
use spdc_core::pump::apply_chirp;
use spdc_core::{Error, C64};

fn factorized(l: &DMatrix<C64>) -> SupermodeSet {
    takagi_factorize(l).unwrap()
}

#[test]
fn zero_gain_scale_is_identity() {
    let mut r = rng(1);
    let set = factorized(&random_symmetric(&mut r, 5));
    let s = build_propagator(&set, 0.0).unwrap();
    assert!(max_abs_diff(s.matrix(), &DMatrix::identity(10, 10)) < 1e-14);
}

#[test]
fn single_mode_squeezer() {
    let l = DMatrix::from_element(1, 1, C64::new(1.0, 0.0));
    let r = 0.4;
    let gamma = covariance_from_propagator(&build_propagator(&factorized(&l), r).unwrap());
    assert!((gamma.q_variance(0) - (2.0 * r).exp() / 2.0).abs() < 1e-14);
    assert!((gamma.p_variance(0) - (-2.0 * r).exp() / 2.0).abs() < 1e-14);
    let direct = covariance_from_supermodes(&factorized(&l), r).unwrap();
    assert!(max_abs_diff(direct.matrix(), gamma.matrix()) < 1e-14);
}

#[test]
fn eight_mode_propagator_matches_matrix_exponential() {
    let mut r = rng(8);
    let l = random_symmetric(&mut r, 8);
    let s = build_propagator(&factorized(&l), 0.3).unwrap();
    let oracle = propagator_oracle(&l, 0.3);
    assert!((s.matrix() - &oracle).norm() < 1e-8);
}

#[test]
fn four_mode_covariance_matches_oracle() {
    let mut r = rng(4);
    let l = random_symmetric(&mut r, 4);
    let gamma = covariance_from_supermodes(&factorized(&l), 0.5).unwrap();
    let oracle = propagator_oracle(&l, 0.5);
    let expected = &oracle * oracle.transpose() * 0.5;
    assert!(max_abs_diff(gamma.matrix(), &expected) < 1e-8);
}

#[test]
fn bloch_messiah_factors_recover_the_squeezing_diagonal() {
    let mut r = rng(5);
    let l = random_symmetric(&mut r, 6);
    let set = factorized(&l);
    let eta = 0.7;
    let s = build_propagator(&set, eta).unwrap();
    let r1 = real_representation(&set.modes().adjoint());
    let k = r1.transpose() * s.matrix() * &r1;
    for i in 0..12 {
        for j in 0..12 {
            let expected = if i != j {
                0.0
            } else if i < 6 {
                (eta * set.gains()[i]).exp()
            } else {
                (-eta * set.gains()[i - 6]).exp()
            };
            assert!((k[(i, j)] - expected).abs() < 1e-9);
        }
    }
}

#[test]
fn pulsed_pump_state_is_pure() {
    let s = setup(1.5e-3, 200);
    let l = s
        .phase_matching
        .jsa(&apply_chirp(&s.pump, 2700e-30))
        .unwrap()
        .into_matrix();
    let set = factorized(&l);
    let eta = calibrate_gain_scale(&set, 7.0).unwrap();
    let gamma = covariance_from_supermodes(&set, eta).unwrap();
    assert!(gamma.log_det_2gamma().unwrap().abs() < 1e-6);
    assert!(gamma.uncertainty_margin() > -1e-9);
    let prop = build_propagator(&set, eta).unwrap();
    assert!(prop.symplectic_residual() < 1e-9);
    assert!((prop.matrix() - prop.matrix().transpose()).norm() < 1e-9);
}

#[test]
fn symplectic_eigenvalues_are_half() {
    let mut r = rng(9);
    let set = factorized(&random_symmetric(&mut r, 6));
    let gamma = covariance_from_supermodes(&set, 0.4).unwrap();
    for nu in gamma.symplectic_eigenvalues().unwrap() {
        assert!((nu - 0.5).abs() < 1e-8, "{nu}");
    }
}

#[test]
fn reduced_covariance_is_a_partial_trace() {
    let mut r = rng(10);
    let set = factorized(&random_symmetric(&mut r, 12));
    let u = random_unitary(&mut r, 12);
    let d = ModeMatrix::new(u.rows(0, 3).into_owned()).unwrap();
    let full = covariance_from_supermodes(&set, 0.6).unwrap();
    let via_full = mode_covariance(&full, &d).unwrap();
    let reduced = reduced_covariance(&set, 0.6, d.matrix()).unwrap();
    assert!(max_abs_diff(via_full.matrix(), reduced.matrix()) < 1e-12);
}

#[test]
fn vacuum_covariance() {
    let mut r = rng(2);
    let set = factorized(&random_symmetric(&mut r, 3));
    let gamma = covariance_from_propagator(&build_propagator(&set, 0.0).unwrap());
    assert!(max_abs_diff(gamma.matrix(), &(DMatrix::identity(6, 6) * 0.5)) < 1e-14);
}

#[test]
fn calibration_examples() {
    assert_eq!(calibrate_from_leading_gain(2.0, 0.0).unwrap(), 0.0);
    let eta = calibrate_from_leading_gain(1.0, 7.0).unwrap();
    let inverse = -0.5 * (10f64.powf(-0.7)).ln();
    assert!((eta - inverse).abs() < 1e-12);
    assert!((eta - 0.80590).abs() < 1e-5);
    assert_eq!(calibrate_from_leading_gain(0.0, 7.0), Err(Error::NoParametricGain));
    assert!(calibrate_from_leading_gain(1.0, f64::NAN).is_err());
}

#[test]
fn calibrated_leading_mode_squeezing_round_trips() {
    let s = setup(0.5e-3, 200);
    let l = s.phase_matching.jsa(&s.pump).unwrap().into_matrix();
    let set = factorized(&l);
    let eta = calibrate_gain_scale(&set, 7.0).unwrap();
    let leading = ModeMatrix::new(set.modes().rows(0, 1).into_owned()).unwrap();
    let cov = reduced_covariance(&set, eta, leading.matrix()).unwrap();
    assert!((cov.p_variance(0) - 0.5 * 10f64.powf(-0.7)).abs() < 1e-12);
    assert!((squeezing_db(cov.p_variance(0)).unwrap() - 7.0).abs() < 1e-9);
}

#[test]
fn squeezing_db_examples() {
    assert_eq!(squeezing_db(0.5).unwrap(), 0.0);
    assert!((squeezing_db(0.05).unwrap() - 10.0).abs() < 1e-12);
    assert!((squeezing_db(0.5 * 10f64.powf(-0.7)).unwrap() - 7.0).abs() < 1e-12);
    assert!(squeezing_db(0.0).is_err());
    assert!(squeezing_db(-1.0).is_err());
}

#[test]
fn non_finite_gain_scale_is_rejected() {
    let set = factorized(&DMatrix::identity(2, 2));
    assert!(build_propagator(&set, f64::INFINITY).is_err());
    assert!(covariance_from_supermodes(&set, f64::NAN).is_err());
}

#[test]
fn squeezing_parameter_ratios_do_not_depend_on_gain_scale() {
    let s = setup(1e-3, 120);
    let set = factorized(&s.phase_matching.jsa(&s.pump).unwrap().into_matrix());
    let top = ModeMatrix::new(set.modes().rows(0, 5).into_owned()).unwrap();
    let ratios = |eta: f64| -> Vec<f64> {
        let cov = reduced_covariance(&set, eta, top.matrix()).unwrap();
        let r: Vec<f64> = (0..5).map(|k| -0.5 * (2.0 * cov.p_variance(k)).ln()).collect();
        r.iter().map(|x| x / r[0]).collect()
    };
    let a = ratios(0.2);
    let b = ratios(1.3);
    for k in 0..5 {
        assert!((a[k] - b[k]).abs() < 1e-9);
        assert!((a[k] - set.gains()[k] / set.gains()[0]).abs() < 1e-9);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn propagators_match_the_oracle(n in 1usize..=16, eta in 0.0f64..0.6, seed in any::<u64>()) {
        let mut r = rng(seed);
        let l = random_symmetric(&mut r, n);
        let s = build_propagator(&factorized(&l), eta).unwrap();
        prop_assert!((s.matrix() - propagator_oracle(&l, eta)).norm() < 1e-8);
        let omega = symplectic_form(n);
        prop_assert!((s.matrix() * &omega * s.matrix().transpose() - &omega).norm() < 1e-9);
    }

    #[test]
    fn covariances_are_pure_and_physical(n in 1usize..=12, eta in 0.0f64..1.5, seed in any::<u64>()) {
        let mut r = rng(seed);
        let set = factorized(&random_symmetric(&mut r, n));
        let gamma = covariance_from_supermodes(&set, eta).unwrap();
        prop_assert!(gamma.log_det_2gamma().unwrap().abs() < 1e-6);
        prop_assert!(gamma.uncertainty_margin() > -1e-9);
        prop_assert!((gamma.matrix() - gamma.matrix().transpose()).norm() < 1e-12);
    }
}
