use framedrag::blackbody::Preparation;
use framedrag::collisions::{
    collision_mixture, collision_negativity_curve_at_rate, collision_rate, poisson_weight, prepared_state, CollisionModel,
};
use framedrag::constants::H2_MASS;
use framedrag::entanglement::log_negativity;
use framedrag::linalg::HermitianSpectrum;
use framedrag::params::ExperimentConfig;
use proptest::prelude::*;

fn prep() -> impl Strategy<Value = Preparation> {
    prop_oneof![Just(Preparation::M0), Just(Preparation::Ml)]
}

fn trace_norm(m: &framedrag::linalg::CMatrix) -> f64 {
    HermitianSpectrum::of_dense(m).unwrap().eigenvalues().iter().map(|v| v.abs()).sum()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn mixtures_are_density_matrices(p in prep(), n in 1u32..=6, rate in 0.0..2.0f64, t in 0.0..10.0f64) {
        let config = ExperimentConfig::default();
        let (basis, psi) = prepared_state(&config, p, n, t).unwrap();
        let rho = collision_mixture(&psi, &basis, &CollisionModel::new(rate, n, t).unwrap()).unwrap();
        prop_assert!((rho.trace() - 1.0).abs() <= 1e-12);
        let lo = HermitianSpectrum::of_dense(&rho.matrix).unwrap().eigenvalues()[0];
        prop_assert!(lo >= -1e-9, "{}", lo);
    }

    #[test]
    fn mixture_stays_close_to_the_pure_state(p in prep(), n in 1u32..=4, rate in 0.0..2.0f64, t in 0.0..10.0f64) {
        let config = ExperimentConfig::default();
        let (basis, psi) = prepared_state(&config, p, n, t).unwrap();
        let rho = collision_mixture(&psi, &basis, &CollisionModel::new(rate, n, t).unwrap()).unwrap();
        let distance = trace_norm(&(rho.matrix - psi.density().matrix));
        let bound = 2.0 * (1.0 - poisson_weight(0, rate, t).unwrap());
        prop_assert!(distance <= bound + 1e-12, "{} > {}", distance, bound);
    }

    #[test]
    fn top_preparation_loses_negativity_with_rate(n in 1u32..=6, t in 0.5..10.0f64, r1 in 0.0..3.0f64, r2 in 0.0..3.0f64) {
        let (lo, hi) = if r1 <= r2 { (r1, r2) } else { (r2, r1) };
        let config = ExperimentConfig::default();
        let e = |r: f64| collision_negativity_curve_at_rate(&config, Preparation::Ml, r, &[n], &[t]).unwrap()[0].log_negativity;
        let (e_lo, e_hi) = (e(lo), e(hi));
        prop_assert!(e_hi <= e_lo * (1.0 + 1e-9), "E_N({}) = {} > E_N({}) = {}", hi, e_hi, lo, e_lo);
    }

    #[test]
    fn rate_scales_with_kinetic_theory(radius in 1e-6..1e-4f64, pressure in 1e-20..1e-10f64, temperature in 0.01..300.0f64) {
        let k = ExperimentConfig::default().constants;
        let r = collision_rate(radius, pressure, temperature, H2_MASS, &k).unwrap();
        let rel = |a: f64, b: f64| (a / b - 1.0).abs();
        prop_assert!(rel(collision_rate(2.0 * radius, pressure, temperature, H2_MASS, &k).unwrap(), 4.0 * r) < 1e-12);
        prop_assert!(rel(collision_rate(radius, 3.0 * pressure, temperature, H2_MASS, &k).unwrap(), 3.0 * r) < 1e-12);
        prop_assert!(rel(collision_rate(radius, pressure, 4.0 * temperature, H2_MASS, &k).unwrap(), 0.5 * r) < 1e-12);
    }
}

/// The m = 0 preparation is a counterexample to monotonicity in r: its
/// kicked branches carry negativity of their own, so E_N first collapses
/// and then partly recovers as they gain weight.
#[test]
fn zero_preparation_is_not_monotone_in_rate() {
    let config = ExperimentConfig::default();
    let t = 10.0;
    let e = |r: f64| collision_negativity_curve_at_rate(&config, Preparation::M0, r, &[1], &[t]).unwrap()[0].log_negativity;
    let (at_001, at_01) = (e(0.01 / t), e(0.1 / t));
    assert!(at_01 > at_001, "E_N(rt=0.1) = {at_01:e}, E_N(rt=0.01) = {at_001:e}");
}

#[test]
fn weak_collisions_barely_touch_the_top_preparation() {
    let config = ExperimentConfig::default();
    let unitary = collision_negativity_curve_at_rate(&config, Preparation::Ml, 0.0, &[1], &[10.0]).unwrap()[0].log_negativity;
    for rt in [1e-4, 1e-3, 5e-3, 9.9e-3] {
        for n in [1, 3, 6] {
            let e = collision_negativity_curve_at_rate(&config, Preparation::Ml, rt / 10.0, &[n], &[10.0]).unwrap()[0].log_negativity;
            assert!((e - unitary).abs() <= 0.1 * unitary, "rt = {rt}, n = {n}: {e} vs {unitary}");
        }
    }
}

#[test]
fn products_stay_separable_after_kicks() {
    let config = ExperimentConfig::default();
    let (basis, psi) = prepared_state(&config, Preparation::M0, 3, 0.0).unwrap();
    let rho = collision_mixture(&psi, &basis, &CollisionModel::new(1.0, 3, 1.0).unwrap()).unwrap();
    assert!(log_negativity(&rho).unwrap() < 1e-12);
}
