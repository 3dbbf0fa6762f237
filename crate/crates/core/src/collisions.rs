//! Gas collisions as random angular-momentum kicks.

use rayon::prelude::*;

use crate::amspace::{
    apply_ladder_power, build_interaction_hamiltonian, BasisWindow, DensityMatrix, Ladder, Sphere, StateVector, TruncatedProductBasis,
};
use crate::blackbody::Preparation;
use crate::constants::PhysicalConstants;
use crate::dynamics::{initial_state, Propagator};
use crate::entanglement::log_negativity;
use crate::error::{Error, Result};
use crate::linalg::{CMatrix, C64};
use crate::params::{derive_scales, ExperimentConfig};

/// Relative norm that may leave the window before a branch is rejected.
pub const OVERFLOW_TOLERANCE: f64 = 1e-9;

/// Extra m half-width beyond the largest kick used for collision windows.
const WINDOW_MARGIN: u32 = 8;

/// P(k; t) = (rt)^k e^{−rt} / k!.
pub fn poisson_weight(k: i64, rate: f64, t: f64) -> Result<f64> {
    if k < 0 {
        return Err(Error::Domain(format!("Poisson count must be non-negative, got {k}")));
    }
    let x = rate * t;
    if !(x >= 0.0) || !x.is_finite() {
        return Err(Error::Domain(format!("rt must be finite and non-negative, got {x}")));
    }
    if x == 0.0 {
        return Ok(if k == 0 { 1.0 } else { 0.0 });
    }
    let log_fact: f64 = (1..=k).map(|i| (i as f64).ln()).sum();
    Ok((k as f64 * x.ln() - x - log_fact).exp())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CollisionModel {
    /// s⁻¹.
    pub rate: f64,
    /// Largest number of quanta a single collision transfers.
    pub max_quanta: u32,
    /// s.
    pub time: f64,
}

impl CollisionModel {
    pub fn new(rate: f64, max_quanta: u32, time: f64) -> Result<Self> {
        if !(rate >= 0.0) || !rate.is_finite() {
            return Err(Error::Domain(format!("collision rate must be finite and non-negative, got {rate}")));
        }
        if max_quanta < 1 {
            return Err(Error::Domain("max_quanta must be at least 1".into()));
        }
        if !(time >= 0.0) || !time.is_finite() {
            return Err(Error::Domain(format!("time must be finite and non-negative, got {time}")));
        }
        Ok(CollisionModel { rate, max_quanta, time })
    }
}

fn add_projector(rho: &mut CMatrix, v: &StateVector, weight: f64) {
    let a = &v.amplitudes;
    let w = C64::new(weight, 0.0);
    rho.gerc(w, a, a, C64::new(1.0, 0.0));
}

/// No-collision and single-collision terms of the Poisson mixture.
///
/// Each kicked branch (L±)^q|ψ⟩ is normalised on its own; branches that
/// vanish at a ladder edge are dropped and the result is rescaled to unit
/// trace.
pub fn collision_mixture(psi: &StateVector, basis: &TruncatedProductBasis, model: &CollisionModel) -> Result<DensityMatrix> {
    let p0 = poisson_weight(0, model.rate, model.time)?;
    let p1 = poisson_weight(1, model.rate, model.time)?;
    let n = basis.dim();
    let mut rho = CMatrix::zeros(n, n);
    let psi = psi.normalized()?;
    add_projector(&mut rho, &psi, p0);
    if p1 > 0.0 {
        let branch_weight = p1 / (4.0 * f64::from(model.max_quanta));
        for q in 1..=model.max_quanta {
            for sphere in [Sphere::A, Sphere::B] {
                for dir in [Ladder::Raise, Ladder::Lower] {
                    let (kicked, lost) = apply_ladder_power(&psi, basis, sphere, dir, q)?;
                    let kept = kicked.norm();
                    if lost > OVERFLOW_TOLERANCE * (kept + lost) {
                        return Err(Error::OutsideWindow {
                            what: format!("{q}-quantum kick on sphere {sphere:?} (relative loss {:e})", lost / (kept + lost)),
                        });
                    }
                    if kept == 0.0 {
                        continue;
                    }
                    add_projector(&mut rho, &kicked.normalized()?, branch_weight);
                }
            }
        }
    }
    let tr = rho.trace().re;
    rho /= C64::new(tr, 0.0);
    DensityMatrix::new(psi.dims, rho)
}

/// Kinetic-theory impact rate πR²P/√(2π k_B T m_gas), s⁻¹.
pub fn collision_rate(radius: f64, pressure: f64, temperature: f64, gas_mass: f64, k: &PhysicalConstants) -> Result<f64> {
    if !(temperature > 0.0) || !(gas_mass > 0.0) {
        return Err(Error::Domain("collision rate needs positive temperature and gas mass".into()));
    }
    if !(radius >= 0.0) || !(pressure >= 0.0) {
        return Err(Error::Domain("collision rate needs non-negative radius and pressure".into()));
    }
    let pi = std::f64::consts::PI;
    Ok(pi * radius * radius * pressure / (2.0 * pi * k.k_b * temperature * gas_mass).sqrt())
}

/// Collision rate of sphere A for the configured gas.
pub fn config_collision_rate(config: &ExperimentConfig) -> Result<f64> {
    collision_rate(config.sphere_a.radius, config.gas_pressure, config.bath_temperature, config.gas_molecule_mass, &config.constants)
}

/// One point of a collision negativity curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CollisionRow {
    pub t: f64,
    pub max_quanta: u32,
    pub preparation: Preparation,
    pub log_negativity: f64,
}

/// Unitary state of a preparation on a window wide enough for `max_quanta` kicks.
pub fn prepared_state(
    config: &ExperimentConfig,
    preparation: Preparation,
    max_quanta: u32,
    t: f64,
) -> Result<(TruncatedProductBasis, StateVector)> {
    let scales = derive_scales(config)?;
    let (l_a, l_b) = (scales.a.quantum_number.round(), scales.b.quantum_number.round());
    let window = |l: f64| {
        let m = preparation.m_for(l);
        let anchors: Vec<f64> = if m == 0.0 { vec![0.0] } else { vec![m, -m] };
        BasisWindow::new(l, &anchors, max_quanta + WINDOW_MARGIN)
    };
    let basis = TruncatedProductBasis::new(window(l_a)?, window(l_b)?);
    let h = build_interaction_hamiltonian(&basis, scales.alpha)?;
    let psi0 = initial_state(&basis, preparation.m_for(l_a), preparation.m_for(l_b))?;
    let psi = Propagator::new(&h)?.apply(&psi0, t);
    Ok((basis, psi))
}

/// E_N of the collision mixture for each (n, t) pair, rate taken from the config.
pub fn collision_negativity_curve(
    config: &ExperimentConfig,
    preparation: Preparation,
    n_list: &[u32],
    times: &[f64],
) -> Result<Vec<CollisionRow>> {
    let rate = config_collision_rate(config)?;
    collision_negativity_curve_at_rate(config, preparation, rate, n_list, times)
}

pub fn collision_negativity_curve_at_rate(
    config: &ExperimentConfig,
    preparation: Preparation,
    rate: f64,
    n_list: &[u32],
    times: &[f64],
) -> Result<Vec<CollisionRow>> {
    let jobs: Vec<(u32, f64)> = n_list.iter().flat_map(|&n| times.iter().map(move |&t| (n, t))).collect();
    jobs.par_iter()
        .map(|&(n, t)| {
            let model = CollisionModel::new(rate, n, t)?;
            let (basis, psi) = prepared_state(config, preparation, n, t)?;
            let rho = collision_mixture(&psi, &basis, &model)?;
            Ok(CollisionRow { t, max_quanta: n, preparation, log_negativity: log_negativity(&rho)? })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::H2_MASS;
    use crate::entanglement::log_negativity_pure;
    use approx::assert_relative_eq;

    #[test]
    fn poisson_examples() {
        assert_eq!(poisson_weight(0, 0.0, 5.0).unwrap(), 1.0);
        assert_relative_eq!(poisson_weight(1, 1.0, 1.0).unwrap(), (-1f64).exp(), max_relative = 1e-15);
        assert_relative_eq!(poisson_weight(2, 0.4, 1.0).unwrap(), 0.08 * (-0.4f64).exp(), max_relative = 1e-14);
        assert!(poisson_weight(-1, 1.0, 1.0).is_err());
    }

    #[test]
    fn nominal_collision_rate() {
        let k = PhysicalConstants::CODATA2018;
        let r = collision_rate(50e-6, 1e-17, 0.1, H2_MASS, &k).unwrap();
        assert_relative_eq!(r, 0.4, max_relative = 0.15);
        assert_eq!(collision_rate(50e-6, 0.0, 0.1, H2_MASS, &k).unwrap(), 0.0);
        let hot = collision_rate(50e-6, 1e-17, 0.4, H2_MASS, &k).unwrap();
        assert_relative_eq!(hot / r, 0.5, max_relative = 1e-12);
        assert!(collision_rate(50e-6, 1e-17, 0.0, H2_MASS, &k).is_err());
    }

    #[test]
    fn zero_rate_keeps_pure_state() {
        let config = ExperimentConfig::default();
        let (basis, psi) = prepared_state(&config, Preparation::Ml, 1, 10.0).unwrap();
        let rho = collision_mixture(&psi, &basis, &CollisionModel::new(0.0, 1, 10.0).unwrap()).unwrap();
        let pure = psi.density();
        assert!(crate::linalg::max_abs(&(rho.matrix - pure.matrix)) < 1e-15);
    }

    #[test]
    fn kicks_keep_products_separable() {
        let w = BasisWindow::full(3.0).unwrap();
        let basis = TruncatedProductBasis::new(w.clone(), w);
        let psi = StateVector::basis_state(&basis, 2, 4);
        let rho = collision_mixture(&psi, &basis, &CollisionModel::new(1.0, 1, 1.0).unwrap()).unwrap();
        assert!(log_negativity(&rho).unwrap() < 1e-12);
        assert_relative_eq!(rho.trace(), 1.0, max_relative = 1e-14);
    }

    #[test]
    fn collisions_reduce_negativity() {
        let config = ExperimentConfig::default();
        let (_, psi) = prepared_state(&config, Preparation::M0, 1, 10.0).unwrap();
        let unitary = log_negativity_pure(&psi).unwrap();
        let rows = collision_negativity_curve_at_rate(&config, Preparation::M0, 0.1, &[1, 3, 6], &[10.0]).unwrap();
        assert!(rows.iter().all(|r| r.log_negativity < unitary));
        assert!(rows[0].log_negativity >= rows[1].log_negativity && rows[1].log_negativity >= rows[2].log_negativity);
    }

    #[test]
    fn narrow_window_overflow_is_reported() {
        let w = BasisWindow::new(1e23, &[0.0], 1).unwrap();
        let basis = TruncatedProductBasis::new(w.clone(), w);
        let psi = StateVector::basis_state(&basis, 1, 1);
        let err = collision_mixture(&psi, &basis, &CollisionModel::new(1.0, 2, 1.0).unwrap()).unwrap_err();
        assert!(matches!(err, Error::OutsideWindow { .. }));
    }
}
