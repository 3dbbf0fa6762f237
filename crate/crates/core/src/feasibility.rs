//! Closed-form noise, suppression and detection estimates, and the budget
//! that compares them with the gravitational coupling.

use std::fmt;

use num_complex::Complex64;

use crate::blackbody::{effective_dipole, transition_rates};
use crate::collisions::config_collision_rate;
use crate::constants::{PhysicalConstants, ELEMENTARY_CHARGE};
use crate::dynamics::top_state_negativity;
use crate::error::{Error, Result};
use crate::params::{derive_scales, ExperimentConfig};

/// |γ| of ²⁹Si in rad s⁻¹ T⁻¹.
pub const SI29_GYROMAGNETIC_RATIO: f64 = 5.3190e7;

/// Dipole-dipole energy scale of n = 10⁹ aligned spins per unit p², J.
pub const MAGNETIC_PREFACTOR: f64 = 1e-28;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Verdict {
    Pass,
    Marginal,
    Fail,
    /// Reported for context; never blocks.
    Info,
}

impl Verdict {
    pub fn is_pass(self) -> bool {
        self != Verdict::Fail
    }

    /// Energy against V_G: < 0.3 pass, < 1 marginal.
    pub fn for_energy_ratio(ratio: f64) -> Self {
        if ratio < 0.3 {
            Verdict::Pass
        } else if ratio < 1.0 {
            Verdict::Marginal
        } else {
            Verdict::Fail
        }
    }

    /// Decoherence rate against the entangling rate: < 1 pass, < 100 marginal.
    pub fn for_rate_ratio(ratio: f64) -> Self {
        if ratio < 1.0 {
            Verdict::Pass
        } else if ratio < 100.0 {
            Verdict::Marginal
        } else {
            Verdict::Fail
        }
    }

    /// Expected number of events over the run: < 0.1 pass, < 10 marginal.
    pub fn for_event_count(n: f64) -> Self {
        if n < 0.1 {
            Verdict::Pass
        } else if n < 10.0 {
            Verdict::Marginal
        } else {
            Verdict::Fail
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "PASS",
            Verdict::Marginal => "MARGINAL",
            Verdict::Fail => "FAIL",
            Verdict::Info => "INFO",
        })
    }
}

/// One row of the noise budget.
#[derive(Debug, Clone, PartialEq)]
pub struct BudgetLine {
    pub name: String,
    pub value: f64,
    pub unit: &'static str,
    /// The comparator (V_G, the entangling rate, or 1 for event counts).
    pub target: f64,
    pub verdict: Verdict,
    pub notes: String,
}

impl BudgetLine {
    pub fn pass(&self) -> bool {
        self.verdict.is_pass()
    }

    pub fn ratio(&self) -> f64 {
        self.value / self.target
    }

    fn energy(name: &str, value: f64, v_g: f64, notes: String) -> Self {
        BudgetLine { name: name.into(), value, unit: "J", target: v_g, verdict: Verdict::for_energy_ratio(value / v_g), notes }
    }
}

/// Inputs to the closed-form estimates that are not part of the
/// experiment itself.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FeasibilitySettings {
    /// Number of nuclear spins per sphere.
    pub nuclear_spins: f64,
    /// Nuclear gyromagnetic ratio, rad s⁻¹ T⁻¹ (Hz T⁻¹ when `gyromagnetic_in_hz`).
    pub nuclear_gyromagnetic_ratio: f64,
    pub gyromagnetic_in_hz: bool,
    /// Permanent electric dipole, C·m.
    pub dipole_moment: f64,
    /// Averaging time of the rotating dipole, s.
    pub averaging_time: f64,
    /// Angle between dipole and rotation axis, rad.
    pub dipole_tilt: f64,
    /// Keep the (2 − 2 cos ω t) factor instead of its envelope.
    pub exact_dipole_average: bool,
    pub ellipticity: f64,
    pub laser_wavelength: f64,
    pub initial_temperature: f64,
    /// Debye coefficient of c_M = βT³, J kg⁻¹ K⁻⁴.
    pub debye_beta: f64,
    /// Heating constant a, m⁴ W⁻¹ s⁻².
    pub heating_constant: f64,
    /// Duration of the entangling run, s.
    pub integration_time: f64,
    /// Trap excursion used for ⟨z²⟩; the sphere radius when unset.
    pub trap_excursion: Option<f64>,
    /// Transverse (x, y) excursion in the trap, m.
    pub transverse_excursion: f64,
}

impl Default for FeasibilitySettings {
    fn default() -> Self {
        FeasibilitySettings {
            nuclear_spins: 1e9,
            nuclear_gyromagnetic_ratio: SI29_GYROMAGNETIC_RATIO,
            gyromagnetic_in_hz: false,
            dipole_moment: 100.0 * ELEMENTARY_CHARGE * 1e-6,
            averaging_time: 1.0,
            dipole_tilt: std::f64::consts::FRAC_PI_2,
            exact_dipole_average: false,
            ellipticity: 1e-5,
            laser_wavelength: 300e-9,
            initial_temperature: 1.0,
            debye_beta: 3e-4,
            heating_constant: 8.15e-11,
            integration_time: 10.0,
            trap_excursion: None,
            transverse_excursion: 0.0,
        }
    }
}

/// Barnett polarisation p = ħ(γB + ω)/(k_B T).
pub fn barnett_polarization(gyromagnetic_ratio: f64, field: f64, omega: f64, temperature: f64, k: &PhysicalConstants) -> Result<f64> {
    if !(temperature > 0.0) {
        return Err(Error::Domain(format!("polarisation needs T > 0, got {temperature}")));
    }
    Ok(k.hbar * (gyromagnetic_ratio * field + omega) / (k.k_b * temperature))
}

/// Nuclear-spin dipole energy 10⁻²⁸ p² (n/10⁹)² J against V_G.
pub fn magnetic_dipole_budget(config: &ExperimentConfig, settings: &FeasibilitySettings) -> Result<BudgetLine> {
    let v_g = derive_scales(config)?.v_g;
    let gamma = if settings.gyromagnetic_in_hz {
        2.0 * std::f64::consts::PI * settings.nuclear_gyromagnetic_ratio
    } else {
        settings.nuclear_gyromagnetic_ratio
    };
    let p =
        barnett_polarization(gamma, config.magnetic_field, config.sphere_a.angular_velocity, config.bath_temperature, &config.constants)?;
    let scale = settings.nuclear_spins / 1e9;
    let v = MAGNETIC_PREFACTOR * p * p * scale * scale;
    Ok(BudgetLine::energy("magnetic_dipole", v, v_g, format!("polarisation p = {p:.3e}; unshielded")))
}

/// ‖⟨p⟩‖² of a dipole rotating at ω_s, averaged over t_r, tilted by δ from
/// the rotation axis.
pub fn averaged_dipole_squared(p0: f64, omega: f64, averaging_time: f64, tilt: f64, exact: bool) -> Result<f64> {
    let wt = omega * averaging_time;
    if !(wt > 0.0) {
        return Err(Error::Domain("dipole averaging needs ω_s t_r > 0".into()));
    }
    let spin = if exact { 2.0 - 2.0 * wt.cos() } else { 1.0 };
    Ok(p0 * p0 * (tilt.cos().powi(2) + spin * tilt.sin().powi(2) / (wt * wt)))
}

/// Time-averaged dipole-dipole energy ‖⟨p⟩‖²/(4πε₀r³).
pub fn electric_dipole_energy(
    p0: f64,
    omega: f64,
    averaging_time: f64,
    separation: f64,
    tilt: f64,
    exact: bool,
    k: &PhysicalConstants,
) -> Result<f64> {
    let p2 = averaged_dipole_squared(p0, omega, averaging_time, tilt, exact)?;
    Ok(p2 / (4.0 * std::f64::consts::PI * k.eps0 * separation.powi(3)))
}

pub fn electric_dipole_suppression(config: &ExperimentConfig, settings: &FeasibilitySettings) -> Result<BudgetLine> {
    let v_g = derive_scales(config)?.v_g;
    let omega = config.sphere_a.angular_velocity;
    let v = electric_dipole_energy(
        settings.dipole_moment,
        omega,
        settings.averaging_time,
        config.separation,
        settings.dipole_tilt,
        settings.exact_dipole_average,
        &config.constants,
    )?;
    let wt = omega * settings.averaging_time;
    let notes = if wt < 100.0 { format!("warning: ω_s t_r = {wt:.3e} is not ≫ 1") } else { format!("ω_s t_r = {wt:.3e}") };
    Ok(BudgetLine::energy("electric_dipole", v, v_g, notes))
}

/// Leading quadrupole energy of two spheroids, G M_A M_B a_A a_B ε_A ε_B/(512 r³).
pub fn spheroid_energy(masses: (f64, f64), radii: (f64, f64), ellipticities: (f64, f64), separation: f64, k: &PhysicalConstants) -> f64 {
    k.g * masses.0 * masses.1 * radii.0 * radii.1 * ellipticities.0 * ellipticities.1 / (512.0 * separation.powi(3))
}

/// ε at which two equal-ellipticity spheroids reach `target`.
pub fn ellipticity_threshold(masses: (f64, f64), radii: (f64, f64), separation: f64, target: f64, k: &PhysicalConstants) -> f64 {
    (target / spheroid_energy(masses, radii, (1.0, 1.0), separation, k)).sqrt()
}

pub fn spheroid_quadrupole(config: &ExperimentConfig, settings: &FeasibilitySettings) -> Result<BudgetLine> {
    let d = derive_scales(config)?;
    let k = &config.constants;
    let masses = (d.a.mass, d.b.mass);
    let radii = (config.sphere_a.radius, config.sphere_b.radius);
    let e = settings.ellipticity;
    let v = spheroid_energy(masses, radii, (e, e), config.separation, k);
    let eps_star = ellipticity_threshold(masses, radii, config.separation, d.v_g, k);
    Ok(BudgetLine::energy("spheroid_quadrupole", v, d.v_g, format!("ε = {e:.1e}; threshold ε* = {eps_star:.3e}")))
}

/// Casimir-Polder energy 23ħcR⁶/(4πr⁷)·((ε−1)/(ε+2))².
pub fn casimir_energy(radius: f64, permittivity: f64, separation: f64, k: &PhysicalConstants) -> Result<f64> {
    if !(separation > 2.0 * radius) {
        return Err(Error::Domain("Casimir estimate needs r > 2R".into()));
    }
    let cm = (permittivity - 1.0) / (permittivity + 2.0);
    Ok(23.0 * k.hbar * k.c * radius.powi(6) / (4.0 * std::f64::consts::PI * separation.powi(7)) * cm * cm)
}

pub fn casimir_line(config: &ExperimentConfig) -> Result<BudgetLine> {
    let v_g = derive_scales(config)?.v_g;
    let s = &config.sphere_a;
    let v = casimir_energy(s.radius, s.relative_permittivity, config.separation, &config.constants)?;
    Ok(BudgetLine {
        name: "casimir".into(),
        value: v,
        unit: "J",
        target: v_g,
        verdict: Verdict::Info,
        notes: "couples positions only; cannot entangle angular momenta".into(),
    })
}

/// T_f from ∫ βT³ dT = 4ω_f λ² Im[(ε−1)/(ε+2)]/(aRρ) with ε = n².
#[allow(clippy::too_many_arguments)]
pub fn laser_heating_final_temperature(
    initial_temperature: f64,
    omega_final: f64,
    wavelength: f64,
    radius: f64,
    density: f64,
    refractive_index: Complex64,
    debye_beta: f64,
    heating_constant: f64,
) -> Result<f64> {
    if !(radius > 0.0 && density > 0.0 && debye_beta > 0.0 && heating_constant > 0.0) || !(initial_temperature >= 0.0) {
        return Err(Error::Domain("laser heating needs positive R, ρ, β, a and T_i ≥ 0".into()));
    }
    let eps = refractive_index * refractive_index;
    let absorption = ((eps - 1.0) / (eps + 2.0)).im;
    let rhs = 16.0 * omega_final * wavelength * wavelength * absorption / (heating_constant * radius * density * debye_beta);
    Ok((initial_temperature.powi(4) + rhs).powf(0.25))
}

pub fn laser_heating_line(config: &ExperimentConfig, settings: &FeasibilitySettings) -> Result<BudgetLine> {
    let s = &config.sphere_a;
    let t_f = laser_heating_final_temperature(
        settings.initial_temperature,
        s.angular_velocity,
        settings.laser_wavelength,
        s.radius,
        s.density,
        s.refractive_index,
        settings.debye_beta,
        settings.heating_constant,
    )?;
    Ok(BudgetLine {
        name: "laser_heating".into(),
        value: t_f,
        unit: "K",
        target: settings.initial_temperature,
        verdict: Verdict::Info,
        notes: format!("spin-up from T_i = {} K", settings.initial_temperature),
    })
}

/// Expected collisions over the run, r·t.
pub fn collision_line(config: &ExperimentConfig, settings: &FeasibilitySettings) -> Result<BudgetLine> {
    let r = config_collision_rate(config)?;
    let n = r * settings.integration_time;
    Ok(BudgetLine {
        name: "collisions".into(),
        value: n,
        unit: "1",
        target: 1.0,
        verdict: Verdict::for_event_count(n),
        notes: format!("r = {r:.3e} s⁻¹ over t = {} s", settings.integration_time),
    })
}

/// Unitary entangling rate E_N(t)/t of the m = l preparation, s⁻¹.
pub fn entangling_rate(config: &ExperimentConfig, t: f64) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::Domain("entangling rate needs t > 0".into()));
    }
    Ok(top_state_negativity(derive_scales(config)?.coupling_g(t)) / t)
}

/// Thermal absorption rate γ_l of sphere A at the bath temperature against
/// the entangling rate.
pub fn blackbody_line(config: &ExperimentConfig, settings: &FeasibilitySettings) -> Result<BudgetLine> {
    let d = derive_scales(config)?;
    let s = &config.sphere_a;
    let k = &config.constants;
    let t = config.bath_temperature;
    let dipole = effective_dipole(s.volume(), s.relative_permittivity, t, k)?;
    let rates = transition_rates(2.0 * (d.a.quantum_number + 1.0), d.a.inertia, t, dipole, k)?;
    let target = entangling_rate(config, settings.integration_time)?;
    Ok(BudgetLine {
        name: "blackbody".into(),
        value: rates.gamma,
        unit: "1/s",
        target,
        verdict: Verdict::for_rate_ratio(rates.gamma / target),
        notes: format!("T = {t} K, emission χ = {:.3e} s⁻¹", rates.chi),
    })
}

/// Every budget line for a configuration.
pub fn budget_report(config: &ExperimentConfig, settings: &FeasibilitySettings) -> Result<Vec<BudgetLine>> {
    Ok(vec![
        magnetic_dipole_budget(config, settings)?,
        electric_dipole_suppression(config, settings)?,
        spheroid_quadrupole(config, settings)?,
        casimir_line(config)?,
        collision_line(config, settings)?,
        blackbody_line(config, settings)?,
        laser_heating_line(config, settings)?,
    ])
}

pub const BUDGET_CSV_HEADER: &str = "name,value,unit,target,pass";

pub fn render_budget_csv(lines: &[BudgetLine]) -> String {
    let mut out = String::from(BUDGET_CSV_HEADER);
    out.push('\n');
    for l in lines {
        out.push_str(&format!("{},{:e},{},{:e},{}\n", l.name, l.value, l.unit, l.target, l.pass()));
    }
    out
}

pub fn render_budget_text(lines: &[BudgetLine]) -> String {
    let mut out = format!("{:<20} {:>12} {:<4} {:>12} {:>10}  {}\n", "name", "value", "unit", "target", "verdict", "notes");
    for l in lines {
        out.push_str(&format!(
            "{:<20} {:>12.4e} {:<4} {:>12.4e} {:>10}  {}\n",
            l.name,
            l.value,
            l.unit,
            l.target,
            l.verdict.to_string(),
            l.notes
        ));
    }
    out
}

/// Magnetic-trap readout of L_z through the centre-of-mass motion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectionReport {
    pub gradient: f64,
    /// Trap frequency, rad/s.
    pub omega: f64,
    /// Coupling λ of the term ħλ L_z (a† + a).
    pub lambda: f64,
    /// (γ I G₀)², prefactor of the variance map before the sin⁻⁴ factor.
    pub variance_map_coefficient: f64,
    /// G₀²⟨z²⟩, T².
    pub field_term: f64,
    /// ⟨L²⟩/(Iγ)² = ω²/γ², T².
    pub angular_momentum_term: f64,
    pub field_dominates: bool,
    /// Position resolution matching the separable bound at the run time, m.
    pub required_resolution: f64,
    pub integration_time: f64,
}

pub fn detection_trap(config: &ExperimentConfig, settings: &FeasibilitySettings) -> Result<DetectionReport> {
    let g0 = config.field_gradient;
    if !(g0 > 0.0) {
        return Err(Error::Domain(format!("field gradient must be positive, got {g0}")));
    }
    let d = derive_scales(config)?;
    let s = &config.sphere_a;
    let k = &config.constants;
    let chi = s.magnetic_susceptibility.abs();
    let omega = (chi * g0 * g0 / (s.density * k.mu0)).sqrt();
    let gamma = s.gyromagnetic_ratio;
    let inertia = d.a.inertia;
    let lambda = chi * s.volume() * g0 / (gamma * inertia * k.mu0 * (2.0 * k.hbar * d.a.mass * omega).sqrt());
    let z = settings.trap_excursion.unwrap_or(s.radius);
    let field_term = (g0 * z).powi(2);
    let angular_momentum_term = (s.angular_velocity / gamma).powi(2);
    let t = settings.integration_time;
    Ok(DetectionReport {
        gradient: g0,
        omega,
        lambda,
        variance_map_coefficient: (gamma * inertia * g0).powi(2),
        field_term,
        angular_momentum_term,
        field_dominates: field_term > 100.0 * angular_momentum_term,
        required_resolution: required_resolution(config, t)?,
        integration_time: t,
    })
}

/// Set when the transverse field (G₀x/2)² exceeds 1% of the axial G₀²z²,
/// which the one-dimensional readout model leaves out.
pub fn field_realism_warning(config: &ExperimentConfig, settings: &FeasibilitySettings) -> Option<String> {
    let z = settings.trap_excursion.unwrap_or(config.sphere_a.radius);
    let x = settings.transverse_excursion;
    let ratio = (0.5 * x / z).powi(2);
    (ratio > 0.01)
        .then(|| format!("transverse field term is {ratio:.2e} of the axial one at x = {x:e} m; the axial readout model ignores it"))
}

/// (ΔL_z)² = (γIG₀/(2 sin²(Ωt/2)))² (Δz²_t − Δz²_0).
pub fn detection_variance_map(var_z_t: f64, var_z_0: f64, t: f64, config: &ExperimentConfig) -> Result<f64> {
    let r = detection_trap(config, &FeasibilitySettings { integration_time: t, ..Default::default() })?;
    let s2 = (0.5 * r.omega * t).sin().powi(2);
    if s2 < 1e-300 || s2 < f64::EPSILON * (0.5 * r.omega * t).abs() {
        return Err(Error::SingularTime(format!("sin(Ωt/2) vanishes at t = {t} s")));
    }
    let diff = var_z_t - var_z_0;
    if diff < 0.0 {
        return Err(Error::Domain(format!("position variance decreased ({var_z_t:e} < {var_z_0:e})")));
    }
    Ok(r.variance_map_coefficient / (4.0 * s2 * s2) * diff)
}

/// z(t) − z(0) = 2 L_z sin²(Ωt/2)/(γ I G₀) for a given L_z (J·s).
pub fn displacement(l_z: f64, t: f64, config: &ExperimentConfig) -> Result<f64> {
    let d = derive_scales(config)?;
    let s = &config.sphere_a;
    let omega = (s.magnetic_susceptibility.abs() * config.field_gradient.powi(2) / (s.density * config.constants.mu0)).sqrt();
    Ok(2.0 * l_z * (0.5 * omega * t).sin().powi(2) / (s.gyromagnetic_ratio * d.a.inertia * config.field_gradient))
}

/// Small-time Δz = ΔL |χ| G₀ t²/(2ρμ₀γI) with ΔL² = (l_A + l_B)ħ².
pub fn required_resolution(config: &ExperimentConfig, t: f64) -> Result<f64> {
    let d = derive_scales(config)?;
    let s = &config.sphere_a;
    let k = &config.constants;
    let delta_l = ((d.a.quantum_number + d.b.quantum_number).sqrt()) * k.hbar;
    Ok(delta_l * s.magnetic_susceptibility.abs() * config.field_gradient * t * t
        / (2.0 * s.density * k.mu0 * s.gyromagnetic_ratio * d.a.inertia))
}
