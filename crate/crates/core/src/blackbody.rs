//! Black-body emission and absorption of rotational quanta.
//!
//! Photon exchange moves a sphere between neighbouring shells l ↔ l+1
//! through the dipole components A₁, A₂, A₃.

use rayon::prelude::*;

use crate::amspace::{build_interaction_hamiltonian, BasisWindow, DensityMatrix, OperatorMatrix, Sphere, TruncatedProductBasis};
use crate::constants::PhysicalConstants;
use crate::dynamics::initial_state;
use crate::entanglement::{log_negativity, von_neumann_entropy};
use crate::error::{Error, Result};
use crate::linalg::{SparseMatrix, C64};
use crate::lindblad::{integrate_master_equation, IntegratorSettings, LindbladModel};
use crate::params::{derive_scales, ExperimentConfig, SphereSpec};
use crate::wigner::fused_dipole_element;

/// E_N below this counts as vanished in temperature sweeps.
pub const NEGATIVITY_FLOOR: f64 = 1e-6;

/// Mean photon number 1/(exp(ħ²Δ/(2I k_B T)) − 1); zero for T ≤ 0.
pub fn planck_occupation(delta: f64, inertia: f64, temperature: f64, k: &PhysicalConstants) -> f64 {
    if temperature <= 0.0 {
        return 0.0;
    }
    let x = k.hbar * k.hbar * delta / (2.0 * inertia * k.k_b * temperature);
    1.0 / x.exp_m1()
}

/// Emission (χ) and absorption (γ) rates in s⁻¹.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransitionRates {
    pub chi: f64,
    pub gamma: f64,
    pub occupation: f64,
}

pub fn transition_rates(delta: f64, inertia: f64, temperature: f64, d_eff: f64, k: &PhysicalConstants) -> Result<TransitionRates> {
    if !(delta > 0.0) || !(inertia > 0.0) || !(temperature >= 0.0) || !(d_eff >= 0.0) {
        return Err(Error::Domain(format!(
            "rates need Δ > 0, I > 0, T ≥ 0, d ≥ 0 (got Δ = {delta}, I = {inertia}, T = {temperature}, d = {d_eff})"
        )));
    }
    let n = planck_occupation(delta, inertia, temperature, k);
    let prefactor = delta.powi(3) * k.hbar * k.hbar / (6.0 * k.c.powi(3) * inertia.powi(3) * k.eps0) * d_eff * d_eff;
    Ok(TransitionRates { chi: prefactor * (1.0 + n), gamma: prefactor * n, occupation: n })
}

/// Thermally induced dipole of a dielectric sphere, C·m.
pub fn effective_dipole(volume: f64, relative_permittivity: f64, temperature: f64, k: &PhysicalConstants) -> Result<f64> {
    if !(volume >= 0.0) || !(relative_permittivity >= 1.0) || !(temperature >= 0.0) {
        return Err(Error::Domain("effective dipole needs V ≥ 0, ε_r ≥ 1, T ≥ 0".into()));
    }
    let pi = std::f64::consts::PI;
    let wien = (2.0 * pi * k.hbar * k.c / (k.wien_b * k.k_b)).exp_m1();
    let num = 32.0 * pi * pi * volume * volume * (relative_permittivity - 1.0).powi(2) * k.c * k.hbar * k.eps0 * temperature.powi(5);
    Ok((num / (k.wien_b.powi(5) * wien)).sqrt())
}

/// A_p for one shell boundary of a single-sphere window, plus its rates.
#[derive(Debug, Clone)]
pub struct JumpOperatorSet {
    /// Shell index of the lower level l = l_ref + lower_shell.
    pub lower_shell: i32,
    pub l: f64,
    /// Δ = 2(l + 1).
    pub delta: f64,
    /// A₁ (m′ − m = +1), A₂ (−1), A₃ (0), in units of d_eff.
    pub components: [OperatorMatrix; 3],
    pub rates: TransitionRates,
}

const BRANCHES: [i32; 3] = [1, -1, 0];

/// Dipole components connecting `lower_shell` and `lower_shell + 1`.
pub fn build_jump_operators(
    w: &BasisWindow,
    lower_shell: i32,
    sphere: &SphereSpec,
    temperature: f64,
    k: &PhysicalConstants,
) -> Result<JumpOperatorSet> {
    let shells = w.shells();
    if lower_shell < *shells.start() || lower_shell >= *shells.end() {
        return Err(Error::WindowTooNarrow(format!(
            "shell boundary {lower_shell}/{} not inside window shells {shells:?}",
            lower_shell + 1
        )));
    }
    let n = w.dim();
    let components = BRANCHES.map(|b| {
        let triplets = (0..n).filter(|&i| w.state(i).shell == lower_shell).filter_map(|i| {
            let j = w.neighbor(i, i64::from(b), 1)?;
            let v = fused_dipole_element(&w.state(i), b).ok()?;
            Some((i, j, v))
        });
        OperatorMatrix { matrix: SparseMatrix::from_triplets(n, n, triplets.collect::<Vec<_>>()), hermitian: false }
    });
    let l = w.l_ref() + f64::from(lower_shell);
    let delta = 2.0 * (l + 1.0);
    let d_eff = effective_dipole(sphere.volume(), sphere.relative_permittivity, temperature, k)?;
    let rates = transition_rates(delta, sphere.inertia(), temperature, d_eff, k)?;
    Ok(JumpOperatorSet { lower_shell, l, delta, components, rates })
}

/// Initial two-sphere preparation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Preparation {
    /// |l, 0⟩ ⊗ |l, 0⟩.
    M0,
    /// (|l, l⟩ + |l, −l⟩) ⊗ (|l, l⟩ + |l, −l⟩), normalised.
    Ml,
}

impl Preparation {
    pub fn label(self) -> &'static str {
        match self {
            Preparation::M0 => "m0",
            Preparation::Ml => "ml",
        }
    }

    pub fn m_for(self, l: f64) -> f64 {
        match self {
            Preparation::M0 => 0.0,
            Preparation::Ml => l,
        }
    }
}

impl std::str::FromStr for Preparation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "m0" => Ok(Preparation::M0),
            "ml" => Ok(Preparation::Ml),
            other => Err(Error::Parse(format!("unknown preparation '{other}' (expected m0 or ml)"))),
        }
    }
}

/// Truncation and bath options for the master equation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlackbodySettings {
    /// Shells l₀ − w_l ..= l₀ + w_l.
    pub shell_half_width: u32,
    /// m ∈ anchor ± w_m on every shell.
    pub m_half_width: u32,
    /// Separate baths per sphere instead of the shared one.
    pub independent_baths: bool,
    pub integrator: IntegratorSettings,
}

impl Default for BlackbodySettings {
    fn default() -> Self {
        BlackbodySettings { shell_half_width: 1, m_half_width: 2, independent_baths: false, integrator: IntegratorSettings::default() }
    }
}

/// Master equation plus the basis and initial state it acts on.
#[derive(Debug, Clone)]
pub struct BlackbodySystem {
    pub basis: TruncatedProductBasis,
    pub model: LindbladModel,
    pub rho0: DensityMatrix,
    pub jumps_a: Vec<JumpOperatorSet>,
    pub jumps_b: Vec<JumpOperatorSet>,
}

fn sphere_window(l: f64, m: f64, settings: &BlackbodySettings) -> Result<BasisWindow> {
    let s = settings.shell_half_width as i32;
    let anchors: Vec<f64> = if m == 0.0 { vec![0.0] } else { vec![m, -m] };
    BasisWindow::with_shells(l, &anchors, settings.m_half_width, -s..=s)
}

pub fn build_master_equation(
    config: &ExperimentConfig,
    preparation: Preparation,
    temperature: f64,
    settings: &BlackbodySettings,
) -> Result<BlackbodySystem> {
    if settings.shell_half_width < 1 {
        return Err(Error::WindowTooNarrow("black-body model needs at least one shell on each side (w_l ≥ 1)".into()));
    }
    if !(temperature >= 0.0) || !temperature.is_finite() {
        return Err(Error::Domain(format!("temperature must be finite and non-negative, got {temperature}")));
    }
    let scales = derive_scales(config)?;
    let (l_a, l_b) = (scales.a.quantum_number.round(), scales.b.quantum_number.round());
    let (m_a, m_b) = (preparation.m_for(l_a), preparation.m_for(l_b));
    let basis = TruncatedProductBasis::new(sphere_window(l_a, m_a, settings)?, sphere_window(l_b, m_b, settings)?);
    let h = build_interaction_hamiltonian(&basis, scales.alpha)?;
    let k = &config.constants;
    let s = settings.shell_half_width as i32;
    let jumps = |w: &BasisWindow, spec: &SphereSpec| -> Result<Vec<JumpOperatorSet>> {
        (-s..s).map(|lower| build_jump_operators(w, lower, spec, temperature, k)).collect()
    };
    let jumps_a = jumps(&basis.a, &config.sphere_a)?;
    let jumps_b = jumps(&basis.b, &config.sphere_b)?;

    let mut collapse = Vec::new();
    for (ja, jb) in jumps_a.iter().zip(&jumps_b) {
        for p in 0..3 {
            let a = basis.lift(&ja.components[p].matrix, Sphere::A);
            let b = basis.lift(&jb.components[p].matrix, Sphere::B);
            let emit = |ra: f64, rb: f64| (a.scale(C64::new(ra.sqrt(), 0.0)), b.scale(C64::new(rb.sqrt(), 0.0)));
            let (ea, eb) = emit(ja.rates.chi, jb.rates.chi);
            let (aa, ab) = emit(ja.rates.gamma, jb.rates.gamma);
            let (aa, ab) = (aa.adjoint(), ab.adjoint());
            if settings.independent_baths {
                collapse.extend([ea, eb, aa, ab]);
            } else {
                collapse.push(ea.add(&eb));
                collapse.push(aa.add(&ab));
            }
        }
    }
    collapse.retain(|c| c.nnz() > 0);
    let model = LindbladModel::new(h, collapse)?;
    let rho0 = initial_state(&basis, m_a, m_b)?.density();
    Ok(BlackbodySystem { basis, model, rho0, jumps_a, jumps_b })
}

/// One point of a negativity-versus-time curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeRow {
    pub t: f64,
    pub temperature: f64,
    pub log_negativity: f64,
    pub trace_defect: f64,
}

/// E_N(t) at fixed bath temperature.
pub fn blackbody_time_curve(
    config: &ExperimentConfig,
    preparation: Preparation,
    temperature: f64,
    times: &[f64],
    settings: &BlackbodySettings,
) -> Result<Vec<TimeRow>> {
    let sys = build_master_equation(config, preparation, temperature, settings)?;
    let run = integrate_master_equation(&sys.model, &sys.rho0, times, settings.integrator)?;
    run.states
        .iter()
        .zip(&run.times)
        .zip(&run.trace_defects)
        .map(|((rho, &t), &d)| Ok(TimeRow { t, temperature, log_negativity: log_negativity(rho)?, trace_defect: d }))
        .collect()
}

/// One point of a negativity-versus-temperature sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TemperatureRow {
    pub temperature: f64,
    pub log_negativity: f64,
    /// S(ρ_AB) in bits.
    pub global_entropy: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TemperatureSweep {
    pub t_fixed: f64,
    pub rows: Vec<TemperatureRow>,
    /// First grid temperature with E_N < [`NEGATIVITY_FLOOR`].
    pub vanishing_temperature: Option<f64>,
    /// S(ρ_AB) at that temperature.
    pub vanishing_entropy: Option<f64>,
}

/// E_N and S(ρ_AB) at time `t_fixed` for each bath temperature.
pub fn negativity_vs_temperature(
    config: &ExperimentConfig,
    preparation: Preparation,
    t_fixed: f64,
    temperatures: &[f64],
    settings: &BlackbodySettings,
) -> Result<TemperatureSweep> {
    if !(t_fixed >= 0.0) {
        return Err(Error::Domain(format!("evaluation time must be non-negative, got {t_fixed}")));
    }
    let rows = temperatures
        .par_iter()
        .map(|&temperature| {
            let sys = build_master_equation(config, preparation, temperature, settings)?;
            let run = integrate_master_equation(&sys.model, &sys.rho0, &[t_fixed], settings.integrator)?;
            let rho = &run.states[0];
            Ok(TemperatureRow { temperature, log_negativity: log_negativity(rho)?, global_entropy: von_neumann_entropy(rho)? })
        })
        .collect::<Result<Vec<_>>>()?;
    let first = rows.iter().find(|r| r.log_negativity < NEGATIVITY_FLOOR);
    Ok(TemperatureSweep {
        t_fixed,
        vanishing_temperature: first.map(|r| r.temperature),
        vanishing_entropy: first.map(|r| r.global_entropy),
        rows,
    })
}
