//! Unitary evolution under the frame-dragging interaction.

use rayon::prelude::*;

use crate::amspace::{
    build_exchange_operator, build_interaction_hamiltonian, BasisWindow, Ladder, OperatorMatrix, StateVector, TruncatedProductBasis,
};
use crate::entanglement::entanglement_entropy;
use crate::error::{Error, Result};
use crate::linalg::{CVector, HermitianSpectrum, C64};
use crate::params::{derive_scales, ExperimentConfig};

/// States ψ(t) on a fixed window.
#[derive(Debug, Clone)]
pub struct EvolutionResult {
    pub times: Vec<f64>,
    pub states: Vec<StateVector>,
    /// Norm of the amplitude sitting on states whose ladder neighbours are
    /// missing from the window.
    pub truncation_loss: Vec<f64>,
    pub window_half_width: u32,
}

fn sphere_superposition(w: &BasisWindow, m: f64) -> Result<CVector> {
    let find = |m: f64| w.index_of(0, m).ok_or(Error::OutsideWindow { what: format!("m = {m}") });
    let (i, j) = (find(m)?, find(-m)?);
    let mut v = CVector::zeros(w.dim());
    if i == j {
        v[i] = C64::new(1.0, 0.0);
    } else {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        v[i] = C64::new(h, 0.0);
        v[j] = C64::new(h, 0.0);
    }
    Ok(v)
}

/// (|m_A⟩ + |−m_A⟩) ⊗ (|m_B⟩ + |−m_B⟩), normalised; |0⟩ when m = 0.
pub fn initial_state(basis: &TruncatedProductBasis, m_a: f64, m_b: f64) -> Result<StateVector> {
    let a = sphere_superposition(&basis.a, m_a)?;
    let b = sphere_superposition(&basis.b, m_b)?;
    Ok(StateVector::product(&a, &b))
}

/// √(Σ |ψ_k|²) over product states with a missing ladder neighbour.
pub fn edge_weight(basis: &TruncatedProductBasis, psi: &StateVector) -> f64 {
    let (wa, wb) = (&basis.a, &basis.b);
    let edge_a: Vec<bool> = (0..wa.dim()).map(|i| wa.leaks(i, Ladder::Raise) || wa.leaks(i, Ladder::Lower)).collect();
    let edge_b: Vec<bool> = (0..wb.dim()).map(|i| wb.leaks(i, Ladder::Raise) || wb.leaks(i, Ladder::Lower)).collect();
    psi.amplitudes
        .iter()
        .enumerate()
        .filter(|(k, _)| {
            let (ia, ib) = basis.labels(*k);
            edge_a[ia] || edge_b[ib]
        })
        .map(|(_, c)| c.norm_sqr())
        .sum::<f64>()
        .sqrt()
}

fn check_times(times: &[f64]) -> Result<()> {
    if times.iter().any(|t| !t.is_finite()) || times.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::Domain("times must be finite and sorted ascending".into()));
    }
    Ok(())
}

/// Propagator exp(−iHt) from the eigendecomposition of H.
#[derive(Debug, Clone)]
pub struct Propagator {
    spectrum: HermitianSpectrum,
}

impl Propagator {
    pub fn new(h: &OperatorMatrix) -> Result<Self> {
        let defect = h.matrix.hermiticity_defect();
        if !h.hermitian || defect > 1e-12 * h.matrix.max_abs() {
            return Err(Error::NotHermitian { defect });
        }
        Ok(Propagator { spectrum: HermitianSpectrum::of_sparse(&h.matrix)? })
    }

    pub fn apply(&self, psi: &StateVector, t: f64) -> StateVector {
        if t == 0.0 {
            return psi.clone();
        }
        let v = self.spectrum.apply(&psi.amplitudes, |lam| C64::from_polar(1.0, -lam * t));
        StateVector { dims: psi.dims, amplitudes: v }
    }
}

/// ψ(t) = exp(−iHt) ψ0 for every requested time.
pub fn evolve_exact(basis: &TruncatedProductBasis, h: &OperatorMatrix, psi0: &StateVector, times: &[f64]) -> Result<EvolutionResult> {
    check_times(times)?;
    if psi0.dims != basis.dims() || h.dim() != basis.dim() {
        return Err(Error::Dimension { expected: basis.dim(), found: psi0.amplitudes.len() });
    }
    let u = Propagator::new(h)?;
    let states: Vec<StateVector> = times.iter().map(|&t| u.apply(psi0, t)).collect();
    let truncation_loss = states.iter().map(|s| edge_weight(basis, s)).collect();
    Ok(EvolutionResult {
        times: times.to_vec(),
        states,
        truncation_loss,
        window_half_width: basis.a.half_width().max(basis.b.half_width()),
    })
}

/// Second-order expansion of the propagator.
#[derive(Debug, Clone)]
pub struct PerturbativeState {
    pub state: StateVector,
    /// α t l_A l_B / 2.
    pub g: f64,
    /// Set when g exceeds the validity guard.
    pub guard_exceeded: bool,
}

/// Default validity guard on g for the perturbative expansion.
pub const PERTURBATIVE_GUARD: f64 = 1e-2;

/// (1 + (iαt/2)Ô − (α²t²/8)Ô²) ψ0, unnormalised.
pub fn perturbative_state(psi0: &StateVector, basis: &TruncatedProductBasis, alpha: f64, t: f64, guard: f64) -> Result<PerturbativeState> {
    if psi0.dims != basis.dims() {
        return Err(Error::Dimension { expected: basis.dim(), found: psi0.amplitudes.len() });
    }
    let o = build_exchange_operator(basis);
    let v1 = o.mul_vec(&psi0.amplitudes);
    let v2 = o.mul_vec(&v1);
    let c1 = C64::new(0.0, 0.5 * alpha * t);
    let c2 = C64::new(-alpha * alpha * t * t / 8.0, 0.0);
    let amplitudes = &psi0.amplitudes + v1 * c1 + v2 * c2;
    let g = 0.5 * alpha * t * basis.a.l_ref() * basis.b.l_ref();
    Ok(PerturbativeState { state: StateVector { dims: psi0.dims, amplitudes }, g, guard_exceeded: g > guard })
}

fn xlog2x(x: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x * x.log2()
    }
}

/// Second-order entanglement entropy in bits:
/// −a log₂a − 4(g−κ)² log₂(g−κ) − 32κ² log₂(4κ), a = 1 − 2g² + 4gκ − 18κ².
pub fn entropy_closed_form(g: f64, kappa: f64) -> Result<f64> {
    if !(kappa >= 0.0) || !(kappa <= g) {
        return Err(Error::Domain(format!("need 0 ≤ κ ≤ g, got g = {g}, κ = {kappa}")));
    }
    let a = 1.0 - 2.0 * g * g + 4.0 * g * kappa - 18.0 * kappa * kappa;
    if a <= 0.0 {
        return Err(Error::OutOfRegime(format!("leading eigenvalue {a} is not positive at g = {g}")));
    }
    let d = g - kappa;
    let s = -xlog2x(a) - 2.0 * xlog2x(d * d) - xlog2x(16.0 * kappa * kappa);
    Ok(s.max(0.0))
}

/// Log-negativity of the m = l preparation when only the L_zL_z phases act:
/// log₂(1 + |sin 8g|).
pub fn top_state_negativity(g: f64) -> f64 {
    (8.0 * g).sin().abs().ln_1p() / std::f64::consts::LN_2
}

/// Window policy for the entropy curves.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergenceSettings {
    pub initial_half_width: u32,
    pub max_half_width: u32,
    /// Relative change in S at the last time that certifies a window.
    pub tolerance: f64,
}

impl Default for ConvergenceSettings {
    fn default() -> Self {
        ConvergenceSettings { initial_half_width: 6, max_half_width: 96, tolerance: 1e-6 }
    }
}

/// One point of an entropy-versus-time curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntropyRow {
    pub t: f64,
    pub m_over_l: f64,
    pub entropy_closed: f64,
    pub entropy_exact: f64,
    pub truncation_loss: f64,
}

/// Exact entanglement entropies of the ±m preparation on a window with the
/// given half-width.
pub fn exact_entropies(
    l_a: f64,
    l_b: f64,
    m_a: f64,
    m_b: f64,
    alpha: f64,
    half_width: u32,
    times: &[f64],
) -> Result<(Vec<f64>, EvolutionResult)> {
    let wa = BasisWindow::new(l_a, &[m_a, -m_a], half_width)?;
    let wb = BasisWindow::new(l_b, &[m_b, -m_b], half_width)?;
    let basis = TruncatedProductBasis::new(wa, wb);
    let h = build_interaction_hamiltonian(&basis, alpha)?;
    let psi0 = initial_state(&basis, m_a, m_b)?;
    let ev = evolve_exact(&basis, &h, &psi0, times)?;
    let s = ev.states.iter().map(entanglement_entropy).collect::<Result<Vec<_>>>()?;
    Ok((s, ev))
}

/// Like [`exact_entropies`], doubling the half-width until the entropy at
/// the last time changes by less than the tolerance.
pub fn converged_entropies(
    l_a: f64,
    l_b: f64,
    m_a: f64,
    m_b: f64,
    alpha: f64,
    times: &[f64],
    settings: ConvergenceSettings,
) -> Result<(Vec<f64>, EvolutionResult)> {
    let mut w = settings.initial_half_width.max(1);
    let mut current = exact_entropies(l_a, l_b, m_a, m_b, alpha, w, times)?;
    loop {
        let wider = exact_entropies(l_a, l_b, m_a, m_b, alpha, 2 * w, times)?;
        let (s1, s2) = (current.0.last().copied().unwrap_or(0.0), wider.0.last().copied().unwrap_or(0.0));
        if (s1 - s2).abs() <= settings.tolerance * s2.abs() || (s1 == 0.0 && s2 == 0.0) {
            return Ok(current);
        }
        if 2 * w > settings.max_half_width {
            return Err(Error::WindowTooNarrow(format!("entropy not converged at half-width {} (change {:e})", 2 * w, (s1 - s2).abs())));
        }
        w *= 2;
        current = wider;
    }
}

/// Closed-form and exact entropy for each m/l fraction and time.
pub fn entropy_curve(
    config: &ExperimentConfig,
    m_fractions: &[f64],
    times: &[f64],
    settings: ConvergenceSettings,
) -> Result<Vec<EntropyRow>> {
    check_times(times)?;
    let scales = derive_scales(config)?;
    let (l_a, l_b) = (scales.a.quantum_number, scales.b.quantum_number);
    if m_fractions.iter().any(|f| !(0.0..=1.0).contains(f)) {
        return Err(Error::Domain("m/l fractions must lie in [0, 1]".into()));
    }
    let per_m = m_fractions
        .par_iter()
        .map(|&f| {
            let (m_a, m_b) = (snap_to_ladder(f, l_a), snap_to_ladder(f, l_b));
            let (s, ev) = converged_entropies(l_a, l_b, m_a, m_b, scales.alpha, times, settings)?;
            times
                .iter()
                .zip(s)
                .zip(&ev.truncation_loss)
                .map(|((&t, s_exact), &loss)| {
                    let g = scales.coupling_g(t);
                    let kappa = 0.5 * scales.alpha * t * m_a * m_b;
                    Ok(EntropyRow {
                        t,
                        m_over_l: f,
                        entropy_closed: entropy_closed_form(g, kappa)?,
                        entropy_exact: s_exact,
                        truncation_loss: loss,
                    })
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(per_m.into_iter().flatten().collect())
}

/// f·l rounded onto the ladder l, l−1, … when l is small enough for the
/// rounding to matter.
pub fn snap_to_ladder(fraction: f64, l: f64) -> f64 {
    let m = fraction * l;
    if l < 4.5e15 {
        l - (l - m).round()
    } else {
        m
    }
}
