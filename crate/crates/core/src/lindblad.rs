//! Lindblad master equations and an adaptive fourth-order integrator.

use crate::amspace::{DensityMatrix, OperatorMatrix};
use crate::error::{Error, Result};
use crate::linalg::{hermiticity_defect, max_abs, symmetrize, CMatrix, HermitianSpectrum, SparseMatrix, C64, I, ONE};

/// Hamiltonian (H/ħ, s⁻¹) plus collapse operators with their rates folded in.
#[derive(Debug, Clone)]
pub struct LindbladModel {
    pub hamiltonian: OperatorMatrix,
    pub collapse: Vec<SparseMatrix>,
}

impl LindbladModel {
    pub fn new(hamiltonian: OperatorMatrix, collapse: Vec<SparseMatrix>) -> Result<Self> {
        let n = hamiltonian.dim();
        if let Some(c) = collapse.iter().find(|c| c.nrows() != n || c.ncols() != n) {
            return Err(Error::Dimension { expected: n, found: c.nrows() });
        }
        Ok(LindbladModel { hamiltonian, collapse })
    }

    pub fn dim(&self) -> usize {
        self.hamiltonian.dim()
    }

    pub fn generator(&self) -> Generator {
        let n = self.dim();
        let mut decay = SparseMatrix::zeros(n, n);
        for c in &self.collapse {
            decay = decay.add(&c.adjoint().mul(c));
        }
        let h_eff = self.hamiltonian.matrix.add(&decay.scale(C64::new(0.0, -0.5)));
        Generator { h_eff, collapse: self.collapse.clone() }
    }
}

/// 𝓛ρ = −i[H, ρ] + Σ (CρC† − ½{C†C, ρ}), stored as
/// −i(H_eff ρ − ρ H_eff†) + Σ CρC† with H_eff = H − (i/2)Σ C†C.
#[derive(Debug, Clone)]
pub struct Generator {
    h_eff: SparseMatrix,
    collapse: Vec<SparseMatrix>,
}

impl Generator {
    pub fn apply(&self, rho: &CMatrix) -> CMatrix {
        let n = rho.nrows();
        let mut out = CMatrix::zeros(n, n);
        self.h_eff.mul_dense_into(rho, -I, &mut out);
        self.h_eff.dense_mul_adjoint_into(rho, I, &mut out);
        for c in &self.collapse {
            let right = c.dense_mul_adjoint(rho);
            c.mul_dense_into(&right, ONE, &mut out);
        }
        out
    }

    /// Rough inverse time scale: largest row sum of |H_eff| plus Σ‖C‖².
    pub fn scale(&self) -> f64 {
        let row_norm = |m: &SparseMatrix| (0..m.nrows()).map(|i| m.row(i).map(|(_, v)| v.norm()).sum::<f64>()).fold(0.0, f64::max);
        row_norm(&self.h_eff) + self.collapse.iter().map(|c| row_norm(c).powi(2)).sum::<f64>()
    }
}

/// Controls for [`integrate_master_equation`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegratorSettings {
    /// Target local error (max-abs element) per step.
    pub tolerance: f64,
    /// Largest tolerated |Tr ρ(t) − Tr ρ0|.
    pub trace_bound: f64,
    /// States with an eigenvalue below minus this are rejected.
    pub psd_floor: f64,
    /// Check positivity at every output time.
    pub check_positivity: bool,
    pub max_steps: usize,
}

impl Default for IntegratorSettings {
    fn default() -> Self {
        IntegratorSettings { tolerance: 1e-8, trace_bound: 1e-7, psd_floor: 1e-6, check_positivity: true, max_steps: 1_000_000 }
    }
}

/// States at the requested times plus integration diagnostics.
#[derive(Debug, Clone)]
pub struct MasterEquationRun {
    pub times: Vec<f64>,
    pub states: Vec<DensityMatrix>,
    /// Tr ρ(t) − Tr ρ0.
    pub trace_defects: Vec<f64>,
    /// Largest anti-Hermitian part removed by symmetrisation.
    pub max_hermiticity_defect: f64,
    pub accepted_steps: usize,
    pub rejected_steps: usize,
}

fn rk4_step(g: &Generator, y: &CMatrix, k1: &CMatrix, h: f64) -> CMatrix {
    let k2 = g.apply(&(y + k1 * C64::new(0.5 * h, 0.0)));
    let k3 = g.apply(&(y + &k2 * C64::new(0.5 * h, 0.0)));
    let k4 = g.apply(&(y + &k3 * C64::new(h, 0.0)));
    y + (k1 + k2 * C64::new(2.0, 0.0) + k3 * C64::new(2.0, 0.0) + k4) * C64::new(h / 6.0, 0.0)
}

fn min_eigenvalue(m: &CMatrix) -> Result<f64> {
    Ok(HermitianSpectrum::of_dense(m)?.eigenvalues().first().copied().unwrap_or(0.0))
}

/// Integrate dρ/dt = 𝓛ρ with classical RK4 and step-doubling error control.
///
/// The trace is never renormalised; drift beyond the bound is an error.
pub fn integrate_master_equation(
    model: &LindbladModel,
    rho0: &DensityMatrix,
    times: &[f64],
    settings: IntegratorSettings,
) -> Result<MasterEquationRun> {
    if rho0.dim() != model.dim() {
        return Err(Error::Dimension { expected: model.dim(), found: rho0.dim() });
    }
    if times.iter().any(|t| !t.is_finite() || *t < 0.0) || times.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::Domain("times must be non-negative and sorted ascending".into()));
    }
    let defect0 = hermiticity_defect(&rho0.matrix);
    if defect0 > 1e-9 * max_abs(&rho0.matrix).max(1.0) {
        return Err(Error::InvalidState(format!("initial state is not Hermitian (defect {defect0:e})")));
    }
    let g = model.generator();
    let tr0 = rho0.trace();
    let scale = g.scale();
    let span = times.last().copied().unwrap_or(0.0);
    let mut h = if scale > 0.0 { (0.05 / scale).min(span.max(f64::MIN_POSITIVE)) } else { span.max(1.0) };

    let mut rho = rho0.matrix.clone();
    let mut t = 0.0;
    let mut run = MasterEquationRun {
        times: times.to_vec(),
        states: Vec::with_capacity(times.len()),
        trace_defects: Vec::with_capacity(times.len()),
        max_hermiticity_defect: 0.0,
        accepted_steps: 0,
        rejected_steps: 0,
    };
    for &target in times {
        while t < target {
            if run.accepted_steps + run.rejected_steps >= settings.max_steps {
                return Err(Error::StepUnderflow { time: t });
            }
            let step = h.min(target - t);
            let k1 = g.apply(&rho);
            let full = rk4_step(&g, &rho, &k1, step);
            let mid = rk4_step(&g, &rho, &k1, 0.5 * step);
            let k1_mid = g.apply(&mid);
            let two_half = rk4_step(&g, &mid, &k1_mid, 0.5 * step);
            let err = max_abs(&(&two_half - &full)) / 15.0;
            let factor = if err == 0.0 { 4.0 } else { (0.9 * (settings.tolerance / err).powf(0.2)).clamp(0.2, 4.0) };
            if err <= settings.tolerance {
                rho = two_half;
                t = if step == target - t { target } else { t + step };
                run.accepted_steps += 1;
                let d = symmetrize(&mut rho);
                run.max_hermiticity_defect = run.max_hermiticity_defect.max(d);
                let drift = (rho.trace().re - tr0).abs();
                if drift > settings.trace_bound {
                    return Err(Error::TraceDrift { drift, bound: settings.trace_bound, time: t });
                }
                if step >= h {
                    h = step * factor;
                }
            } else {
                run.rejected_steps += 1;
                h = step * factor;
                if h < 1e-14 * target.max(1.0) {
                    return Err(Error::StepUnderflow { time: t });
                }
            }
        }
        if settings.check_positivity {
            let lo = min_eigenvalue(&rho)?;
            if lo < -settings.psd_floor {
                return Err(Error::NegativeEigenvalue { value: lo, time: t });
            }
        }
        run.trace_defects.push(rho.trace().re - tr0);
        run.states.push(DensityMatrix { dims: rho0.dims, matrix: rho.clone() });
    }
    Ok(run)
}
