//! Entanglement and correlation measures on product-basis states.

use std::f64::consts::LN_2;

use crate::amspace::{build_single_sphere_operators, DensityMatrix, Ladder, Sphere, StateVector, TruncatedProductBasis};
use crate::error::{Error, Result};
use crate::linalg::{trace_product, CMatrix, HermitianSpectrum, SparseMatrix, C64};

/// Eigenvalues below this are treated as numerical zeros in entropies.
pub const EIGENVALUE_FLOOR: f64 = 1e-15;
/// Eigenvalues below minus this make a state invalid.
pub const NEGATIVITY_TOLERANCE: f64 = 1e-9;
/// Relative slack under which a witness sum counts as equal to its bound.
pub const WITNESS_TOLERANCE: f64 = 1e-9;

/// Reduced state of one sphere; the result has dims `(d, 1)`.
pub fn partial_trace(rho: &DensityMatrix, keep: Sphere) -> Result<DensityMatrix> {
    let (da, db) = rho.dims;
    if da * db != rho.dim() {
        return Err(Error::Dimension { expected: da * db, found: rho.dim() });
    }
    let m = &rho.matrix;
    let out = match keep {
        Sphere::A => CMatrix::from_fn(da, da, |i, j| (0..db).map(|k| m[(i * db + k, j * db + k)]).sum()),
        Sphere::B => CMatrix::from_fn(db, db, |i, j| (0..da).map(|k| m[(k * db + i, k * db + j)]).sum()),
    };
    let d = out.nrows();
    Ok(DensityMatrix { dims: (d, 1), matrix: out })
}

/// Reduced state of one sphere computed directly from amplitudes.
pub fn reduced_state(psi: &StateVector, keep: Sphere) -> DensityMatrix {
    let c = psi.coefficient_matrix();
    let m = match keep {
        Sphere::A => &c * c.adjoint(),
        Sphere::B => c.transpose() * c.map(|x| x.conj()),
    };
    let d = m.nrows();
    DensityMatrix { dims: (d, 1), matrix: m }
}

fn spectrum(m: &CMatrix) -> Result<Vec<f64>> {
    Ok(HermitianSpectrum::of_dense(m)?.eigenvalues())
}

/// −Σ λ log₂ λ over eigenvalues above [`EIGENVALUE_FLOOR`].
pub fn entropy_of_spectrum(values: &[f64]) -> Result<f64> {
    if let Some(&v) = values.iter().find(|&&v| v < -NEGATIVITY_TOLERANCE) {
        return Err(Error::InvalidState(format!("eigenvalue {v:e} below −{NEGATIVITY_TOLERANCE:e}")));
    }
    Ok(values.iter().filter(|&&v| v > EIGENVALUE_FLOOR).map(|&v| -v * v.log2()).sum::<f64>().max(0.0))
}

/// Von Neumann entropy in bits.
pub fn von_neumann_entropy(rho: &DensityMatrix) -> Result<f64> {
    entropy_of_spectrum(&spectrum(&rho.matrix)?)
}

/// Entanglement entropy of a pure state, S(ρ_A), in bits.
pub fn entanglement_entropy(psi: &StateVector) -> Result<f64> {
    let (da, db) = psi.dims;
    let keep = if da <= db { Sphere::A } else { Sphere::B };
    von_neumann_entropy(&reduced_state(psi, keep))
}

/// ρ^{T_B}.
pub fn partial_transpose(rho: &DensityMatrix) -> CMatrix {
    let (_, db) = rho.dims;
    let n = rho.dim();
    let m = &rho.matrix;
    CMatrix::from_fn(n, n, |r, c| {
        let (ia, ib) = (r / db, r % db);
        let (ja, jb) = (c / db, c % db);
        m[(ia * db + jb, ja * db + ib)]
    })
}

/// log₂ ‖ρ^{T_B}‖₁ of the trace-normalised state.
pub fn log_negativity(rho: &DensityMatrix) -> Result<f64> {
    let (da, db) = rho.dims;
    if da * db != rho.dim() {
        return Err(Error::Dimension { expected: da * db, found: rho.dim() });
    }
    let tr = rho.trace();
    if !(tr > 0.0) {
        return Err(Error::InvalidState(format!("trace {tr} is not positive")));
    }
    let neg: f64 = spectrum(&partial_transpose(rho))?.iter().filter(|&&v| v < 0.0).map(|v| -v).sum();
    let e = (2.0 * neg / tr).ln_1p() / LN_2;
    Ok(if e < 1e-12 { 0.0 } else { e })
}

/// Log-negativity of a pure state from its Schmidt coefficients.
pub fn log_negativity_pure(psi: &StateVector) -> Result<f64> {
    let mut sigma: Vec<f64> = psi.coefficient_matrix().singular_values().iter().copied().collect();
    sigma.sort_by(f64::total_cmp);
    let tr: f64 = sigma.iter().map(|v| v * v).sum();
    if !(tr > 0.0) {
        return Err(Error::InvalidState("zero state".into()));
    }
    let mut prefix = 0.0;
    let mut cross = 0.0;
    for v in sigma {
        cross += v * prefix;
        prefix += v;
    }
    let e = (2.0 * cross / tr).ln_1p() / LN_2;
    Ok(if e < 1e-12 { 0.0 } else { e })
}

/// max(0, S(ρ_A) − S(ρ_AB), S(ρ_B) − S(ρ_AB)).
pub fn relative_entropy_lower_bound(rho: &DensityMatrix) -> Result<f64> {
    let s_ab = von_neumann_entropy(rho)?;
    let s_a = von_neumann_entropy(&partial_trace(rho, Sphere::A)?)?;
    let s_b = von_neumann_entropy(&partial_trace(rho, Sphere::B)?)?;
    Ok((s_a - s_ab).max(s_b - s_ab).max(0.0))
}

/// Outcome of the collective sum-uncertainty test.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WitnessReport {
    /// Var(J_x), Var(J_y), Var(J_z) of J = L_A + L_B, in ħ².
    pub variances: [f64; 3],
    pub total_variance_sum: f64,
    /// l_A + l_B.
    pub bound: f64,
    pub violated: bool,
    /// total − bound.
    pub margin: f64,
}

fn centered_variance(rho: &CMatrix, j: &SparseMatrix) -> Result<f64> {
    let n = rho.nrows();
    let mean = trace_product(rho, j).re;
    let shifted = j.sub(&SparseMatrix::identity(n).scale(C64::new(mean, 0.0)));
    let var = trace_product(rho, &shifted.mul(&shifted)).re;
    let scale: f64 = (0..n).map(|k| rho[(k, k)].re * shifted.row(k).map(|(_, v)| v.norm_sqr()).sum::<f64>()).sum();
    let resolution = 64.0 * f64::EPSILON * (scale + mean * mean);
    if var.abs() < resolution && resolution > 1e-6 {
        return Err(Error::Domain(format!("variance {var:e} is below the floating-point resolution {resolution:e} of this window")));
    }
    Ok(var.max(0.0))
}

/// Σ_α Var(L_Aα + L_Bα) compared with l_A + l_B.
///
/// `measurement_variance` is added to each of the three collective
/// variances to model detector noise.
pub fn witness_sum_uncertainty(rho: &DensityMatrix, basis: &TruncatedProductBasis, measurement_variance: f64) -> Result<WitnessReport> {
    if rho.dims != basis.dims() {
        return Err(Error::Dimension { expected: basis.dim(), found: rho.dim() });
    }
    for w in [&basis.a, &basis.b] {
        if w.shells() != (0..=0) {
            return Err(Error::Domain("the witness needs single-shell windows".into()));
        }
    }
    let tr = rho.trace();
    if !(tr > 0.0) {
        return Err(Error::InvalidState(format!("trace {tr} is not positive")));
    }
    let rho_n = rho.matrix.unscale(tr);

    let db = basis.b.dim();
    let mut edge = 0.0;
    for k in 0..rho.dim() {
        let (ia, ib) = (k / db, k % db);
        let leaks = [Ladder::Raise, Ladder::Lower].iter().any(|&d| basis.a.leaks(ia, d) || basis.b.leaks(ib, d));
        if leaks {
            edge += rho_n[(k, k)].re;
        }
    }
    if edge > 1e-12 {
        return Err(Error::WindowTooNarrow(format!("population {edge:e} sits on window edges")));
    }

    let ref_a = basis.a.segments()[0].anchor;
    let ref_b = basis.b.segments()[0].anchor;
    let d: Vec<f64> = (0..rho.dim()).map(|k| basis.a.m_relative(k / db, ref_a) + basis.b.m_relative(k % db, ref_b)).collect();
    let p: Vec<f64> = (0..rho.dim()).map(|k| rho_n[(k, k)].re).collect();
    let mean_z: f64 = p.iter().zip(&d).map(|(p, d)| p * d).sum();
    let var_z: f64 = p.iter().zip(&d).map(|(p, d)| p * (d - mean_z).powi(2)).sum();

    let oa = build_single_sphere_operators(&basis.a);
    let ob = build_single_sphere_operators(&basis.b);
    let jx = basis.lift(&oa.l_x.matrix, Sphere::A).add(&basis.lift(&ob.l_x.matrix, Sphere::B));
    let jy = basis.lift(&oa.l_y.matrix, Sphere::A).add(&basis.lift(&ob.l_y.matrix, Sphere::B));
    let var_x = centered_variance(&rho_n, &jx)?;
    let var_y = centered_variance(&rho_n, &jy)?;

    let extra = measurement_variance.max(0.0);
    let variances = [var_x + extra, var_y + extra, var_z + extra];
    let total: f64 = variances.iter().sum();
    let bound = basis.a.l_ref() + basis.b.l_ref();
    let margin = total - bound;
    Ok(WitnessReport {
        variances,
        total_variance_sum: total,
        bound,
        violated: margin < -WITNESS_TOLERANCE * bound.max(f64::MIN_POSITIVE),
        margin,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::amspace::BasisWindow;
    use crate::linalg::{CVector, ONE, ZERO};
    use approx::assert_relative_eq;

    fn bell() -> StateVector {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        StateVector::new((2, 2), CVector::from_vec(vec![C64::new(h, 0.0), ZERO, ZERO, C64::new(h, 0.0)])).unwrap()
    }

    #[test]
    fn bell_state_measures() {
        let psi = bell();
        let rho = psi.density();
        let ra = partial_trace(&rho, Sphere::A).unwrap();
        assert_relative_eq!(ra.matrix[(0, 0)].re, 0.5, epsilon = 1e-15);
        assert_relative_eq!(ra.matrix[(0, 1)].norm(), 0.0, epsilon = 1e-15);
        assert_relative_eq!(von_neumann_entropy(&ra).unwrap(), 1.0, epsilon = 1e-12);
        assert_relative_eq!(log_negativity(&rho).unwrap(), 1.0, epsilon = 1e-12);
        assert_relative_eq!(log_negativity_pure(&psi).unwrap(), 1.0, epsilon = 1e-12);
        assert!(von_neumann_entropy(&rho).unwrap() < 1e-9);
        assert_relative_eq!(relative_entropy_lower_bound(&rho).unwrap(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn maximally_mixed() {
        let rho = DensityMatrix::new((2, 2), CMatrix::identity(4, 4).map(|x| x * 0.25)).unwrap();
        assert_relative_eq!(von_neumann_entropy(&rho).unwrap(), 2.0, epsilon = 1e-12);
        assert_eq!(relative_entropy_lower_bound(&rho).unwrap(), 0.0);
        assert_eq!(log_negativity(&rho).unwrap(), 0.0);
    }

    #[test]
    fn rejects_negative_state() {
        let mut m = CMatrix::identity(4, 4).map(|x| x * 0.5);
        m[(3, 3)] = C64::new(-0.5, 0.0);
        m[(2, 2)] = C64::new(0.5, 0.0);
        let rho = DensityMatrix::new((2, 2), m).unwrap();
        assert!(matches!(von_neumann_entropy(&rho), Err(Error::InvalidState(_))));
    }

    #[test]
    fn witness_on_small_windows() {
        let w = BasisWindow::full(0.5).unwrap();
        let basis = TruncatedProductBasis::new(w.clone(), w);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let singlet = StateVector::new((2, 2), CVector::from_vec(vec![ZERO, C64::new(h, 0.0), C64::new(-h, 0.0), ZERO])).unwrap();
        let r = witness_sum_uncertainty(&singlet.density(), &basis, 0.0).unwrap();
        assert!(r.violated);
        assert_relative_eq!(r.total_variance_sum, 0.0, epsilon = 1e-14);

        let up = CVector::from_vec(vec![ZERO, ONE]);
        let top = StateVector::product(&up, &up);
        let r = witness_sum_uncertainty(&top.density(), &basis, 0.0).unwrap();
        assert!(!r.violated);
        assert_relative_eq!(r.total_variance_sum, 1.0, epsilon = 1e-14);
    }

    #[test]
    fn witness_top_state_at_huge_l() {
        let l = 1e23;
        let w = BasisWindow::new(l, &[l], 3).unwrap();
        let basis = TruncatedProductBasis::new(w.clone(), w.clone());
        let top = w.index_of(0, l).unwrap();
        let psi = StateVector::basis_state(&basis, top, top);
        let r = witness_sum_uncertainty(&psi.density(), &basis, 0.0).unwrap();
        assert_relative_eq!(r.total_variance_sum, 2.0 * l, max_relative = 1e-12);
        assert!(!r.violated);
    }

    #[test]
    fn witness_detects_narrow_window() {
        let w = BasisWindow::new(30.0, &[0.0], 0).unwrap();
        let basis = TruncatedProductBasis::new(w.clone(), w);
        let psi = StateVector::basis_state(&basis, 0, 0);
        assert!(matches!(witness_sum_uncertainty(&psi.density(), &basis, 0.0), Err(Error::WindowTooNarrow(_))));
    }
}
