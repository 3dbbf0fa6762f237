//! Wigner 3-j symbols: an exact rational oracle for small j and closed
//! forms for the dipole family (1, l, l+1) at any l.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::amspace::QuantumNumber;
use crate::error::{Error, Result};
use crate::linalg::C64;

/// Largest j accepted by [`wigner3j_oracle`].
pub const ORACLE_MAX_J: f64 = 50.0;

const EXACT_INTEGER_LIMIT: f64 = 9_007_199_254_740_992.0;

/// The six arguments of a 3-j symbol (j1 j2 j3; m1 m2 m3).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Wigner3j {
    pub j: [f64; 3],
    pub m: [f64; 3],
}

impl Wigner3j {
    pub fn new(j1: f64, j2: f64, j3: f64, m1: f64, m2: f64, m3: f64) -> Self {
        Wigner3j { j: [j1, j2, j3], m: [m1, m2, m3] }
    }

    /// Exact evaluation for j ≤ 50.
    pub fn oracle(&self) -> Result<f64> {
        wigner3j_oracle(self.j, self.m)
    }

    /// Evaluate with the oracle when every j is small, otherwise through the
    /// dipole closed form, which needs a triple that is a permutation-free
    /// (1, l, l+1).
    pub fn evaluate(&self) -> Result<f64> {
        if self.j.iter().all(|&j| j <= ORACLE_MAX_J) {
            return self.oracle();
        }
        let [j1, j2, j3] = self.j;
        let [m1, m2, m3] = self.m;
        if j1 != 1.0 || j3 != j2 + 1.0 {
            return Err(Error::Domain(format!("large-j mode needs the triple (1, l, l+1), got ({j1}, {j2}, {j3})")));
        }
        if m1 + m2 + m3 != 0.0 || m1.fract() != 0.0 || m1.abs() > 1.0 {
            return Ok(0.0);
        }
        wigner3j_dipole(j2, -(m1 as i32), -m2)
    }
}

fn doubled(x: f64) -> Result<i64> {
    let d = 2.0 * x;
    if d.fract() != 0.0 || !d.is_finite() {
        return Err(Error::Domain(format!("{x} is not an integer or half-integer")));
    }
    Ok(d as i64)
}

fn factorial_table(n: usize) -> Vec<BigInt> {
    let mut f = Vec::with_capacity(n + 1);
    f.push(BigInt::one());
    for k in 1..=n {
        let next = &f[k - 1] * BigInt::from(k);
        f.push(next);
    }
    f
}

fn ratio_to_f64(r: &BigRational) -> f64 {
    if let Some(v) = r.to_f64() {
        if v.is_finite() && (v != 0.0 || r.is_zero()) {
            return v;
        }
    }
    let (n, d) = (r.numer().abs(), r.denom().clone());
    let shift_n = n.bits().saturating_sub(64);
    let shift_d = d.bits().saturating_sub(64);
    let nf = (n >> shift_n).to_f64().unwrap_or(f64::NAN);
    let df = (d >> shift_d).to_f64().unwrap_or(f64::NAN);
    let sign = if r.is_negative() { -1.0 } else { 1.0 };
    sign * nf / df * 2f64.powi(shift_n as i32 - shift_d as i32)
}

/// Racah's formula evaluated in exact rational arithmetic.
///
/// Returns exactly 0 when a selection rule is violated.
pub fn wigner3j_oracle(j: [f64; 3], m: [f64; 3]) -> Result<f64> {
    if j.iter().any(|x| !(0.0..=ORACLE_MAX_J).contains(x)) {
        return Err(Error::Domain(format!("oracle needs 0 ≤ j ≤ {ORACLE_MAX_J}, got {j:?}")));
    }
    let tj = [doubled(j[0])?, doubled(j[1])?, doubled(j[2])?];
    let tm = [doubled(m[0])?, doubled(m[1])?, doubled(m[2])?];
    if tm.iter().sum::<i64>() != 0 {
        return Ok(0.0);
    }
    for i in 0..3 {
        if tm[i].abs() > tj[i] || (tj[i] + tm[i]) % 2 != 0 {
            return Ok(0.0);
        }
    }
    let tsum = tj[0] + tj[1] + tj[2];
    if tsum % 2 != 0 {
        return Ok(0.0);
    }
    let (a, b, c) = (tj[0] + tj[1] - tj[2], tj[0] - tj[1] + tj[2], -tj[0] + tj[1] + tj[2]);
    if a < 0 || b < 0 || c < 0 {
        return Ok(0.0);
    }
    if tm.iter().all(|&x| x == 0) && (tsum / 2) % 2 != 0 {
        return Ok(0.0);
    }
    let h = |x: i64| -> i64 { x / 2 };
    let (j1, j2, j3) = (tj[0], tj[1], tj[2]);
    let (m1, m2, m3) = (tm[0], tm[1], tm[2]);
    let fact = factorial_table((tsum / 2 + 1) as usize);
    let f = |x: i64| -> &BigInt { &fact[x as usize] };

    let k_min = 0.max(h(j2 - j3 - m1)).max(h(j1 - j3 + m2));
    let k_max = h(j1 + j2 - j3).min(h(j1 - m1)).min(h(j2 + m2));
    let mut sum = BigRational::zero();
    for k in k_min..=k_max {
        let den = f(k) * f(h(j3 - j2 + m1) + k) * f(h(j3 - j1 - m2) + k) * f(h(j1 + j2 - j3) - k) * f(h(j1 - m1) - k) * f(h(j2 + m2) - k);
        let term = BigRational::new(BigInt::one(), den);
        if k % 2 == 0 {
            sum += term;
        } else {
            sum -= term;
        }
    }
    if sum.is_zero() {
        return Ok(0.0);
    }
    let triangle = BigRational::new(f(h(a)) * f(h(b)) * f(h(c)), f(tsum / 2 + 1).clone());
    let moments = f(h(j1 + m1)) * f(h(j1 - m1)) * f(h(j2 + m2)) * f(h(j2 - m2)) * f(h(j3 + m3)) * f(h(j3 - m3));
    let square = triangle * BigRational::from_integer(moments) * &sum * &sum;
    let magnitude = ratio_to_f64(&square).sqrt();
    let phase = h(j1 - j2 - m3);
    let sign = if phase.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
    Ok(if sum.is_negative() { -sign * magnitude } else { sign * magnitude })
}

fn parity(x: f64) -> i64 {
    if x.abs() >= EXACT_INTEGER_LIMIT {
        0
    } else {
        (x as i64).rem_euclid(2)
    }
}

fn check_branch(branch: i32) -> Result<()> {
    if !(-1..=1).contains(&branch) {
        return Err(Error::Domain(format!("dipole branch m' − m must be −1, 0 or +1, got {branch}")));
    }
    Ok(())
}

/// (1 l l+1; −b, −m, m+b) for the state `q = |l, m⟩` and branch b = m' − m.
pub fn dipole_3j(q: &QuantumNumber, branch: i32) -> Result<f64> {
    check_branch(branch)?;
    let (t, b) = (q.top_gap(), q.bottom_gap());
    if t < 0.0 || b < 0.0 {
        return Ok(0.0);
    }
    let two_l = t + b;
    let s = if (parity(q.l_ref - q.m_ref) + i64::from(q.shell) - q.offset).rem_euclid(2) == 0 { 1.0 } else { -1.0 };
    let base = ((2.0 / (two_l + 2.0)) / (two_l + 1.0) / (two_l + 3.0)).sqrt();
    let v = match branch {
        0 => -s * ((b + 1.0) * (t + 1.0)).sqrt() * base,
        1 => s * ((b + 1.0).sqrt() * (b + 2.0).sqrt()) * base / std::f64::consts::SQRT_2,
        _ => s * ((t + 1.0).sqrt() * (t + 2.0).sqrt()) * base / std::f64::consts::SQRT_2,
    };
    Ok(v)
}

/// (1 l l+1; −b, −m, m+b) with b = m' − m, for integer l up to ~10²³.
pub fn wigner3j_dipole(l: f64, branch: i32, m: f64) -> Result<f64> {
    check_branch(branch)?;
    if !(l >= 0.0) || l.fract() != 0.0 || m.fract() != 0.0 {
        return Err(Error::Domain(format!("dipole closed form needs integer l and m, got l = {l}, m = {m}")));
    }
    if m.abs() > l {
        return Ok(0.0);
    }
    dipole_3j(&QuantumNumber { l_ref: l, shell: 0, m_ref: m, offset: 0 }, branch)
}

/// Coefficient of |l, m⟩⟨l+1, m+b| in the dipole jump operator A_p
/// (p = 1, 2, 3 for b = +1, −1, 0), i.e. the fused product
/// (−1)^m √((2l+1)(2l+3)) · (1 l l+1; 0 0 0) · (1 l l+1; −b −m m+b),
/// with the factor i carried by the p = 2 component.
pub fn fused_dipole_element(q: &QuantumNumber, branch: i32) -> Result<C64> {
    check_branch(branch)?;
    let (t, b) = (q.top_gap(), q.bottom_gap());
    if t < 0.0 || b < 0.0 {
        return Ok(C64::new(0.0, 0.0));
    }
    let two_l = t + b;
    let lower = (1.0 / (two_l + 1.0)).sqrt();
    let upper = (1.0 / (two_l + 3.0)).sqrt();
    let h = std::f64::consts::FRAC_1_SQRT_2;
    Ok(match branch {
        0 => C64::new(((b + 1.0) * lower * lower).sqrt() * ((t + 1.0) * upper * upper).sqrt(), 0.0),
        1 => C64::new(-h * ((b + 1.0) * lower * lower).sqrt() * ((b + 2.0) * upper * upper).sqrt(), 0.0),
        _ => C64::new(0.0, -h * ((t + 1.0) * lower * lower).sqrt() * ((t + 2.0) * upper * upper).sqrt()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn oracle_examples() {
        assert_relative_eq!(wigner3j_oracle([1.0, 1.0, 0.0], [0.0; 3]).unwrap(), -1.0 / 3f64.sqrt(), max_relative = 1e-15);
        assert_eq!(wigner3j_oracle([1.0, 1.0, 1.0], [0.0; 3]).unwrap(), 0.0);
        assert_eq!(wigner3j_oracle([1.0, 1.0, 1.0], [1.0, 0.0, 0.0]).unwrap(), 0.0);
        assert_relative_eq!(wigner3j_oracle([0.5, 0.5, 1.0], [0.5, -0.5, 0.0]).unwrap(), 1.0 / 6f64.sqrt(), max_relative = 1e-15);
        assert_relative_eq!(wigner3j_oracle([2.0, 2.0, 2.0], [0.0; 3]).unwrap(), -(2.0f64 / 35.0).sqrt(), max_relative = 1e-15);
        assert!(wigner3j_oracle([51.0, 50.0, 1.0], [0.0; 3]).is_err());
    }

    #[test]
    fn oracle_handles_largest_arguments() {
        let v = wigner3j_oracle([50.0, 50.0, 50.0], [0.0; 3]).unwrap();
        assert!(v.is_finite() && v != 0.0);
        let v = wigner3j_oracle([25.0, 25.0, 50.0], [25.0, -25.0, 0.0]).unwrap();
        assert!(v.is_finite() && v != 0.0);
    }

    #[test]
    fn dipole_fused_limits() {
        for l in [1e3, 1e9, 1e23] {
            let q = QuantumNumber { l_ref: l, shell: 0, m_ref: 0.0, offset: 0 };
            let v = fused_dipole_element(&q, 0).unwrap();
            assert_relative_eq!(v.re, 0.5, max_relative = 1e-2);
        }
        let q = QuantumNumber { l_ref: 0.0, shell: 0, m_ref: 0.0, offset: 0 };
        assert_relative_eq!(fused_dipole_element(&q, 0).unwrap().re, 1.0 / 3f64.sqrt(), max_relative = 1e-15);
    }

    #[test]
    fn dipole_out_of_range_is_zero() {
        assert_eq!(wigner3j_dipole(3.0, 1, 4.0).unwrap(), 0.0);
        assert!(wigner3j_dipole(3.0, 2, 0.0).is_err());
    }

    #[test]
    fn closed_forms_match_oracle_small_l() {
        for l in 0..=10 {
            let lf = f64::from(l);
            for m in -l..=l {
                let mf = f64::from(m);
                for b in -1..=1 {
                    let exact = wigner3j_oracle([1.0, lf, lf + 1.0], [-f64::from(b), -mf, mf + f64::from(b)]).unwrap();
                    let closed = wigner3j_dipole(lf, b, mf).unwrap();
                    assert!((closed - exact).abs() <= 1e-12 * exact.abs().max(1e-300), "l={l} m={m} b={b}");
                    let q = QuantumNumber { l_ref: lf, shell: 0, m_ref: mf, offset: 0 };
                    let zero = wigner3j_oracle([1.0, lf, lf + 1.0], [0.0; 3]).unwrap();
                    let sign = if i32::rem_euclid(m, 2) == 0 { 1.0 } else { -1.0 };
                    let mut fused = C64::new(sign * ((2.0 * lf + 1.0) * (2.0 * lf + 3.0)).sqrt() * zero * exact, 0.0);
                    if b == -1 {
                        fused *= C64::new(0.0, 1.0);
                    }
                    let got = fused_dipole_element(&q, b).unwrap();
                    assert!((got - fused).norm() <= 1e-12 * fused.norm().max(1e-300), "fused l={l} m={m} b={b}");
                }
            }
        }
    }
}
