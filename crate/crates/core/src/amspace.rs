//! Truncated angular-momentum spaces at arbitrarily large quantum numbers.
//!
//! A label is a real reference magnitude plus small integer offsets, so
//! `l − m` and `l + m` stay exact even when `l ≈ 10²³`.

use std::collections::HashMap;
use std::ops::RangeInclusive;

use crate::error::{Error, Result};
use crate::linalg::{CMatrix, CVector, SparseMatrix, C64, I, ONE, ZERO};

/// Largest magnitude at which every integer is representable in an f64.
const EXACT_INTEGER_LIMIT: f64 = 4_503_599_627_370_496.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sphere {
    A,
    B,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Ladder {
    Raise,
    Lower,
}

impl Ladder {
    pub fn step(self) -> i64 {
        match self {
            Ladder::Raise => 1,
            Ladder::Lower => -1,
        }
    }

    pub fn opposite(self) -> Ladder {
        match self {
            Ladder::Raise => Ladder::Lower,
            Ladder::Lower => Ladder::Raise,
        }
    }
}

/// |l, m⟩ with l = l_ref + shell and m = m_ref + offset.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuantumNumber {
    pub l_ref: f64,
    pub shell: i32,
    pub m_ref: f64,
    pub offset: i64,
}

impl QuantumNumber {
    pub fn l(&self) -> f64 {
        self.l_ref + f64::from(self.shell)
    }

    pub fn m(&self) -> f64 {
        self.m_ref + self.offset as f64
    }

    /// l − m without cancellation.
    pub fn top_gap(&self) -> f64 {
        (self.l_ref - self.m_ref) + (f64::from(self.shell) - self.offset as f64)
    }

    /// l + m without cancellation.
    pub fn bottom_gap(&self) -> f64 {
        (self.l_ref + self.m_ref) + (f64::from(self.shell) + self.offset as f64)
    }

    pub fn is_physical(&self) -> bool {
        self.l() >= 0.0 && self.top_gap() >= 0.0 && self.bottom_gap() >= 0.0
    }

    /// ⟨l, m±1| L± |l, m⟩.
    pub fn ladder(&self, dir: Ladder) -> f64 {
        let (top, bottom) = (self.top_gap(), self.bottom_gap());
        match dir {
            Ladder::Raise => (top * (bottom + 1.0)).max(0.0).sqrt(),
            Ladder::Lower => (bottom * (top + 1.0)).max(0.0).sqrt(),
        }
    }
}

/// ⟨l, m±1| L± |l, m⟩ = √((l∓m)(l±m+1)) in product form.
pub fn ladder_element(l: f64, m: f64, dir: Ladder) -> Result<f64> {
    if !(l >= 0.0) || !m.is_finite() || m > l || -m > l {
        return Err(Error::Domain(format!("|m| ≤ l violated for l = {l}, m = {m}")));
    }
    let q = QuantumNumber { l_ref: l, shell: 0, m_ref: m, offset: 0 };
    Ok(q.ladder(dir))
}

/// A run of consecutive m values `anchor + lo ..= anchor + hi`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    pub anchor: f64,
    pub lo: i64,
    pub hi: i64,
}

fn integer_gap(a: f64, b: f64) -> Option<i64> {
    let d = b - a;
    (d.fract() == 0.0 && d.abs() < EXACT_INTEGER_LIMIT).then_some(d as i64)
}

/// Finite set of |l, m⟩ labels: segments of m around anchors, repeated
/// over a range of shells l_ref + s.
#[derive(Debug, Clone)]
pub struct BasisWindow {
    l_ref: f64,
    half_width: u32,
    shells: (i32, i32),
    segments: Vec<Segment>,
    states: Vec<QuantumNumber>,
    segment_of: Vec<usize>,
    lookup: HashMap<(i32, usize, i64), usize>,
}

impl BasisWindow {
    /// Single shell l = l_ref with m ∈ anchor ± half_width for each anchor.
    pub fn new(l_ref: f64, anchors: &[f64], half_width: u32) -> Result<Self> {
        Self::with_shells(l_ref, anchors, half_width, 0..=0)
    }

    /// Every m of a small l (requires 2l integer).
    pub fn full(l: f64) -> Result<Self> {
        if !(l >= 0.0) || l > 1e6 || (2.0 * l).fract() != 0.0 {
            return Err(Error::Domain(format!("full window needs 2l a small integer, got l = {l}")));
        }
        Self::new(l, &[-l], (2.0 * l) as u32)
    }

    pub fn with_shells(l_ref: f64, anchors: &[f64], half_width: u32, shells: RangeInclusive<i32>) -> Result<Self> {
        let (s_lo, s_hi) = (*shells.start(), *shells.end());
        if !(l_ref >= 0.0) || !l_ref.is_finite() {
            return Err(Error::Domain(format!("l_ref must be finite and non-negative, got {l_ref}")));
        }
        if s_lo > s_hi || l_ref + f64::from(s_lo) < 0.0 {
            return Err(Error::Domain(format!("invalid shell range {s_lo}..={s_hi} at l_ref = {l_ref}")));
        }
        if anchors.is_empty() {
            return Err(Error::Domain("window needs at least one anchor".into()));
        }
        let w = i64::from(half_width);
        let top_shell = f64::from(s_hi);
        let mut raw = Vec::new();
        for &a in anchors {
            if !a.is_finite() || a.abs() > l_ref + top_shell {
                return Err(Error::OutsideWindow { what: format!("anchor m = {a}") });
            }
            if l_ref < EXACT_INTEGER_LIMIT && (l_ref - a).fract() != 0.0 {
                return Err(Error::Domain(format!("anchor m = {a} is not an integer step from l = {l_ref}")));
            }
            let hi_cap = (l_ref - a) + top_shell;
            let lo_cap = -((l_ref + a) + top_shell);
            let hi = if hi_cap >= w as f64 { w } else { hi_cap.floor() as i64 };
            let lo = if lo_cap <= -(w as f64) { -w } else { lo_cap.ceil() as i64 };
            if lo <= hi {
                raw.push(Segment { anchor: a, lo, hi });
            }
        }
        raw.sort_by(|x, y| x.anchor.total_cmp(&y.anchor));
        let mut segments: Vec<Segment> = Vec::new();
        for seg in raw {
            if let Some(last) = segments.last_mut() {
                if let Some(d) = integer_gap(last.anchor, seg.anchor) {
                    if last.hi + 1 >= d + seg.lo {
                        last.lo = last.lo.min(d + seg.lo);
                        last.hi = last.hi.max(d + seg.hi);
                        continue;
                    }
                }
            }
            segments.push(seg);
        }
        let mut states = Vec::new();
        let mut segment_of = Vec::new();
        let mut lookup = HashMap::new();
        for shell in s_lo..=s_hi {
            for (si, seg) in segments.iter().enumerate() {
                for offset in seg.lo..=seg.hi {
                    let q = QuantumNumber { l_ref, shell, m_ref: seg.anchor, offset };
                    if q.is_physical() {
                        lookup.insert((shell, si, offset), states.len());
                        states.push(q);
                        segment_of.push(si);
                    }
                }
            }
        }
        Ok(BasisWindow { l_ref, half_width, shells: (s_lo, s_hi), segments, states, segment_of, lookup })
    }

    pub fn dim(&self) -> usize {
        self.states.len()
    }

    pub fn l_ref(&self) -> f64 {
        self.l_ref
    }

    pub fn half_width(&self) -> u32 {
        self.half_width
    }

    pub fn shells(&self) -> RangeInclusive<i32> {
        self.shells.0..=self.shells.1
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn states(&self) -> &[QuantumNumber] {
        &self.states
    }

    pub fn state(&self, i: usize) -> QuantumNumber {
        self.states[i]
    }

    /// Index of |l_ref + shell, m⟩ if present.
    pub fn index_of(&self, shell: i32, m: f64) -> Option<usize> {
        self.segments.iter().enumerate().find_map(|(si, seg)| {
            let d = integer_gap(seg.anchor, m)?;
            self.lookup.get(&(shell, si, d)).copied()
        })
    }

    /// Index of the state carrying exactly these labels.
    pub fn index_of_label(&self, q: &QuantumNumber) -> Option<usize> {
        if q.l_ref != self.l_ref {
            return None;
        }
        let si = self.segments.iter().position(|seg| seg.anchor == q.m_ref)?;
        self.lookup.get(&(q.shell, si, q.offset)).copied()
    }

    /// Index of the state reached by shifting m by `dm` and the shell by `ds`.
    pub fn neighbor(&self, i: usize, dm: i64, ds: i32) -> Option<usize> {
        let q = &self.states[i];
        self.lookup.get(&(q.shell + ds, self.segment_of[i], q.offset + dm)).copied()
    }

    /// m of state `i` minus `reference`, exact when both differ from the
    /// anchor by an integer.
    pub fn m_relative(&self, i: usize, reference: f64) -> f64 {
        let q = &self.states[i];
        (q.m_ref - reference) + q.offset as f64
    }

    /// True when the ladder element out of state `i` is nonzero but its
    /// target is missing from the window.
    pub fn leaks(&self, i: usize, dir: Ladder) -> bool {
        self.states[i].ladder(dir) > 0.0 && self.neighbor(i, dir.step(), 0).is_none()
    }
}

/// Two-sphere product of windows; dense index `a · dim_b + b`.
#[derive(Debug, Clone)]
pub struct TruncatedProductBasis {
    pub a: BasisWindow,
    pub b: BasisWindow,
}

impl TruncatedProductBasis {
    pub fn new(a: BasisWindow, b: BasisWindow) -> Self {
        TruncatedProductBasis { a, b }
    }

    pub fn dim(&self) -> usize {
        self.a.dim() * self.b.dim()
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.a.dim(), self.b.dim())
    }

    pub fn index(&self, ia: usize, ib: usize) -> usize {
        ia * self.b.dim() + ib
    }

    pub fn labels(&self, k: usize) -> (usize, usize) {
        (k / self.b.dim(), k % self.b.dim())
    }

    pub fn window(&self, s: Sphere) -> &BasisWindow {
        match s {
            Sphere::A => &self.a,
            Sphere::B => &self.b,
        }
    }

    /// Lift a single-sphere operator to the product space.
    pub fn lift(&self, op: &SparseMatrix, s: Sphere) -> SparseMatrix {
        match s {
            Sphere::A => op.kron(&SparseMatrix::identity(self.b.dim())),
            Sphere::B => SparseMatrix::identity(self.a.dim()).kron(op),
        }
    }
}

/// Square complex operator with an optional Hermiticity guarantee.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorMatrix {
    pub matrix: SparseMatrix,
    pub hermitian: bool,
}

impl OperatorMatrix {
    pub fn new(matrix: SparseMatrix, hermitian: bool) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() {
            return Err(Error::Dimension { expected: matrix.nrows(), found: matrix.ncols() });
        }
        if hermitian {
            let defect = matrix.hermiticity_defect();
            if defect > 1e-12 * matrix.max_abs() {
                return Err(Error::NotHermitian { defect });
            }
        }
        Ok(OperatorMatrix { matrix, hermitian })
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn to_dense(&self) -> CMatrix {
        self.matrix.to_dense()
    }
}

/// L±, L_z, L_x, L_y on one window.
#[derive(Debug, Clone)]
pub struct SingleSphereOperators {
    pub l_plus: OperatorMatrix,
    pub l_minus: OperatorMatrix,
    pub l_z: OperatorMatrix,
    pub l_x: OperatorMatrix,
    pub l_y: OperatorMatrix,
}

fn ladder_matrix(w: &BasisWindow, dir: Ladder) -> SparseMatrix {
    let t = (0..w.dim()).filter_map(|i| {
        let j = w.neighbor(i, dir.step(), 0)?;
        let v = w.state(i).ladder(dir);
        (v != 0.0).then_some((j, i, C64::new(v, 0.0)))
    });
    SparseMatrix::from_triplets(w.dim(), w.dim(), t.collect::<Vec<_>>())
}

/// L_z with diagonal m.
pub fn lz_matrix(w: &BasisWindow) -> SparseMatrix {
    let d: Vec<C64> = w.states().iter().map(|q| C64::new(q.m(), 0.0)).collect();
    SparseMatrix::from_diagonal(&d)
}

pub fn build_single_sphere_operators(w: &BasisWindow) -> SingleSphereOperators {
    let lp = ladder_matrix(w, Ladder::Raise);
    let lm = ladder_matrix(w, Ladder::Lower);
    let half = C64::new(0.5, 0.0);
    let lx = lp.add(&lm).scale(half);
    let ly = lp.sub(&lm).scale(-I * half);
    SingleSphereOperators {
        l_plus: OperatorMatrix { matrix: lp, hermitian: false },
        l_minus: OperatorMatrix { matrix: lm, hermitian: false },
        l_z: OperatorMatrix { matrix: lz_matrix(w), hermitian: true },
        l_x: OperatorMatrix { matrix: lx, hermitian: true },
        l_y: OperatorMatrix { matrix: ly, hermitian: true },
    }
}

/// Ĥ_I/ħ in s⁻¹: −(α/2)(L_{A+}L_{B−} + L_{A−}L_{B+}) + 2α L_{Az}L_{Bz}.
pub fn build_interaction_hamiltonian(basis: &TruncatedProductBasis, alpha: f64) -> Result<OperatorMatrix> {
    if !(alpha >= 0.0) || !alpha.is_finite() {
        return Err(Error::Domain(format!("coupling α must be finite and non-negative, got {alpha}")));
    }
    let (wa, wb) = (&basis.a, &basis.b);
    let mut t = Vec::new();
    for ia in 0..wa.dim() {
        let qa = wa.state(ia);
        for ib in 0..wb.dim() {
            let qb = wb.state(ib);
            let k = basis.index(ia, ib);
            let diag = 2.0 * alpha * qa.m() * qb.m();
            if diag != 0.0 {
                t.push((k, k, C64::new(diag, 0.0)));
            }
            for dir in [Ladder::Raise, Ladder::Lower] {
                let (Some(ja), Some(jb)) = (wa.neighbor(ia, dir.step(), 0), wb.neighbor(ib, -dir.step(), 0)) else {
                    continue;
                };
                let v = -0.5 * alpha * qa.ladder(dir) * qb.ladder(dir.opposite());
                if v != 0.0 {
                    t.push((basis.index(ja, jb), k, C64::new(v, 0.0)));
                }
            }
        }
    }
    let n = basis.dim();
    Ok(OperatorMatrix { matrix: SparseMatrix::from_triplets(n, n, t), hermitian: true })
}

/// Ô = L_{A+}L_{B−} + L_{A−}L_{B+} − 4 L_{Az}L_{Bz}, so that Ĥ_I/ħ = −(α/2)Ô.
pub fn build_exchange_operator(basis: &TruncatedProductBasis) -> SparseMatrix {
    let h = build_interaction_hamiltonian(basis, 1.0).expect("unit coupling is valid");
    h.matrix.scale(C64::new(-2.0, 0.0))
}

/// Pure two-sphere state on a product basis.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    pub dims: (usize, usize),
    pub amplitudes: CVector,
}

impl StateVector {
    pub fn new(dims: (usize, usize), amplitudes: CVector) -> Result<Self> {
        if dims.0 * dims.1 != amplitudes.len() {
            return Err(Error::Dimension { expected: dims.0 * dims.1, found: amplitudes.len() });
        }
        Ok(StateVector { dims, amplitudes })
    }

    pub fn basis_state(basis: &TruncatedProductBasis, ia: usize, ib: usize) -> Self {
        let mut v = CVector::zeros(basis.dim());
        v[basis.index(ia, ib)] = ONE;
        StateVector { dims: basis.dims(), amplitudes: v }
    }

    /// ψ_A ⊗ ψ_B.
    pub fn product(a: &CVector, b: &CVector) -> Self {
        let v = CVector::from_iterator(a.len() * b.len(), a.iter().flat_map(|x| b.iter().map(move |y| x * y)));
        StateVector { dims: (a.len(), b.len()), amplitudes: v }
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.norm()
    }

    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm();
        if n == 0.0 {
            return Err(Error::InvalidState("cannot normalise the zero vector".into()));
        }
        Ok(StateVector { dims: self.dims, amplitudes: self.amplitudes.unscale(n) })
    }

    pub fn density(&self) -> DensityMatrix {
        DensityMatrix { dims: self.dims, matrix: &self.amplitudes * self.amplitudes.adjoint() }
    }

    /// Amplitudes reshaped as a dim_a × dim_b matrix.
    pub fn coefficient_matrix(&self) -> CMatrix {
        let (da, db) = self.dims;
        CMatrix::from_fn(da, db, |i, j| self.amplitudes[i * db + j])
    }
}

/// Mixed two-sphere state on a product basis.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    pub dims: (usize, usize),
    pub matrix: CMatrix,
}

impl DensityMatrix {
    pub fn new(dims: (usize, usize), matrix: CMatrix) -> Result<Self> {
        let n = dims.0 * dims.1;
        if matrix.nrows() != n || matrix.ncols() != n {
            return Err(Error::Dimension { expected: n, found: matrix.nrows() });
        }
        Ok(DensityMatrix { dims, matrix })
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }
}

/// `(L±)^q` on one sphere, together with the norm of the amplitude that
/// would have left the window (summed in quadrature over the q steps).
pub fn apply_ladder_power(
    state: &StateVector,
    basis: &TruncatedProductBasis,
    sphere: Sphere,
    dir: Ladder,
    q: u32,
) -> Result<(StateVector, f64)> {
    if state.dims != basis.dims() {
        return Err(Error::Dimension { expected: basis.dim(), found: state.amplitudes.len() });
    }
    let w = basis.window(sphere);
    let mut cur = state.amplitudes.clone();
    let mut lost = 0.0;
    for _ in 0..q {
        let mut next = CVector::zeros(cur.len());
        for (k, &c) in cur.iter().enumerate() {
            if c == ZERO {
                continue;
            }
            let (ia, ib) = basis.labels(k);
            let i = if sphere == Sphere::A { ia } else { ib };
            let e = w.state(i).ladder(dir);
            if e == 0.0 {
                continue;
            }
            match w.neighbor(i, dir.step(), 0) {
                Some(j) => {
                    let target = if sphere == Sphere::A { basis.index(j, ib) } else { basis.index(ia, j) };
                    next[target] += c * e;
                }
                None => lost += (c * e).norm_sqr(),
            }
        }
        cur = next;
    }
    Ok((StateVector { dims: state.dims, amplitudes: cur }, lost.sqrt()))
}
