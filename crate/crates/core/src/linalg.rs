//! Sparse complex matrices and block-wise Hermitian eigendecomposition.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

/// Compressed-sparse-row complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix {
    nrows: usize,
    ncols: usize,
    indptr: Vec<usize>,
    indices: Vec<usize>,
    values: Vec<C64>,
}

impl SparseMatrix {
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        SparseMatrix { nrows, ncols, indptr: vec![0; nrows + 1], indices: Vec::new(), values: Vec::new() }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_diagonal(&vec![ONE; n])
    }

    pub fn from_diagonal(diag: &[C64]) -> Self {
        let n = diag.len();
        Self::from_triplets(n, n, diag.iter().enumerate().map(|(i, &v)| (i, i, v)))
    }

    /// Duplicates are summed; entries that end up exactly zero are dropped.
    pub fn from_triplets<T>(nrows: usize, ncols: usize, triplets: T) -> Self
    where
        T: IntoIterator<Item = (usize, usize, C64)>,
    {
        let mut rows: Vec<Vec<(usize, C64)>> = vec![Vec::new(); nrows];
        for (i, j, v) in triplets {
            assert!(i < nrows && j < ncols, "triplet ({i},{j}) outside {nrows}x{ncols}");
            rows[i].push((j, v));
        }
        let mut indptr = Vec::with_capacity(nrows + 1);
        let mut indices = Vec::new();
        let mut values = Vec::new();
        indptr.push(0);
        for mut row in rows {
            row.sort_by_key(|e| e.0);
            let mut k = 0;
            while k < row.len() {
                let j = row[k].0;
                let mut acc = ZERO;
                while k < row.len() && row[k].0 == j {
                    acc += row[k].1;
                    k += 1;
                }
                if acc != ZERO {
                    indices.push(j);
                    values.push(acc);
                }
            }
            indptr.push(indices.len());
        }
        SparseMatrix { nrows, ncols, indptr, indices, values }
    }

    /// Keeps entries with modulus above `tol`.
    pub fn from_dense(m: &CMatrix, tol: f64) -> Self {
        let mut t = Vec::new();
        for j in 0..m.ncols() {
            for i in 0..m.nrows() {
                let v = m[(i, j)];
                if v.norm() > tol {
                    t.push((i, j, v));
                }
            }
        }
        Self::from_triplets(m.nrows(), m.ncols(), t)
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, C64)> + '_ {
        let r = self.indptr[i]..self.indptr[i + 1];
        self.indices[r.clone()].iter().copied().zip(self.values[r].iter().copied())
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, C64)> + '_ {
        (0..self.nrows).flat_map(move |i| self.row(i).map(move |(j, v)| (i, j, v)))
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.row(i).find(|&(c, _)| c == j).map_or(ZERO, |(_, v)| v)
    }

    pub fn adjoint(&self) -> Self {
        Self::from_triplets(self.ncols, self.nrows, self.iter().map(|(i, j, v)| (j, i, v.conj())))
    }

    pub fn transpose(&self) -> Self {
        Self::from_triplets(self.ncols, self.nrows, self.iter().map(|(i, j, v)| (j, i, v)))
    }

    pub fn scale(&self, s: C64) -> Self {
        let mut out = self.clone();
        out.values.iter_mut().for_each(|v| *v *= s);
        if s == ZERO {
            return Self::zeros(self.nrows, self.ncols);
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.nrows, self.ncols), (other.nrows, other.ncols));
        Self::from_triplets(self.nrows, self.ncols, self.iter().chain(other.iter()))
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(-ONE))
    }

    /// Sparse × sparse product.
    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.ncols, other.nrows);
        let mut t = Vec::new();
        let mut acc = vec![ZERO; other.ncols];
        let mut touched: Vec<usize> = Vec::new();
        let mut mark = vec![false; other.ncols];
        for i in 0..self.nrows {
            for (k, a) in self.row(i) {
                for (j, b) in other.row(k) {
                    if !mark[j] {
                        mark[j] = true;
                        touched.push(j);
                    }
                    acc[j] += a * b;
                }
            }
            for &j in &touched {
                t.push((i, j, acc[j]));
                acc[j] = ZERO;
                mark[j] = false;
            }
            touched.clear();
        }
        Self::from_triplets(self.nrows, other.ncols, t)
    }

    /// Kronecker product with row index `i·rows(b) + k`.
    pub fn kron(&self, b: &Self) -> Self {
        let mut t = Vec::with_capacity(self.nnz() * b.nnz());
        for (i, j, x) in self.iter() {
            for (k, l, y) in b.iter() {
                t.push((i * b.nrows + k, j * b.ncols + l, x * y));
            }
        }
        Self::from_triplets(self.nrows * b.nrows, self.ncols * b.ncols, t)
    }

    pub fn mul_vec(&self, v: &CVector) -> CVector {
        assert_eq!(self.ncols, v.len());
        CVector::from_iterator(self.nrows, (0..self.nrows).map(|i| self.row(i).map(|(j, a)| a * v[j]).sum()))
    }

    pub fn to_dense(&self) -> CMatrix {
        let mut m = CMatrix::zeros(self.nrows, self.ncols);
        for (i, j, v) in self.iter() {
            m[(i, j)] += v;
        }
        m
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// max |A_ij − conj(A_ji)|.
    pub fn hermiticity_defect(&self) -> f64 {
        if self.nrows != self.ncols {
            return f64::INFINITY;
        }
        self.iter().map(|(i, j, v)| (v - self.get(j, i).conj()).norm()).fold(0.0, f64::max)
    }

    /// Adds `s · self · m` into `out` (all dense, column-major).
    pub fn mul_dense_into(&self, m: &CMatrix, s: C64, out: &mut CMatrix) {
        assert_eq!(self.ncols, m.nrows());
        let (rows_m, cols) = (m.nrows(), m.ncols());
        let rows_o = out.nrows();
        let src = m.as_slice();
        let dst = out.as_mut_slice();
        for c in 0..cols {
            let col = &src[c * rows_m..(c + 1) * rows_m];
            let o = &mut dst[c * rows_o..(c + 1) * rows_o];
            for (i, oi) in o.iter_mut().enumerate().take(self.nrows) {
                let acc: C64 = self.row(i).map(|(k, a)| a * col[k]).sum();
                *oi += s * acc;
            }
        }
    }

    /// Adds `s · m · self†` into `out`.
    pub fn dense_mul_adjoint_into(&self, m: &CMatrix, s: C64, out: &mut CMatrix) {
        assert_eq!(self.ncols, m.ncols());
        let rows = m.nrows();
        let src = m.as_slice();
        let dst = out.as_mut_slice();
        for j in 0..self.nrows {
            let o = &mut dst[j * rows..(j + 1) * rows];
            for (k, a) in self.row(j) {
                let w = s * a.conj();
                let col = &src[k * rows..(k + 1) * rows];
                for (x, y) in o.iter_mut().zip(col) {
                    *x += w * y;
                }
            }
        }
    }

    pub fn mul_dense(&self, m: &CMatrix) -> CMatrix {
        let mut out = CMatrix::zeros(self.nrows, m.ncols());
        self.mul_dense_into(m, ONE, &mut out);
        out
    }

    pub fn dense_mul_adjoint(&self, m: &CMatrix) -> CMatrix {
        let mut out = CMatrix::zeros(m.nrows(), self.nrows);
        self.dense_mul_adjoint_into(m, ONE, &mut out);
        out
    }
}

/// Tr(ρ·S) for dense ρ and sparse S.
pub fn trace_product(rho: &CMatrix, s: &SparseMatrix) -> C64 {
    s.iter().map(|(i, j, v)| v * rho[(j, i)]).sum()
}

pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|v| v.norm()).fold(0.0, f64::max)
}

/// max |M_ij − conj(M_ji)|.
pub fn hermiticity_defect(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let mut d: f64 = 0.0;
    for j in 0..n {
        for i in 0..=j {
            d = d.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    d
}

/// Replace `m` by (m + m†)/2 and return the defect that was removed.
pub fn symmetrize(m: &mut CMatrix) -> f64 {
    let n = m.nrows();
    let mut d: f64 = 0.0;
    for j in 0..n {
        for i in 0..=j {
            let a = m[(i, j)];
            let b = m[(j, i)].conj();
            d = d.max((a - b).norm());
            let h = (a + b) * 0.5;
            m[(i, j)] = h;
            m[(j, i)] = h.conj();
        }
        m[(j, j)].im = 0.0;
    }
    d
}

struct DisjointSet(Vec<usize>);

impl DisjointSet {
    fn new(n: usize) -> Self {
        DisjointSet((0..n).collect())
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.0[x] != x {
            self.0[x] = self.0[self.0[x]];
            x = self.0[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.0[ra.max(rb)] = ra.min(rb);
        }
    }

    fn groups(mut self) -> Vec<Vec<usize>> {
        let n = self.0.len();
        let mut by_root: Vec<Vec<usize>> = vec![Vec::new(); n];
        for i in 0..n {
            let r = self.find(i);
            by_root[r].push(i);
        }
        by_root.into_iter().filter(|g| !g.is_empty()).collect()
    }
}

/// Eigenpairs of one connected block of a Hermitian matrix.
#[derive(Debug, Clone)]
pub struct EigenBlock {
    /// Global indices spanned by this block, ascending.
    pub indices: Vec<usize>,
    pub values: Vec<f64>,
    /// Columns are eigenvectors in block coordinates.
    pub vectors: CMatrix,
}

/// Eigendecomposition of a Hermitian matrix, split along the connected
/// components of its off-diagonal sparsity pattern.
///
/// Exact structural zeros survive every function applied through the
/// spectrum, and each block is diagonalised independently.
#[derive(Debug, Clone)]
pub struct HermitianSpectrum {
    dim: usize,
    pub blocks: Vec<EigenBlock>,
}

fn diagonalize_block(m: &CMatrix, indices: Vec<usize>) -> Result<EigenBlock> {
    let k = indices.len();
    let mut sub = CMatrix::from_fn(k, k, |a, b| m[(indices[a], indices[b])]);
    if k == 1 {
        return Ok(EigenBlock { indices, values: vec![sub[(0, 0)].re], vectors: CMatrix::from_element(1, 1, ONE) });
    }
    symmetrize(&mut sub);
    let eig = SymmetricEigen::try_new(sub, f64::EPSILON, 0).ok_or(Error::Eigensolver { size: k })?;
    Ok(EigenBlock { indices, values: eig.eigenvalues.iter().copied().collect(), vectors: eig.eigenvectors })
}

impl HermitianSpectrum {
    pub fn of_dense(m: &CMatrix) -> Result<Self> {
        let n = m.nrows();
        if m.ncols() != n {
            return Err(Error::Dimension { expected: n, found: m.ncols() });
        }
        let mut ds = DisjointSet::new(n);
        for j in 0..n {
            for i in 0..j {
                if m[(i, j)] != ZERO || m[(j, i)] != ZERO {
                    ds.union(i, j);
                }
            }
        }
        let groups = ds.groups();
        let blocks = groups.into_par_iter().map(|g| diagonalize_block(m, g)).collect::<Result<Vec<_>>>()?;
        Ok(HermitianSpectrum { dim: n, blocks })
    }

    pub fn of_sparse(s: &SparseMatrix) -> Result<Self> {
        let n = s.nrows();
        if s.ncols() != n {
            return Err(Error::Dimension { expected: n, found: s.ncols() });
        }
        let mut ds = DisjointSet::new(n);
        for (i, j, _) in s.iter() {
            if i != j {
                ds.union(i, j);
            }
        }
        let groups = ds.groups();
        let blocks = groups
            .into_par_iter()
            .map(|g| {
                let k = g.len();
                let pos: std::collections::HashMap<usize, usize> = g.iter().enumerate().map(|(a, &i)| (i, a)).collect();
                let mut sub = CMatrix::zeros(k, k);
                for (a, &i) in g.iter().enumerate() {
                    for (j, v) in s.row(i) {
                        sub[(a, pos[&j])] += v;
                    }
                }
                let local: Vec<usize> = (0..k).collect();
                let mut b = diagonalize_block(&sub, local)?;
                b.indices = g;
                Ok(b)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(HermitianSpectrum { dim: n, blocks })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut v: Vec<f64> = self.blocks.iter().flat_map(|b| b.values.iter().copied()).collect();
        v.sort_by(f64::total_cmp);
        v
    }

    /// f(M)·v.
    pub fn apply<F: Fn(f64) -> C64>(&self, v: &CVector, f: F) -> CVector {
        let mut out = CVector::zeros(self.dim);
        for b in &self.blocks {
            let local = CVector::from_iterator(b.indices.len(), b.indices.iter().map(|&i| v[i]));
            if local.iter().all(|x| *x == ZERO) {
                continue;
            }
            let mut coeff = b.vectors.ad_mul(&local);
            for (c, &lam) in coeff.iter_mut().zip(&b.values) {
                *c *= f(lam);
            }
            let back = &b.vectors * coeff;
            for (k, &i) in b.indices.iter().enumerate() {
                out[i] = back[k];
            }
        }
        out
    }
}
