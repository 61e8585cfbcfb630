//! Compressed sparse row matrices and spectral-norm estimation.
//!
//! Truncated left-regular matrices are block-banded and fairly sparse, so
//! everything here is built around a small CSR type. Norms below a size
//! threshold go through a dense SVD; larger ones through Lanczos on `A^* A`.

use std::collections::HashMap;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use petgraph::unionfind::UnionFind;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// Size up to which spectral norms are computed densely.
pub const DENSE_LIMIT: usize = 400;

#[derive(Clone, Debug, PartialEq)]
pub struct SparseMatrix {
    nrows: usize,
    ncols: usize,
    indptr: Vec<usize>,
    indices: Vec<usize>,
    values: Vec<Complex64>,
}

impl SparseMatrix {
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        SparseMatrix {
            nrows,
            ncols,
            indptr: vec![0; nrows + 1],
            indices: Vec::new(),
            values: Vec::new(),
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_diagonal(&vec![1.0; n])
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        let n = diag.len();
        SparseMatrix {
            nrows: n,
            ncols: n,
            indptr: (0..=n).collect(),
            indices: (0..n).collect(),
            values: diag.iter().map(|&d| Complex64::new(d, 0.0)).collect(),
        }
    }

    /// Builds from `(row, col, value)` triplets; duplicates are summed.
    pub fn from_triplets(nrows: usize, ncols: usize, mut triplets: Vec<(usize, usize, Complex64)>) -> Self {
        triplets.sort_by_key(|&(r, c, _)| (r, c));
        let mut indptr = vec![0; nrows + 1];
        let mut indices = Vec::with_capacity(triplets.len());
        let mut values: Vec<Complex64> = Vec::with_capacity(triplets.len());
        let mut last: Option<(usize, usize)> = None;
        for (r, c, v) in triplets {
            assert!(r < nrows && c < ncols, "triplet ({r}, {c}) out of bounds");
            if last == Some((r, c)) {
                *values.last_mut().unwrap() += v;
            } else {
                indptr[r + 1] += 1;
                indices.push(c);
                values.push(v);
                last = Some((r, c));
            }
        }
        for r in 0..nrows {
            indptr[r + 1] += indptr[r];
        }
        SparseMatrix {
            nrows,
            ncols,
            indptr,
            indices,
            values,
        }
    }

    /// Builds from per-column entry lists (rows within a column need not be
    /// sorted but must be distinct).
    pub fn from_columns(nrows: usize, columns: &[Vec<(usize, Complex64)>]) -> Self {
        let ncols = columns.len();
        let mut counts = vec![0usize; nrows + 1];
        for col in columns {
            for &(r, _) in col {
                counts[r + 1] += 1;
            }
        }
        for r in 0..nrows {
            counts[r + 1] += counts[r];
        }
        let indptr = counts.clone();
        let nnz = indptr[nrows];
        let mut indices = vec![0; nnz];
        let mut values = vec![ZERO; nnz];
        let mut next = counts;
        // columns are visited in order, so each row comes out sorted by column
        for (c, col) in columns.iter().enumerate() {
            for &(r, v) in col {
                let slot = next[r];
                indices[slot] = c;
                values[slot] = v;
                next[r] += 1;
            }
        }
        SparseMatrix {
            nrows,
            ncols,
            indptr,
            indices,
            values,
        }
    }

    pub fn from_dense(m: &DMatrix<Complex64>) -> Self {
        let mut triplets = Vec::new();
        for r in 0..m.nrows() {
            for c in 0..m.ncols() {
                if m[(r, c)] != ZERO {
                    triplets.push((r, c, m[(r, c)]));
                }
            }
        }
        Self::from_triplets(m.nrows(), m.ncols(), triplets)
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

    pub fn row(&self, r: usize) -> impl Iterator<Item = (usize, Complex64)> + '_ {
        let range = self.indptr[r]..self.indptr[r + 1];
        self.indices[range.clone()]
            .iter()
            .copied()
            .zip(self.values[range].iter().copied())
    }

    pub fn get(&self, r: usize, c: usize) -> Complex64 {
        let range = self.indptr[r]..self.indptr[r + 1];
        match self.indices[range.clone()].binary_search(&c) {
            Ok(pos) => self.values[range.start + pos],
            Err(_) => ZERO,
        }
    }

    /// All stored entries in row-major order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, Complex64)> + '_ {
        (0..self.nrows).flat_map(move |r| self.row(r).map(move |(c, v)| (r, c, v)))
    }

    pub fn matvec(&self, x: &[Complex64], y: &mut [Complex64]) {
        for (r, out) in y.iter_mut().enumerate() {
            let mut acc = ZERO;
            for k in self.indptr[r]..self.indptr[r + 1] {
                acc += self.values[k] * x[self.indices[k]];
            }
            *out = acc;
        }
    }

    /// `y = A^* x`.
    pub fn adjoint_matvec(&self, x: &[Complex64], y: &mut [Complex64]) {
        y.iter_mut().for_each(|v| *v = ZERO);
        for (r, &xr) in x.iter().enumerate() {
            if xr == ZERO {
                continue;
            }
            for k in self.indptr[r]..self.indptr[r + 1] {
                y[self.indices[k]] += self.values[k].conj() * xr;
            }
        }
    }

    pub fn adjoint(&self) -> Self {
        let triplets = self.iter().map(|(r, c, v)| (c, r, v.conj())).collect();
        Self::from_triplets(self.ncols, self.nrows, triplets)
    }

    /// Applies `f(row, col, value)` to every stored entry, keeping the pattern.
    pub fn map_entries(&self, f: impl Fn(usize, usize, Complex64) -> Complex64) -> Self {
        let mut out = self.clone();
        for r in 0..self.nrows {
            for k in self.indptr[r]..self.indptr[r + 1] {
                out.values[k] = f(r, self.indices[k], self.values[k]);
            }
        }
        out
    }

    /// Keeps the entries for which `keep(row, col)` holds.
    pub fn filter(&self, keep: impl Fn(usize, usize) -> bool) -> Self {
        let triplets = self.iter().filter(|&(r, c, _)| keep(r, c)).collect();
        Self::from_triplets(self.nrows, self.ncols, triplets)
    }

    /// `diag(left) * A * diag(right)`.
    pub fn scale(&self, left: &[f64], right: &[f64]) -> Self {
        self.map_entries(|r, c, v| v * (left[r] * right[c]))
    }

    pub fn scaled(&self, s: Complex64) -> Self {
        self.map_entries(|_, _, v| v * s)
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.nrows, self.ncols), (other.nrows, other.ncols));
        let triplets = self.iter().chain(other.iter()).collect();
        Self::from_triplets(self.nrows, self.ncols, triplets)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scaled(Complex64::new(-1.0, 0.0)))
    }

    /// Sparse product `self * other`.
    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.ncols, other.nrows);
        let mut acc = vec![ZERO; other.ncols];
        let mut touched: Vec<usize> = Vec::new();
        let mut mark = vec![false; other.ncols];
        let mut triplets = Vec::new();
        for r in 0..self.nrows {
            for (k, a) in self.row(r) {
                for (c, b) in other.row(k) {
                    if !mark[c] {
                        mark[c] = true;
                        touched.push(c);
                    }
                    acc[c] += a * b;
                }
            }
            for &c in &touched {
                triplets.push((r, c, acc[c]));
                acc[c] = ZERO;
                mark[c] = false;
            }
            touched.clear();
        }
        Self::from_triplets(self.nrows, other.ncols, triplets)
    }

    pub fn to_dense(&self) -> DMatrix<Complex64> {
        let mut m = DMatrix::from_element(self.nrows, self.ncols, ZERO);
        for (r, c, v) in self.iter() {
            m[(r, c)] += v;
        }
        m
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Largest entry of `|self - other|`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.sub(other).max_abs()
    }

    /// Euclidean norms of the columns.
    pub fn column_norms(&self) -> Vec<f64> {
        let mut sq = vec![0.0; self.ncols];
        for (_, c, v) in self.iter() {
            sq[c] += v.norm_sqr();
        }
        sq.into_iter().map(f64::sqrt).collect()
    }

    /// Compression to the given row and column index lists.
    pub fn restrict(&self, rows: &[usize], cols: &[usize]) -> Self {
        let mut col_pos = vec![usize::MAX; self.ncols];
        for (i, &c) in cols.iter().enumerate() {
            col_pos[c] = i;
        }
        let mut triplets = Vec::new();
        for (i, &r) in rows.iter().enumerate() {
            for (c, v) in self.row(r) {
                if col_pos[c] != usize::MAX {
                    triplets.push((i, col_pos[c], v));
                }
            }
        }
        Self::from_triplets(rows.len(), cols.len(), triplets)
    }

    /// Splits the index sets into blocks that the matrix never couples:
    /// `A` is, up to permutation, the direct sum of its restrictions to the
    /// returned `(rows, cols)` pairs. Empty rows and columns are dropped.
    pub fn components(&self) -> Vec<(Vec<usize>, Vec<usize>)> {
        let mut uf = UnionFind::<usize>::new(self.ncols);
        for r in 0..self.nrows {
            let mut cols = self.indices[self.indptr[r]..self.indptr[r + 1]].iter();
            if let Some(&first) = cols.next() {
                for &c in cols {
                    uf.union(first, c);
                }
            }
        }
        let mut slot: HashMap<usize, usize> = HashMap::new();
        let mut out: Vec<(Vec<usize>, Vec<usize>)> = Vec::new();
        let mut used = vec![false; self.ncols];
        for r in 0..self.nrows {
            if let Some(&c) = self.indices[self.indptr[r]..self.indptr[r + 1]].first() {
                let root = uf.find(c);
                let k = *slot.entry(root).or_insert_with(|| {
                    out.push((Vec::new(), Vec::new()));
                    out.len() - 1
                });
                out[k].0.push(r);
                used[c] = true;
            }
        }
        for (_, c, _) in self.iter() {
            used[c] = true;
        }
        for (c, &u) in used.iter().enumerate() {
            if u {
                if let Some(&k) = slot.get(&uf.find(c)) {
                    out[k].1.push(c);
                }
            }
        }
        out
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.nrows == self.ncols && self.max_abs_diff(&self.adjoint()) <= tol
    }
}

/// Largest singular value of a dense matrix.
pub fn dense_spectral_norm(m: &DMatrix<Complex64>) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.clone()
        .singular_values()
        .iter()
        .copied()
        .fold(0.0, f64::max)
}

/// Spectral norm of a sparse matrix.
///
/// The value is a lower bound in exact arithmetic whichever path is taken
/// (Ritz values never exceed the top eigenvalue), and it is never smaller
/// than the largest column norm.
pub fn spectral_norm(m: &SparseMatrix) -> f64 {
    if m.nnz() == 0 {
        return 0.0;
    }
    let parts = m.components();
    if parts.len() == 1 {
        return connected_norm(m);
    }
    parts
        .iter()
        .map(|(rows, cols)| connected_norm(&m.restrict(rows, cols)))
        .fold(0.0, f64::max)
}

fn connected_norm(m: &SparseMatrix) -> f64 {
    let col_max = m.column_norms().into_iter().fold(0.0, f64::max);
    let est = if m.nrows().max(m.ncols()) <= DENSE_LIMIT {
        dense_spectral_norm(&m.to_dense())
    } else {
        let n = m.ncols();
        let mut tmp = vec![ZERO; m.nrows()];
        let top = lanczos_top(n, 300, 1e-7, |x, y| {
            m.matvec(x, &mut tmp);
            m.adjoint_matvec(&tmp, y);
        });
        top.max(0.0).sqrt()
    };
    est.max(col_max)
}

/// Largest eigenvalue of a Hermitian positive semidefinite operator given
/// by its action, via Lanczos with full reorthogonalization.
pub fn lanczos_top(n: usize, max_iter: usize, tol: f64, mut apply: impl FnMut(&[Complex64], &mut [Complex64])) -> f64 {
    if n == 0 {
        return 0.0;
    }
    let steps = max_iter.min(n);
    // deterministic start vector with no special alignment
    let mut v: Vec<Complex64> = (0..n)
        .map(|i| {
            let t = i as f64;
            Complex64::new(1.0 + 0.5 * (0.7 * t).sin(), 0.3 * (1.3 * t).cos())
        })
        .collect();
    normalize(&mut v);
    let mut basis: Vec<Vec<Complex64>> = Vec::with_capacity(steps);
    let mut alpha: Vec<f64> = Vec::new();
    let mut beta: Vec<f64> = Vec::new();
    let mut w = vec![ZERO; n];
    let mut best = 0.0f64;
    for it in 0..steps {
        apply(&v, &mut w);
        let a = dot(&v, &w).re;
        alpha.push(a);
        for (wi, vi) in w.iter_mut().zip(&v) {
            *wi -= *vi * a;
        }
        if let Some(prev) = basis.last() {
            let b = *beta.last().unwrap();
            for (wi, pi) in w.iter_mut().zip(prev) {
                *wi -= *pi * b;
            }
        }
        basis.push(v.clone());
        // two passes of classical Gram-Schmidt against the whole basis
        for _ in 0..2 {
            for q in &basis {
                let h = dot(q, &w);
                for (wi, qi) in w.iter_mut().zip(q) {
                    *wi -= *qi * h;
                }
            }
        }
        let b = norm(&w);
        let done = it + 1 == steps || b <= 1e-14 * best.max(1e-300);
        if (it + 1) % 5 == 0 || done {
            let (theta, resid) = tridiagonal_top(&alpha, &beta, b);
            let converged = resid <= tol * theta.abs().max(1e-300);
            best = best.max(theta);
            if converged || done {
                return best;
            }
        }
        beta.push(b);
        for (vi, wi) in v.iter_mut().zip(&w) {
            *vi = *wi / b;
        }
    }
    best
}

/// Top eigenvalue of the Lanczos tridiagonal matrix and its residual bound
/// `|b * y_last|`.
fn tridiagonal_top(alpha: &[f64], beta: &[f64], b_next: f64) -> (f64, f64) {
    let m = alpha.len();
    let mut t = DMatrix::<f64>::zeros(m, m);
    for i in 0..m {
        t[(i, i)] = alpha[i];
        if i + 1 < m {
            t[(i, i + 1)] = beta[i];
            t[(i + 1, i)] = beta[i];
        }
    }
    let eig = t.symmetric_eigen();
    let (idx, theta) = eig
        .eigenvalues
        .iter()
        .copied()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |acc, (i, x)| if x > acc.1 { (i, x) } else { acc });
    let y_last = eig.eigenvectors[(m - 1, idx)];
    (theta, (b_next * y_last).abs())
}

/// Extremal eigenvalues `(min, max)` of a dense Hermitian matrix.
pub fn hermitian_extremes(m: &DMatrix<Complex64>) -> (f64, f64) {
    let eig = m.clone().symmetric_eigen();
    let ev: &DVector<f64> = &eig.eigenvalues;
    (ev.min(), ev.max())
}

pub(crate) fn dot(x: &[Complex64], y: &[Complex64]) -> Complex64 {
    x.iter().zip(y).map(|(a, b)| a.conj() * b).sum()
}

pub(crate) fn norm(x: &[Complex64]) -> f64 {
    x.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
}

fn normalize(x: &mut [Complex64]) {
    let n = norm(x);
    x.iter_mut().for_each(|v| *v /= n);
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn split_norm_matches_dense() {
        // two interleaved shift chains plus an isolated entry
        let mut t = Vec::new();
        for i in 0..40 {
            if i + 2 < 40 {
                t.push((i + 2, i, Complex64::new(1.0 + 0.01 * i as f64, 0.3)));
            }
        }
        t.push((5, 7, Complex64::new(0.0, -4.5)));
        let m = SparseMatrix::from_triplets(40, 40, t);
        assert!(m.components().len() >= 2);
        let want = dense_spectral_norm(&m.to_dense());
        assert!((spectral_norm(&m) - want).abs() < 1e-12 * want);
    }

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn triplets_sum_duplicates() {
        let m = SparseMatrix::from_triplets(2, 3, vec![(1, 2, c(1.0)), (0, 0, c(2.0)), (1, 2, c(0.5))]);
        assert_eq!(m.nnz(), 2);
        assert_eq!(m.get(1, 2), c(1.5));
        assert_eq!(m.get(0, 1), ZERO);
        let cols = vec![vec![(0, c(2.0))], vec![], vec![(1, c(1.5))]];
        assert_eq!(SparseMatrix::from_columns(2, &cols), m);
    }

    #[test]
    fn products_match_dense() {
        let a = SparseMatrix::from_triplets(
            3,
            3,
            vec![(0, 1, c(1.0)), (1, 2, Complex64::new(0.0, 2.0)), (2, 0, c(-1.0)), (2, 2, c(3.0))],
        );
        let b = a.adjoint();
        let dense = a.to_dense() * b.to_dense();
        assert!((a.mul(&b).to_dense() - dense).norm() < 1e-14);
        let x = vec![c(1.0), Complex64::new(0.5, -1.0), c(2.0)];
        let mut y = vec![ZERO; 3];
        a.adjoint_matvec(&x, &mut y);
        let expect = a.to_dense().adjoint() * DVector::from_vec(x);
        for i in 0..3 {
            assert!((y[i] - expect[i]).norm() < 1e-14);
        }
    }

    #[test]
    fn lanczos_agrees_with_dense_on_shift() {
        // symmetric tridiagonal Toeplitz: norm 2 cos(pi / (n + 1))
        let n = 600;
        let mut t = Vec::new();
        for i in 0..n - 1 {
            t.push((i, i + 1, c(1.0)));
            t.push((i + 1, i, c(1.0)));
        }
        let m = SparseMatrix::from_triplets(n, n, t);
        let exact = 2.0 * (std::f64::consts::PI / (n as f64 + 1.0)).cos();
        let est = spectral_norm(&m);
        assert!(est <= exact + 1e-12);
        assert!(exact - est < 1e-4, "{est} vs {exact}");
    }
}
