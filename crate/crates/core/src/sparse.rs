//! Minimal CSR storage for Fock-space operators.
//!
//! Operators are assembled from coordinate triplets (deduplicated, sorted),
//! kept sparse for products and matvecs, and densified only for
//! eigenvalue/singular-value work.

use crate::C64;
use nalgebra::DMatrix;

/// Compressed sparse row matrix over complex doubles.
#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    nrows: usize,
    ncols: usize,
    indptr: Vec<usize>,
    indices: Vec<usize>,
    values: Vec<C64>,
}

const DROP_TOL: f64 = 0.0;

impl CsrMatrix {
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        CsrMatrix { nrows, ncols, indptr: vec![0; nrows + 1], indices: Vec::new(), values: Vec::new() }
    }

    pub fn identity(n: usize) -> Self {
        CsrMatrix {
            nrows: n,
            ncols: n,
            indptr: (0..=n).collect(),
            indices: (0..n).collect(),
            values: vec![C64::new(1.0, 0.0); n],
        }
    }

    pub fn from_diagonal(diag: &[C64]) -> Self {
        let n = diag.len();
        let mut m = Self::identity(n);
        m.values.copy_from_slice(diag);
        m
    }

    /// Build from unordered triplets; duplicate entries are summed.
    pub fn from_triplets(nrows: usize, ncols: usize, mut trips: Vec<(usize, usize, C64)>) -> Self {
        trips.sort_unstable_by_key(|&(r, c, _)| (r, c));
        let mut indptr = vec![0usize; nrows + 1];
        let mut indices = Vec::with_capacity(trips.len());
        let mut values: Vec<C64> = Vec::with_capacity(trips.len());
        let mut last: Option<(usize, usize)> = None;
        for (r, c, v) in trips {
            debug_assert!(r < nrows && c < ncols);
            if last == Some((r, c)) {
                *values.last_mut().unwrap() += v;
            } else {
                indices.push(c);
                values.push(v);
                indptr[r + 1] += 1;
                last = Some((r, c));
            }
        }
        for r in 0..nrows {
            indptr[r + 1] += indptr[r];
        }
        let mut m = CsrMatrix { nrows, ncols, indptr, indices, values };
        m.prune(DROP_TOL);
        m
    }

    /// Remove entries with |v| <= tol, keeping the structure canonical.
    fn prune(&mut self, tol: f64) {
        let mut indptr = vec![0usize; self.nrows + 1];
        let mut indices = Vec::with_capacity(self.indices.len());
        let mut values = Vec::with_capacity(self.values.len());
        for r in 0..self.nrows {
            for k in self.indptr[r]..self.indptr[r + 1] {
                if self.values[k].norm() > tol {
                    indices.push(self.indices[k]);
                    values.push(self.values[k]);
                }
            }
            indptr[r + 1] = indices.len();
        }
        self.indptr = indptr;
        self.indices = indices;
        self.values = values;
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

    pub fn row(&self, r: usize) -> (&[usize], &[C64]) {
        let (lo, hi) = (self.indptr[r], self.indptr[r + 1]);
        (&self.indices[lo..hi], &self.values[lo..hi])
    }

    pub fn scale(&self, s: C64) -> Self {
        let mut out = self.clone();
        for v in &mut out.values {
            *v *= s;
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.nrows, self.ncols), (other.nrows, other.ncols));
        let mut trips = Vec::with_capacity(self.nnz() + other.nnz());
        for r in 0..self.nrows {
            let (ci, cv) = self.row(r);
            for (&c, &v) in ci.iter().zip(cv) {
                trips.push((r, c, v));
            }
            let (ci, cv) = other.row(r);
            for (&c, &v) in ci.iter().zip(cv) {
                trips.push((r, c, v));
            }
        }
        Self::from_triplets(self.nrows, self.ncols, trips)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(C64::new(-1.0, 0.0)))
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        let mut trips = Vec::with_capacity(self.nnz());
        for r in 0..self.nrows {
            let (ci, cv) = self.row(r);
            for (&c, &v) in ci.iter().zip(cv) {
                trips.push((c, r, v.conj()));
            }
        }
        Self::from_triplets(self.ncols, self.nrows, trips)
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.ncols, other.nrows, "dimension mismatch in matmul");
        // Row-by-row accumulation into a dense scratch of the output row.
        let mut trips: Vec<(usize, usize, C64)> = Vec::new();
        let mut scratch: Vec<C64> = vec![C64::default(); other.ncols];
        let mut touched: Vec<usize> = Vec::new();
        for r in 0..self.nrows {
            let (ci, cv) = self.row(r);
            for (&k, &a) in ci.iter().zip(cv) {
                let (oi, ov) = other.row(k);
                for (&c, &b) in oi.iter().zip(ov) {
                    if scratch[c] == C64::default() {
                        touched.push(c);
                    }
                    scratch[c] += a * b;
                }
            }
            for &c in &touched {
                trips.push((r, c, scratch[c]));
                scratch[c] = C64::default();
            }
            touched.clear();
        }
        Self::from_triplets(self.nrows, other.ncols, trips)
    }

    pub fn commutator(&self, other: &Self) -> Self {
        self.matmul(other).sub(&other.matmul(self))
    }

    pub fn matvec(&self, x: &[C64]) -> Vec<C64> {
        assert_eq!(x.len(), self.ncols);
        let mut y = vec![C64::default(); self.nrows];
        for r in 0..self.nrows {
            let (ci, cv) = self.row(r);
            let mut acc = C64::default();
            for (&c, &v) in ci.iter().zip(cv) {
                acc += v * x[c];
            }
            y[r] = acc;
        }
        y
    }

    /// Left-multiply by a diagonal matrix: diag(d) * self.
    pub fn diag_mul_left(&self, d: &[C64]) -> Self {
        assert_eq!(d.len(), self.nrows);
        let mut out = self.clone();
        for r in 0..self.nrows {
            for k in out.indptr[r]..out.indptr[r + 1] {
                out.values[k] *= d[r];
            }
        }
        out.prune(DROP_TOL);
        out
    }

    /// Right-multiply by a diagonal matrix: self * diag(d).
    pub fn diag_mul_right(&self, d: &[C64]) -> Self {
        assert_eq!(d.len(), self.ncols);
        let mut out = self.clone();
        for k in 0..out.values.len() {
            out.values[k] *= d[out.indices[k]];
        }
        out.prune(DROP_TOL);
        out
    }

    pub fn to_dense(&self) -> DMatrix<C64> {
        let mut m = DMatrix::zeros(self.nrows, self.ncols);
        for r in 0..self.nrows {
            let (ci, cv) = self.row(r);
            for (&c, &v) in ci.iter().zip(cv) {
                m[(r, c)] = v;
            }
        }
        m
    }

    pub fn from_dense(m: &DMatrix<C64>, tol: f64) -> Self {
        let mut trips = Vec::new();
        for r in 0..m.nrows() {
            for c in 0..m.ncols() {
                if m[(r, c)].norm() > tol {
                    trips.push((r, c, m[(r, c)]));
                }
            }
        }
        Self::from_triplets(m.nrows(), m.ncols(), trips)
    }

    /// Frobenius norm.
    pub fn fro_norm(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Max elementwise deviation from the conjugate transpose.
    pub fn hermiticity_defect(&self) -> f64 {
        self.sub(&self.adjoint()).values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Dense sub-block on the given row/column index lists.
    pub fn dense_block(&self, rows: &[usize], cols: &[usize]) -> DMatrix<C64> {
        let mut col_pos = vec![usize::MAX; self.ncols];
        for (k, &c) in cols.iter().enumerate() {
            col_pos[c] = k;
        }
        let mut out = DMatrix::zeros(rows.len(), cols.len());
        for (ri, &r) in rows.iter().enumerate() {
            let (ci, cv) = self.row(r);
            for (&c, &v) in ci.iter().zip(cv) {
                if col_pos[c] != usize::MAX {
                    out[(ri, col_pos[c])] = v;
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn triplets_dedup_and_sort() {
        let m = CsrMatrix::from_triplets(
            2,
            2,
            vec![(1, 0, c(1.0, 0.0)), (0, 1, c(2.0, 0.0)), (1, 0, c(3.0, 0.0))],
        );
        assert_eq!(m.nnz(), 2);
        let d = m.to_dense();
        assert_eq!(d[(1, 0)], c(4.0, 0.0));
        assert_eq!(d[(0, 1)], c(2.0, 0.0));
    }

    #[test]
    fn matmul_matches_dense() {
        let a = CsrMatrix::from_triplets(2, 3, vec![(0, 0, c(1.0, 1.0)), (0, 2, c(2.0, 0.0)), (1, 1, c(0.0, -1.0))]);
        let b = CsrMatrix::from_triplets(3, 2, vec![(0, 1, c(1.0, 0.0)), (2, 0, c(-1.0, 2.0)), (1, 0, c(5.0, 0.0))]);
        let prod = a.matmul(&b).to_dense();
        let want = a.to_dense() * b.to_dense();
        assert!((prod - want).norm() < 1e-14);
    }

    #[test]
    fn adjoint_is_conjugate_transpose() {
        let a = CsrMatrix::from_triplets(2, 2, vec![(0, 1, c(1.0, 2.0)), (1, 1, c(0.0, 3.0))]);
        let adj = a.adjoint().to_dense();
        assert_eq!(adj[(1, 0)], c(1.0, -2.0));
        assert_eq!(adj[(1, 1)], c(0.0, -3.0));
    }
}
