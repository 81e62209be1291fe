//! Minimal compressed-sparse-row matrix.
//!
//! Graphs keep an edge list as ground truth; CSR is built on demand for the
//! iterated matrix-vector products used by polynomial filters, the greedy
//! basis solver, and power iteration. Column indices are sorted within each
//! row so traversal order (and therefore floating-point summation order) is
//! deterministic.

use nalgebra::DVector;

#[derive(Debug, Clone)]
pub struct Csr {
    nrows: usize,
    ncols: usize,
    indptr: Vec<usize>,
    indices: Vec<usize>,
    data: Vec<f64>,
}

impl Csr {
    /// Builds from (row, col, value) triplets. Duplicate positions are summed.
    pub fn from_triplets(nrows: usize, ncols: usize, triplets: &[(usize, usize, f64)]) -> Self {
        let mut sorted: Vec<(usize, usize, f64)> = triplets.to_vec();
        sorted.sort_by_key(|t| (t.0, t.1));
        let mut indptr = Vec::with_capacity(nrows + 1);
        let mut indices: Vec<usize> = Vec::with_capacity(sorted.len());
        let mut data: Vec<f64> = Vec::with_capacity(sorted.len());
        indptr.push(0);
        let mut it = sorted.iter().peekable();
        for r in 0..nrows {
            let row_start = indices.len();
            while let Some(&&(tr, tc, tv)) = it.peek() {
                if tr != r {
                    break;
                }
                it.next();
                debug_assert!(tc < ncols);
                if indices.len() > row_start && *indices.last().unwrap() == tc {
                    *data.last_mut().unwrap() += tv;
                } else {
                    indices.push(tc);
                    data.push(tv);
                }
            }
            indptr.push(indices.len());
        }
        debug_assert!(it.peek().is_none(), "triplet row index out of range");
        Csr {
            nrows,
            ncols,
            indptr,
            indices,
            data,
        }
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn nnz(&self) -> usize {
        self.data.len()
    }

    pub fn row(&self, r: usize) -> (&[usize], &[f64]) {
        let lo = self.indptr[r];
        let hi = self.indptr[r + 1];
        (&self.indices[lo..hi], &self.data[lo..hi])
    }

    pub fn matvec(&self, x: &DVector<f64>) -> DVector<f64> {
        debug_assert_eq!(x.len(), self.ncols);
        let mut y = DVector::zeros(self.nrows);
        for r in 0..self.nrows {
            let (cols, vals) = self.row(r);
            let mut acc = 0.0;
            for (c, v) in cols.iter().zip(vals) {
                acc += v * x[*c];
            }
            y[r] = acc;
        }
        y
    }

    /// y = s ⊙ (self · x), used for row-scaled operators like D⁻¹L.
    pub fn scale_rows(&self, s: &DVector<f64>) -> Csr {
        debug_assert_eq!(s.len(), self.nrows);
        let mut out = self.clone();
        for r in 0..self.nrows {
            let lo = out.indptr[r];
            let hi = out.indptr[r + 1];
            for v in &mut out.data[lo..hi] {
                *v *= s[r];
            }
        }
        out
    }

    pub fn scale(&self, s: f64) -> Csr {
        let mut out = self.clone();
        for v in &mut out.data {
            *v *= s;
        }
        out
    }

    pub fn to_dense(&self) -> nalgebra::DMatrix<f64> {
        let mut m = nalgebra::DMatrix::zeros(self.nrows, self.ncols);
        for r in 0..self.nrows {
            let (cols, vals) = self.row(r);
            for (c, v) in cols.iter().zip(vals) {
                m[(r, *c)] += v;
            }
        }
        m
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// Max absolute row sum (operator ∞-norm).
    pub fn norm_inf(&self) -> f64 {
        (0..self.nrows)
            .map(|r| self.row(r).1.iter().map(|v| v.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }
}
