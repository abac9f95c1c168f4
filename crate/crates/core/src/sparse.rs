//! Compressed sparse row matrices over `Complex64`.
//!
//! Every operator of the model (ladder operators, dispersive Hamiltonian,
//! drive couplings, collapse operators) has a handful of entries per row, so
//! the master-equation kernel works on CSR data and dense column-major
//! density matrices. The dense-side kernels operate on raw slices so the
//! integrator can reuse its buffers.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };

#[derive(Clone, Debug, PartialEq)]
pub struct CsrMatrix {
    nrows: usize,
    ncols: usize,
    indptr: Vec<usize>,
    indices: Vec<usize>,
    values: Vec<C64>,
}

impl CsrMatrix {
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        Self {
            nrows,
            ncols,
            indptr: vec![0; nrows + 1],
            indices: Vec::new(),
            values: Vec::new(),
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_diagonal(&vec![C64::new(1.0, 0.0); n])
    }

    pub fn from_diagonal(diag: &[C64]) -> Self {
        Self::from_triplets(diag.len(), diag.len(), diag.iter().enumerate().map(|(i, &v)| (i, i, v)))
    }

    /// Builds a matrix from `(row, col, value)` triplets. Duplicates are
    /// summed; entries that end up exactly zero are dropped.
    pub fn from_triplets<I>(nrows: usize, ncols: usize, triplets: I) -> Self
    where
        I: IntoIterator<Item = (usize, usize, C64)>,
    {
        let mut rows: Vec<Vec<(usize, C64)>> = vec![Vec::new(); nrows];
        for (i, j, v) in triplets {
            assert!(i < nrows && j < ncols, "triplet ({i}, {j}) out of bounds");
            rows[i].push((j, v));
        }
        let mut indptr = Vec::with_capacity(nrows + 1);
        let mut indices = Vec::new();
        let mut values = Vec::new();
        indptr.push(0);
        for mut row in rows {
            row.sort_by_key(|&(j, _)| j);
            let mut iter = row.into_iter().peekable();
            while let Some((j, mut v)) = iter.next() {
                while let Some(&(j2, v2)) = iter.peek() {
                    if j2 != j {
                        break;
                    }
                    v += v2;
                    iter.next();
                }
                if v != ZERO {
                    indices.push(j);
                    values.push(v);
                }
            }
            indptr.push(indices.len());
        }
        Self {
            nrows,
            ncols,
            indptr,
            indices,
            values,
        }
    }

    pub fn from_dense(m: &DMatrix<C64>) -> Self {
        let (nrows, ncols) = m.shape();
        let mut triplets = Vec::new();
        for i in 0..nrows {
            for j in 0..ncols {
                let v = m[(i, j)];
                if v != ZERO {
                    triplets.push((i, j, v));
                }
            }
        }
        Self::from_triplets(nrows, ncols, triplets)
    }

    pub fn to_dense(&self) -> DMatrix<C64> {
        let mut m = DMatrix::zeros(self.nrows, self.ncols);
        for (i, j, v) in self.iter() {
            m[(i, j)] += v;
        }
        m
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

    pub fn values(&self) -> &[C64] {
        &self.values
    }

    pub fn indptr(&self) -> &[usize] {
        &self.indptr
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, C64)> + '_ {
        (0..self.nrows)
            .flat_map(move |i| (self.indptr[i]..self.indptr[i + 1]).map(move |p| (i, self.indices[p], self.values[p])))
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        let row = &self.indices[self.indptr[i]..self.indptr[i + 1]];
        match row.binary_search(&j) {
            Ok(p) => self.values[self.indptr[i] + p],
            Err(_) => ZERO,
        }
    }

    pub fn adjoint(&self) -> Self {
        Self::from_triplets(self.ncols, self.nrows, self.iter().map(|(i, j, v)| (j, i, v.conj())))
    }

    pub fn scale(&self, s: C64) -> Self {
        Self::from_triplets(self.nrows, self.ncols, self.iter().map(|(i, j, v)| (i, j, v * s)))
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.nrows, self.ncols), (other.nrows, other.ncols));
        Self::from_triplets(self.nrows, self.ncols, self.iter().chain(other.iter()))
    }

    /// Sparse product `self * other`.
    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.ncols, other.nrows);
        let mut triplets = Vec::new();
        let mut acc = vec![ZERO; other.ncols];
        let mut touched = Vec::new();
        for i in 0..self.nrows {
            for p in self.indptr[i]..self.indptr[i + 1] {
                let k = self.indices[p];
                let a = self.values[p];
                for q in other.indptr[k]..other.indptr[k + 1] {
                    let j = other.indices[q];
                    if acc[j] == ZERO {
                        touched.push(j);
                    }
                    acc[j] += a * other.values[q];
                }
            }
            for &j in &touched {
                triplets.push((i, j, acc[j]));
                acc[j] = ZERO;
            }
            touched.clear();
        }
        Self::from_triplets(self.nrows, other.ncols, triplets)
    }

    /// Standard Kronecker product: the index of `other` varies fastest.
    pub fn kron(&self, other: &Self) -> Self {
        let (nr, nc) = (other.nrows, other.ncols);
        let mut triplets = Vec::with_capacity(self.nnz() * other.nnz());
        for (i, j, a) in self.iter() {
            for (k, l, b) in other.iter() {
                triplets.push((i * nr + k, j * nc + l, a * b));
            }
        }
        Self::from_triplets(self.nrows * nr, self.ncols * nc, triplets)
    }

    pub fn mul_vec(&self, x: &DVector<C64>) -> DVector<C64> {
        assert_eq!(self.ncols, x.len());
        let mut y = DVector::zeros(self.nrows);
        self.mul_vec_into(self.values(), x.as_slice(), y.as_mut_slice());
        y
    }

    /// `y = A x` with the sparsity pattern of `self` and the given values.
    pub fn mul_vec_into(&self, values: &[C64], x: &[C64], y: &mut [C64]) {
        for i in 0..self.nrows {
            let mut s = ZERO;
            for p in self.indptr[i]..self.indptr[i + 1] {
                s += values[p] * x[self.indices[p]];
            }
            y[i] = s;
        }
    }

    /// `A * M` for a dense matrix.
    pub fn mul_dense(&self, m: &DMatrix<C64>) -> DMatrix<C64> {
        assert_eq!(self.ncols, m.nrows());
        let mut out = DMatrix::zeros(self.nrows, m.ncols());
        self.left_mul_cols(self.values(), m.as_slice(), out.as_mut_slice(), m.ncols(), false);
        out
    }

    /// `M * A^dagger` for a dense matrix.
    pub fn dense_mul_adjoint(&self, m: &DMatrix<C64>) -> DMatrix<C64> {
        assert_eq!(self.ncols, m.ncols());
        let mut out = DMatrix::zeros(m.nrows(), self.nrows);
        self.right_mul_adjoint_cols(m.as_slice(), out.as_mut_slice(), m.nrows(), false);
        out
    }

    /// Column-major kernel: `dst (+)= A * src` where `src` has `ncols_src`
    /// columns of length `self.ncols` and `A` takes `values` on the pattern
    /// of `self`.
    pub fn left_mul_cols(&self, values: &[C64], src: &[C64], dst: &mut [C64], ncols_src: usize, accumulate: bool) {
        let (n_in, n_out) = (self.ncols, self.nrows);
        for c in 0..ncols_src {
            let col = &src[c * n_in..(c + 1) * n_in];
            let out = &mut dst[c * n_out..(c + 1) * n_out];
            for i in 0..n_out {
                let mut s = ZERO;
                for p in self.indptr[i]..self.indptr[i + 1] {
                    s += values[p] * col[self.indices[p]];
                }
                if accumulate {
                    out[i] += s;
                } else {
                    out[i] = s;
                }
            }
        }
    }

    /// Column-major kernel: `dst (+)= src * A^dagger`, `src` having `nrows_src`
    /// rows and `self.ncols` columns. Column `j` of the result is
    /// `sum_k conj(A[j,k]) src[:, k]`, a sequence of contiguous axpys.
    pub fn right_mul_adjoint_cols(&self, src: &[C64], dst: &mut [C64], nrows_src: usize, accumulate: bool) {
        self.right_mul_adjoint_cols_with(&self.values, src, dst, nrows_src, accumulate)
    }

    /// As [`Self::right_mul_adjoint_cols`] with `values` replacing the
    /// stored entries.
    pub fn right_mul_adjoint_cols_with(
        &self,
        values: &[C64],
        src: &[C64],
        dst: &mut [C64],
        nrows_src: usize,
        accumulate: bool,
    ) {
        let n = nrows_src;
        for j in 0..self.nrows {
            let out = &mut dst[j * n..(j + 1) * n];
            if !accumulate {
                out.iter_mut().for_each(|x| *x = ZERO);
            }
            for p in self.indptr[j]..self.indptr[j + 1] {
                let k = self.indices[p];
                let w = values[p].conj();
                let col = &src[k * n..(k + 1) * n];
                for (o, s) in out.iter_mut().zip(col) {
                    *o += w * s;
                }
            }
        }
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.nrows == self.ncols && self.iter().all(|(i, j, v)| (v - self.get(j, i).conj()).norm() <= tol)
    }
}

/// `dst = src + src^dagger` for square column-major matrices of size `n`.
pub fn add_adjoint(src: &[C64], dst: &mut [C64], n: usize) {
    const B: usize = 32;
    for jb in (0..n).step_by(B) {
        for ib in (0..n).step_by(B) {
            for j in jb..(jb + B).min(n) {
                for i in ib..(ib + B).min(n) {
                    dst[i + j * n] = src[i + j * n] + src[j + i * n].conj();
                }
            }
        }
    }
}

/// In-place `m = (m + m^dagger) / 2`.
pub fn hermitize(m: &mut [C64], n: usize) {
    for j in 0..n {
        m[j + j * n].im = 0.0;
        for i in (j + 1)..n {
            let a = m[i + j * n];
            let b = m[j + i * n];
            let s = (a + b.conj()) * 0.5;
            m[i + j * n] = s;
            m[j + i * n] = s.conj();
        }
    }
}
