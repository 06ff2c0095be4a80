//! Compressed sparse row storage for square operators.

use alloc::vec;
use alloc::vec::Vec;

use crate::dense::DenseMatrix;
use crate::error::{invalid, Error, Result};
use crate::scalar::{Scalar, C64};

/// Square CSR matrix. Column indices within a row are sorted and unique.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix<T> {
    n: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<T>,
    symmetric: bool,
}

impl<T: Scalar> SparseMatrix<T> {
    /// Assembles from `(row, col, value)` triplets; duplicates are summed.
    pub fn from_triplets(n: usize, triplets: &[(usize, usize, T)]) -> Result<Self> {
        let mut counts = vec![0usize; n + 1];
        for &(i, j, _) in triplets {
            if i >= n {
                return Err(Error::IndexOutOfRange { index: i, bound: n });
            }
            if j >= n {
                return Err(Error::IndexOutOfRange { index: j, bound: n });
            }
            counts[i + 1] += 1;
        }
        for i in 0..n {
            counts[i + 1] += counts[i];
        }
        let mut next = counts.clone();
        let mut cols = vec![0usize; triplets.len()];
        let mut vals = vec![T::zero(); triplets.len()];
        for &(i, j, v) in triplets {
            let p = next[i];
            cols[p] = j;
            vals[p] = v;
            next[i] += 1;
        }

        let mut row_ptr = Vec::with_capacity(n + 1);
        let mut col_idx = Vec::with_capacity(triplets.len());
        let mut values = Vec::with_capacity(triplets.len());
        row_ptr.push(0);
        let mut scratch: Vec<(usize, T)> = Vec::new();
        for i in 0..n {
            scratch.clear();
            scratch.extend((counts[i]..counts[i + 1]).map(|p| (cols[p], vals[p])));
            scratch.sort_by_key(|e| e.0);
            for &(j, v) in scratch.iter() {
                if col_idx.len() > row_ptr[i] && *col_idx.last().unwrap() == j {
                    *values.last_mut().unwrap() += v;
                } else {
                    col_idx.push(j);
                    values.push(v);
                }
            }
            row_ptr.push(col_idx.len());
        }
        Ok(Self {
            n,
            row_ptr,
            col_idx,
            values,
            symmetric: false,
        })
    }

    /// Takes raw CSR arrays, validating their structure.
    pub fn from_csr(
        n: usize,
        row_ptr: Vec<usize>,
        col_idx: Vec<usize>,
        values: Vec<T>,
    ) -> Result<Self> {
        if row_ptr.len() != n + 1 {
            return Err(Error::DimensionMismatch {
                expected: n + 1,
                found: row_ptr.len(),
            });
        }
        if row_ptr[0] != 0 || row_ptr.windows(2).any(|w| w[0] > w[1]) {
            return Err(invalid("row_ptr must start at 0 and be nondecreasing"));
        }
        if row_ptr[n] != col_idx.len() || col_idx.len() != values.len() {
            return Err(invalid("row_ptr, col_idx and values disagree on nnz"));
        }
        for i in 0..n {
            let row = &col_idx[row_ptr[i]..row_ptr[i + 1]];
            if let Some(&j) = row.iter().find(|&&j| j >= n) {
                return Err(Error::IndexOutOfRange { index: j, bound: n });
            }
            if row.windows(2).any(|w| w[0] >= w[1]) {
                return Err(invalid("column indices must be sorted and unique within a row"));
            }
        }
        Ok(Self {
            n,
            row_ptr,
            col_idx,
            values,
            symmetric: false,
        })
    }

    pub fn identity(n: usize) -> Self {
        Self::from_diag(&vec![T::one(); n])
    }

    pub fn from_diag(d: &[T]) -> Self {
        let n = d.len();
        Self {
            n,
            row_ptr: (0..=n).collect(),
            col_idx: (0..n).collect(),
            values: d.to_vec(),
            symmetric: d.iter().all(|v| v.im() == 0.0),
        }
    }

    /// Constant-coefficient tridiagonal matrix with the given sub-, main and
    /// super-diagonal values.
    pub fn tridiag(n: usize, lower: T, diag: T, upper: T) -> Self {
        let mut t = Vec::with_capacity(3 * n);
        for i in 0..n {
            if i > 0 {
                t.push((i, i - 1, lower));
            }
            t.push((i, i, diag));
            if i + 1 < n {
                t.push((i, i + 1, upper));
            }
        }
        let mut m = Self::from_triplets(n, &t).expect("indices in range");
        m.symmetric = m.is_hermitian();
        m
    }

    pub fn from_dense(d: &DenseMatrix<T>) -> Result<Self> {
        if !d.is_square() {
            return Err(Error::DimensionMismatch {
                expected: d.rows(),
                found: d.cols(),
            });
        }
        let n = d.rows();
        let mut t = Vec::new();
        for i in 0..n {
            for j in 0..n {
                let v = d[(i, j)];
                if v != T::zero() {
                    t.push((i, j, v));
                }
            }
        }
        Self::from_triplets(n, &t)
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row_ptr(&self) -> &[usize] {
        &self.row_ptr
    }

    pub fn col_idx(&self) -> &[usize] {
        &self.col_idx
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    /// Declared symmetry (real) or Hermitian-ness (complex).
    pub fn symmetry_flag(&self) -> bool {
        self.symmetric
    }

    /// Sets the symmetry flag after verifying that the stored entries agree.
    pub fn with_symmetry_flag(mut self, flag: bool) -> Result<Self> {
        if flag && !self.is_hermitian() {
            return Err(Error::NotHermitian);
        }
        self.symmetric = flag;
        Ok(self)
    }

    /// Row `i` as `(column indices, values)`.
    pub fn row(&self, i: usize) -> (&[usize], &[T]) {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        (&self.col_idx[r.clone()], &self.values[r])
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        let (cols, vals) = self.row(i);
        match cols.binary_search(&j) {
            Ok(p) => vals[p],
            Err(_) => T::zero(),
        }
    }

    /// Checks that every stored `(i, j, v)` has a stored partner `(j, i, conj(v))`.
    pub fn is_hermitian(&self) -> bool {
        for i in 0..self.n {
            let (cols, vals) = self.row(i);
            for (&j, &v) in cols.iter().zip(vals) {
                let (pc, pv) = self.row(j);
                match pc.binary_search(&i) {
                    Ok(p) if pv[p] == v.conj() => {}
                    _ => return false,
                }
            }
        }
        true
    }

    pub fn spmv(&self, x: &[T]) -> Result<Vec<T>> {
        if x.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: x.len(),
            });
        }
        let mut y = vec![T::zero(); self.n];
        self.spmv_into(x, &mut y);
        Ok(y)
    }

    /// `y = A x` without allocation. Panics on length mismatch.
    pub fn spmv_into(&self, x: &[T], y: &mut [T]) {
        assert_eq!(x.len(), self.n);
        assert_eq!(y.len(), self.n);
        for (i, yi) in y.iter_mut().enumerate() {
            let mut acc = T::zero();
            for p in self.row_ptr[i]..self.row_ptr[i + 1] {
                acc += self.values[p] * x[self.col_idx[p]];
            }
            *yi = acc;
        }
    }

    /// `y = A^* x` without forming the adjoint.
    pub fn adjoint_spmv_into(&self, x: &[T], y: &mut [T]) {
        assert_eq!(x.len(), self.n);
        assert_eq!(y.len(), self.n);
        y.iter_mut().for_each(|v| *v = T::zero());
        for i in 0..self.n {
            let xi = x[i];
            for p in self.row_ptr[i]..self.row_ptr[i + 1] {
                y[self.col_idx[p]] += self.values[p].conj() * xi;
            }
        }
    }

    pub fn adjoint(&self) -> Self {
        let t: Vec<_> = (0..self.n)
            .flat_map(|i| {
                let (cols, vals) = self.row(i);
                cols.iter()
                    .zip(vals)
                    .map(move |(&j, &v)| (j, i, v.conj()))
                    .collect::<Vec<_>>()
            })
            .collect();
        let mut m = Self::from_triplets(self.n, &t).expect("indices in range");
        m.symmetric = self.symmetric;
        m
    }

    pub fn to_dense(&self) -> DenseMatrix<T> {
        let mut d = DenseMatrix::zeros(self.n, self.n);
        for i in 0..self.n {
            let (cols, vals) = self.row(i);
            for (&j, &v) in cols.iter().zip(vals) {
                d[(i, j)] += v;
            }
        }
        d
    }

    pub fn to_complex(&self) -> SparseMatrix<C64> {
        SparseMatrix {
            n: self.n,
            row_ptr: self.row_ptr.clone(),
            col_idx: self.col_idx.clone(),
            values: self.values.iter().map(|v| v.to_complex()).collect(),
            symmetric: self.symmetric,
        }
    }

    /// Maximum absolute row sum.
    pub fn norm_inf(&self) -> f64 {
        (0..self.n)
            .map(|i| self.row(i).1.iter().map(|v| v.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// `A + s I`
    pub fn shifted(&self, s: T) -> Self {
        let mut t: Vec<_> = (0..self.n)
            .flat_map(|i| {
                let (cols, vals) = self.row(i);
                cols.iter()
                    .zip(vals)
                    .map(move |(&j, &v)| (i, j, v))
                    .collect::<Vec<_>>()
            })
            .collect();
        t.extend((0..self.n).map(|i| (i, i, s)));
        let mut m = Self::from_triplets(self.n, &t).expect("indices in range");
        m.symmetric = self.symmetric && s.im() == 0.0;
        m
    }
}
