//! Column-major dense matrices and the small dense kernels built on them.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Index, IndexMut};

use crate::error::{Error, Result};
use crate::scalar::{math, Scalar, C64};

#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Scalar> DenseMatrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![T::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for j in 0..cols {
            for i in 0..rows {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn from_col_major(rows: usize, cols: usize, data: Vec<T>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                expected: rows * cols,
                found: data.len(),
            });
        }
        Ok(Self { rows, cols, data })
    }

    /// Builds a matrix whose columns are the given vectors (all of length `rows`).
    pub fn from_columns(rows: usize, columns: &[Vec<T>]) -> Self {
        let mut data = Vec::with_capacity(rows * columns.len());
        for c in columns {
            assert_eq!(c.len(), rows, "column length mismatch");
            data.extend_from_slice(c);
        }
        Self {
            rows,
            cols: columns.len(),
            data,
        }
    }

    pub fn from_diag(d: &[T]) -> Self {
        let mut m = Self::zeros(d.len(), d.len());
        for (i, v) in d.iter().enumerate() {
            m[(i, i)] = *v;
        }
        m
    }

    /// Outer product `x y^*`.
    pub fn outer(x: &[T], y: &[T]) -> Self {
        Self::from_fn(x.len(), y.len(), |i, j| x[i] * y[j].conj())
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    #[inline]
    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    #[inline]
    pub fn as_mut_slice(&mut self) -> &mut [T] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<T> {
        self.data
    }

    #[inline]
    pub fn col(&self, j: usize) -> &[T] {
        &self.data[j * self.rows..(j + 1) * self.rows]
    }

    #[inline]
    pub fn col_mut(&mut self, j: usize) -> &mut [T] {
        &mut self.data[j * self.rows..(j + 1) * self.rows]
    }

    pub fn row(&self, i: usize) -> Vec<T> {
        (0..self.cols).map(|j| self[(i, j)]).collect()
    }

    pub fn diag(&self) -> Vec<T> {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).collect()
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn map(&self, f: impl Fn(T) -> T) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|v| f(*v)).collect(),
        }
    }

    pub fn scaled(&self, s: T) -> Self {
        self.map(|v| v * s)
    }

    pub fn add(&self, other: &Self) -> Self {
        self.assert_same_shape(other);
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| *a + *b).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.assert_same_shape(other);
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| *a - *b).collect(),
        }
    }

    /// `self += a * other`
    pub fn add_scaled(&mut self, a: T, other: &Self) {
        self.assert_same_shape(other);
        for (x, y) in self.data.iter_mut().zip(&other.data) {
            *x += a * *y;
        }
    }

    pub fn add_to_diag(&mut self, s: T) {
        for i in 0..self.rows.min(self.cols) {
            self[(i, i)] += s;
        }
    }

    fn assert_same_shape(&self, other: &Self) {
        assert!(
            self.rows == other.rows && self.cols == other.cols,
            "shape mismatch: {}x{} vs {}x{}",
            self.rows,
            self.cols,
            other.rows,
            other.cols
        );
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "inner dimension mismatch");
        let mut out = Self::zeros(self.rows, other.cols);
        let m = self.rows;
        for j in 0..other.cols {
            let oc = &mut out.data[j * m..(j + 1) * m];
            for k in 0..self.cols {
                let b = other.data[j * other.rows + k];
                if b == T::zero() {
                    continue;
                }
                let ac = &self.data[k * m..(k + 1) * m];
                for (o, a) in oc.iter_mut().zip(ac) {
                    *o += *a * b;
                }
            }
        }
        out
    }

    /// `self^* other` without forming the adjoint.
    pub fn adjoint_matmul(&self, other: &Self) -> Self {
        assert_eq!(self.rows, other.rows, "inner dimension mismatch");
        Self::from_fn(self.cols, other.cols, |i, j| {
            crate::scalar::dot(self.col(i), other.col(j))
        })
    }

    pub fn matvec(&self, x: &[T]) -> Vec<T> {
        assert_eq!(self.cols, x.len(), "matvec dimension mismatch");
        let mut y = vec![T::zero(); self.rows];
        for (k, xk) in x.iter().enumerate() {
            if *xk == T::zero() {
                continue;
            }
            crate::scalar::axpy(*xk, self.col(k), &mut y);
        }
        y
    }

    /// `self^* x`
    pub fn adjoint_matvec(&self, x: &[T]) -> Vec<T> {
        assert_eq!(self.rows, x.len(), "matvec dimension mismatch");
        (0..self.cols)
            .map(|j| crate::scalar::dot(self.col(j), x))
            .collect()
    }

    pub fn submatrix(&self, r0: usize, r1: usize, c0: usize, c1: usize) -> Self {
        Self::from_fn(r1 - r0, c1 - c0, |i, j| self[(r0 + i, c0 + j)])
    }

    pub fn set_block(&mut self, r0: usize, c0: usize, block: &Self) {
        for j in 0..block.cols {
            for i in 0..block.rows {
                self[(r0 + i, c0 + j)] = block[(i, j)];
            }
        }
    }

    /// Embeds `self` in the top-left corner of a zero `rows x cols` matrix.
    pub fn padded(&self, rows: usize, cols: usize) -> Self {
        let mut out = Self::zeros(rows, cols);
        out.set_block(0, 0, self);
        out
    }

    pub fn norm_fro(&self) -> f64 {
        crate::scalar::norm2(&self.data)
    }

    /// Maximum absolute column sum.
    pub fn norm_one(&self) -> f64 {
        (0..self.cols)
            .map(|j| self.col(j).iter().map(|v| v.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn norm_max(&self) -> f64 {
        self.data.iter().map(|v| v.abs()).fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    /// `true` when `max |m_ij - conj(m_ji)| <= rel_tol * max |m_ij|`.
    pub fn is_hermitian(&self, rel_tol: f64) -> bool {
        if !self.is_square() {
            return false;
        }
        let scale = self.norm_max();
        let tol = rel_tol * scale;
        for j in 0..self.cols {
            for i in 0..=j {
                if (self[(i, j)] - self[(j, i)].conj()).abs() > tol {
                    return false;
                }
            }
        }
        true
    }

    /// `(M + M^*) / 2`
    pub fn hermitian_part(&self) -> Self {
        assert!(self.is_square());
        Self::from_fn(self.rows, self.cols, |i, j| {
            (self[(i, j)] + self[(j, i)].conj()).scale(0.5)
        })
    }

    pub fn to_complex(&self) -> DenseMatrix<C64> {
        DenseMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|v| v.to_complex()).collect(),
        }
    }

    pub fn from_complex(m: &DenseMatrix<C64>) -> Self {
        DenseMatrix {
            rows: m.rows,
            cols: m.cols,
            data: m.data.iter().map(|v| T::from_complex(*v)).collect(),
        }
    }

    pub fn lu(&self) -> Result<Lu<T>> {
        Lu::factor(self)
    }

    pub fn inverse(&self) -> Result<Self> {
        self.lu()?.inverse()
    }

    /// Solves `self * X = rhs`.
    pub fn solve(&self, rhs: &Self) -> Result<Self> {
        self.lu()?.solve(rhs)
    }

    /// `M^k` by repeated squaring.
    pub fn powi(&self, mut k: u32) -> Self {
        assert!(self.is_square());
        let mut result = Self::identity(self.rows);
        let mut base = self.clone();
        while k > 0 {
            if k & 1 == 1 {
                result = result.matmul(&base);
            }
            k >>= 1;
            if k > 0 {
                base = base.matmul(&base);
            }
        }
        result
    }
}

impl<T> Index<(usize, usize)> for DenseMatrix<T> {
    type Output = T;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &T {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[j * self.rows + i]
    }
}

impl<T> IndexMut<(usize, usize)> for DenseMatrix<T> {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[j * self.rows + i]
    }
}

/// LU factorization with partial pivoting, `P A = L U`.
#[derive(Debug, Clone)]
pub struct Lu<T> {
    factors: DenseMatrix<T>,
    perm: Vec<usize>,
    sign: f64,
}

impl<T: Scalar> Lu<T> {
    pub fn factor(a: &DenseMatrix<T>) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::DimensionMismatch {
                expected: a.rows(),
                found: a.cols(),
            });
        }
        let n = a.rows();
        let mut lu = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut sign = 1.0;
        for k in 0..n {
            let mut p = k;
            let mut best = lu[(k, k)].abs();
            for i in k + 1..n {
                let v = lu[(i, k)].abs();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            if best == 0.0 || !best.is_finite() {
                return Err(Error::Singular);
            }
            if p != k {
                for j in 0..n {
                    let tmp = lu[(k, j)];
                    lu[(k, j)] = lu[(p, j)];
                    lu[(p, j)] = tmp;
                }
                perm.swap(k, p);
                sign = -sign;
            }
            let pivot = lu[(k, k)];
            for i in k + 1..n {
                lu[(i, k)] /= pivot;
            }
            for j in k + 1..n {
                let ukj = lu[(k, j)];
                if ukj == T::zero() {
                    continue;
                }
                for i in k + 1..n {
                    let lik = lu[(i, k)];
                    lu[(i, j)] -= lik * ukj;
                }
            }
        }
        Ok(Self {
            factors: lu,
            perm,
            sign,
        })
    }

    pub fn dim(&self) -> usize {
        self.factors.rows()
    }

    pub fn solve_vec(&self, b: &[T]) -> Vec<T> {
        let n = self.dim();
        assert_eq!(b.len(), n);
        let mut x: Vec<T> = self.perm.iter().map(|&p| b[p]).collect();
        for j in 0..n {
            let xj = x[j];
            if xj == T::zero() {
                continue;
            }
            for i in j + 1..n {
                x[i] -= self.factors[(i, j)] * xj;
            }
        }
        for j in (0..n).rev() {
            x[j] /= self.factors[(j, j)];
            let xj = x[j];
            for i in 0..j {
                x[i] -= self.factors[(i, j)] * xj;
            }
        }
        x
    }

    pub fn solve(&self, rhs: &DenseMatrix<T>) -> Result<DenseMatrix<T>> {
        if rhs.rows() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: rhs.rows(),
            });
        }
        let mut out = DenseMatrix::zeros(rhs.rows(), rhs.cols());
        for j in 0..rhs.cols() {
            let x = self.solve_vec(rhs.col(j));
            out.col_mut(j).copy_from_slice(&x);
        }
        Ok(out)
    }

    pub fn inverse(&self) -> Result<DenseMatrix<T>> {
        self.solve(&DenseMatrix::identity(self.dim()))
    }

    /// `log |det A|`
    pub fn log_abs_det(&self) -> f64 {
        (0..self.dim())
            .map(|i| math::ln(self.factors[(i, i)].abs()))
            .sum()
    }

    pub fn det(&self) -> T {
        let mut d = T::from_real(self.sign);
        for i in 0..self.dim() {
            d *= self.factors[(i, i)];
        }
        d
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matmul_matches_hand_product() {
        let a = DenseMatrix::from_fn(2, 3, |i, j| (i * 3 + j) as f64);
        let b = DenseMatrix::from_fn(3, 2, |i, j| (i + j) as f64);
        let c = a.matmul(&b);
        // [[0,1,2],[3,4,5]] * [[0,1],[1,2],[2,3]]
        assert_eq!(c[(0, 0)], 5.0);
        assert_eq!(c[(0, 1)], 8.0);
        assert_eq!(c[(1, 0)], 14.0);
        assert_eq!(c[(1, 1)], 26.0);
    }

    #[test]
    fn lu_inverse_roundtrip() {
        let a = DenseMatrix::from_fn(4, 4, |i, j| if i == j { 4.0 } else { 1.0 / (1 + i + j) as f64 });
        let inv = a.inverse().unwrap();
        let prod = a.matmul(&inv);
        assert!(prod.sub(&DenseMatrix::identity(4)).norm_max() < 1e-14);
        let d = a.lu().unwrap();
        assert!((d.log_abs_det() - math::ln(d.det().abs())).abs() < 1e-12);
    }

    #[test]
    fn singular_matrix_is_rejected() {
        let a = DenseMatrix::<f64>::zeros(2, 2);
        assert_eq!(a.lu().unwrap_err(), Error::Singular);
    }

    #[test]
    fn complex_adjoint() {
        let a = DenseMatrix::from_fn(2, 2, |i, j| C64::new(i as f64, j as f64));
        let ah = a.adjoint();
        assert_eq!(ah[(1, 0)], C64::new(0.0, -1.0));
        assert!(!a.is_hermitian(1e-12));
        assert!(a.hermitian_part().is_hermitian(1e-14));
    }

    #[test]
    fn powi_matches_repeated_product() {
        let a = DenseMatrix::from_fn(3, 3, |i, j| ((i + 2 * j) % 3) as f64 - 1.0);
        let p = a.powi(5);
        let mut q = DenseMatrix::identity(3);
        for _ in 0..5 {
            q = q.matmul(&a);
        }
        assert_eq!(p, q);
        assert_eq!(a.powi(0), DenseMatrix::identity(3));
    }
}
