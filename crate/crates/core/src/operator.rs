//! Matrix-free operator abstraction used by the Krylov processes.

use alloc::vec::Vec;

use crate::dense::DenseMatrix;
use crate::scalar::{axpy, dot, Scalar};
use crate::sparse::SparseMatrix;

/// A square linear map `x -> A x`.
pub trait LinearOperator<T: Scalar> {
    fn dim(&self) -> usize;

    /// Overwrites `y` with `A x`.
    fn apply(&self, x: &[T], y: &mut [T]);
}

/// Operators that can also apply their adjoint.
pub trait AdjointApply<T: Scalar>: LinearOperator<T> {
    /// Overwrites `y` with `A^* x`.
    fn apply_adjoint(&self, x: &[T], y: &mut [T]);
}

impl<T: Scalar, O: LinearOperator<T> + ?Sized> LinearOperator<T> for &O {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn apply(&self, x: &[T], y: &mut [T]) {
        (**self).apply(x, y)
    }
}

impl<T: Scalar, O: AdjointApply<T> + ?Sized> AdjointApply<T> for &O {
    fn apply_adjoint(&self, x: &[T], y: &mut [T]) {
        (**self).apply_adjoint(x, y)
    }
}

impl<T: Scalar> LinearOperator<T> for SparseMatrix<T> {
    fn dim(&self) -> usize {
        self.n()
    }
    fn apply(&self, x: &[T], y: &mut [T]) {
        self.spmv_into(x, y)
    }
}

impl<T: Scalar> AdjointApply<T> for SparseMatrix<T> {
    fn apply_adjoint(&self, x: &[T], y: &mut [T]) {
        self.adjoint_spmv_into(x, y)
    }
}

impl<T: Scalar> LinearOperator<T> for DenseMatrix<T> {
    fn dim(&self) -> usize {
        assert!(self.is_square());
        self.rows()
    }
    fn apply(&self, x: &[T], y: &mut [T]) {
        y.copy_from_slice(&self.matvec(x));
    }
}

impl<T: Scalar> AdjointApply<T> for DenseMatrix<T> {
    fn apply_adjoint(&self, x: &[T], y: &mut [T]) {
        y.copy_from_slice(&self.adjoint_matvec(x));
    }
}

/// The adjoint of a wrapped operator, as an operator in its own right.
#[derive(Debug, Clone, Copy)]
pub struct Adjoint<O>(pub O);

impl<T: Scalar, O: AdjointApply<T>> LinearOperator<T> for Adjoint<O> {
    fn dim(&self) -> usize {
        self.0.dim()
    }
    fn apply(&self, x: &[T], y: &mut [T]) {
        self.0.apply_adjoint(x, y)
    }
}

impl<T: Scalar, O: AdjointApply<T>> AdjointApply<T> for Adjoint<O> {
    fn apply_adjoint(&self, x: &[T], y: &mut [T]) {
        self.0.apply(x, y)
    }
}

/// Wraps a closure `(x, y) -> { y = A x }`.
pub struct FnOperator<F> {
    n: usize,
    f: F,
}

impl<F> FnOperator<F> {
    pub fn new(n: usize, f: F) -> Self {
        Self { n, f }
    }
}

impl<T: Scalar, F: Fn(&[T], &mut [T])> LinearOperator<T> for FnOperator<F> {
    fn dim(&self) -> usize {
        self.n
    }
    fn apply(&self, x: &[T], y: &mut [T]) {
        (self.f)(x, y)
    }
}

/// `A + sum_j b_j c_j^*`, applied as the base product plus one axpy per term.
#[derive(Debug, Clone)]
pub struct LowRankCorrected<O, T> {
    base: O,
    terms: Vec<(Vec<T>, Vec<T>)>,
}

impl<T: Scalar, O: LinearOperator<T>> LowRankCorrected<O, T> {
    pub fn new(base: O) -> Self {
        Self {
            base,
            terms: Vec::new(),
        }
    }

    /// Appends the term `b c^*`.
    pub fn push(&mut self, b: Vec<T>, c: Vec<T>) {
        assert_eq!(b.len(), self.base.dim());
        assert_eq!(c.len(), self.base.dim());
        self.terms.push((b, c));
    }

    pub fn terms(&self) -> &[(Vec<T>, Vec<T>)] {
        &self.terms
    }

    pub fn base(&self) -> &O {
        &self.base
    }
}

impl<T: Scalar, O: LinearOperator<T>> LinearOperator<T> for LowRankCorrected<O, T> {
    fn dim(&self) -> usize {
        self.base.dim()
    }
    fn apply(&self, x: &[T], y: &mut [T]) {
        self.base.apply(x, y);
        for (b, c) in &self.terms {
            axpy(dot(c, x), b, y);
        }
    }
}

impl<T: Scalar, O: AdjointApply<T>> AdjointApply<T> for LowRankCorrected<O, T> {
    fn apply_adjoint(&self, x: &[T], y: &mut [T]) {
        self.base.apply_adjoint(x, y);
        for (b, c) in &self.terms {
            axpy(dot(b, x), c, y);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::C64;
    use alloc::vec;

    #[test]
    fn low_rank_corrected_matches_dense_sum() {
        let a = SparseMatrix::tridiag(4, C64::new(0.0, 1.0), C64::new(2.0, 0.0), C64::new(-1.0, 0.0));
        let b = vec![C64::new(1.0, 0.0), C64::new(0.0, 1.0), C64::new(0.0, 0.0), C64::new(2.0, 0.0)];
        let c = vec![C64::new(0.5, -1.0), C64::new(0.0, 0.0), C64::new(1.0, 0.0), C64::new(0.0, 0.0)];
        let mut op = LowRankCorrected::new(&a);
        op.push(b.clone(), c.clone());
        let dense = a.to_dense().add(&DenseMatrix::outer(&b, &c));
        let x = vec![C64::new(1.0, 2.0), C64::new(-1.0, 0.0), C64::new(0.0, 3.0), C64::new(1.0, 1.0)];
        let mut y = vec![C64::new(0.0, 0.0); 4];
        op.apply(&x, &mut y);
        let expect = dense.matvec(&x);
        for (u, v) in y.iter().zip(&expect) {
            assert!((u - v).norm() < 1e-14);
        }
        Adjoint(&op).apply(&x, &mut y);
        let expect = dense.adjoint_matvec(&x);
        for (u, v) in y.iter().zip(&expect) {
            assert!((u - v).norm() < 1e-14);
        }
    }
}
