//! Error histories of the Krylov iterates against a dense reference.

use lrup_core::eigh::eigvalsh;
use lrup_core::krylov::{lanczos, ArnoldiProcess, LanczosProcess, Reorth};
use lrup_core::operator::{FnOperator, LinearOperator};
use lrup_core::scalar::dot;
use lrup_core::svd::spectral_norm;
use lrup_core::update::{error_estimate, xm_general, xm_hermitian};
use lrup_core::{DenseMatrix, FunctionSpec, Scalar};

use crate::error::Result;
use crate::vecspec::random_normal;

/// Error of the `m`-step iterate and, when `m + d` steps exist, the
/// difference-based estimate for each requested lookahead `d`.
#[derive(Debug, Clone, PartialEq)]
pub struct HistoryRow {
    pub m: usize,
    /// Skipped (`None`) between strides on large problems.
    pub true_error: Option<f64>,
    pub estimates: Vec<Option<f64>>,
}

/// Above this size norms switch from a full SVD to Lanczos on `E^* E`.
const SVD_LIMIT: usize = 200;

/// Lanczos steps used for large norms.
const NORM_STEPS: usize = 60;

/// Largest singular value of the operator `x -> E x` with adjoint
/// `y -> E^* y`, from fully reorthogonalized Lanczos on `E^* E`.
fn norm2_implicit<T: Scalar>(n: usize, apply: impl Fn(&[T]) -> Vec<T>, apply_adj: impl Fn(&[T]) -> Vec<T>) -> f64 {
    let op = FnOperator::new(n, |x: &[T], y: &mut [T]| y.copy_from_slice(&apply_adj(&apply(x))));
    let start: Vec<T> = random_normal(n, 0x5eed).into_iter().map(T::from_real).collect();
    let Ok(d) = lanczos(&op, &start, n.min(NORM_STEPS), Reorth::Full) else {
        return 0.0;
    };
    let top = eigvalsh(&d.compressed).ok().and_then(|v| v.last().copied()).unwrap_or(0.0);
    top.max(0.0).sqrt()
}

/// Spectral norm of a dense matrix.
pub fn norm2<T: Scalar>(e: &DenseMatrix<T>) -> f64 {
    if e.rows().max(e.cols()) <= SVD_LIMIT {
        return spectral_norm(e);
    }
    norm2_implicit(e.cols(), |x| e.matvec(x), |y| e.adjoint_matvec(y))
}

/// `U X V^* - exact` in the spectral norm, without forming `U X V^*` for
/// large `n`.
pub fn factor_error<T: Scalar>(u: &DenseMatrix<T>, x: &DenseMatrix<T>, v: &DenseMatrix<T>, exact: &DenseMatrix<T>) -> f64 {
    let n = exact.rows();
    if n <= SVD_LIMIT {
        return spectral_norm(&u.matmul(x).matmul(&v.adjoint()).sub(exact));
    }
    let apply = |z: &[T]| -> Vec<T> {
        let mut y = u.matvec(&x.matvec(&v.adjoint_matvec(z)));
        for (yi, ei) in y.iter_mut().zip(exact.matvec(z)) {
            *yi -= ei;
        }
        y
    };
    let apply_adj = |z: &[T]| -> Vec<T> {
        let mut y = v.matvec(&x.adjoint_matvec(&u.adjoint_matvec(z)));
        for (yi, ei) in y.iter_mut().zip(exact.adjoint_matvec(z)) {
            *yi -= ei;
        }
        y
    };
    norm2_implicit(n, apply, apply_adj)
}

fn rows_from<T: Scalar>(
    xs: &[DenseMatrix<T>],
    errors: Vec<Option<f64>>,
    lookaheads: &[usize],
) -> Result<Vec<HistoryRow>> {
    let k = xs.len();
    let mut rows = Vec::with_capacity(k);
    for (i, true_error) in errors.into_iter().enumerate() {
        let estimates = lookaheads
            .iter()
            .map(|&d| if i + d < k { error_estimate(&xs[i], &xs[i + d]).ok() } else { None })
            .collect();
        rows.push(HistoryRow {
            m: i + 1,
            true_error,
            estimates,
        });
    }
    Ok(rows)
}

/// Which steps get a true error: every `stride`-th step plus the first and
/// last.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HistoryOptions {
    pub max_m: usize,
    pub stride: usize,
}

impl HistoryOptions {
    pub fn every_step(max_m: usize) -> Self {
        Self { max_m, stride: 1 }
    }

    fn wants(&self, m: usize, last: usize) -> bool {
        m == 1 || m == last || m.is_multiple_of(self.stride.max(1))
    }
}

#[allow(clippy::too_many_arguments)]
/// History of the Lanczos algorithm for `f(A + sign b b^*) - f(A)`.
pub fn hermitian_history<T: Scalar, O: LinearOperator<T>>(
    op: O,
    b: &[T],
    sign: f64,
    f: &FunctionSpec,
    exact: &DenseMatrix<T>,
    opts: HistoryOptions,
    lookaheads: &[usize],
    reorth: Reorth,
) -> Result<Vec<HistoryRow>> {
    let n = op.dim();
    let mut p = LanczosProcess::new(op, b, reorth)?;
    p.extend_to(opts.max_m);
    let nb = p.start_norm();
    let k = p.steps();
    let mut xs = Vec::with_capacity(k);
    let mut errors = Vec::with_capacity(k);
    for m in 1..=k {
        let x = xm_hermitian(&p.tridiagonal(m), nb, f, sign)?;
        let u = DenseMatrix::from_columns(n, &p.basis()[..m]);
        errors.push(opts.wants(m, k).then(|| factor_error(&u, &x, &u, exact)));
        xs.push(x);
    }
    rows_from(&xs, errors, lookaheads)
}

#[allow(clippy::too_many_arguments)]
/// History of the two-sided Arnoldi algorithm for `f(A + b c^*) - f(A)`.
pub fn general_history<T: Scalar, O: LinearOperator<T>, P: LinearOperator<T>>(
    op: O,
    op_adj: P,
    b: &[T],
    c: &[T],
    f: &FunctionSpec,
    exact: &DenseMatrix<T>,
    opts: HistoryOptions,
    lookaheads: &[usize],
) -> Result<Vec<HistoryRow>> {
    let n = op.dim();
    let mut pa = ArnoldiProcess::new(op, b)?;
    let mut pc = ArnoldiProcess::new(op_adj, c)?;
    pa.extend_to(opts.max_m);
    pc.extend_to(opts.max_m);
    let (nb, nc) = (pa.start_norm(), pc.start_norm());
    let k = pa.steps().max(pc.steps());
    let mut xs = Vec::with_capacity(k);
    let mut errors = Vec::with_capacity(k);
    for m in 1..=k {
        let (p, q) = (m.min(pa.steps()), m.min(pc.steps()));
        let vt_b: Vec<T> = pc.basis()[..q].iter().map(|v| dot(v, b)).collect();
        let x = xm_general(&pa.hessenberg(p), &pc.hessenberg(q), nb, nc, &vt_b, f)?;
        let u = DenseMatrix::from_columns(n, &pa.basis()[..p]);
        let v = DenseMatrix::from_columns(n, &pc.basis()[..q]);
        errors.push(opts.wants(m, k).then(|| factor_error(&u, &x, &v, exact)));
        xs.push(x);
    }
    rows_from(&xs, errors, lookaheads)
}

/// First `m` whose estimate (for lookahead index `which`) is at most `tol`.
pub fn steps_to_tolerance(rows: &[HistoryRow], which: usize, tol: f64) -> Option<usize> {
    rows.iter().find(|r| r.estimates[which].is_some_and(|e| e <= tol)).map(|r| r.m)
}
