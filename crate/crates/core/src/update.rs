//! Tensorized Krylov approximation of `f(A + D) - f(A)`.
//!
//! Rank-one Hermitian updates `±b b^*` use a single Lanczos basis; general
//! rank-one updates `b c^*` use two Arnoldi bases and the `(1,2)` block of
//! `f` applied to a `2m x 2m` block-triangular compression. Higher rank is
//! handled as a sequence of rank-one updates on corrected operators.

use alloc::vec;
use alloc::vec::Vec;

use crate::dense::DenseMatrix;
use crate::eigh::eigh;
use crate::error::{invalid, Error, Result};
use crate::funcs::{eval_matrix_function, FunctionSpec};
use crate::krylov::{ArnoldiProcess, DiagonalAccumulator, LanczosProcess, Reorth, TwoPassConsumer};
use crate::operator::LinearOperator;
use crate::scalar::{dot, math, Scalar};
use crate::svd::{spectral_norm, svd};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveOptions {
    /// Target value of the error estimate.
    pub tol: f64,
    /// Gap `d` between the two iterates compared by the estimator.
    pub lookahead: usize,
    /// Cap on Krylov steps, including the lookahead.
    pub max_m: usize,
    /// Steps between estimator evaluations.
    pub batch: usize,
    pub reorth: Reorth,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            tol: 1e-6,
            lookahead: 2,
            max_m: 200,
            batch: 5,
            reorth: Reorth::Full,
        }
    }
}

impl SolveOptions {
    pub fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0) {
            return Err(invalid("tol must be positive"));
        }
        if self.lookahead < 1 {
            return Err(invalid("lookahead must be at least 1"));
        }
        if self.max_m < self.lookahead + 1 {
            return Err(invalid("max_m must exceed the lookahead"));
        }
        if self.batch < 1 {
            return Err(invalid("batch must be at least 1"));
        }
        Ok(())
    }
}

/// Low-rank approximation `U X V^*` of `f(A + D) - f(A)`.
#[derive(Debug, Clone)]
pub struct UpdateFactor<T> {
    pub u: DenseMatrix<T>,
    pub x: DenseMatrix<T>,
    /// `None` when `V = U`.
    v: Option<DenseMatrix<T>>,
    /// Krylov steps behind the factor.
    pub m: usize,
    pub converged: bool,
    /// `(m, estimate)` at each estimator evaluation.
    pub estimate_history: Vec<(usize, f64)>,
}

impl<T: Scalar> UpdateFactor<T> {
    /// Factor with `V = U`.
    pub fn symmetric(u: DenseMatrix<T>, x: DenseMatrix<T>) -> Self {
        let m = u.cols();
        Self {
            u,
            x,
            v: None,
            m,
            converged: true,
            estimate_history: Vec::new(),
        }
    }

    pub fn general(u: DenseMatrix<T>, x: DenseMatrix<T>, v: DenseMatrix<T>) -> Self {
        let m = u.cols().max(v.cols());
        Self {
            u,
            x,
            v: Some(v),
            m,
            converged: true,
            estimate_history: Vec::new(),
        }
    }

    pub fn v(&self) -> &DenseMatrix<T> {
        self.v.as_ref().unwrap_or(&self.u)
    }

    /// `V` is the same basis as `U`.
    pub fn shares_basis(&self) -> bool {
        self.v.is_none()
    }

    pub fn n(&self) -> usize {
        self.u.rows()
    }

    /// `U X V^*` as a dense `n x n` matrix. Intended for tests and small
    /// problems only.
    pub fn to_dense(&self) -> DenseMatrix<T> {
        self.u.matmul(&self.x).matmul(&self.v().adjoint())
    }

    /// `(U X V^*) y`
    pub fn apply(&self, y: &[T]) -> Vec<T> {
        self.u.matvec(&self.x.matvec(&self.v().adjoint_matvec(y)))
    }

    /// `diag(U X V^*)` in `O(n m^2)` without forming the product.
    pub fn diagonal(&self) -> Vec<T> {
        extract_diagonal(self)
    }

    pub fn trace(&self) -> T {
        self.diagonal().into_iter().sum()
    }

    /// Entry `(i, j)` of `U X V^*`.
    pub fn entry(&self, i: usize, j: usize) -> T {
        let ui = self.u.row(i);
        let vj = self.v().row(j);
        let mut acc = T::zero();
        for q in 0..self.x.cols() {
            let mut s = T::zero();
            for p in 0..self.x.rows() {
                s += ui[p] * self.x[(p, q)];
            }
            acc += s * vj[q].conj();
        }
        acc
    }
}

/// `D = B C^*` with `B, C` of size `n x k`.
#[derive(Debug, Clone)]
pub struct LowRankModification<T> {
    pub b: DenseMatrix<T>,
    pub c: DenseMatrix<T>,
    /// Set when `B C^*` and the base matrix are both Hermitian.
    pub hermitian: bool,
}

impl<T: Scalar> LowRankModification<T> {
    pub fn new(b: DenseMatrix<T>, c: DenseMatrix<T>, hermitian: bool) -> Result<Self> {
        if b.rows() != c.rows() || b.cols() != c.cols() {
            return Err(Error::DimensionMismatch {
                expected: b.rows() * b.cols(),
                found: c.rows() * c.cols(),
            });
        }
        if b.cols() > b.rows() {
            return Err(invalid("rank k must not exceed n"));
        }
        if b.cols() == 0 {
            return Err(invalid("need at least one column"));
        }
        if !b.is_finite() || !c.is_finite() {
            return Err(invalid("modification has non-finite entries"));
        }
        Ok(Self { b, c, hermitian })
    }

    pub fn rank_one(b: Vec<T>, c: Vec<T>, hermitian: bool) -> Result<Self> {
        let n = b.len();
        if c.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: c.len(),
            });
        }
        Self::new(DenseMatrix::from_columns(n, &[b]), DenseMatrix::from_columns(n, &[c]), hermitian)
    }

    pub fn n(&self) -> usize {
        self.b.rows()
    }

    pub fn k(&self) -> usize {
        self.b.cols()
    }

    pub fn to_dense(&self) -> DenseMatrix<T> {
        self.b.matmul(&self.c.adjoint())
    }
}

/// `f(G + sign ||b||^2 e_1 e_1^*) - f(G)`
pub fn xm_hermitian<T: Scalar>(g: &DenseMatrix<T>, b_norm: f64, f: &FunctionSpec, sign: f64) -> Result<DenseMatrix<T>> {
    if !g.is_square() || g.rows() == 0 {
        return Err(invalid("compressed matrix must be square and nonempty"));
    }
    let mut gp = g.clone();
    gp[(0, 0)] += T::from_real(sign * b_norm * b_norm);
    let f1 = eval_matrix_function(&gp, f)?;
    let f0 = eval_matrix_function(g, f)?;
    Ok(f1.sub(&f0))
}

/// The block-triangular compression
/// `[[G, ||b|| ||c|| e_1 e_1^*], [0, H^* + ||c|| (V^* b) e_1^*]]`.
///
/// `G` is `p x p`, `H` is `q x q` and `vt_b` has length `q`.
pub fn build_block_compression<T: Scalar>(
    g: &DenseMatrix<T>,
    h: &DenseMatrix<T>,
    b_norm: f64,
    c_norm: f64,
    vt_b: &[T],
) -> Result<DenseMatrix<T>> {
    if !g.is_square() || !h.is_square() {
        return Err(invalid("G and H must be square"));
    }
    let (p, q) = (g.rows(), h.rows());
    if vt_b.len() != q {
        return Err(Error::DimensionMismatch {
            expected: q,
            found: vt_b.len(),
        });
    }
    if p == 0 || q == 0 {
        return Err(invalid("empty compression"));
    }
    let mut m = DenseMatrix::zeros(p + q, p + q);
    m.set_block(0, 0, g);
    m[(0, p)] = T::from_real(b_norm * c_norm);
    let mut lower = h.adjoint();
    for (i, w) in vt_b.iter().enumerate() {
        lower[(i, 0)] += w.scale(c_norm);
    }
    m.set_block(p, p, &lower);
    Ok(m)
}

/// `(1,2)` block of `f` applied to the block compression.
pub fn xm_general<T: Scalar>(
    g: &DenseMatrix<T>,
    h: &DenseMatrix<T>,
    b_norm: f64,
    c_norm: f64,
    vt_b: &[T],
    f: &FunctionSpec,
) -> Result<DenseMatrix<T>> {
    let block = build_block_compression(g, h, b_norm, c_norm, vt_b)?;
    let fb = eval_matrix_function(&block, f)?;
    let p = g.rows();
    Ok(fb.submatrix(0, p, p, block.cols()))
}

/// `|| X_{m+d} - [X_m 0; 0 0] ||_2`
pub fn error_estimate<T: Scalar>(x_m: &DenseMatrix<T>, x_md: &DenseMatrix<T>) -> Result<f64> {
    if x_m.rows() > x_md.rows() || x_m.cols() > x_md.cols() {
        return Err(invalid("the later iterate must be at least as large as the earlier one"));
    }
    let padded = x_m.padded(x_md.rows(), x_md.cols());
    Ok(spectral_norm(&x_md.sub(&padded)))
}

/// Stopping test. Besides `est <= tol`, the estimate must be small next to
/// `X_{m+d}` itself: before the iteration resolves the update, `X_m` is
/// negligible next to `X_{m+d}` and both can be far below `tol` while the
/// true error is not.
fn accepts<T: Scalar>(est: f64, x_md: &DenseMatrix<T>, tol: f64) -> bool {
    est <= tol && est <= PREASYMPTOTIC_RATIO * spectral_norm(x_md)
}

const PREASYMPTOTIC_RATIO: f64 = 0.5;

/// Algorithm for `f(A + sign b b^*) - f(A)` with Hermitian `A`.
pub fn hermitian_update<T: Scalar, O: LinearOperator<T>>(
    a: O,
    b: &[T],
    sign: f64,
    f: &FunctionSpec,
    opts: &SolveOptions,
) -> Result<UpdateFactor<T>> {
    opts.validate()?;
    check_sign(sign)?;
    let mut proc = LanczosProcess::new(a, b, opts.reorth)?;
    let (m, x, converged, history) = hermitian_loop(&mut proc, sign, f, opts)?;
    let n = proc.operator().dim();
    let u = DenseMatrix::from_columns(n, &proc.basis()[..m]);
    Ok(UpdateFactor {
        u,
        x,
        v: None,
        m,
        converged,
        estimate_history: history,
    })
}

fn check_sign(sign: f64) -> Result<()> {
    if sign == 1.0 || sign == -1.0 {
        Ok(())
    } else {
        Err(invalid("sign must be +1 or -1"))
    }
}

type LoopResult<T> = (usize, DenseMatrix<T>, bool, Vec<(usize, f64)>);

/// Batched Lanczos with the lookahead estimator. Returns the step count of the
/// reported iterate, `X` at that step, the convergence flag and the history.
fn hermitian_loop<T: Scalar, O: LinearOperator<T>>(
    proc: &mut LanczosProcess<O, T>,
    sign: f64,
    f: &FunctionSpec,
    opts: &SolveOptions,
) -> Result<LoopResult<T>> {
    let d = opts.lookahead;
    let nb = proc.start_norm();
    let mut history = Vec::new();
    let mut m = opts.batch.min(opts.max_m - d);
    loop {
        proc.extend_to(m + d);
        let k = proc.steps();
        if proc.breakdown() {
            let xk = xm_hermitian(&proc.tridiagonal(k), nb, f, sign)?;
            let est = if k > m {
                error_estimate(&xm_hermitian(&proc.tridiagonal(m), nb, f, sign)?, &xk)?
            } else {
                0.0
            };
            history.push((m.min(k), est));
            return Ok((k, xk, true, history));
        }
        let x_m = xm_hermitian(&proc.tridiagonal(m), nb, f, sign)?;
        let x_md = xm_hermitian(&proc.tridiagonal(m + d), nb, f, sign)?;
        let est = error_estimate(&x_m, &x_md)?;
        history.push((m, est));
        if accepts(est, &x_md, opts.tol) {
            return Ok((m + d, x_md, true, history));
        }
        if m + d >= opts.max_m {
            return Ok((m + d, x_md, false, history));
        }
        m = (m + opts.batch).min(opts.max_m - d);
    }
}

/// Result of a two-pass Hermitian update that only keeps `diag(U X U^*)`.
#[derive(Debug, Clone)]
pub struct DiagonalUpdate {
    pub diagonal: Vec<f64>,
    pub m: usize,
    pub converged: bool,
    pub estimate_history: Vec<(usize, f64)>,
}

/// Two-pass variant of [`hermitian_update`] returning only the diagonal of
/// the update. The first sweep keeps three vectors and drives the stopping
/// rule; the second regenerates the basis to accumulate the diagonal.
/// No reorthogonalization is performed.
pub fn hermitian_update_diagonal_twopass<T: Scalar, O: LinearOperator<T>>(
    a: O,
    b: &[T],
    sign: f64,
    f: &FunctionSpec,
    opts: &SolveOptions,
) -> Result<DiagonalUpdate> {
    opts.validate()?;
    check_sign(sign)?;
    let n = a.dim();
    let mut first = LanczosProcess::streaming(&a, b)?;
    let (m, x, converged, history) = hermitian_loop(&mut first, sign, f, opts)?;
    let decomposition = first.decomposition();
    drop(first);

    let mut acc = DiagonalAccumulator::new(n, |_: &_| Ok(x.clone()));
    acc.after_first_sweep(&decomposition)?;
    let mut second = LanczosProcess::streaming(&a, b)?;
    for j in 0..m {
        let u = second.step().ok_or(Error::NoConvergence("two-pass Lanczos replay"))?;
        acc.consume(j, u);
    }
    Ok(DiagonalUpdate {
        diagonal: acc.diagonal,
        m,
        converged,
        estimate_history: history,
    })
}

/// Algorithm for `f(A + b c^*) - f(A)` with general `A`; `a_adj` applies `A^*`.
pub fn general_update<T: Scalar, O: LinearOperator<T>, P: LinearOperator<T>>(
    a: O,
    a_adj: P,
    b: &[T],
    c: &[T],
    f: &FunctionSpec,
    opts: &SolveOptions,
) -> Result<UpdateFactor<T>> {
    opts.validate()?;
    if a.dim() != a_adj.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            found: a_adj.dim(),
        });
    }
    let n = a.dim();
    let mut pa = ArnoldiProcess::new(a, b)?;
    let mut pc = ArnoldiProcess::new(a_adj, c)?;
    let (nb, nc) = (pa.start_norm(), pc.start_norm());
    let d = opts.lookahead;

    let x_at = |pa: &ArnoldiProcess<O, T>, pc: &ArnoldiProcess<P, T>, p: usize, q: usize| -> Result<DenseMatrix<T>> {
        let vt_b: Vec<T> = pc.basis()[..q].iter().map(|v| dot(v, b)).collect();
        xm_general(&pa.hessenberg(p), &pc.hessenberg(q), nb, nc, &vt_b, f)
    };

    let mut history = Vec::new();
    let mut m = opts.batch.min(opts.max_m - d);
    let (p, q, x, converged) = loop {
        pa.extend_to(m + d);
        pc.extend_to(m + d);
        let (kp, kq) = (pa.steps(), pc.steps());
        let x_md = x_at(&pa, &pc, kp, kq)?;
        let x_m = x_at(&pa, &pc, kp.min(m), kq.min(m))?;
        let est = error_estimate(&x_m, &x_md)?;
        history.push((m, est));
        if (pa.breakdown() && pc.breakdown()) || accepts(est, &x_md, opts.tol) {
            break (kp, kq, x_md, true);
        }
        if m + d >= opts.max_m {
            break (kp, kq, x_md, false);
        }
        m = (m + opts.batch).min(opts.max_m - d);
    };
    let u = DenseMatrix::from_columns(n, &pa.basis()[..p]);
    let v = DenseMatrix::from_columns(n, &pc.basis()[..q]);
    Ok(UpdateFactor {
        u,
        x,
        v: Some(v),
        m: p.max(q),
        converged,
        estimate_history: history,
    })
}

/// Writes a Hermitian `D = B C^*` as `sum_i sign_i b_i b_i^*`, positive
/// signs first.
pub fn split_hermitian<T: Scalar>(modification: &LowRankModification<T>) -> Result<Vec<(Vec<T>, f64)>> {
    let n = modification.n();
    let k = modification.k();
    let mut bc = DenseMatrix::zeros(n, 2 * k);
    bc.set_block(0, 0, &modification.b);
    bc.set_block(0, k, &modification.c);
    let s = svd(&bc);
    let r = s.rank(1e-13);
    if r == 0 {
        return Ok(Vec::new());
    }
    let q = s.u.submatrix(0, n, 0, r);
    let qb = q.adjoint_matmul(&modification.b);
    let qc = q.adjoint_matmul(&modification.c);
    let core = qb.matmul(&qc.adjoint());
    let scale = core.norm_max();
    if scale == 0.0 {
        return Ok(Vec::new());
    }
    if core.sub(&core.adjoint()).norm_max() > 1e-10 * scale {
        return Err(Error::NotHermitian);
    }
    let e = eigh(&core.hermitian_part())?;
    let lmax = e.values.iter().fold(0.0_f64, |m, l| m.max(l.abs()));
    let term = |i: usize| -> Vec<T> {
        let s = math::sqrt(e.values[i].abs());
        q.matvec(e.vectors.col(i)).into_iter().map(|x| x.scale(s)).collect()
    };
    let keep = |l: f64| l.abs() > 1e-13 * lmax;
    // largest positive first, then most negative first
    let mut pos: Vec<_> = (0..r)
        .rev()
        .filter(|&i| e.values[i] > 0.0 && keep(e.values[i]))
        .map(|i| (term(i), 1.0))
        .collect();
    let neg: Vec<_> = (0..r)
        .filter(|&i| e.values[i] < 0.0 && keep(e.values[i]))
        .map(|i| (term(i), -1.0))
        .collect();
    pos.extend(neg);
    Ok(pos)
}

/// Exact-rank factorization `B C^* = sum_i b_i c_i^*` via SVDs.
pub fn compress_rank<T: Scalar>(modification: &LowRankModification<T>) -> Vec<(Vec<T>, Vec<T>)> {
    let k = modification.k();
    if k == 1 {
        let b = modification.b.col(0).to_vec();
        let c = modification.c.col(0).to_vec();
        if b.iter().all(|v| *v == T::zero()) || c.iter().all(|v| *v == T::zero()) {
            return Vec::new();
        }
        return vec![(b, c)];
    }
    // B = U_B S_B W_B^*, C = U_C S_C W_C^*
    let sb = svd(&modification.b);
    let sc = svd(&modification.c);
    let rb = scaled_adjoint(&sb.sigma, &sb.v);
    let rc = scaled_adjoint(&sc.sigma, &sc.v);
    let core = rb.matmul(&rc.adjoint());
    let s = svd(&core);
    let r = s.rank(1e-13);
    (0..r)
        .map(|i| {
            let b = sb.u.matvec(s.u.col(i)).into_iter().map(|x| x.scale(s.sigma[i])).collect();
            let c = sc.u.matvec(s.v.col(i));
            (b, c)
        })
        .collect()
}

/// `diag(sigma) W^*`
fn scaled_adjoint<T: Scalar>(sigma: &[f64], w: &DenseMatrix<T>) -> DenseMatrix<T> {
    let mut r = w.adjoint();
    for i in 0..r.rows() {
        for j in 0..r.cols() {
            r[(i, j)] = r[(i, j)].scale(sigma[i]);
        }
    }
    r
}

/// Sequential rank-one updates for `D = B C^*`. Step `i` works with the
/// operator `A + sum_{j<i} b_j c_j^*`; the sum of the returned factors
/// approximates `f(A + D) - f(A)`.
pub fn rank_k_update<T: Scalar, O: LinearOperator<T>, P: LinearOperator<T>>(
    a: O,
    a_adj: P,
    modification: &LowRankModification<T>,
    f: &FunctionSpec,
    opts: &SolveOptions,
) -> Result<Vec<UpdateFactor<T>>> {
    if a.dim() != modification.n() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            found: modification.n(),
        });
    }
    let mut out = Vec::new();
    if modification.hermitian {
        let pairs = split_hermitian(modification)?;
        let mut op = crate::operator::LowRankCorrected::new(&a);
        for (bi, sign) in pairs {
            let fac = hermitian_update(&op, &bi, sign, f, opts)?;
            let ci: Vec<T> = bi.iter().map(|x| x.scale(sign)).collect();
            op.push(bi, ci);
            out.push(fac);
        }
        return Ok(out);
    }
    let pairs = compress_rank(modification);
    let mut op = crate::operator::LowRankCorrected::new(&a);
    let mut op_adj = crate::operator::LowRankCorrected::new(&a_adj);
    for (bi, ci) in pairs {
        let fac = general_update(&op, &op_adj, &bi, &ci, f, opts)?;
        op.push(bi.clone(), ci.clone());
        op_adj.push(ci, bi);
        out.push(fac);
    }
    Ok(out)
}

/// Row-wise bilinear forms `u_i^* X v_i`, i.e. `diag(U X V^*)`.
pub fn extract_diagonal<T: Scalar>(fac: &UpdateFactor<T>) -> Vec<T> {
    let w = fac.u.matmul(&fac.x);
    let v = fac.v();
    let n = fac.n();
    let mut d = vec![T::zero(); n];
    for q in 0..w.cols() {
        let (wc, vc) = (w.col(q), v.col(q));
        for i in 0..n {
            d[i] += wc[i] * vc[i].conj();
        }
    }
    d
}

/// Sum of the dense forms of several factors (tests and small problems).
pub fn sum_dense<T: Scalar>(n: usize, factors: &[UpdateFactor<T>]) -> DenseMatrix<T> {
    let mut acc = DenseMatrix::zeros(n, n);
    for f in factors {
        acc.add_scaled(T::one(), &f.to_dense());
    }
    acc
}
