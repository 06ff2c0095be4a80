//! Lanczos and Arnoldi processes.
//!
//! Both are exposed as stateful builders that can be extended step by step,
//! so the update drivers can grow a basis without recomputation.

use alloc::vec;
use alloc::vec::Vec;

use crate::dense::DenseMatrix;
use crate::error::{invalid, Error, Result};
use crate::operator::LinearOperator;
use crate::scalar::{axpy, dot, norm2, Scalar};

/// Reorthogonalization policy for Lanczos.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Reorth {
    /// Plain three-term recurrence.
    None,
    /// Two classical Gram–Schmidt passes against the whole basis.
    #[default]
    Full,
}

/// Snapshot of a Krylov process after `m` steps.
#[derive(Debug, Clone)]
pub struct KrylovDecomposition<T> {
    /// Columns of `U_m`; empty when the basis was not stored.
    pub basis: Vec<Vec<T>>,
    /// `G_m`: tridiagonal (Lanczos) or upper Hessenberg (Arnoldi).
    pub compressed: DenseMatrix<T>,
    /// `beta_{m+1}` (resp. `h_{m+1,m}`).
    pub next_norm: f64,
    /// `u_{m+1}`; `None` after breakdown or when the basis was not stored.
    pub next_vector: Option<Vec<T>>,
    /// `||b||`
    pub start_norm: f64,
    /// The Krylov space became invariant at step `m`.
    pub breakdown: bool,
}

impl<T: Scalar> KrylovDecomposition<T> {
    pub fn steps(&self) -> usize {
        self.compressed.rows()
    }

    /// `U_m` as an `n x m` matrix.
    pub fn basis_matrix(&self) -> DenseMatrix<T> {
        let n = self.basis.first().map_or(0, |v| v.len());
        DenseMatrix::from_columns(n, &self.basis)
    }
}

fn breakdown_tol(n: usize, scale: f64) -> f64 {
    n as f64 * f64::EPSILON * scale
}

fn start<T: Scalar>(n: usize, b: &[T]) -> Result<(Vec<T>, f64)> {
    if b.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: b.len(),
        });
    }
    let nb = norm2(b);
    if nb == 0.0 {
        return Err(Error::ZeroStartVector);
    }
    if !nb.is_finite() {
        return Err(invalid("starting vector has non-finite entries"));
    }
    let inv = 1.0 / nb;
    Ok((b.iter().map(|v| v.scale(inv)).collect(), nb))
}

/// Hermitian Lanczos process `A U_m = U_m G_m + beta_{m+1} u_{m+1} e_m^*`.
pub struct LanczosProcess<O, T> {
    op: O,
    reorth: Reorth,
    store: bool,
    /// All basis vectors, or only the last two when streaming.
    basis: Vec<Vec<T>>,
    current: Option<Vec<T>>,
    alpha: Vec<f64>,
    beta: Vec<f64>,
    start_norm: f64,
    scale: f64,
    breakdown: bool,
    work: Vec<T>,
}

impl<T: Scalar, O: LinearOperator<T>> LanczosProcess<O, T> {
    pub fn new(op: O, b: &[T], reorth: Reorth) -> Result<Self> {
        Self::build(op, b, reorth, true)
    }

    /// Keeps only three live vectors; implies [`Reorth::None`].
    pub fn streaming(op: O, b: &[T]) -> Result<Self> {
        Self::build(op, b, Reorth::None, false)
    }

    fn build(op: O, b: &[T], reorth: Reorth, store: bool) -> Result<Self> {
        let n = op.dim();
        let (u1, nb) = start(n, b)?;
        Ok(Self {
            op,
            reorth,
            store,
            basis: Vec::new(),
            current: Some(u1),
            alpha: Vec::new(),
            beta: Vec::new(),
            start_norm: nb,
            scale: 0.0,
            breakdown: false,
            work: vec![T::zero(); n],
        })
    }

    pub fn steps(&self) -> usize {
        self.alpha.len()
    }

    pub fn breakdown(&self) -> bool {
        self.breakdown
    }

    pub fn start_norm(&self) -> f64 {
        self.start_norm
    }

    /// Diagonal `alpha_1..alpha_m`.
    pub fn alphas(&self) -> &[f64] {
        &self.alpha
    }

    /// `beta_2..beta_{m+1}`; `betas()[j]` couples steps `j` and `j + 1`.
    pub fn betas(&self) -> &[f64] {
        &self.beta
    }

    /// Stored basis vectors (only the last two when streaming).
    pub fn basis(&self) -> &[Vec<T>] {
        &self.basis
    }

    pub fn operator(&self) -> &O {
        &self.op
    }

    /// Performs one step and returns the vector `u_j` it consumed, or `None`
    /// once the space is invariant.
    pub fn step(&mut self) -> Option<&[T]> {
        let u = self.current.take()?;
        let j = self.alpha.len();
        self.op.apply(&u, &mut self.work);
        let mut w = core::mem::take(&mut self.work);
        if j > 0 {
            let prev = self.basis.last().expect("previous vector");
            axpy(T::from_real(-self.beta[j - 1]), prev, &mut w);
        }
        let alpha = dot(&u, &w).re();
        axpy(T::from_real(-alpha), &u, &mut w);

        if self.reorth == Reorth::Full {
            for _ in 0..2 {
                for v in self.basis.iter().chain(core::iter::once(&u)) {
                    let h = dot(v, &w);
                    axpy(-h, v, &mut w);
                }
            }
        }
        let mut beta = norm2(&w);
        self.scale = self.scale.max(alpha.abs()).max(beta);
        let invariant = beta <= breakdown_tol(self.op.dim(), self.scale);
        if invariant {
            beta = 0.0;
        }
        self.alpha.push(alpha);
        self.beta.push(beta);

        if !self.store && self.basis.len() == 2 {
            self.basis.remove(0);
        }
        self.basis.push(u);
        if invariant {
            self.breakdown = true;
            self.work = w;
        } else {
            let inv = 1.0 / beta;
            w.iter_mut().for_each(|x| *x = x.scale(inv));
            self.work = vec![T::zero(); w.len()];
            self.current = Some(w);
        }
        self.basis.last().map(|v| v.as_slice())
    }

    /// Runs until `m` steps have been taken or the space is invariant.
    pub fn extend_to(&mut self, m: usize) {
        while self.steps() < m && !self.breakdown {
            self.step();
        }
    }

    /// Leading `k x k` block of the tridiagonal matrix.
    pub fn tridiagonal(&self, k: usize) -> DenseMatrix<T> {
        assert!(k <= self.steps());
        let mut g = DenseMatrix::zeros(k, k);
        for i in 0..k {
            g[(i, i)] = T::from_real(self.alpha[i]);
            if i + 1 < k {
                g[(i + 1, i)] = T::from_real(self.beta[i]);
                g[(i, i + 1)] = T::from_real(self.beta[i]);
            }
        }
        g
    }

    pub fn decomposition(&self) -> KrylovDecomposition<T> {
        let m = self.steps();
        let basis = if self.store {
            self.basis.clone()
        } else {
            Vec::new()
        };
        KrylovDecomposition {
            basis,
            compressed: self.tridiagonal(m),
            next_norm: self.beta.last().copied().unwrap_or(0.0),
            next_vector: if self.breakdown || !self.store {
                None
            } else {
                self.current.clone()
            },
            start_norm: self.start_norm,
            breakdown: self.breakdown,
        }
    }
}

/// Arnoldi process with modified Gram–Schmidt and one reorthogonalization pass.
pub struct ArnoldiProcess<O, T> {
    op: O,
    basis: Vec<Vec<T>>,
    current: Option<Vec<T>>,
    /// Column `j` holds `h_{0..=j+1, j}`.
    h: Vec<Vec<T>>,
    start_norm: f64,
    scale: f64,
    breakdown: bool,
}

impl<T: Scalar, O: LinearOperator<T>> ArnoldiProcess<O, T> {
    pub fn new(op: O, b: &[T]) -> Result<Self> {
        let (u1, nb) = start(op.dim(), b)?;
        Ok(Self {
            op,
            basis: Vec::new(),
            current: Some(u1),
            h: Vec::new(),
            start_norm: nb,
            scale: 0.0,
            breakdown: false,
        })
    }

    pub fn steps(&self) -> usize {
        self.h.len()
    }

    pub fn breakdown(&self) -> bool {
        self.breakdown
    }

    pub fn start_norm(&self) -> f64 {
        self.start_norm
    }

    pub fn basis(&self) -> &[Vec<T>] {
        &self.basis
    }

    pub fn step(&mut self) -> bool {
        let Some(u) = self.current.take() else {
            return false;
        };
        let n = self.op.dim();
        let mut w = vec![T::zero(); n];
        self.op.apply(&u, &mut w);
        self.basis.push(u);
        let j = self.basis.len() - 1;
        let mut col = vec![T::zero(); j + 2];
        for _pass in 0..2 {
            for (i, v) in self.basis.iter().enumerate() {
                let c = dot(v, &w);
                axpy(-c, v, &mut w);
                col[i] += c;
            }
        }
        let beta = norm2(&w);
        self.scale = col.iter().fold(self.scale.max(beta), |s, v| s.max(v.abs()));
        if beta <= breakdown_tol(n, self.scale) {
            self.breakdown = true;
            self.h.push(col);
        } else {
            col[j + 1] = T::from_real(beta);
            self.h.push(col);
            let inv = 1.0 / beta;
            w.iter_mut().for_each(|x| *x = x.scale(inv));
            self.current = Some(w);
        }
        true
    }

    pub fn extend_to(&mut self, m: usize) {
        while self.steps() < m && !self.breakdown {
            self.step();
        }
    }

    /// Leading `k x k` block of the Hessenberg matrix.
    pub fn hessenberg(&self, k: usize) -> DenseMatrix<T> {
        assert!(k <= self.steps());
        DenseMatrix::from_fn(k, k, |i, j| if i <= j + 1 { self.h[j][i] } else { T::zero() })
    }

    /// `h_{k+1,k}`
    pub fn subdiagonal(&self, k: usize) -> f64 {
        self.h[k - 1][k].re()
    }

    pub fn decomposition(&self) -> KrylovDecomposition<T> {
        let m = self.steps();
        KrylovDecomposition {
            basis: self.basis.clone(),
            compressed: self.hessenberg(m),
            next_norm: if m == 0 { 0.0 } else { self.subdiagonal(m) },
            next_vector: if self.breakdown { None } else { self.current.clone() },
            start_norm: self.start_norm,
            breakdown: self.breakdown,
        }
    }
}

/// `m` Lanczos steps (fewer on breakdown).
pub fn lanczos<T: Scalar, O: LinearOperator<T>>(
    op: O,
    b: &[T],
    m: usize,
    reorth: Reorth,
) -> Result<KrylovDecomposition<T>> {
    if m < 1 {
        return Err(invalid("need at least one Lanczos step"));
    }
    let mut p = LanczosProcess::new(op, b, reorth)?;
    p.extend_to(m);
    Ok(p.decomposition())
}

/// `m` Arnoldi steps (fewer on breakdown).
pub fn arnoldi<T: Scalar, O: LinearOperator<T>>(op: O, b: &[T], m: usize) -> Result<KrylovDecomposition<T>> {
    if m < 1 {
        return Err(invalid("need at least one Arnoldi step"));
    }
    let mut p = ArnoldiProcess::new(op, b)?;
    p.extend_to(m);
    Ok(p.decomposition())
}

/// Receives the regenerated basis vectors of a two-pass Lanczos run.
pub trait TwoPassConsumer<T> {
    /// Called once after the first sweep with the basis-free decomposition.
    fn after_first_sweep(&mut self, decomposition: &KrylovDecomposition<T>) -> Result<()>;

    /// Called for `j = 0..m` with `u_j` during the second sweep.
    fn consume(&mut self, j: usize, u: &[T]);
}

/// Two-pass Lanczos: the first sweep keeps three vectors and builds `G_m`,
/// the second sweep regenerates `u_1..u_m` with identical arithmetic and
/// streams them to `consumer`.
pub fn lanczos_twopass<T: Scalar, O: LinearOperator<T>, C: TwoPassConsumer<T>>(
    op: O,
    b: &[T],
    m: usize,
    consumer: &mut C,
) -> Result<KrylovDecomposition<T>> {
    if m < 1 {
        return Err(invalid("need at least one Lanczos step"));
    }
    let mut first = LanczosProcess::streaming(&op, b)?;
    first.extend_to(m);
    let decomposition = first.decomposition();
    consumer.after_first_sweep(&decomposition)?;
    let steps = first.steps();
    let (alpha, beta) = (first.alpha.clone(), first.beta.clone());
    drop(first);

    let mut second = LanczosProcess::streaming(&op, b)?;
    for j in 0..steps {
        let u = second.step().expect("second sweep replays the first");
        consumer.consume(j, u);
    }
    debug_assert_eq!(second.alpha, alpha);
    debug_assert_eq!(second.beta, beta);
    if second.alpha != alpha || second.beta != beta {
        return Err(Error::NoConvergence("two-pass Lanczos replay"));
    }
    Ok(decomposition)
}

/// Two-pass consumer accumulating the full matrix `U X U^*` (test sizes only).
pub struct FullAccumulator<T, F> {
    n: usize,
    x_from: F,
    x: Option<DenseMatrix<T>>,
    basis: Vec<Vec<T>>,
    pub result: DenseMatrix<T>,
}

impl<T: Scalar, F: FnMut(&KrylovDecomposition<T>) -> Result<DenseMatrix<T>>> FullAccumulator<T, F> {
    pub fn new(n: usize, x_from: F) -> Self {
        Self {
            n,
            x_from,
            x: None,
            basis: Vec::new(),
            result: DenseMatrix::zeros(n, n),
        }
    }
}

impl<T: Scalar, F: FnMut(&KrylovDecomposition<T>) -> Result<DenseMatrix<T>>> TwoPassConsumer<T>
    for FullAccumulator<T, F>
{
    fn after_first_sweep(&mut self, d: &KrylovDecomposition<T>) -> Result<()> {
        self.x = Some((self.x_from)(d)?);
        Ok(())
    }

    fn consume(&mut self, j: usize, u: &[T]) {
        self.basis.push(u.to_vec());
        if j + 1 == self.x.as_ref().map_or(0, |x| x.rows()) {
            let um = DenseMatrix::from_columns(self.n, &self.basis);
            let x = self.x.as_ref().unwrap();
            self.result = um.matmul(x).matmul(&um.adjoint());
        }
    }
}

/// Two-pass consumer accumulating `diag(U X U^*)` for Hermitian `X` with
/// `O(n m)` storage.
pub struct DiagonalAccumulator<T, F> {
    x_from: F,
    x: Option<DenseMatrix<T>>,
    /// `acc[q][i] = sum_{j < current} u_j[i] X[j, q]`
    acc: Vec<Vec<T>>,
    pub diagonal: Vec<f64>,
}

impl<T: Scalar, F: FnMut(&KrylovDecomposition<T>) -> Result<DenseMatrix<T>>> DiagonalAccumulator<T, F> {
    pub fn new(n: usize, x_from: F) -> Self {
        Self {
            x_from,
            x: None,
            acc: Vec::new(),
            diagonal: vec![0.0; n],
        }
    }

    pub fn x(&self) -> Option<&DenseMatrix<T>> {
        self.x.as_ref()
    }
}

impl<T: Scalar, F: FnMut(&KrylovDecomposition<T>) -> Result<DenseMatrix<T>>> TwoPassConsumer<T>
    for DiagonalAccumulator<T, F>
{
    fn after_first_sweep(&mut self, d: &KrylovDecomposition<T>) -> Result<()> {
        let x = (self.x_from)(d)?;
        let n = self.diagonal.len();
        self.acc = vec![vec![T::zero(); n]; x.cols()];
        self.x = Some(x);
        Ok(())
    }

    fn consume(&mut self, j: usize, u: &[T]) {
        let x = self.x.as_ref().expect("first sweep done");
        // d_i += 2 Re(acc_j[i] conj(u_i)) + X_jj |u_i|^2
        let xjj = x[(j, j)].re();
        for (i, ui) in u.iter().enumerate() {
            self.diagonal[i] += 2.0 * (self.acc[j][i] * ui.conj()).re() + xjj * ui.abs_sqr();
        }
        for q in j + 1..x.cols() {
            let xjq = x[(j, q)];
            if xjq == T::zero() {
                continue;
            }
            for (a, ui) in self.acc[q].iter_mut().zip(u) {
                *a += *ui * xjq;
            }
        }
        self.acc[j] = Vec::new();
    }
}
