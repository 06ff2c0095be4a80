//! General (non-Hermitian) eigendecomposition via Hessenberg reduction and the
//! complex shifted QR algorithm.

use alloc::vec;
use alloc::vec::Vec;

use crate::dense::DenseMatrix;
use crate::error::{Error, Result};
use crate::scalar::{math, norm2, Scalar, C64};

/// `M = V diag(values) V^{-1}`.
#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    pub values: Vec<C64>,
    /// Unit-norm eigenvectors, one per column.
    pub vectors: DenseMatrix<C64>,
    pub inverse: DenseMatrix<C64>,
    /// `||V||_1 ||V^{-1}||_1`
    pub condition: f64,
}

impl EigenDecomposition {
    /// `V diag(g(values)) V^{-1}`
    pub fn apply_fn(&self, mut g: impl FnMut(C64) -> C64) -> DenseMatrix<C64> {
        let mut scaled = self.vectors.clone();
        for j in 0..self.values.len() {
            let gj = g(self.values[j]);
            for x in scaled.col_mut(j) {
                *x *= gj;
            }
        }
        scaled.matmul(&self.inverse)
    }
}

/// Upper Hessenberg form `H = Q^* A Q`.
pub fn hessenberg(a: &DenseMatrix<C64>, want_q: bool) -> (DenseMatrix<C64>, Option<DenseMatrix<C64>>) {
    let n = a.rows();
    let mut h = a.clone();
    let mut q = if want_q {
        Some(DenseMatrix::identity(n))
    } else {
        None
    };
    for k in 0..n.saturating_sub(2) {
        let x: Vec<C64> = h.col(k)[k + 1..].to_vec();
        if x[1..].iter().all(|v| *v == C64::zero()) {
            continue;
        }
        let xnorm = norm2(&x);
        let x0 = x[0];
        let phase = if x0.norm() == 0.0 {
            C64::one()
        } else {
            x0 / x0.norm()
        };
        let alpha = -phase * xnorm;
        let mut v = x;
        v[0] -= alpha;
        let tau = 2.0 / v.iter().map(|t| t.norm_sqr()).sum::<f64>();

        // left: rows k+1.., columns k..
        for j in k..n {
            let col = &mut h.col_mut(j)[k + 1..];
            let s: C64 = v.iter().zip(col.iter()).map(|(vi, ci)| vi.conj() * ci).sum::<C64>() * tau;
            for (ci, vi) in col.iter_mut().zip(&v) {
                *ci -= vi * s;
            }
        }
        // right: all rows, columns k+1..
        apply_right(&mut h, k + 1, &v, tau);
        if let Some(q) = q.as_mut() {
            apply_right(q, k + 1, &v, tau);
        }
        h[(k + 1, k)] = alpha;
        for i in k + 2..n {
            h[(i, k)] = C64::zero();
        }
    }
    (h, q)
}

/// `M[:, off..] <- M[:, off..] (I - tau v v^*)`
fn apply_right(m: &mut DenseMatrix<C64>, off: usize, v: &[C64], tau: f64) {
    let rows = m.rows();
    let mut w = vec![C64::zero(); rows];
    for (jj, vj) in v.iter().enumerate() {
        for (wi, mi) in w.iter_mut().zip(m.col(off + jj)) {
            *wi += mi * vj;
        }
    }
    for (jj, vj) in v.iter().enumerate() {
        let f = vj.conj() * tau;
        for (mi, wi) in m.col_mut(off + jj).iter_mut().zip(&w) {
            *mi -= wi * f;
        }
    }
}

/// Complex Schur form `A = Z T Z^*` with `T` upper triangular.
pub fn schur(a: &DenseMatrix<C64>, want_z: bool) -> Result<(DenseMatrix<C64>, Option<DenseMatrix<C64>>)> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch {
            expected: a.rows(),
            found: a.cols(),
        });
    }
    let n = a.rows();
    let (mut t, mut z) = hessenberg(a, want_z);
    if n < 2 {
        return Ok((t, z));
    }
    let eps = f64::EPSILON;
    let anorm = t.norm_fro().max(f64::MIN_POSITIVE);
    let mut hi = n - 1;
    let mut iter = 0usize;
    let mut total = 0usize;
    while hi > 0 {
        // locate the active block [lo, hi]
        let mut lo = hi;
        while lo > 0 {
            let s = t[(lo - 1, lo - 1)].norm() + t[(lo, lo)].norm();
            let s = if s == 0.0 { anorm } else { s };
            if t[(lo, lo - 1)].norm() <= eps * s {
                t[(lo, lo - 1)] = C64::zero();
                break;
            }
            lo -= 1;
        }
        if lo == hi {
            hi -= 1;
            iter = 0;
            continue;
        }
        iter += 1;
        total += 1;
        if total > 100 * n {
            return Err(Error::NoConvergence("complex Schur QR"));
        }

        let mu = if iter % 11 == 10 {
            // exceptional shift
            t[(hi, hi)] + t[(hi, hi - 1)].norm() * 0.75
        } else {
            wilkinson_shift(
                t[(hi - 1, hi - 1)],
                t[(hi - 1, hi)],
                t[(hi, hi - 1)],
                t[(hi, hi)],
            )
        };

        for k in lo..=hi {
            t[(k, k)] -= mu;
        }
        let mut rots = Vec::with_capacity(hi - lo);
        for k in lo..hi {
            let (c, s) = givens(t[(k, k)], t[(k + 1, k)]);
            for j in k..n {
                let x = t[(k, j)];
                let y = t[(k + 1, j)];
                t[(k, j)] = x * c + s * y;
                t[(k + 1, j)] = -s.conj() * x + y * c;
            }
            t[(k + 1, k)] = C64::zero();
            rots.push((c, s));
        }
        for (idx, &(c, s)) in rots.iter().enumerate() {
            let k = lo + idx;
            let rmax = (k + 2).min(hi + 1);
            rotate_cols(&mut t, k, c, s, rmax);
            if let Some(z) = z.as_mut() {
                rotate_cols(z, k, c, s, n);
            }
        }
        for k in lo..=hi {
            t[(k, k)] += mu;
        }
    }
    Ok((t, z))
}

/// Columns `(k, k+1) <- (k, k+1) G^*` for rows `0..rmax`.
fn rotate_cols(m: &mut DenseMatrix<C64>, k: usize, c: f64, s: C64, rmax: usize) {
    let rows = m.rows();
    let data = m.as_mut_slice();
    let (a, b) = data[k * rows..(k + 2) * rows].split_at_mut(rows);
    for (x, y) in a[..rmax].iter_mut().zip(b[..rmax].iter_mut()) {
        let (xv, yv) = (*x, *y);
        *x = xv * c + s.conj() * yv;
        *y = -s * xv + yv * c;
    }
}

/// Rotation `[[c, s], [-conj(s), c]]` mapping `(x, y)` to `(r, 0)`.
fn givens(x: C64, y: C64) -> (f64, C64) {
    let ax = x.norm();
    let ay = y.norm();
    if ay == 0.0 {
        return (1.0, C64::zero());
    }
    if ax == 0.0 {
        return (0.0, C64::one());
    }
    let r = math::hypot(ax, ay);
    (ax / r, (x / ax) * y.conj() / r)
}

fn wilkinson_shift(a: C64, b: C64, c: C64, d: C64) -> C64 {
    let half = (a - d) * 0.5;
    let disc = (half * half + b * c).sqrt();
    let mean = (a + d) * 0.5;
    let l1 = mean + disc;
    let l2 = mean - disc;
    if (l1 - d).norm() <= (l2 - d).norm() {
        l1
    } else {
        l2
    }
}

/// Eigenvalues of a general complex matrix.
pub fn eigvals(a: &DenseMatrix<C64>) -> Result<Vec<C64>> {
    let (t, _) = schur(a, false)?;
    Ok(t.diag())
}

/// Full eigendecomposition with eigenvector condition estimate.
pub fn eig(a: &DenseMatrix<C64>) -> Result<EigenDecomposition> {
    let n = a.rows();
    let (t, z) = schur(a, true)?;
    let z = z.unwrap();
    let values = t.diag();
    let tnorm = t.norm_fro().max(f64::MIN_POSITIVE);
    let small = f64::EPSILON * tnorm;

    // eigenvectors of T by back substitution
    let mut x = DenseMatrix::<C64>::zeros(n, n);
    for k in 0..n {
        let lk = values[k];
        x[(k, k)] = C64::one();
        for i in (0..k).rev() {
            let mut s = C64::zero();
            for j in i + 1..=k {
                s += t[(i, j)] * x[(j, k)];
            }
            let mut den = t[(i, i)] - lk;
            if den.norm() < small {
                den = C64::new(small, 0.0);
            }
            x[(i, k)] = -s / den;
        }
        // rescale to avoid overflow in long chains
        let nrm = norm2(x.col(k));
        if nrm > 1e100 {
            for v in x.col_mut(k) {
                *v /= nrm;
            }
        }
    }
    let mut vectors = z.matmul(&x);
    for j in 0..n {
        let nrm = norm2(vectors.col(j));
        if nrm > 0.0 {
            for v in vectors.col_mut(j) {
                *v /= nrm;
            }
        }
    }
    let (inverse, condition) = match vectors.inverse() {
        Ok(inv) => {
            let c = vectors.norm_one() * inv.norm_one();
            (inv, if c.is_finite() { c } else { f64::INFINITY })
        }
        Err(_) => (DenseMatrix::zeros(n, n), f64::INFINITY),
    };
    Ok(EigenDecomposition {
        values,
        vectors,
        inverse,
        condition,
    })
}
