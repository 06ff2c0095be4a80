//! Singular value decomposition by one-sided Jacobi rotations.

use alloc::vec::Vec;

use crate::dense::DenseMatrix;
use crate::scalar::{dot, math, norm2, Scalar};

/// Thin SVD `M = U diag(sigma) V^*`, singular values descending.
#[derive(Debug, Clone)]
pub struct Svd<T> {
    pub u: DenseMatrix<T>,
    pub sigma: Vec<f64>,
    pub v: DenseMatrix<T>,
}

impl<T: Scalar> Svd<T> {
    /// Number of singular values above `rel_tol * sigma_max`.
    pub fn rank(&self, rel_tol: f64) -> usize {
        let smax = self.sigma.first().copied().unwrap_or(0.0);
        self.sigma.iter().filter(|&&s| s > rel_tol * smax && s > 0.0).count()
    }
}

pub fn svd<T: Scalar>(m: &DenseMatrix<T>) -> Svd<T> {
    if m.rows() < m.cols() {
        let s = svd(&m.adjoint());
        return Svd {
            u: s.v,
            sigma: s.sigma,
            v: s.u,
        };
    }
    let (rows, cols) = (m.rows(), m.cols());
    let mut w = m.clone();
    let mut v = DenseMatrix::<T>::identity(cols);
    let eps = f64::EPSILON;

    for _sweep in 0..80 {
        let mut rotated = false;
        for p in 0..cols {
            for q in p + 1..cols {
                let alpha: f64 = w.col(p).iter().map(|x| x.abs_sqr()).sum();
                let beta: f64 = w.col(q).iter().map(|x| x.abs_sqr()).sum();
                let gamma = dot(w.col(p), w.col(q));
                let g = gamma.abs();
                if g == 0.0 || g <= eps * math::sqrt(alpha * beta) {
                    continue;
                }
                rotated = true;
                let phase = gamma.scale(1.0 / g);
                let zeta = (beta - alpha) / (2.0 * g);
                let t = zeta.signum() / (math::abs(zeta) + math::sqrt(1.0 + zeta * zeta));
                let c = 1.0 / math::sqrt(1.0 + t * t);
                let s = c * t;
                rotate(&mut w, p, q, c, s, phase, rows);
                rotate(&mut v, p, q, c, s, phase, cols);
            }
        }
        if !rotated {
            break;
        }
    }

    let mut sigma: Vec<f64> = (0..cols).map(|j| norm2(w.col(j))).collect();
    let mut order: Vec<usize> = (0..cols).collect();
    order.sort_by(|&a, &b| sigma[b].total_cmp(&sigma[a]));
    let u = DenseMatrix::from_fn(rows, cols, |i, j| {
        let k = order[j];
        if sigma[k] > 0.0 {
            w[(i, k)].scale(1.0 / sigma[k])
        } else {
            T::zero()
        }
    });
    let v = DenseMatrix::from_fn(cols, cols, |i, j| v[(i, order[j])]);
    sigma = order.iter().map(|&k| sigma[k]).collect();
    Svd { u, sigma, v }
}

/// `p' = c p - s q~`, `q' = phase (s p + c q~)` with `q~ = conj(phase) q`.
fn rotate<T: Scalar>(m: &mut DenseMatrix<T>, p: usize, q: usize, c: f64, s: f64, phase: T, len: usize) {
    let conj_phase = phase.conj();
    for i in 0..len {
        let xp = m[(i, p)];
        let xq = conj_phase * m[(i, q)];
        m[(i, p)] = xp.scale(c) - xq.scale(s);
        m[(i, q)] = phase * (xp.scale(s) + xq.scale(c));
    }
}

/// Largest singular value.
pub fn spectral_norm<T: Scalar>(m: &DenseMatrix<T>) -> f64 {
    if m.rows() == 0 || m.cols() == 0 {
        return 0.0;
    }
    svd(m).sigma[0]
}
