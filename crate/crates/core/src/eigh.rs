//! Hermitian eigendecomposition: Householder tridiagonalization followed by
//! implicit QL on the real tridiagonal matrix.

use alloc::vec;
use alloc::vec::Vec;

use crate::dense::DenseMatrix;
use crate::error::{Error, Result};
use crate::scalar::{dot, math, norm2, Scalar};

#[derive(Debug, Clone)]
pub struct HermitianEigen<T> {
    /// Ascending.
    pub values: Vec<f64>,
    /// Orthonormal eigenvectors, one per column.
    pub vectors: DenseMatrix<T>,
}

impl<T: Scalar> HermitianEigen<T> {
    /// `V diag(g(values)) V^*`
    pub fn apply_fn(&self, mut g: impl FnMut(f64) -> T) -> DenseMatrix<T> {
        let n = self.values.len();
        let gv: Vec<T> = self.values.iter().map(|&l| g(l)).collect();
        let v = &self.vectors;
        let mut scaled = v.clone();
        for j in 0..n {
            for x in scaled.col_mut(j) {
                *x *= gv[j];
            }
        }
        scaled.matmul(&v.adjoint())
    }
}

/// Eigendecomposition of a Hermitian matrix. Only the lower triangle is read.
pub fn eigh<T: Scalar>(a: &DenseMatrix<T>) -> Result<HermitianEigen<T>> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch {
            expected: a.rows(),
            found: a.cols(),
        });
    }
    let n = a.rows();
    if n == 0 {
        return Ok(HermitianEigen {
            values: Vec::new(),
            vectors: DenseMatrix::zeros(0, 0),
        });
    }
    let mut s = DenseMatrix::from_fn(n, n, |i, j| {
        if i >= j {
            a[(i, j)]
        } else {
            a[(j, i)].conj()
        }
    });
    let mut q = DenseMatrix::<T>::identity(n);
    let mut off = vec![T::zero(); n.saturating_sub(1)];

    for k in 0..n.saturating_sub(1) {
        let x: Vec<T> = s.col(k)[k + 1..].to_vec();
        let xnorm = norm2(&x);
        let tail_zero = x[1..].iter().all(|v| *v == T::zero());
        if xnorm == 0.0 || tail_zero {
            off[k] = x[0];
            continue;
        }
        let x0 = x[0];
        let phase = if x0.abs() == 0.0 {
            T::one()
        } else {
            x0.scale(1.0 / x0.abs())
        };
        let alpha = -(phase.scale(xnorm));
        let mut v = x;
        v[0] -= alpha;
        let tau = 2.0 / v.iter().map(|t| t.abs_sqr()).sum::<f64>();
        let m = n - k - 1;

        // p = tau S v on the trailing block
        let mut p = vec![T::zero(); m];
        for (jj, vj) in v.iter().enumerate() {
            let col = &s.col(k + 1 + jj)[k + 1..];
            for (pi, sij) in p.iter_mut().zip(col) {
                *pi += *sij * *vj;
            }
        }
        p.iter_mut().for_each(|t| *t = t.scale(tau));
        let kk = dot(&v, &p).scale(tau * 0.5);
        let w: Vec<T> = p.iter().zip(&v).map(|(pi, vi)| *pi - kk * *vi).collect();
        for jj in 0..m {
            let (wj, vj) = (w[jj].conj(), v[jj].conj());
            let col = &mut s.col_mut(k + 1 + jj)[k + 1..];
            for ii in 0..m {
                col[ii] -= v[ii] * wj + w[ii] * vj;
            }
        }
        off[k] = alpha;

        // Q <- Q H
        for i in 0..n {
            let mut acc = T::zero();
            for (jj, vj) in v.iter().enumerate() {
                acc += q[(i, k + 1 + jj)] * *vj;
            }
            let acc = acc.scale(tau);
            for (jj, vj) in v.iter().enumerate() {
                q[(i, k + 1 + jj)] -= acc * vj.conj();
            }
        }
    }

    // Phase scaling making the off-diagonal real and nonnegative.
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n];
    let mut delta = vec![T::one(); n];
    for i in 0..n {
        d[i] = s[(i, i)].re();
    }
    for i in 0..n - 1 {
        let ei = off[i];
        let mag = ei.abs();
        e[i] = mag;
        delta[i + 1] = if mag == 0.0 {
            delta[i]
        } else {
            delta[i] * ei.scale(1.0 / mag)
        };
    }
    for j in 0..n {
        let dj = delta[j];
        for x in q.col_mut(j) {
            *x *= dj;
        }
    }

    let (values, z) = tridiagonal_ql(d, e, true)?;
    let z = z.expect("vectors requested");
    // vectors = Q D Z with Z real
    let zt = DenseMatrix::<T>::from_fn(n, n, |i, j| T::from_real(z[(i, j)]));
    Ok(HermitianEigen {
        values,
        vectors: q.matmul(&zt),
    })
}

/// Eigenvalues only (ascending).
pub fn eigvalsh<T: Scalar>(a: &DenseMatrix<T>) -> Result<Vec<f64>> {
    Ok(eigh(a)?.values)
}

/// Symmetric tridiagonal eigenproblem with diagonal `d` and off-diagonal `e`
/// (`e[i]` couples `i` and `i + 1`).
pub fn eigh_tridiagonal(d: &[f64], e: &[f64]) -> Result<(Vec<f64>, DenseMatrix<f64>)> {
    let n = d.len();
    assert!(e.len() + 1 >= n);
    let mut ee = vec![0.0; n];
    ee[..n.saturating_sub(1)].copy_from_slice(&e[..n.saturating_sub(1)]);
    let (vals, z) = tridiagonal_ql(d.to_vec(), ee, true)?;
    Ok((vals, z.unwrap()))
}

/// Implicit QL with Wilkinson-type shifts on a real symmetric tridiagonal
/// matrix. `e` has length `n` with `e[n-1]` ignored.
fn tridiagonal_ql(
    mut d: Vec<f64>,
    mut e: Vec<f64>,
    want_vectors: bool,
) -> Result<(Vec<f64>, Option<DenseMatrix<f64>>)> {
    let n = d.len();
    let mut z = if want_vectors {
        Some(DenseMatrix::<f64>::identity(n))
    } else {
        None
    };
    if n == 0 {
        return Ok((d, z));
    }
    e[n - 1] = 0.0;
    let eps = f64::EPSILON;
    let mut f = 0.0;
    let mut tst1: f64 = 0.0;
    for l in 0..n {
        tst1 = tst1.max(math::abs(d[l]) + math::abs(e[l]));
        let mut m = l;
        while m < n {
            if math::abs(e[m]) <= eps * tst1 {
                break;
            }
            m += 1;
        }
        if m > l {
            let mut iter = 0;
            loop {
                iter += 1;
                if iter > 60 {
                    return Err(Error::NoConvergence("tridiagonal QL"));
                }
                let g = d[l];
                let mut p = (d[l + 1] - g) / (2.0 * e[l]);
                let mut r = math::hypot(p, 1.0);
                if p < 0.0 {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let mut h = g - d[l];
                for di in d.iter_mut().skip(l + 2) {
                    *di -= h;
                }
                f += h;

                p = d[m];
                let mut c = 1.0;
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = 0.0;
                let mut s2 = 0.0;
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    let g = c * e[i];
                    h = c * p;
                    r = math::hypot(p, e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    if let Some(z) = z.as_mut() {
                        let (ci, ci1) = split_cols(z, i);
                        for (zk, zk1) in ci.iter_mut().zip(ci1.iter_mut()) {
                            let hh = *zk1;
                            *zk1 = s * *zk + c * hh;
                            *zk = c * *zk - s * hh;
                        }
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if math::abs(e[l]) <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = 0.0;
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| d[a].total_cmp(&d[b]));
    let vals = order.iter().map(|&i| d[i]).collect();
    let z = z.map(|z| DenseMatrix::from_fn(n, n, |i, j| z[(i, order[j])]));
    Ok((vals, z))
}

/// Mutable views of columns `i` and `i + 1`.
fn split_cols(z: &mut DenseMatrix<f64>, i: usize) -> (&mut [f64], &mut [f64]) {
    let n = z.rows();
    let data = z.as_mut_slice();
    let (a, b) = data[i * n..(i + 2) * n].split_at_mut(n);
    (a, b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::C64;

    fn check<T: Scalar>(a: &DenseMatrix<T>) {
        let e = eigh(a).unwrap();
        let n = a.rows();
        let rec = e.apply_fn(T::from_real);
        assert!(rec.sub(a).norm_fro() <= 1e-12 * (1.0 + a.norm_fro()), "residual");
        let vhv = e.vectors.adjoint_matmul(&e.vectors);
        assert!(vhv.sub(&DenseMatrix::identity(n)).norm_max() < 1e-12);
        assert!(e.values.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn real_symmetric() {
        let a = DenseMatrix::from_fn(7, 7, |i, j| 1.0 / (1 + i + j) as f64 + if i == j { i as f64 } else { 0.0 });
        check(&a);
    }

    #[test]
    fn complex_hermitian() {
        let a = DenseMatrix::from_fn(6, 6, |i, j| {
            let (i, j) = (i as f64, j as f64);
            if i == j {
                C64::new(i * 0.3 - 1.0, 0.0)
            } else {
                C64::new((i + j).sin(), (i - j) * 0.25)
            }
        });
        check(&a);
    }

    #[test]
    fn tridiagonal_known_spectrum() {
        let n = 10;
        let (vals, _) = eigh_tridiagonal(&[3.0; 10], &[-1.0; 9]).unwrap();
        for (k, v) in vals.iter().enumerate() {
            let exact = 3.0 - 2.0 * math::cos((k + 1) as f64 * core::f64::consts::PI / (n + 1) as f64);
            assert!((v - exact).abs() < 1e-13);
        }
    }

    #[test]
    fn diagonal_and_tiny_inputs() {
        check(&DenseMatrix::from_diag(&[3.0, -1.0, 2.0]));
        check(&DenseMatrix::from_diag(&[5.0]));
        let e = eigh(&DenseMatrix::<f64>::zeros(0, 0)).unwrap();
        assert!(e.values.is_empty());
    }
}
