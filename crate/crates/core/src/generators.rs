//! Synthetic test operators.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{invalid, Error, Result};
use crate::sparse::SparseMatrix;

/// Five-point Laplacian on a `side x side` grid, unscaled (diagonal 4).
pub fn gen_laplace2d(side: usize) -> Result<SparseMatrix<f64>> {
    if side < 2 {
        return Err(invalid("grid side must be at least 2"));
    }
    let n = side * side;
    let idx = |r: usize, c: usize| r * side + c;
    let mut t = Vec::with_capacity(5 * n);
    for r in 0..side {
        for c in 0..side {
            let k = idx(r, c);
            t.push((k, k, 4.0));
            if r > 0 {
                t.push((k, idx(r - 1, c), -1.0));
            }
            if r + 1 < side {
                t.push((k, idx(r + 1, c), -1.0));
            }
            if c > 0 {
                t.push((k, idx(r, c - 1), -1.0));
            }
            if c + 1 < side {
                t.push((k, idx(r, c + 1), -1.0));
            }
        }
    }
    SparseMatrix::from_triplets(n, &t)?.with_symmetry_flag(true)
}

/// Convection-diffusion operator and the rank-one pair changing the
/// convection coefficient at a single grid row.
#[derive(Debug, Clone)]
pub struct ConvDiffProblem {
    pub a: SparseMatrix<f64>,
    pub b: Vec<f64>,
    pub c: Vec<f64>,
    pub h: f64,
}

/// Centered differences for `u'' - c u'` on `n` interior points of `[0, 1]`,
/// multiplied through by `h^2`, so rows read
/// `(1 + c h/2, -2, 1 - c h/2)`.
///
/// `a + b c^T` is the same discretization with coefficient `c_tilde` in row
/// `pos` only.
pub fn gen_convdiff1d(n: usize, c: f64, c_tilde: f64, pos: usize) -> Result<ConvDiffProblem> {
    if n < 3 {
        return Err(invalid("need at least 3 interior points"));
    }
    if pos >= n {
        return Err(Error::IndexOutOfRange { index: pos, bound: n });
    }
    let h = 1.0 / (n + 1) as f64;
    let a = SparseMatrix::tridiag(n, 1.0 + c * h / 2.0, -2.0, 1.0 - c * h / 2.0);
    let mut b = vec![0.0; n];
    b[pos] = 1.0;
    let mut cv = vec![0.0; n];
    let delta = (c_tilde - c) * h / 2.0;
    if pos > 0 {
        cv[pos - 1] = delta;
    }
    if pos + 1 < n {
        cv[pos + 1] = -delta;
    }
    Ok(ConvDiffProblem { a, b, c: cv, h })
}
