//! Dense brute-force references. These form full `n x n` matrices and are
//! only meant for verification at small scale.

use crate::dense::DenseMatrix;
use crate::error::{Error, Result};
use crate::funcs::{eval_matrix_function, FunctionSpec};
use crate::scalar::Scalar;

/// Largest dimension accepted by [`dense_update_reference`].
pub const DENSE_REFERENCE_LIMIT: usize = 2000;
/// Largest dimension accepted by [`block_lemma_check`].
pub const BLOCK_CHECK_LIMIT: usize = 500;

fn square_dim<T: Scalar>(a: &DenseMatrix<T>) -> Result<usize> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch {
            expected: a.rows(),
            found: a.cols(),
        });
    }
    Ok(a.rows())
}

/// `f(A + B C*) - f(A)` computed densely.
pub fn dense_update_reference<T: Scalar>(
    a: &DenseMatrix<T>,
    b: &DenseMatrix<T>,
    c: &DenseMatrix<T>,
    f: &FunctionSpec,
) -> Result<DenseMatrix<T>> {
    let n = square_dim(a)?;
    if n > DENSE_REFERENCE_LIMIT {
        return Err(Error::SizeGuard {
            n,
            limit: DENSE_REFERENCE_LIMIT,
        });
    }
    for m in [b, c] {
        if m.rows() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: m.rows(),
            });
        }
    }
    if b.cols() != c.cols() {
        return Err(Error::DimensionMismatch {
            expected: b.cols(),
            found: c.cols(),
        });
    }
    let modified = a.add(&b.matmul(&c.adjoint()));
    let fa = eval_matrix_function(a, f)?;
    let fm = eval_matrix_function(&modified, f)?;
    Ok(fm.sub(&fa))
}

/// Rank-one form of [`dense_update_reference`].
pub fn dense_update_reference_rank1<T: Scalar>(
    a: &DenseMatrix<T>,
    b: &[T],
    c: &[T],
    f: &FunctionSpec,
) -> Result<DenseMatrix<T>> {
    let bm = DenseMatrix::from_col_major(b.len(), 1, b.to_vec())?;
    let cm = DenseMatrix::from_col_major(c.len(), 1, c.to_vec())?;
    dense_update_reference(a, &bm, &cm, f)
}

/// Frobenius norm of
/// `M^j - N^j - sum_{k<j} N^(j-1-k) (M - N) M^k`.
pub fn telescope_check<T: Scalar>(m: &DenseMatrix<T>, n: &DenseMatrix<T>, j: u32) -> Result<f64> {
    let dim = square_dim(m)?;
    if square_dim(n)? != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: n.rows(),
        });
    }
    let diff = m.sub(n);
    let mut rhs = DenseMatrix::<T>::zeros(dim, dim);
    // powers of M ascending, powers of N descending
    let mut m_pows = alloc::vec::Vec::with_capacity(j as usize + 1);
    let mut n_pows = alloc::vec::Vec::with_capacity(j as usize + 1);
    m_pows.push(DenseMatrix::<T>::identity(dim));
    n_pows.push(DenseMatrix::<T>::identity(dim));
    for k in 0..j as usize {
        m_pows.push(m_pows[k].matmul(m));
        n_pows.push(n_pows[k].matmul(n));
    }
    for k in 0..j as usize {
        let term = n_pows[j as usize - 1 - k].matmul(&diff).matmul(&m_pows[k]);
        rhs = rhs.add(&term);
    }
    let lhs = m_pows[j as usize].sub(&n_pows[j as usize]);
    Ok(lhs.sub(&rhs).norm_fro())
}

/// Evaluates `f` on the block matrix `[[A, bc*], [0, A + bc*]]` and returns
/// the Frobenius distance between its (1,2) block and the dense update.
pub fn block_lemma_check<T: Scalar>(a: &DenseMatrix<T>, b: &[T], c: &[T], f: &FunctionSpec) -> Result<f64> {
    let n = square_dim(a)?;
    if n > BLOCK_CHECK_LIMIT {
        return Err(Error::SizeGuard {
            n,
            limit: BLOCK_CHECK_LIMIT,
        });
    }
    for v in [b, c] {
        if v.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: v.len(),
            });
        }
    }
    let bc = DenseMatrix::outer(b, c);
    let mut block = DenseMatrix::<T>::zeros(2 * n, 2 * n);
    block.set_block(0, 0, a);
    block.set_block(0, n, &bc);
    block.set_block(n, n, &a.add(&bc));
    let fb = eval_matrix_function(&block, f)?;
    let x12 = fb.submatrix(0, n, n, 2 * n);
    let reference = dense_update_reference_rank1(a, b, c, f)?;
    Ok(x12.sub(&reference).norm_fro())
}
