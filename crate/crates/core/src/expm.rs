//! Matrix exponential by degree-13 Padé approximation with scaling and squaring.

use crate::dense::DenseMatrix;
use crate::error::Result;
use crate::scalar::{math, Scalar};

const THETA_13: f64 = 5.371920351148152;

const B: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];

pub fn expm<T: Scalar>(a: &DenseMatrix<T>) -> Result<DenseMatrix<T>> {
    assert!(a.is_square(), "expm needs a square matrix");
    let n = a.rows();
    if n == 0 {
        return Ok(a.clone());
    }
    let norm = a.norm_one();
    let s = if norm > THETA_13 {
        math::ceil(math::log2(norm / THETA_13)).max(0.0) as i32
    } else {
        0
    };
    let a = if s > 0 {
        a.scaled(T::from_real(math::powi(2.0, -s)))
    } else {
        a.clone()
    };

    let id = DenseMatrix::<T>::identity(n);
    let a2 = a.matmul(&a);
    let a4 = a2.matmul(&a2);
    let a6 = a4.matmul(&a2);
    let c = |k: usize| T::from_real(B[k]);

    let mut u_inner = a6.scaled(c(13));
    u_inner.add_scaled(c(11), &a4);
    u_inner.add_scaled(c(9), &a2);
    let mut u = a6.matmul(&u_inner);
    u.add_scaled(c(7), &a6);
    u.add_scaled(c(5), &a4);
    u.add_scaled(c(3), &a2);
    u.add_scaled(c(1), &id);
    let u = a.matmul(&u);

    let mut v_inner = a6.scaled(c(12));
    v_inner.add_scaled(c(10), &a4);
    v_inner.add_scaled(c(8), &a2);
    let mut v = a6.matmul(&v_inner);
    v.add_scaled(c(6), &a6);
    v.add_scaled(c(4), &a4);
    v.add_scaled(c(2), &a2);
    v.add_scaled(c(0), &id);

    let p = v.add(&u);
    let q = v.sub(&u);
    let mut r = q.solve(&p)?;
    for _ in 0..s {
        r = r.matmul(&r);
    }
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::C64;

    #[test]
    fn zero_gives_identity() {
        let e = expm(&DenseMatrix::<f64>::zeros(2, 2)).unwrap();
        assert!(e.sub(&DenseMatrix::identity(2)).norm_max() < 1e-15);
    }

    #[test]
    fn diagonal_matches_scalar_exp() {
        let e = expm(&DenseMatrix::from_diag(&[1.0, -3.0, 20.0])).unwrap();
        assert!((e[(0, 0)] / math::exp(1.0) - 1.0).abs() < 1e-14);
        assert!((e[(1, 1)] / math::exp(-3.0) - 1.0).abs() < 1e-14);
        assert!((e[(2, 2)] / math::exp(20.0) - 1.0).abs() < 1e-13);
    }

    #[test]
    fn rotation_generator() {
        let t = 2.5;
        let a = DenseMatrix::from_fn(2, 2, |i, j| match (i, j) {
            (0, 1) => -t,
            (1, 0) => t,
            _ => 0.0,
        });
        let e = expm(&a).unwrap();
        assert!((e[(0, 0)] - math::cos(t)).abs() < 1e-14);
        assert!((e[(1, 0)] - math::sin(t)).abs() < 1e-14);
    }

    #[test]
    fn nilpotent_is_exact_polynomial() {
        let a = DenseMatrix::from_fn(3, 3, |i, j| if j == i + 1 { C64::new(2.0, 0.0) } else { C64::new(0.0, 0.0) });
        let e = expm(&a).unwrap();
        // I + N + N^2 / 2
        assert!((e[(0, 2)] - C64::new(2.0, 0.0)).norm() < 1e-14);
        assert!((e[(0, 1)] - C64::new(2.0, 0.0)).norm() < 1e-14);
    }
}
