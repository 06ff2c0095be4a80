#![allow(dead_code)]

use lrup_core::{DenseMatrix, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn randn(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.sample(StandardNormal)).collect()
}

pub fn unit(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    let v = randn(rng, n);
    let s = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.into_iter().map(|x| x / s).collect()
}

pub fn randn_c(rng: &mut ChaCha8Rng, n: usize) -> Vec<C64> {
    (0..n)
        .map(|_| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
        .collect()
}

pub fn random_matrix(rng: &mut ChaCha8Rng, n: usize) -> DenseMatrix<f64> {
    let data = randn(rng, n * n);
    DenseMatrix::from_col_major(n, n, data).unwrap()
}

/// Symmetric with entries of size about `1 / sqrt(n)`.
pub fn random_symmetric(rng: &mut ChaCha8Rng, n: usize) -> DenseMatrix<f64> {
    let g = random_matrix(rng, n);
    g.add(&g.adjoint()).scaled(0.5 / (n as f64).sqrt())
}

pub fn random_hermitian_c(rng: &mut ChaCha8Rng, n: usize) -> DenseMatrix<C64> {
    let data = randn_c(rng, n * n);
    let g = DenseMatrix::from_col_major(n, n, data).unwrap();
    g.add(&g.adjoint()).scaled(C64::new(0.5 / (n as f64).sqrt(), 0.0))
}

/// `Q diag(lambda) Q^T` with a random orthogonal `Q`.
pub fn spd_with_spectrum(rng: &mut ChaCha8Rng, lambda: &[f64]) -> DenseMatrix<f64> {
    let n = lambda.len();
    let q = lrup_core::eigh::eigh(&random_symmetric(rng, n)).unwrap().vectors;
    let mut s = q.clone();
    for (j, &l) in lambda.iter().enumerate() {
        for x in s.col_mut(j) {
            *x *= l;
        }
    }
    s.matmul(&q.adjoint())
}

pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()
}

pub fn rel(a: &DenseMatrix<f64>, b: &DenseMatrix<f64>) -> f64 {
    a.sub(b).norm_fro() / b.norm_fro().max(f64::MIN_POSITIVE)
}
