mod common;

use common::*;
use lrup_core::krylov::{arnoldi, lanczos, lanczos_twopass, FullAccumulator, LanczosProcess, Reorth};
use lrup_core::operator::Adjoint;
use lrup_core::update::xm_hermitian;
use lrup_core::{DenseMatrix, FunctionSpec, SparseMatrix};

fn relation_residual(a: &DenseMatrix<f64>, d: &lrup_core::krylov::KrylovDecomposition<f64>) -> f64 {
    let u = d.basis_matrix();
    let m = d.steps();
    let mut r = a.matmul(&u).sub(&u.matmul(&d.compressed));
    if let Some(next) = &d.next_vector {
        for (i, x) in next.iter().enumerate() {
            r[(i, m - 1)] -= d.next_norm * x;
        }
    }
    r.norm_fro()
}

fn orthonormality(u: &DenseMatrix<f64>) -> f64 {
    u.adjoint_matmul(u).sub(&DenseMatrix::identity(u.cols())).norm_max()
}

#[test]
fn lanczos_relation_and_projection() {
    let mut g = rng(11);
    let a = random_symmetric(&mut g, 100);
    let b = randn(&mut g, 100);
    let d = lanczos(&a, &b, 20, Reorth::Full).unwrap();
    let u = d.basis_matrix();
    assert!(orthonormality(&u) <= 1e-12);
    assert!(relation_residual(&a, &d) <= 1e-10 * a.norm_fro());
    let proj = u.adjoint_matmul(&a.matmul(&u));
    assert!(proj.sub(&d.compressed).norm_max() <= 1e-12 * a.norm_fro());
    let nb = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    for (ui, bi) in u.col(0).iter().zip(&b) {
        assert!((ui - bi / nb).abs() < 1e-15);
    }
}

#[test]
fn lanczos_shift_consistency() {
    let mut g = rng(12);
    let a = random_symmetric(&mut g, 80);
    let b = randn(&mut g, 80);
    for sigma in [0.37, -2.5, 10.0] {
        let mut shifted = a.clone();
        shifted.add_to_diag(sigma);
        let d0 = lanczos(&a, &b, 15, Reorth::Full).unwrap();
        let d1 = lanczos(&shifted, &b, 15, Reorth::Full).unwrap();
        let mut g0 = d0.compressed.clone();
        g0.add_to_diag(sigma);
        assert!(g0.sub(&d1.compressed).norm_max() <= 1e-12 * (1.0 + sigma.abs()) * 10.0);
        assert!(d0.basis_matrix().sub(&d1.basis_matrix()).norm_max() <= 1e-10);
    }
}

#[test]
fn arnoldi_on_hermitian_is_tridiagonal() {
    let mut g = rng(13);
    let a = random_symmetric(&mut g, 60);
    let b = randn(&mut g, 60);
    let d = arnoldi(&a, &b, 12).unwrap();
    let h = &d.compressed;
    for j in 0..h.cols() {
        for i in 0..h.rows() {
            if i + 1 < j || i > j + 1 {
                assert!(h[(i, j)].abs() <= 1e-12, "H[{i},{j}] = {}", h[(i, j)]);
            }
        }
    }
}

#[test]
fn arnoldi_invariants_random() {
    let mut g = rng(14);
    let a = random_matrix(&mut g, 100).scaled(0.1);
    let b = randn(&mut g, 100);
    let d = arnoldi(&a, &b, 15).unwrap();
    assert!(orthonormality(&d.basis_matrix()) <= 1e-12);
    assert!(relation_residual(&a, &d) <= 1e-10 * a.norm_fro());
    // the adjoint process runs on the same storage through the wrapper
    let sp = SparseMatrix::from_dense(&a).unwrap();
    let da = arnoldi(Adjoint(&sp), &b, 10).unwrap();
    let at = a.adjoint();
    assert!(relation_residual(&at, &da) <= 1e-10 * a.norm_fro());
}

#[test]
fn twopass_full_accumulation_equals_single_pass() {
    let mut g = rng(15);
    let n = 40;
    let a = SparseMatrix::tridiag(n, -1.0, 3.0, -1.0);
    let b = randn(&mut g, n);
    let nb = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    let f = FunctionSpec::Exp;
    let m = 12;
    let mut acc = FullAccumulator::new(n, |d: &lrup_core::krylov::KrylovDecomposition<f64>| {
        xm_hermitian(&d.compressed, nb, &f, 1.0)
    });
    lanczos_twopass(&a, &b, m, &mut acc).unwrap();

    let mut p = LanczosProcess::new(&a, &b, Reorth::None).unwrap();
    p.extend_to(m);
    let u = DenseMatrix::from_columns(n, &p.basis()[..m]);
    let x = xm_hermitian(&p.tridiagonal(m), nb, &f, 1.0).unwrap();
    let single = u.matmul(&x).matmul(&u.adjoint());
    assert!(acc.result.sub(&single).norm_max() <= 1e-12 * single.norm_max());
}

#[test]
fn twopass_replays_breakdown_bitwise() {
    // the Krylov space of a 6-dimensional diagonal matrix is exhausted early
    let a = SparseMatrix::from_diag(&[1.0, 2.0, 2.0, 3.0, 3.0, 3.0]);
    let b = vec![1.0; 6];
    let mut first = LanczosProcess::streaming(&a, &b).unwrap();
    first.extend_to(10);
    assert!(first.breakdown());
    assert_eq!(first.steps(), 3);
    let mut second = LanczosProcess::streaming(&a, &b).unwrap();
    second.extend_to(10);
    assert_eq!(first.alphas(), second.alphas());
    assert_eq!(first.betas(), second.betas());
    let mut acc = FullAccumulator::new(6, |d: &lrup_core::krylov::KrylovDecomposition<f64>| Ok(d.compressed.clone()));
    let d = lanczos_twopass(&a, &b, 10, &mut acc).unwrap();
    assert!(d.breakdown);
    assert_eq!(d.steps(), 3);
}
