mod common;

use common::*;
use lrup_core::eig::eig;
use lrup_core::expm::expm;
use lrup_core::funcs::eval_matrix_function;
use lrup_core::generators::{gen_convdiff1d, gen_laplace2d};
use lrup_core::graph::graph_distance;
use lrup_core::krylov::{lanczos, Reorth};
use lrup_core::svd::{spectral_norm, svd};
use lrup_core::{DenseMatrix, FunctionSpec, SparseMatrix, C64};
use proptest::prelude::*;

fn sparse_strategy() -> impl Strategy<Value = (usize, Vec<(usize, usize, f64)>)> {
    (2usize..200).prop_flat_map(|n| {
        let entry = (0..n, 0..n, -10.0f64..10.0);
        (Just(n), proptest::collection::vec(entry, 0..4 * n))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn spmv_matches_dense((n, trips) in sparse_strategy(), seed in any::<u64>()) {
        let a = SparseMatrix::from_triplets(n, &trips).unwrap();
        let x = randn(&mut rng(seed), n);
        let y = a.spmv(&x).unwrap();
        let yd = a.to_dense().matvec(&x);
        for (s, d) in y.iter().zip(&yd) {
            prop_assert!((s - d).abs() <= 1e-14 * (1.0 + d.abs()));
        }
    }

    #[test]
    fn graph_distance_is_symmetric((n, trips) in sparse_strategy(), i in 0usize..200, j in 0usize..200) {
        let a = SparseMatrix::from_triplets(n, &trips).unwrap();
        // the distance is defined on the pattern of A + A^T
        let sym = SparseMatrix::from_dense(&a.to_dense().add(&a.to_dense().adjoint())).unwrap();
        let (i, j) = (i % n, j % n);
        prop_assert_eq!(graph_distance(&sym, i, j).unwrap(), graph_distance(&sym, j, i).unwrap());
        prop_assert_eq!(graph_distance(&sym, i, i).unwrap(), Some(0));
    }

    #[test]
    fn hermitian_input_gives_hermitian_output(seed in any::<u64>(), n in 2usize..12) {
        let mut g = rng(seed);
        let m = random_hermitian_c(&mut g, n);
        for f in [FunctionSpec::Exp, FunctionSpec::Polynomial(vec![1.0, -0.5, 0.25])] {
            let fm = eval_matrix_function(&m, &f).unwrap();
            prop_assert!(fm.sub(&fm.adjoint()).norm_fro() <= 1e-12 * fm.norm_fro());
        }
    }

    #[test]
    fn function_commutes_with_argument(seed in any::<u64>(), n in 2usize..10) {
        let mut g = rng(seed);
        let m = random_matrix(&mut g, n).scaled(0.5);
        let fm = eval_matrix_function(&m, &FunctionSpec::Exp).unwrap();
        let lhs = fm.matmul(&m);
        let rhs = m.matmul(&fm);
        prop_assert!(lhs.sub(&rhs).norm_fro() <= 1e-10 * lhs.norm_fro().max(1.0));
    }

    #[test]
    fn invsqrt_squares_to_inverse(seed in any::<u64>(), n in 2usize..10, logk in 0.0f64..6.0) {
        let mut g = rng(seed);
        let lambda: Vec<f64> = (0..n).map(|i| 10f64.powf(logk * i as f64 / (n - 1) as f64)).collect();
        let m = spd_with_spectrum(&mut g, &lambda);
        let s = eval_matrix_function(&m, &FunctionSpec::InvSqrt).unwrap();
        let prod = s.matmul(&s).matmul(&m);
        prop_assert!(prod.sub(&DenseMatrix::identity(n)).norm_max() <= 1e-8);
    }
}

#[test]
fn exp_paths_agree_on_normal_matrices() {
    let mut g = rng(41);
    // a real normal matrix: Q (block rotation) Q^T
    let n = 8;
    let q = lrup_core::eigh::eigh(&random_symmetric(&mut g, n)).unwrap().vectors;
    let mut blocks = DenseMatrix::<f64>::zeros(n, n);
    for k in 0..n / 2 {
        let (re, im) = (-(k as f64) * 0.4, 0.7 + k as f64);
        blocks[(2 * k, 2 * k)] = re;
        blocks[(2 * k + 1, 2 * k + 1)] = re;
        blocks[(2 * k, 2 * k + 1)] = im;
        blocks[(2 * k + 1, 2 * k)] = -im;
    }
    let m = q.matmul(&blocks).matmul(&q.adjoint()).to_complex();
    let pade = expm(&m).unwrap();
    let e = eig(&m).unwrap();
    let diag = e.apply_fn(|z| z.exp());
    assert!(pade.sub(&diag).norm_fro() <= 1e-10 * pade.norm_fro());
}

#[test]
fn exp_matches_taylor_series() {
    let mut g = rng(42);
    let m = random_hermitian_c(&mut g, 8);
    let e = eval_matrix_function(&m, &FunctionSpec::Exp).unwrap();
    let mut term = DenseMatrix::<C64>::identity(8);
    let mut sum = term.clone();
    for k in 1..=30 {
        term = term.matmul(&m).scaled(C64::new(1.0 / k as f64, 0.0));
        sum = sum.add(&term);
    }
    assert!(e.sub(&sum).norm_fro() <= 1e-12 * sum.norm_fro());
}

#[test]
fn spectral_norm_matches_power_iteration() {
    let mut g = rng(43);
    let m = random_matrix(&mut g, 10);
    let mut y = vec![1.0; 10];
    let mut sigma = 0.0;
    for _ in 0..5000 {
        let z = m.adjoint_matvec(&m.matvec(&y));
        let nz = z.iter().map(|t| t * t).sum::<f64>().sqrt();
        y = z.into_iter().map(|t| t / nz).collect();
        sigma = nz.sqrt();
    }
    assert!((spectral_norm(&m) - sigma).abs() <= 1e-10 * sigma);
    assert_eq!(spectral_norm(&DenseMatrix::<f64>::identity(3)), 1.0);
}

#[test]
fn laplacian_is_positive_definite() {
    let a = gen_laplace2d(20).unwrap();
    assert_eq!(a.n(), 400);
    assert!(a.symmetry_flag() && a.is_hermitian());
    let b = vec![1.0; 400];
    let d = lanczos(&a, &b, 20, Reorth::Full).unwrap();
    let (ritz, _) = lrup_core::eigh::eigh_tridiagonal(&d.compressed.diag(), &(0..19).map(|i| d.compressed[(i + 1, i)]).collect::<Vec<_>>()).unwrap();
    assert!(ritz.iter().all(|&r| r > 0.0));
    let small = gen_laplace2d(2).unwrap().to_dense();
    let ev = lrup_core::eigh::eigvalsh(&small).unwrap();
    assert!((ev[0] - 2.0).abs() < 1e-14);
}

#[test]
fn convdiff_modification_has_rank_one() {
    let p = gen_convdiff1d(16, 10.0, 20.0, 7).unwrap();
    let d = DenseMatrix::outer(&p.b, &p.c);
    assert_eq!(svd(&d).rank(1e-12), 1);
    let p0 = gen_convdiff1d(16, 10.0, 10.0, 7).unwrap();
    assert!(p0.c.iter().all(|&x| x == 0.0));
    // the modified operator is the discretization with c~ in row pos only
    let full = gen_convdiff1d(16, 20.0, 20.0, 7).unwrap().a.to_dense();
    let modified = p.a.to_dense().add(&d);
    for j in 0..16 {
        assert!((modified[(7, j)] - full[(7, j)]).abs() < 1e-15);
        assert!((modified[(3, j)] - p.a.to_dense()[(3, j)]).abs() == 0.0);
    }
}
