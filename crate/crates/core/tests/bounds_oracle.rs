mod common;

use common::*;
use lrup_core::bounds::*;
use lrup_core::eigh::eigh;
use lrup_core::oracle::{block_lemma_check, dense_update_reference_rank1, telescope_check};
use lrup_core::svd::spectral_norm;
use lrup_core::update::{hermitian_update, SolveOptions};
use lrup_core::{DenseMatrix, FunctionSpec, SparseMatrix, C64};

/// Best uniform approximation error of `f` by polynomials of degree `m` on
/// `[-1, 1]` via the Remez exchange.
fn remez_error(f: impl Fn(f64) -> f64, m: usize) -> f64 {
    let k = m + 2;
    let mut refs: Vec<f64> = (0..k).map(|i| -(std::f64::consts::PI * i as f64 / (k - 1) as f64).cos()).collect();
    let grid: Vec<f64> = (0..=20000).map(|i| -1.0 + 2.0 * i as f64 / 20000.0).collect();
    let mut level = 0.0;
    for _ in 0..30 {
        let a = DenseMatrix::from_fn(k, k, |i, j| if j <= m { refs[i].powi(j as i32) } else if i % 2 == 0 { 1.0 } else { -1.0 });
        let rhs = DenseMatrix::from_fn(k, 1, |i, _| f(refs[i]));
        let sol = a.solve(&rhs).unwrap();
        level = sol[(m + 1, 0)].abs();
        let p = |x: f64| (0..=m).rev().fold(0.0, |acc, j| acc * x + sol[(j, 0)]);
        let err: Vec<f64> = grid.iter().map(|&x| f(x) - p(x)).collect();
        // one extremum per sign-constant run
        let mut new_refs = Vec::new();
        let mut i = 0;
        while i < grid.len() {
            let s = err[i].signum();
            let mut best = i;
            while i < grid.len() && err[i].signum() == s {
                if err[i].abs() > err[best].abs() {
                    best = i;
                }
                i += 1;
            }
            new_refs.push(best);
        }
        if new_refs.len() != k {
            break;
        }
        let max_err = err.iter().fold(0.0f64, |a, e| a.max(e.abs()));
        refs = new_refs.into_iter().map(|i| grid[i]).collect();
        if (max_err - level) <= 1e-12 * max_err {
            break;
        }
    }
    level
}

#[test]
fn chebyshev_surrogate_against_remez() {
    let eps5 = remez_error(f64::exp, 5);
    assert!((eps5 - 4.5e-5).abs() < 1e-6, "eps5 = {eps5:e}");
    let s = chebyshev_poly_bound(&FunctionSpec::Exp, (-1.0, 1.0), 5).unwrap();
    assert!(4.0 * eps5 <= s && s <= 2.0 * 4.0 * eps5, "surrogate {s:e}, 4 eps5 {:e}", 4.0 * eps5);
}

#[test]
fn phi_tends_to_one_at_the_boundary() {
    let regions = [
        SpectralRegion::Interval { a: 0.1, b: 10.1 },
        SpectralRegion::Ellipse { sigma: 2.0, tau: 1.5, rho: 1.3 },
        SpectralRegion::Wedge { psi1: 0.0, rho: 2.0, alpha: 1.5 },
    ];
    for r in regions {
        let left = phi_abs(&r, C64::new(r.omega() - 1e-6, 0.0)).unwrap();
        let right = phi_abs(&r, C64::new(r.rightmost() + 1e-6, 0.0)).unwrap();
        assert!(left > 1.0 && left - 1.0 < 1e-2, "{r:?}: {left}");
        assert!(right > 1.0 && right - 1.0 < 1e-2, "{r:?}: {right}");
        assert!(phi_abs(&r, C64::new(r.omega() - 1.0, 0.0)).unwrap() > left);
    }
}

#[test]
fn field_of_values_of_normal_matrix_is_hull_of_spectrum() {
    // normal: U diag(lambda) U^* with complex lambda on a hexagon
    let mut g = rng(51);
    let n = 6;
    let u = eigh(&random_hermitian_c(&mut g, n)).unwrap().vectors;
    let lambda: Vec<C64> = (0..n).map(|k| C64::from_polar(2.0, std::f64::consts::PI * k as f64 / 3.0) + 0.5).collect();
    let d = DenseMatrix::from_fn(n, n, |i, j| if i == j { lambda[i] } else { C64::new(0.0, 0.0) });
    let m = u.matmul(&d).matmul(&u.adjoint());
    let pts = field_of_values_boundary(&m, 90).unwrap();
    // every point lies inside the hexagon and on one of its edges
    for p in &pts {
        let on_edge = (0..n).any(|k| {
            let (a, b) = (lambda[k], lambda[(k + 1) % n]);
            let t = ((p - a) * (b - a).conj()).re / (b - a).norm_sqr();
            (-1e-10..=1.0 + 1e-10).contains(&t) && (a + (b - a) * t - p).norm() <= 1e-10
        });
        assert!(on_edge, "{p}");
    }
}

#[test]
fn exp_superlinear_dominance_small() {
    let mut g = rng(52);
    let n = 100;
    let a = SparseMatrix::from_diag(&linspace(-20.0, 0.0, n));
    let b = unit(&mut g, n);
    let minus_b: Vec<f64> = b.iter().map(|x| -x).collect();
    let exact = dense_update_reference_rank1(&a.to_dense(), &b, &minus_b, &FunctionSpec::Exp).unwrap();
    let mut p = lrup_core::krylov::LanczosProcess::new(&a, &b, lrup_core::krylov::Reorth::Full).unwrap();
    p.extend_to(40);
    for m in 14..40 {
        let Some(bound) = bound_exp_superlinear(0.0, 5.05, m, 1.0, 1.0) else {
            continue;
        };
        let x = lrup_core::update::xm_hermitian(&p.tridiagonal(m), 1.0, &FunctionSpec::Exp, -1.0).unwrap();
        let u = DenseMatrix::from_columns(n, &p.basis()[..m]);
        let err = spectral_norm(&u.matmul(&x).matmul(&u.adjoint()).sub(&exact));
        // past 1e-13 both sides are at the rounding floor
        assert!(err <= bound.bound.max(1e-13), "m={m}: {err:e} > {:e}", bound.bound);
    }
}

#[test]
fn markov_hpd_dominance_small() {
    let mut g = rng(53);
    let n = 100;
    let a = SparseMatrix::from_diag(&linspace(0.1, 10.0, n));
    let b = unit(&mut g, n);
    let exact = dense_update_reference_rank1(&a.to_dense(), &b, &b, &FunctionSpec::InvSqrt).unwrap();
    let fp = FunctionSpec::InvSqrt.derivative(0.1).unwrap();
    let mut p = lrup_core::krylov::LanczosProcess::new(&a, &b, lrup_core::krylov::Reorth::Full).unwrap();
    p.extend_to(60);
    for m in 1..=p.steps() {
        let x = lrup_core::update::xm_hermitian(&p.tridiagonal(m), 1.0, &FunctionSpec::InvSqrt, 1.0).unwrap();
        let u = DenseMatrix::from_columns(n, &p.basis()[..m]);
        let err = spectral_norm(&u.matmul(&x).matmul(&u.adjoint()).sub(&exact));
        let bound = bound_markov_hpd(101.0, fp, 1.0, m).unwrap();
        assert!(err <= bound, "m={m}");
    }
}

#[test]
fn stieltjes_decay_dominates_small_example() {
    let n = 100;
    let a = SparseMatrix::tridiag(n, -1.0, 3.0, -1.0).to_dense();
    let (k, l) = (50, 49);
    let f = FunctionSpec::InvSqrt;
    let params = DecayParams::from_matrix(&a, k, l, &f).unwrap();
    assert!(params.k_min > 0.0 && params.k_min <= 1.0);
    let mut ek = vec![0.0; n];
    let mut el = vec![0.0; n];
    ek[k] = 1.0;
    el[l] = 1.0;
    let upd = dense_update_reference_rank1(&a, &ek, &el, &f).unwrap();
    // entries below this are rounding noise of the dense reference
    let floor = 1e-14;
    for i in 0..n {
        for j in 0..n {
            let bound = stieltjes_update_decay(&params, i.abs_diff(k), l.abs_diff(j)).unwrap();
            assert!(upd[(i, j)].abs() <= bound.max(floor), "({i},{j}): {:e} > {bound:e}", upd[(i, j)].abs());
        }
    }
}

#[test]
fn solver_on_decay_example_respects_bound_pattern() {
    let n = 100;
    let a = SparseMatrix::tridiag(n, -1.0, 3.0, -1.0);
    let mut b = vec![0.0; n];
    b[40] = 1.0;
    let fac = hermitian_update(&a, &b, 1.0, &FunctionSpec::InvSqrt, &SolveOptions::default()).unwrap();
    assert!(fac.converged);
    let params = DecayParams::from_matrix(&a.to_dense(), 40, 40, &FunctionSpec::InvSqrt).unwrap();
    for i in 0..n {
        let bound = stieltjes_update_decay(&params, i.abs_diff(40), 0).unwrap();
        assert!(fac.entry(i, 40).abs() <= bound + 1e-6);
    }
}

#[test]
fn block_lemma_and_telescope_random() {
    let mut g = rng(54);
    for _ in 0..5 {
        let a = random_matrix(&mut g, 30).scaled(0.2);
        let b = unit(&mut g, 30);
        let c = unit(&mut g, 30);
        let r = block_lemma_check(&a, &b, &c, &FunctionSpec::Exp).unwrap();
        let fa = lrup_core::expm::expm(&a.to_complex()).unwrap().norm_fro();
        assert!(r <= 1e-9 * fa, "{r:e}");
        let m = random_matrix(&mut g, 8);
        let nn = random_matrix(&mut g, 8);
        let t = telescope_check(&m, &nn, 6).unwrap();
        let s = m.norm_fro().max(nn.norm_fro()).powi(6);
        assert!(t <= 1e-11 * s);
    }
}

#[test]
fn size_guard_on_dense_reference() {
    let a = DenseMatrix::<f64>::zeros(2001, 2001);
    let v = vec![0.0; 2001];
    assert!(matches!(
        dense_update_reference_rank1(&a, &v, &v, &FunctionSpec::Exp),
        Err(lrup_core::Error::SizeGuard { n: 2001, limit: 2000 })
    ));
}
