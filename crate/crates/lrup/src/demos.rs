//! Synthetic experiments behind `lrup demo <name>`.
//!
//! Each demo returns one CSV table (with `NA` where a value does not apply)
//! and a JSON object with the setup and summary numbers.

use std::fmt;
use std::str::FromStr;

use lrup_core::bounds::{bound_exp_superlinear, bound_exp_wedge, bound_markov_hpd, phi_abs, stieltjes_update_decay, DecayParams};
use lrup_core::eig::eigvals;
use lrup_core::eigh::eigvalsh;
use lrup_core::generators::{gen_convdiff1d, gen_laplace2d};
use lrup_core::krylov::Reorth;
use lrup_core::oracle::{dense_update_reference, dense_update_reference_rank1};
use lrup_core::{DenseMatrix, Error as CoreError, FunctionSpec, SparseMatrix, SpectralRegion, C64};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::experiments::{general_history, hermitian_history, steps_to_tolerance, HistoryOptions, HistoryRow};
use crate::report::{fmt_f64, fmt_opt};
use crate::vecspec::{random_normal, random_unit};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Demo {
    ReorthComparison,
    EstimatorInvSqrt,
    ExpInterval,
    ExpWedge,
    MarkovInvSqrt,
    ConvDiff,
    Decay,
}

impl Demo {
    pub const ALL: [Demo; 7] = [
        Demo::ReorthComparison,
        Demo::EstimatorInvSqrt,
        Demo::ExpInterval,
        Demo::ExpWedge,
        Demo::MarkovInvSqrt,
        Demo::ConvDiff,
        Demo::Decay,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Demo::ReorthComparison => "reorth-comparison",
            Demo::EstimatorInvSqrt => "estimator-invsqrt",
            Demo::ExpInterval => "exp-interval",
            Demo::ExpWedge => "exp-wedge",
            Demo::MarkovInvSqrt => "markov-invsqrt",
            Demo::ConvDiff => "convdiff",
            Demo::Decay => "decay",
        }
    }

    /// Problem size used when `--n` is not given.
    pub fn default_n(&self) -> usize {
        match self {
            Demo::EstimatorInvSqrt | Demo::Decay => 400,
            Demo::ExpWedge => 1000,
            Demo::ConvDiff => 256,
            _ => 100,
        }
    }
}

impl fmt::Display for Demo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Demo {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Demo::ALL
            .into_iter()
            .find(|d| d.name() == s)
            .ok_or_else(|| Error::Usage(format!("unknown demo '{s}'")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DemoOutput {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
    pub meta: Value,
}

pub fn run_demo(demo: Demo, n: Option<usize>, seed: u64) -> Result<DemoOutput> {
    let n = n.unwrap_or_else(|| demo.default_n());
    match demo {
        Demo::ReorthComparison => reorth_comparison(n, seed),
        Demo::EstimatorInvSqrt => estimator_invsqrt(n, seed),
        Demo::ExpInterval => exp_interval(n, seed),
        Demo::ExpWedge => exp_wedge(n, seed),
        Demo::MarkovInvSqrt => markov_invsqrt(n, seed),
        Demo::ConvDiff => convdiff(n),
        Demo::Decay => decay(n),
    }
}

pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![a];
    }
    (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()
}

pub fn logspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    linspace(a.log10(), b.log10(), n).into_iter().map(|e| 10f64.powf(e)).collect()
}

fn header(cols: &[&str]) -> Vec<String> {
    cols.iter().map(|s| s.to_string()).collect()
}

fn cell<T>(rows: &[HistoryRow], m: usize, f: impl Fn(&HistoryRow) -> Option<T>) -> Option<T> {
    rows.get(m - 1).and_then(f)
}

/// `exp(-z)` updates on equispaced and log-spaced spectra in
/// `[1e-3, 1e3]`, with and without reorthogonalization.
fn reorth_comparison(n: usize, seed: u64) -> Result<DemoOutput> {
    let b = random_unit(n, seed);
    let max_m = 100;
    let mut columns = Vec::new();
    for spectrum in [linspace(1e-3, 1e3, n), logspace(1e-3, 1e3, n)] {
        // exp(-z) on A is exp on -A
        let neg: Vec<f64> = spectrum.iter().map(|x| -x).collect();
        let a = SparseMatrix::from_diag(&neg);
        let minus_b: Vec<f64> = b.iter().map(|x| -x).collect();
        let exact = dense_update_reference_rank1(&a.to_dense(), &b, &minus_b, &FunctionSpec::Exp)?;
        for reorth in [Reorth::Full, Reorth::None] {
            let opts = HistoryOptions::every_step(max_m);
            columns.push(hermitian_history(&a, &b, -1.0, &FunctionSpec::Exp, &exact, opts, &[], reorth)?);
        }
    }
    let len = columns.iter().map(Vec::len).max().unwrap_or(0);
    let rows = (1..=len)
        .map(|m| {
            let mut r = vec![m.to_string()];
            r.extend(columns.iter().map(|c| fmt_opt(cell(c, m, |h| h.true_error))));
            r
        })
        .collect();
    Ok(DemoOutput {
        header: header(&["m", "equispaced_full", "equispaced_none", "logspaced_full", "logspaced_none"]),
        rows,
        meta: json!({"demo": "reorth-comparison", "n": n, "seed": seed, "function": "exp(-z)", "interval": [1e-3, 1e3]}),
    })
}

/// Whether `z^{-1/2}` (principal branch) is defined on the spectrum.
fn off_negative_axis(m: &DenseMatrix<f64>) -> Result<bool> {
    let values = eigvals(&m.to_complex())?;
    let scale = values.iter().map(|z| z.norm()).fold(0.0, f64::max);
    Ok(values.iter().all(|z| z.re > 0.0 || z.im.abs() > 1e-12 * scale))
}

/// Seeds `seed, seed + 1, ...` until `A + b c^*` has no eigenvalue on the
/// closed negative real axis. Returns the seed and the vectors.
pub fn invsqrt_admissible_pair(a: &DenseMatrix<f64>, seed: u64) -> Result<(u64, Vec<f64>, Vec<f64>)> {
    let n = a.rows();
    for s in seed..seed.saturating_add(1000) {
        let b = random_normal(n, s.wrapping_mul(2));
        let c = random_normal(n, s.wrapping_mul(2).wrapping_add(1));
        if off_negative_axis(&a.add(&DenseMatrix::outer(&b, &c)))? {
            return Ok((s, b, c));
        }
    }
    Err(CoreError::InvalidArgument("no admissible random pair found".into()).into())
}

/// 2-D Laplacian, `f = z^{-1/2}`, random `b, c`; estimates for `d = 1, 2, 3`.
fn estimator_invsqrt(n: usize, seed: u64) -> Result<DemoOutput> {
    let side = (n as f64).sqrt().round().max(2.0) as usize;
    let a = gen_laplace2d(side)?;
    let ad = a.to_dense();
    let (used, b, c) = invsqrt_admissible_pair(&ad, seed)?;
    let exact = dense_update_reference(&ad, &DenseMatrix::from_columns(ad.rows(), std::slice::from_ref(&b)), &DenseMatrix::from_columns(ad.rows(), std::slice::from_ref(&c)), &FunctionSpec::InvSqrt)?;
    let at = a.adjoint();
    let rows = general_history(&a, &at, &b, &c, &FunctionSpec::InvSqrt, &exact, HistoryOptions::every_step(80), &[1, 2, 3])?;
    let table = rows
        .iter()
        .map(|r| {
            let mut v = vec![r.m.to_string(), fmt_opt(r.true_error)];
            v.extend(r.estimates.iter().map(|e| fmt_opt(*e)));
            v
        })
        .collect();
    Ok(DemoOutput {
        header: header(&["m", "true_error", "estimate_d1", "estimate_d2", "estimate_d3"]),
        rows: table,
        meta: json!({"demo": "estimator-invsqrt", "n": side * side, "side": side, "seed": used, "requested_seed": seed, "function": "invsqrt"}),
    })
}

/// Diagonal `A` with eigenvalues equispaced in `[-20, 0]`, `f = exp`,
/// downdate `-b b^*` with a random unit `b`.
fn exp_interval(n: usize, seed: u64) -> Result<DemoOutput> {
    let a = SparseMatrix::from_diag(&linspace(-20.0, 0.0, n));
    let b = random_unit(n, seed);
    let minus_b: Vec<f64> = b.iter().map(|x| -x).collect();
    let ad = a.to_dense();
    let exact = dense_update_reference_rank1(&ad, &b, &minus_b, &FunctionSpec::Exp)?;
    let rho = 5.05;
    let rows = hermitian_history(&a, &b, -1.0, &FunctionSpec::Exp, &exact, HistoryOptions::every_step(40), &[2], Reorth::Full)?;
    let table = rows
        .iter()
        .map(|r| {
            let bd = bound_exp_superlinear(0.0, rho, r.m, 1.0, 1.0);
            vec![
                r.m.to_string(),
                fmt_opt(r.true_error),
                fmt_opt(r.estimates[0]),
                fmt_opt(bd.map(|x| x.bound)),
                fmt_opt(bd.map(|x| x.rate)),
            ]
        })
        .collect();
    let lmin = eigvalsh(&ad.sub(&DenseMatrix::outer(&b, &b)))?[0];
    Ok(DemoOutput {
        header: header(&["m", "true_error", "estimate", "bound", "rate"]),
        rows: table,
        meta: json!({"demo": "exp-interval", "n": n, "seed": seed, "psi1": 0.0, "rho": rho, "lambda_min_modified": lmin}),
    })
}

/// `psi(w) = psi1 + rho w (1 - 1/w)^alpha`
fn wedge_psi(psi1: f64, rho: f64, alpha: f64, w: C64) -> C64 {
    (C64::new(1.0, 0.0) - w.inv()).powf(alpha) * w * rho + psi1
}

/// `count` points drawn uniformly from the wedge-like set by rejection.
pub fn sample_wedge(psi1: f64, rho: f64, alpha: f64, count: usize, seed: u64) -> Result<Vec<C64>> {
    use rand::{Rng, SeedableRng};
    let region = SpectralRegion::Wedge { psi1, rho, alpha };
    region.validate()?;
    let boundary: Vec<C64> = (0..2000)
        .map(|k| wedge_psi(psi1, rho, alpha, C64::from_polar(1.0, std::f64::consts::TAU * (k as f64 + 0.5) / 2000.0)))
        .collect();
    let ymax = boundary.iter().map(|z| z.im.abs()).fold(0.0, f64::max);
    let (xmin, xmax) = (region.omega(), psi1);
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let z = C64::new(rng.random_range(xmin..xmax), rng.random_range(-ymax..ymax));
        if matches!(phi_abs(&region, z), Err(CoreError::InsideRegion)) {
            out.push(z);
        }
    }
    Ok(out)
}

/// Diagonal `A` with eigenvalues in the wedge `psi1 = 0, alpha = 1.5,
/// rho = 100`, `f = exp`, downdate `-b b^*` by the two-sided algorithm.
fn exp_wedge(n: usize, seed: u64) -> Result<DemoOutput> {
    let (alpha, rho) = (1.5, 100.0);
    let lambda = sample_wedge(0.0, rho, alpha, n, seed)?;
    let a = SparseMatrix::from_diag(&lambda);
    let b: Vec<C64> = random_unit(n, seed.wrapping_add(1)).into_iter().map(|x| C64::new(x, 0.0)).collect();
    let minus_b: Vec<C64> = b.iter().map(|x| -x).collect();
    let exact = dense_update_reference_rank1(&a.to_dense(), &b, &minus_b, &FunctionSpec::Exp)?;
    let at = a.adjoint();
    let stride = if n > 400 { 5 } else { 1 };
    let opts = HistoryOptions { max_m: 120, stride };
    let rows = general_history(&a, &at, &b, &minus_b, &FunctionSpec::Exp, &exact, opts, &[2])?;
    let region = SpectralRegion::Wedge {
        psi1: 0.0,
        rho: rho + 1.0,
        alpha,
    };
    let table = rows
        .iter()
        .map(|r| {
            let bd = bound_exp_wedge(&region, r.m, 1.0, 1.0);
            vec![
                r.m.to_string(),
                fmt_opt(r.true_error),
                fmt_opt(r.estimates[0]),
                fmt_opt(bd.map(|x| x.bound)),
                fmt_opt(bd.map(|x| x.rate)),
            ]
        })
        .collect();
    Ok(DemoOutput {
        header: header(&["m", "true_error", "estimate", "bound", "rate"]),
        rows: table,
        meta: json!({"demo": "exp-wedge", "n": n, "seed": seed, "psi1": 0.0, "alpha": alpha, "rho_a": rho, "rho_bound": rho + 1.0, "error_stride": stride}),
    })
}

/// Diagonal `A` with eigenvalues equispaced in `[0.1, 10]`,
/// `f = z^{-1/2}`, update `+b b^*` with a random unit `b`.
fn markov_invsqrt(n: usize, seed: u64) -> Result<DemoOutput> {
    let a = SparseMatrix::from_diag(&linspace(0.1, 10.0, n));
    let b = random_unit(n, seed);
    let exact = dense_update_reference_rank1(&a.to_dense(), &b, &b, &FunctionSpec::InvSqrt)?;
    let rows = hermitian_history(&a, &b, 1.0, &FunctionSpec::InvSqrt, &exact, HistoryOptions::every_step(60), &[2], Reorth::Full)?;
    let kappa = 10.1 / 0.1;
    let fp = FunctionSpec::InvSqrt.derivative(0.1)?.abs();
    let table = rows
        .iter()
        .map(|r| {
            let bd = bound_markov_hpd(kappa, fp, 1.0, r.m).ok();
            vec![
                r.m.to_string(),
                fmt_opt(r.true_error),
                fmt_opt(r.estimates[0]),
                fmt_opt(bd),
                fmt_opt(bd.map(|x| x / (8.0 * fp))),
            ]
        })
        .collect();
    Ok(DemoOutput {
        header: header(&["m", "true_error", "estimate", "bound", "rate"]),
        rows: table,
        meta: json!({"demo": "markov-invsqrt", "n": n, "seed": seed, "kappa_star": kappa, "f_prime_lmin": fp}),
    })
}

/// Steps to an estimate of `1e-6` (lookahead 2) for each modified
/// convection coefficient.
pub const CONVDIFF_TILDES: [f64; 3] = [20.0, 40.0, 60.0];

pub fn convdiff_histories(n: usize) -> Result<Vec<Vec<HistoryRow>>> {
    let pos = n / 2 - 1;
    CONVDIFF_TILDES
        .iter()
        .map(|&ct| {
            let p = gen_convdiff1d(n, 10.0, ct, pos)?;
            let exact = dense_update_reference_rank1(&p.a.to_dense(), &p.b, &p.c, &FunctionSpec::Exp)?;
            let at = p.a.adjoint();
            general_history(&p.a, &at, &p.b, &p.c, &FunctionSpec::Exp, &exact, HistoryOptions::every_step(60), &[2])
        })
        .collect()
}

/// Convection-diffusion with `c = 10`, changed to `20, 40, 60` at the
/// middle grid row, `f = exp`.
fn convdiff(n: usize) -> Result<DemoOutput> {
    let hist = convdiff_histories(n)?;
    let len = hist.iter().map(Vec::len).max().unwrap_or(0);
    let rows = (1..=len)
        .map(|m| {
            let mut r = vec![m.to_string()];
            r.extend(hist.iter().map(|h| fmt_opt(cell(h, m, |x| x.true_error))));
            r.extend(hist.iter().map(|h| fmt_opt(cell(h, m, |x| x.estimates[0]))));
            r
        })
        .collect();
    let steps: Vec<Option<usize>> = hist.iter().map(|h| steps_to_tolerance(h, 0, 1e-6)).collect();
    Ok(DemoOutput {
        header: header(&["m", "error_c20", "error_c40", "error_c60", "estimate_c20", "estimate_c40", "estimate_c60"]),
        rows,
        meta: json!({"demo": "convdiff", "n": n, "c": 10.0, "c_tilde": CONVDIFF_TILDES, "pos": n / 2 - 1, "steps_to_1e-6": steps}),
    })
}

/// Exact update and decay bound for `tridiag(-1, 3, -1)` with
/// `f = z^{-1/2}` and modification `e_k e_l^*` at the center.
pub struct DecayData {
    pub n: usize,
    pub k: usize,
    pub l: usize,
    pub update: DenseMatrix<f64>,
    pub params: DecayParams,
}

impl DecayData {
    pub fn new(n: usize) -> Result<Self> {
        let (k, l) = (n / 2, n / 2 - 1);
        let a = SparseMatrix::tridiag(n, -1.0, 3.0, -1.0).to_dense();
        let mut ek = vec![0.0; n];
        let mut el = vec![0.0; n];
        ek[k] = 1.0;
        el[l] = 1.0;
        let update = dense_update_reference_rank1(&a, &ek, &el, &FunctionSpec::InvSqrt)?;
        let params = DecayParams::from_matrix(&a, k, l, &FunctionSpec::InvSqrt)?;
        Ok(Self { n, k, l, update, params })
    }

    /// Graph distances in a tridiagonal pattern are index differences.
    pub fn bound(&self, i: usize, j: usize) -> Result<f64> {
        Ok(stieltjes_update_decay(&self.params, i.abs_diff(self.k), self.l.abs_diff(j))?)
    }

    /// Smallest index box holding all entries with `|F_ij| > level`.
    pub fn window(&self, level: f64) -> Option<(usize, usize, usize, usize)> {
        let mut w: Option<(usize, usize, usize, usize)> = None;
        for j in 0..self.n {
            for i in 0..self.n {
                if self.update[(i, j)].abs() > level {
                    w = Some(match w {
                        None => (i, i, j, j),
                        Some((r0, r1, c0, c1)) => (r0.min(i), r1.max(i), c0.min(j), c1.max(j)),
                    });
                }
            }
        }
        w
    }
}

fn decay(n: usize) -> Result<DemoOutput> {
    if n < 4 {
        return Err(Error::Usage("decay demo needs n >= 4".into()));
    }
    let data = DecayData::new(n)?;
    let level = 1e-10;
    let mut rows = Vec::new();
    let mut outside_max: f64 = 0.0;
    for j in 0..n {
        for i in 0..n {
            let v = data.update[(i, j)].abs();
            let bd = data.bound(i, j)?;
            if bd < level {
                outside_max = outside_max.max(v);
            }
            if v >= 1e-16 || bd >= 1e-16 {
                rows.push(vec![i.to_string(), j.to_string(), fmt_f64(v), fmt_f64(bd)]);
            }
        }
    }
    let window = data.window(level).map(|(r0, r1, c0, c1)| json!({"rows": [r0, r1], "cols": [c0, c1], "size": [r1 - r0 + 1, c1 - c0 + 1]}));
    Ok(DemoOutput {
        header: header(&["i", "j", "abs_entry", "bound"]),
        rows,
        meta: json!({
            "demo": "decay", "n": n, "k": data.k, "l": data.l,
            "q": data.params.q(), "k_min": data.params.k_min, "kappa": data.params.kappa,
            "window_above_1e-10": window, "max_entry_outside_bound_level_set": outside_max,
        }),
    })
}
