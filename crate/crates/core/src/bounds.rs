//! A-priori convergence bounds for the Krylov update, decay bounds for the
//! entries of the update matrix, and the conformal-map and field-of-values
//! helpers they rely on.
//!
//! All bounds are evaluated in closed form. Where a bound only holds on a
//! range of iteration counts the function returns `None` outside that range.

use alloc::vec::Vec;
use core::f64::consts::{E, PI};

use crate::dense::DenseMatrix;
use crate::eigh::eigh;
use crate::error::{invalid, Error, Result};
use crate::funcs::FunctionSpec;
use crate::scalar::{math, Scalar, C64};

/// Compact inclusion set for the spectrum (or field of values).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SpectralRegion {
    /// Real segment `[a, b]`.
    Interval { a: f64, b: f64 },
    /// `|z - sigma + tau| + |z - sigma - tau| <= tau (rho + 1/rho)`.
    Ellipse { sigma: f64, tau: f64, rho: f64 },
    /// Image of the unit disk exterior under
    /// `psi(w) = psi1 + rho w (1 - 1/w)^alpha`.
    Wedge { psi1: f64, rho: f64, alpha: f64 },
}

impl SpectralRegion {
    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            SpectralRegion::Interval { a, b } => a.is_finite() && b.is_finite() && a < b,
            SpectralRegion::Ellipse { sigma, tau, rho } => sigma.is_finite() && tau > 0.0 && tau.is_finite() && rho >= 1.0 && rho.is_finite(),
            SpectralRegion::Wedge { psi1, rho, alpha } => psi1.is_finite() && rho > 0.0 && rho.is_finite() && alpha > 1.0 && alpha <= 2.0,
        };
        if ok {
            Ok(())
        } else {
            Err(invalid("spectral region parameters out of range"))
        }
    }

    /// Leftmost real point of the region.
    pub fn omega(&self) -> f64 {
        match *self {
            SpectralRegion::Interval { a, .. } => a,
            SpectralRegion::Ellipse { sigma, tau, rho } => sigma - 0.5 * tau * (rho + 1.0 / rho),
            SpectralRegion::Wedge { psi1, rho, alpha } => psi1 - rho * math::powf(2.0, alpha),
        }
    }

    /// Rightmost real point of the region.
    pub fn rightmost(&self) -> f64 {
        match *self {
            SpectralRegion::Interval { b, .. } => b,
            SpectralRegion::Ellipse { sigma, tau, rho } => sigma + 0.5 * tau * (rho + 1.0 / rho),
            SpectralRegion::Wedge { psi1, .. } => psi1,
        }
    }

    /// Logarithmic capacity.
    pub fn capacity(&self) -> f64 {
        match *self {
            SpectralRegion::Interval { a, b } => 0.25 * (b - a),
            SpectralRegion::Ellipse { tau, rho, .. } => 0.5 * tau * rho,
            SpectralRegion::Wedge { rho, .. } => rho,
        }
    }
}

const BOUNDARY_TOL: f64 = 1e-12;

/// `|phi(z)|` for the exterior conformal map `phi` of `region`, normalized so
/// that `phi(inf) = inf` and the boundary maps to the unit circle.
pub fn phi_abs(region: &SpectralRegion, z: C64) -> Result<f64> {
    region.validate()?;
    if !z.is_finite() {
        return Err(invalid("point must be finite"));
    }
    let r = match *region {
        SpectralRegion::Interval { a, b } => joukowski_inverse_abs((z - 0.5 * (a + b)) / (0.5 * (b - a))),
        SpectralRegion::Ellipse { sigma, tau, rho } => joukowski_inverse_abs((z - sigma) / tau) / rho,
        SpectralRegion::Wedge { psi1, rho, alpha } => wedge_inverse(psi1, rho, alpha, z)?.norm(),
    };
    if r < 1.0 - BOUNDARY_TOL {
        return Err(Error::InsideRegion);
    }
    Ok(r.max(1.0))
}

/// `|zeta + sqrt(zeta^2 - 1)|` on the branch of modulus at least one.
fn joukowski_inverse_abs(zeta: C64) -> f64 {
    let s = (zeta * zeta - 1.0).sqrt();
    let r1 = (zeta + s).norm();
    let r2 = (zeta - s).norm();
    r1.max(r2)
}

/// Solves `psi(w) = z` for `|w| > 1` by damped Newton.
fn wedge_inverse(psi1: f64, rho: f64, alpha: f64, z: C64) -> Result<C64> {
    let psi = |w: C64| -> C64 { w * (C64::new(1.0, 0.0) - w.inv()).powf(alpha) * rho + psi1 };
    let dpsi = |w: C64| -> C64 {
        let u = C64::new(1.0, 0.0) - w.inv();
        u.powf(alpha - 1.0) * (u + w.inv() * alpha) * rho
    };
    let target = z;
    let scale = 1.0 + target.norm() + rho;
    let mut w = (target - psi1) / rho + alpha;
    if w.norm() <= 1.0 {
        w = w / w.norm() * 1.5;
        if !w.is_finite() {
            w = C64::new(-1.5, 0.0);
        }
    }
    for _ in 0..200 {
        let res = psi(w) - target;
        if res.norm() <= 1e-15 * scale {
            break;
        }
        let step = res / dpsi(w);
        let mut t = 1.0;
        let mut next = w - step * t;
        // keep the iterate in the exterior and reduce the residual
        let mut tries = 0;
        while (next.norm() <= 1.0 || (psi(next) - target).norm() > res.norm()) && tries < 40 {
            t *= 0.5;
            next = w - step * t;
            tries += 1;
        }
        if tries == 40 {
            break;
        }
        if (next - w).norm() <= 1e-16 * w.norm() {
            w = next;
            break;
        }
        w = next;
    }
    let res = (psi(w) - target).norm();
    if res > 1e-8 * scale || !w.is_finite() {
        // no exterior preimage: the point lies in the region
        return Err(Error::InsideRegion);
    }
    Ok(w)
}

/// Full bound together with its constant-free rate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpBound {
    pub bound: f64,
    pub rate: f64,
}

/// Superlinear bound for `f = exp` on a convex, real-symmetric region with
/// rightmost point `psi1` and capacity `rho`. Applies for `m + 1 >= e rho`.
pub fn bound_exp_superlinear(psi1: f64, rho: f64, m: usize, b_norm: f64, c_norm: f64) -> Option<ExpBound> {
    if !(rho > 0.0) || !psi1.is_finite() {
        return None;
    }
    let mp1 = (m + 1) as f64;
    if mp1 < E * rho {
        return None;
    }
    let log_rate = psi1 + mp1 * (math::ln(rho) + 1.0 - math::ln(mp1));
    let rate = math::exp(log_rate);
    let norms = b_norm * c_norm;
    let bound = if norms == 0.0 {
        0.0
    } else {
        math::exp(math::ln(672.0) - math::ln(rho) + log_rate + math::ln(norms))
    };
    Some(ExpBound { bound, rate })
}

/// Bound for `f = exp` on a wedge-like region, valid when
/// `m + 1 - 4/alpha` lies in `[alpha rho^(1/alpha), alpha rho]`.
///
/// The exponent divisor is `alpha rho^(1/alpha)` as stated with the result;
/// the derivation carries an extra factor 2 there.
pub fn bound_exp_wedge(region: &SpectralRegion, m: usize, b_norm: f64, c_norm: f64) -> Option<ExpBound> {
    let SpectralRegion::Wedge { psi1, rho, alpha } = *region else {
        return None;
    };
    region.validate().ok()?;
    let root = math::powf(rho, 1.0 / alpha);
    let shifted = (m + 1) as f64 - 4.0 / alpha;
    if shifted < alpha * root || shifted > alpha * rho {
        return None;
    }
    let log_rate = psi1 - (alpha - 1.0) * math::powf(shifted / (alpha * root), alpha / (alpha - 1.0));
    let rate = math::exp(log_rate);
    let norms = b_norm * c_norm;
    let bound = if norms == 0.0 {
        0.0
    } else {
        math::exp(4.0 * math::ln(4.0 * root) - math::ln(rho) + log_rate + math::ln(norms))
    };
    Some(ExpBound { bound, rate })
}

/// Convergence factor `1 / |phi(beta)|` for a Markov function whose measure
/// is supported left of `beta`.
pub fn markov_rate(region: &SpectralRegion, beta_hi: f64) -> Result<f64> {
    region.validate()?;
    if !(beta_hi < region.omega()) {
        return Err(invalid("beta must lie strictly left of the region"));
    }
    Ok(1.0 / phi_abs(region, C64::new(beta_hi, 0.0))?)
}

/// `8 |f'(omega)| ||b|| ||c|| |phi(beta)|^-m` for a Markov function.
pub fn bound_markov(
    region: &SpectralRegion,
    beta_hi: f64,
    f_prime_omega: f64,
    m: usize,
    b_norm: f64,
    c_norm: f64,
) -> Result<f64> {
    let rate = markov_rate(region, beta_hi)?;
    Ok(8.0 * math::abs(f_prime_omega) * b_norm * c_norm * powu(rate, m))
}

/// `(sqrt(k) - 1) / (sqrt(k) + 1)`
pub fn cg_rate(kappa: f64) -> f64 {
    let s = math::sqrt(kappa);
    (s - 1.0) / (s + 1.0)
}

/// Hermitian positive definite specialization with
/// `kappa_star = lmax(A + bb*) / lmin(A)`. `f_prime` is `|f'(lmin(A))|`.
pub fn bound_markov_hpd(kappa_star: f64, f_prime: f64, b_norm: f64, m: usize) -> Result<f64> {
    if !(kappa_star >= 1.0) || !kappa_star.is_finite() {
        return Err(invalid("kappa_star must be a finite number >= 1"));
    }
    Ok(8.0 * math::abs(f_prime) * b_norm * b_norm * powu(cg_rate(kappa_star), m))
}

fn powu(x: f64, m: usize) -> f64 {
    if m > i32::MAX as usize {
        if x.abs() < 1.0 {
            0.0
        } else {
            f64::INFINITY
        }
    } else {
        math::powi(x, m as i32)
    }
}

/// Four times the sampled sup-norm error of the degree-`m` Chebyshev
/// interpolant of `f` on `[a, b]`, a computable surrogate for four times the
/// best polynomial approximation error.
pub fn chebyshev_poly_bound(f: &FunctionSpec, interval: (f64, f64), m: usize) -> Result<f64> {
    let (a, b) = interval;
    if !(a < b) || !a.is_finite() || !b.is_finite() {
        return Err(invalid("interval must satisfy a < b"));
    }
    f.validate()?;
    if let FunctionSpec::Polynomial(c) = f {
        // the interpolant reproduces the polynomial itself
        if c.iter().rposition(|&x| x != 0.0).is_none_or(|deg| deg <= m) {
            return Ok(0.0);
        }
    }
    let eval = |t: f64| -> Result<f64> {
        let x = 0.5 * (a + b) + 0.5 * (b - a) * t;
        Ok(f.eval(C64::new(x, 0.0))?.re)
    };

    // interpolation at the m + 1 Chebyshev points of the first kind
    let n = m + 1;
    let nodes: Vec<f64> = (0..n).map(|k| math::cos(PI * (k as f64 + 0.5) / n as f64)).collect();
    let values = nodes.iter().map(|&t| eval(t)).collect::<Result<Vec<_>>>()?;
    let coeffs: Vec<f64> = (0..n)
        .map(|j| {
            let s: f64 = values
                .iter()
                .enumerate()
                .map(|(k, v)| v * math::cos(PI * j as f64 * (k as f64 + 0.5) / n as f64))
                .sum();
            s * if j == 0 { 1.0 } else { 2.0 } / n as f64
        })
        .collect();

    let samples = 10 * n;
    let mut err: f64 = 0.0;
    for i in 0..samples {
        let t = if samples == 1 {
            1.0
        } else {
            math::cos(PI * i as f64 / (samples - 1) as f64)
        };
        err = err.max(math::abs(eval(t)? - clenshaw(&coeffs, t)));
    }
    Ok(4.0 * err)
}

fn clenshaw(c: &[f64], t: f64) -> f64 {
    let (mut b1, mut b2) = (0.0, 0.0);
    for &ck in c.iter().skip(1).rev() {
        let b0 = 2.0 * t * b1 - b2 + ck;
        b2 = b1;
        b1 = b0;
    }
    t * b1 - b2 + c[0]
}

/// Supporting points of the field of values by the rotation method: for each
/// of `n_angles` equispaced angles, the top eigenvector `x` of the Hermitian
/// part of `e^{i theta} M` yields the boundary point `x* M x`.
pub fn field_of_values_boundary<T: Scalar>(m: &DenseMatrix<T>, n_angles: usize) -> Result<Vec<C64>> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch {
            expected: m.rows(),
            found: m.cols(),
        });
    }
    if n_angles < 4 {
        return Err(invalid("at least four angles are required"));
    }
    let mc = m.to_complex();
    let n = mc.rows();
    if n == 0 {
        return Ok(Vec::new());
    }
    let mut out = Vec::with_capacity(n_angles);
    for k in 0..n_angles {
        let theta = 2.0 * PI * k as f64 / n_angles as f64;
        let rot = mc.scaled(C64::from_polar(1.0, theta));
        let h = rot.hermitian_part();
        let e = eigh(&h)?;
        let x = e.vectors.col(n - 1);
        let mx = mc.matvec(x);
        let p: C64 = x.iter().zip(&mx).map(|(xi, yi)| xi.conj() * yi).sum();
        out.push(p);
    }
    Ok(out)
}

/// Spectral data of a Hermitian positive definite `A` feeding the decay
/// bounds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayParams {
    pub lmin: f64,
    pub lmax: f64,
    pub kappa: f64,
    /// Lower bound for `|1 + e_l* (A + tI)^-1 e_k|` over `t >= 0`.
    pub k_min: f64,
    /// `|f'(lmin)|`
    pub f_prime_lmin: f64,
}

impl DecayParams {
    pub fn new(lmin: f64, lmax: f64, k_min: f64, f_prime_lmin: f64) -> Result<Self> {
        let p = DecayParams {
            lmin,
            lmax,
            kappa: lmax / lmin,
            k_min,
            f_prime_lmin: math::abs(f_prime_lmin),
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lmin > 0.0) || !(self.lmax >= self.lmin) || !self.lmax.is_finite() {
            return Err(invalid("decay bounds need 0 < lmin <= lmax"));
        }
        Ok(())
    }

    /// Computes every field from one eigendecomposition of `a` for the
    /// modification `e_k e_l*` and function `f`.
    pub fn from_matrix<T: Scalar>(a: &DenseMatrix<T>, k: usize, l: usize, f: &FunctionSpec) -> Result<Self> {
        let n = a.rows();
        for idx in [k, l] {
            if idx >= n {
                return Err(Error::IndexOutOfRange { index: idx, bound: n });
            }
        }
        if !a.is_hermitian(1e-12) {
            return Err(Error::NotHermitian);
        }
        let e = eigh(a)?;
        let lmin = e.values[0];
        let lmax = e.values[n - 1];
        if !(lmin > 0.0) {
            return Err(invalid("matrix must be positive definite"));
        }
        let weights: Vec<C64> = (0..n)
            .map(|j| (e.vectors[(l, j)] * e.vectors[(k, j)].conj()).to_complex())
            .collect();
        let k_min = resolvent_entry_min(&e.values, &weights);
        let fp = f.derivative(lmin)?;
        DecayParams::new(lmin, lmax, k_min, fp)
    }

    /// `(sqrt(kappa) - 1) / (sqrt(kappa) + 1)`
    pub fn q(&self) -> f64 {
        cg_rate(self.kappa)
    }

    pub fn c_a(&self) -> f64 {
        let s = 1.0 + math::sqrt(self.kappa);
        (1.0 / self.lmin).max(s * s / (2.0 * self.lmax))
    }
}

/// `min_{t >= 0} |1 + e_l* (A + tI)^-1 e_k|` for `A` Hermitian positive
/// definite, evaluated directly.
pub fn resolvent_entry_lower_bound<T: Scalar>(a: &DenseMatrix<T>, k: usize, l: usize) -> Result<f64> {
    let p = DecayParams::from_matrix(a, k, l, &FunctionSpec::Inverse)?;
    Ok(p.k_min)
}

/// Minimizes `|1 + sum_j w_j / (lambda_j + t)|` over a logarithmic grid in
/// `t`, the limit value 1, and a refinement around the best grid point.
fn resolvent_entry_min(values: &[f64], weights: &[C64]) -> f64 {
    let g = |t: f64| -> f64 {
        let s: C64 = values.iter().zip(weights).map(|(l, w)| w / (l + t)).sum();
        (s + 1.0).norm()
    };
    let mut grid = Vec::with_capacity(92);
    grid.push(0.0);
    for i in 0..=90 {
        grid.push(math::powf(10.0, -3.0 + i as f64 / 10.0));
    }
    let (mut best_i, mut best) = (0, g(0.0));
    for (i, &t) in grid.iter().enumerate() {
        let v = g(t);
        if v < best {
            best = v;
            best_i = i;
        }
    }
    if best >= 1.0 {
        return 1.0;
    }
    // golden-section refinement on the bracket around the best grid point
    let mut lo = grid[best_i.saturating_sub(1)];
    let mut hi = if best_i + 1 < grid.len() {
        grid[best_i + 1]
    } else {
        2.0 * grid[best_i]
    };
    let ratio = 0.5 * (math::sqrt(5.0) - 1.0);
    let mut x1 = hi - ratio * (hi - lo);
    let mut x2 = lo + ratio * (hi - lo);
    let (mut f1, mut f2) = (g(x1), g(x2));
    for _ in 0..200 {
        if hi - lo <= 1e-6 * hi.max(1e-12) {
            break;
        }
        if f1 < f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - ratio * (hi - lo);
            f1 = g(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + ratio * (hi - lo);
            f2 = g(x2);
        }
    }
    best.min(f1).min(f2).min(1.0)
}

/// `C_A q_A^dist` bounding `|[A^-1]_ij|` at graph distance `dist`.
pub fn demko_decay(params: &DecayParams, dist: usize) -> Result<f64> {
    params.validate()?;
    Ok(params.c_a() * powu(params.q(), dist))
}

/// `4 |f'(lmin)| / K * q_A^(d_ik + d_lj)` bounding `|F_ij|` for
/// `F = f(A + e_k e_l*) - f(A)` with `f` a Stieltjes function.
pub fn stieltjes_update_decay(params: &DecayParams, d_ik: usize, d_lj: usize) -> Result<f64> {
    params.validate()?;
    if !(params.k_min > 0.0) {
        return Err(invalid("resolvent lower bound K must be positive"));
    }
    Ok(4.0 * params.f_prime_lmin / params.k_min * powu(params.q(), d_ik.saturating_add(d_lj)))
}
