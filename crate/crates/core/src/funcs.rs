//! Scalar functions `f` and their evaluation on small dense matrices.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::dense::DenseMatrix;
use crate::eig::eig;
use crate::eigh::eigh;
use crate::error::{invalid, Error, Result};
use crate::expm::expm;
use crate::scalar::{math, Scalar, C64};

/// Eigenvector condition estimates above this reject the diagonalization path.
pub const CONDITION_GUARD: f64 = 1e8;

/// Relative tolerance under which a matrix is treated as Hermitian.
const HERMITIAN_TOL: f64 = 1e-13;

#[derive(Debug, Clone, PartialEq)]
pub enum FunctionSpec {
    Exp,
    /// `z^{-1/2}`
    InvSqrt,
    /// `z^{-1}`
    Inverse,
    /// `z^{-gamma}` with `gamma` in `(0, 1)`
    InvPower(f64),
    /// `log(1 + z) / z`
    Log1pOverZ,
    /// Coefficients in increasing degree.
    Polynomial(Vec<f64>),
    /// `1 / (z - s)`
    Resolvent(f64),
}

impl FunctionSpec {
    pub fn inv_power(gamma: f64) -> Result<Self> {
        let f = FunctionSpec::InvPower(gamma);
        f.validate()?;
        Ok(f)
    }

    pub fn polynomial(coeffs: Vec<f64>) -> Result<Self> {
        let f = FunctionSpec::Polynomial(coeffs);
        f.validate()?;
        Ok(f)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            FunctionSpec::InvPower(g) if !(*g > 0.0 && *g < 1.0) => {
                Err(invalid("inverse power exponent must lie in (0, 1)"))
            }
            FunctionSpec::Polynomial(c) if c.iter().any(|v| !v.is_finite()) => {
                Err(invalid("polynomial coefficients must be finite"))
            }
            FunctionSpec::Resolvent(s) if !s.is_finite() => Err(invalid("resolvent shift must be finite")),
            _ => Ok(()),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            FunctionSpec::Exp => "exp",
            FunctionSpec::InvSqrt => "invsqrt",
            FunctionSpec::Inverse => "inverse",
            FunctionSpec::InvPower(_) => "invpow",
            FunctionSpec::Log1pOverZ => "log1p-over-z",
            FunctionSpec::Polynomial(_) => "poly",
            FunctionSpec::Resolvent(_) => "resolvent",
        }
    }

    /// Support `[lo, hi]` of the measure when `f` is a Markov function
    /// (`lo` may be `-inf`).
    pub fn markov_support(&self) -> Option<(f64, f64)> {
        match self {
            FunctionSpec::InvSqrt | FunctionSpec::InvPower(_) => Some((f64::NEG_INFINITY, 0.0)),
            FunctionSpec::Log1pOverZ => Some((f64::NEG_INFINITY, -1.0)),
            FunctionSpec::Inverse => Some((0.0, 0.0)),
            FunctionSpec::Resolvent(s) => Some((*s, *s)),
            _ => None,
        }
    }

    /// Whether `z` lies on a branch cut or singularity of `f`.
    fn on_cut(&self, z: C64) -> bool {
        let near_real = |w: C64| math::abs(w.im) <= 1e-14 * w.norm().max(f64::MIN_POSITIVE);
        match self {
            FunctionSpec::InvSqrt | FunctionSpec::InvPower(_) => z == C64::zero() || (z.re <= 0.0 && near_real(z)),
            FunctionSpec::Log1pOverZ => {
                let w = z + 1.0;
                w == C64::zero() || (w.re <= 0.0 && near_real(w))
            }
            FunctionSpec::Inverse => z == C64::zero(),
            FunctionSpec::Resolvent(s) => z == C64::new(*s, 0.0),
            FunctionSpec::Exp | FunctionSpec::Polynomial(_) => false,
        }
    }

    fn check(&self, z: C64) -> Result<()> {
        if self.on_cut(z) || !z.is_finite() {
            Err(Error::DomainViolation {
                function: self.name(),
                point: z,
            })
        } else {
            Ok(())
        }
    }

    /// `f(z)` on the principal branch.
    pub fn eval(&self, z: C64) -> Result<C64> {
        self.check(z)?;
        Ok(match self {
            FunctionSpec::Exp => z.exp(),
            FunctionSpec::InvSqrt => {
                if z.im == 0.0 {
                    C64::new(1.0 / math::sqrt(z.re), 0.0)
                } else {
                    z.sqrt().inv()
                }
            }
            FunctionSpec::Inverse => z.inv(),
            FunctionSpec::InvPower(g) => {
                if z.im == 0.0 {
                    C64::new(math::powf(z.re, -g), 0.0)
                } else {
                    (z.ln() * -g).exp()
                }
            }
            FunctionSpec::Log1pOverZ => {
                if z.norm() < 1e-3 {
                    // 1 - z/2 + z^2/3 - ...
                    let mut acc = C64::zero();
                    for k in (1..=7).rev() {
                        let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
                        acc = acc * z + C64::new(sign / k as f64, 0.0);
                    }
                    acc
                } else if z.im == 0.0 {
                    C64::new(math::log1p(z.re) / z.re, 0.0)
                } else {
                    (z + 1.0).ln() / z
                }
            }
            FunctionSpec::Polynomial(c) => c.iter().rev().fold(C64::zero(), |acc, &ck| acc * z + ck),
            FunctionSpec::Resolvent(s) => (z - *s).inv(),
        })
    }

    /// Closed-form `f'(x)` at a real point inside the domain.
    pub fn derivative(&self, x: f64) -> Result<f64> {
        let bad = || Error::DomainViolation {
            function: self.name(),
            point: C64::new(x, 0.0),
        };
        if !x.is_finite() || self.on_cut(C64::new(x, 0.0)) {
            return Err(bad());
        }
        Ok(match self {
            FunctionSpec::Exp => math::exp(x),
            FunctionSpec::InvSqrt => -0.5 * math::powf(x, -1.5),
            FunctionSpec::Inverse => -1.0 / (x * x),
            FunctionSpec::InvPower(g) => -g * math::powf(x, -g - 1.0),
            FunctionSpec::Log1pOverZ => {
                if math::abs(x) < 1e-3 {
                    // -1/2 + 2x/3 - 3x^2/4 + ...
                    let mut acc = 0.0;
                    for k in (1..=6).rev() {
                        let sign = if k % 2 == 1 { -1.0 } else { 1.0 };
                        acc = acc * x + sign * k as f64 / (k + 1) as f64;
                    }
                    acc
                } else {
                    (x / (1.0 + x) - math::log1p(x)) / (x * x)
                }
            }
            FunctionSpec::Polynomial(c) => c
                .iter()
                .enumerate()
                .skip(1)
                .rev()
                .fold(0.0, |acc, (k, &ck)| acc * x + k as f64 * ck),
            FunctionSpec::Resolvent(s) => -1.0 / ((x - s) * (x - s)),
        })
    }
}

/// `f'(x)` at a real point.
pub fn scalar_derivative(f: &FunctionSpec, x: f64) -> Result<f64> {
    f.derivative(x)
}

impl fmt::Display for FunctionSpec {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FunctionSpec::InvPower(g) => write!(out, "invpow:{g}"),
            FunctionSpec::Resolvent(s) => write!(out, "resolvent:{s}"),
            FunctionSpec::Polynomial(c) => {
                write!(out, "poly:")?;
                for (k, v) in c.iter().enumerate() {
                    if k > 0 {
                        write!(out, ",")?;
                    }
                    write!(out, "{v}")?;
                }
                Ok(())
            }
            other => write!(out, "{}", other.name()),
        }
    }
}

impl FromStr for FunctionSpec {
    type Err = Error;

    /// Accepts `exp`, `invsqrt`, `inverse`, `invpow:<gamma>`, `log1p-over-z`,
    /// `poly:<c0>,<c1>,...` and `resolvent:<s>`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (head, arg) = match s.split_once(':') {
            Some((h, a)) => (h, Some(a)),
            None => (s, None),
        };
        let num = |t: &str| -> Result<f64> {
            t.trim()
                .parse::<f64>()
                .map_err(|_| Error::InvalidArgument(format!("bad number '{t}' in function spec")))
        };
        let f = match (head, arg) {
            ("exp", None) => FunctionSpec::Exp,
            ("invsqrt", None) => FunctionSpec::InvSqrt,
            ("inverse", None) => FunctionSpec::Inverse,
            ("log1p-over-z", None) => FunctionSpec::Log1pOverZ,
            ("invpow", Some(a)) => FunctionSpec::InvPower(num(a)?),
            ("resolvent", Some(a)) => FunctionSpec::Resolvent(num(a)?),
            ("poly", Some(a)) => FunctionSpec::Polynomial(a.split(',').map(num).collect::<Result<_>>()?),
            _ => return Err(Error::InvalidArgument(String::from("unknown function '") + s + "'")),
        };
        f.validate()?;
        Ok(f)
    }
}

/// `f(M)` for a small dense matrix.
///
/// Hermitian input goes through the eigendecomposition. Otherwise `Exp` uses
/// scaling and squaring, polynomials and (shifted) inverses are formed
/// directly, and the remaining functions diagonalize subject to
/// [`CONDITION_GUARD`], with a Denman–Beavers iteration as the fallback for
/// the inverse square root.
pub fn eval_matrix_function<T: Scalar>(m: &DenseMatrix<T>, f: &FunctionSpec) -> Result<DenseMatrix<T>> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch {
            expected: m.rows(),
            found: m.cols(),
        });
    }
    f.validate()?;
    let n = m.rows();
    if n == 0 {
        return Ok(m.clone());
    }
    if !m.is_finite() {
        return Err(invalid("matrix has non-finite entries"));
    }
    if m.is_hermitian(HERMITIAN_TOL) {
        let e = eigh(&m.hermitian_part())?;
        let mut vals = Vec::with_capacity(n);
        for &l in &e.values {
            vals.push(f.eval(C64::new(l, 0.0))?);
        }
        let mut it = vals.into_iter();
        return Ok(e.apply_fn(|_| T::from_complex(it.next().unwrap())));
    }

    let mc = m.to_complex();
    let out = match f {
        FunctionSpec::Exp => expm(&mc)?,
        FunctionSpec::Polynomial(c) => polyval(&mc, c),
        FunctionSpec::Inverse => mc.inverse().map_err(|_| singular_point(f, C64::zero()))?,
        FunctionSpec::Resolvent(s) => {
            let mut shifted = mc.clone();
            shifted.add_to_diag(C64::new(-s, 0.0));
            shifted.inverse().map_err(|_| singular_point(f, C64::new(*s, 0.0)))?
        }
        _ => {
            let e = eig(&mc)?;
            for &z in &e.values {
                f.check(z)?;
            }
            if e.condition > CONDITION_GUARD {
                if *f == FunctionSpec::InvSqrt {
                    denman_beavers_inv_sqrt(&mc)?
                } else {
                    return Err(Error::IllConditioned {
                        function: f.name(),
                        condition: e.condition,
                    });
                }
            } else {
                let mut err = None;
                let out = e.apply_fn(|z| match f.eval(z) {
                    Ok(v) => v,
                    Err(x) => {
                        err = Some(x);
                        C64::zero()
                    }
                });
                if let Some(x) = err {
                    return Err(x);
                }
                out
            }
        }
    };
    Ok(DenseMatrix::from_complex(&out))
}

fn singular_point(f: &FunctionSpec, z: C64) -> Error {
    Error::DomainViolation {
        function: f.name(),
        point: z,
    }
}

/// Horner evaluation of a polynomial in `m`.
pub fn polyval<T: Scalar>(m: &DenseMatrix<T>, coeffs: &[f64]) -> DenseMatrix<T> {
    let n = m.rows();
    let mut acc = DenseMatrix::<T>::zeros(n, n);
    for &c in coeffs.iter().rev() {
        acc = acc.matmul(m);
        acc.add_to_diag(T::from_real(c));
    }
    acc
}

/// `M^{-1/2}` by the product-form Denman–Beavers iteration with determinant
/// scaling.
pub fn denman_beavers_inv_sqrt(m: &DenseMatrix<C64>) -> Result<DenseMatrix<C64>> {
    let n = m.rows();
    let mut y = m.clone();
    let mut z = DenseMatrix::<C64>::identity(n);
    let mut scaling = true;
    for _ in 0..100 {
        let ly = y.lu().map_err(|_| Error::NoConvergence("Denman-Beavers"))?;
        let lz = z.lu().map_err(|_| Error::NoConvergence("Denman-Beavers"))?;
        let mu = if scaling {
            math::exp(-(ly.log_abs_det() + lz.log_abs_det()) / (2.0 * n as f64))
        } else {
            1.0
        };
        let yi = ly.inverse()?;
        let zi = lz.inverse()?;
        let mut y_next = y.scaled(C64::new(0.5 * mu, 0.0));
        y_next.add_scaled(C64::new(0.5 / mu, 0.0), &zi);
        let mut z_next = z.scaled(C64::new(0.5 * mu, 0.0));
        z_next.add_scaled(C64::new(0.5 / mu, 0.0), &yi);
        let change = z_next.sub(&z).norm_fro() / z_next.norm_fro().max(f64::MIN_POSITIVE);
        y = y_next;
        z = z_next;
        if change < 1e-2 {
            scaling = false;
        }
        if change <= 10.0 * n as f64 * f64::EPSILON {
            return Ok(z);
        }
    }
    Err(Error::NoConvergence("Denman-Beavers"))
}
