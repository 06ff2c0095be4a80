//! JSON descriptions of bound evaluations and their `(m, bound, rate)` rows.
//!
//! ```json
//! {"kind": "markov_hpd", "kappa": 101, "f_prime": 50, "m": [1, 60]}
//! {"kind": "exp_wedge", "region": {"type": "wedge", "psi1": 0, "rho": 101, "alpha": 1.5}, "m": [1, 200]}
//! ```

use lrup_core::bounds::{
    bound_exp_superlinear, bound_exp_wedge, bound_markov, bound_markov_hpd, cg_rate, chebyshev_poly_bound, markov_rate,
};
use lrup_core::{FunctionSpec, SpectralRegion};
use serde::Deserialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum RegionSpec {
    Interval { a: f64, b: f64 },
    Ellipse { sigma: f64, tau: f64, rho: f64 },
    Wedge { psi1: f64, rho: f64, alpha: f64 },
}

impl From<RegionSpec> for SpectralRegion {
    fn from(r: RegionSpec) -> Self {
        match r {
            RegionSpec::Interval { a, b } => SpectralRegion::Interval { a, b },
            RegionSpec::Ellipse { sigma, tau, rho } => SpectralRegion::Ellipse { sigma, tau, rho },
            RegionSpec::Wedge { psi1, rho, alpha } => SpectralRegion::Wedge { psi1, rho, alpha },
        }
    }
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum BoundSpec {
    ExpSuperlinear {
        psi1: f64,
        rho: f64,
        #[serde(default = "one")]
        b_norm: f64,
        #[serde(default = "one")]
        c_norm: f64,
        m: [usize; 2],
    },
    ExpWedge {
        region: RegionSpec,
        #[serde(default = "one")]
        b_norm: f64,
        #[serde(default = "one")]
        c_norm: f64,
        m: [usize; 2],
    },
    Markov {
        region: RegionSpec,
        /// Right end of the support of the measure.
        beta: f64,
        /// `|f'|` at the leftmost point of the region.
        f_prime: f64,
        #[serde(default = "one")]
        b_norm: f64,
        #[serde(default = "one")]
        c_norm: f64,
        m: [usize; 2],
    },
    MarkovHpd {
        kappa: f64,
        /// `|f'(lmin(A))|`
        f_prime: f64,
        #[serde(default = "one")]
        b_norm: f64,
        m: [usize; 2],
    },
    Chebyshev {
        function: String,
        interval: [f64; 2],
        m: [usize; 2],
    },
}

/// One output row; `None` marks a bound that does not apply at this `m`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundRow {
    pub m: usize,
    pub bound: Option<f64>,
    pub rate: Option<f64>,
}

impl BoundSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    fn m_range(&self) -> [usize; 2] {
        match self {
            BoundSpec::ExpSuperlinear { m, .. }
            | BoundSpec::ExpWedge { m, .. }
            | BoundSpec::Markov { m, .. }
            | BoundSpec::MarkovHpd { m, .. }
            | BoundSpec::Chebyshev { m, .. } => *m,
        }
    }

    /// Evaluates every `m` in the inclusive range.
    pub fn evaluate(&self) -> Result<Vec<BoundRow>> {
        let [lo, hi] = self.m_range();
        if lo > hi {
            return Err(Error::Usage(format!("empty m range [{lo}, {hi}]")));
        }
        let mut rows = Vec::with_capacity(hi - lo + 1);
        match self {
            BoundSpec::ExpSuperlinear {
                psi1,
                rho,
                b_norm,
                c_norm,
                ..
            } => {
                for m in lo..=hi {
                    let b = bound_exp_superlinear(*psi1, *rho, m, *b_norm, *c_norm);
                    rows.push(BoundRow {
                        m,
                        bound: b.map(|b| b.bound),
                        rate: b.map(|b| b.rate),
                    });
                }
            }
            BoundSpec::ExpWedge {
                region, b_norm, c_norm, ..
            } => {
                let region = SpectralRegion::from(*region);
                if !matches!(region, SpectralRegion::Wedge { .. }) {
                    return Err(Error::Usage("exp_wedge needs a wedge region".into()));
                }
                region.validate()?;
                for m in lo..=hi {
                    let b = bound_exp_wedge(&region, m, *b_norm, *c_norm);
                    rows.push(BoundRow {
                        m,
                        bound: b.map(|b| b.bound),
                        rate: b.map(|b| b.rate),
                    });
                }
            }
            BoundSpec::Markov {
                region,
                beta,
                f_prime,
                b_norm,
                c_norm,
                ..
            } => {
                let region = SpectralRegion::from(*region);
                let q = markov_rate(&region, *beta)?;
                for m in lo..=hi {
                    rows.push(BoundRow {
                        m,
                        bound: Some(bound_markov(&region, *beta, *f_prime, m, *b_norm, *c_norm)?),
                        rate: Some(q.powi(m as i32)),
                    });
                }
            }
            BoundSpec::MarkovHpd {
                kappa, f_prime, b_norm, ..
            } => {
                for m in lo..=hi {
                    rows.push(BoundRow {
                        m,
                        bound: Some(bound_markov_hpd(*kappa, *f_prime, *b_norm, m)?),
                        rate: Some(cg_rate(*kappa).powi(m as i32)),
                    });
                }
            }
            BoundSpec::Chebyshev { function, interval, .. } => {
                let f: FunctionSpec = function.parse()?;
                for m in lo..=hi {
                    rows.push(BoundRow {
                        m,
                        bound: Some(chebyshev_poly_bound(&f, (interval[0], interval[1]), m)?),
                        rate: None,
                    });
                }
            }
        }
        Ok(rows)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hpd_rows_are_geometric() {
        let spec = BoundSpec::from_json(r#"{"kind": "markov_hpd", "kappa": 101, "f_prime": 1, "m": [1, 60]}"#).unwrap();
        let rows = spec.evaluate().unwrap();
        assert_eq!(rows.len(), 60);
        for w in rows.windows(2) {
            let ratio = w[1].bound.unwrap() / w[0].bound.unwrap();
            assert!((ratio - 0.819002).abs() < 1e-6);
        }
    }

    #[test]
    fn wedge_outside_window_is_marked() {
        let spec = BoundSpec::from_json(
            r#"{"kind": "exp_wedge", "region": {"type": "wedge", "psi1": 0, "rho": 101, "alpha": 1.5}, "m": [1, 5]}"#,
        )
        .unwrap();
        assert!(spec.evaluate().unwrap().iter().all(|r| r.bound.is_none() && r.rate.is_none()));
    }

    #[test]
    fn chebyshev_of_low_degree_polynomial_is_zero() {
        let spec = BoundSpec::from_json(r#"{"kind": "chebyshev", "function": "poly:1,2,3", "interval": [-1, 2], "m": [2, 6]}"#).unwrap();
        assert!(spec.evaluate().unwrap().iter().all(|r| r.bound == Some(0.0)));
    }

    #[test]
    fn rejects_unknown_kind_and_fields() {
        assert!(BoundSpec::from_json(r#"{"kind": "nope", "m": [1, 2]}"#).is_err());
        assert!(BoundSpec::from_json(r#"{"kind": "markov_hpd", "kappa": 2, "f_prime": 1, "m": [1, 2], "x": 0}"#).is_err());
    }
}
