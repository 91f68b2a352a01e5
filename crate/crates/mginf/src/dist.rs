//! Service-time distribution catalog.
//!
//! Five closed-form laws: exponential, deterministic, Erlang, two-branch
//! hyperexponential and uniform. Each member exposes its survival function,
//! the equilibrium (stationary-excess) survival, the first three moments and
//! the reliability-class tags that gate the class-specific bounds.
//!
//! The catalog is closed on purpose: every bound downstream needs closed-form
//! moments and an equilibrium tail that can be evaluated inside a quadrature
//! loop without a nested integral.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::real::Real;

/// Reliability-class membership flags.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ClassTags {
    /// New Better than Used in Expectation.
    pub nbue: bool,
    /// New Worse than Used in Expectation.
    pub nwue: bool,
    /// Increasing Mean Residual Life.
    pub imrl: bool,
    /// Decreasing Failure Rate.
    pub dfr: bool,
    pub exponential: bool,
    pub deterministic: bool,
}

impl ClassTags {
    fn exponential_boundary() -> Self {
        ClassTags {
            nbue: true,
            nwue: true,
            imrl: true,
            dfr: true,
            exponential: true,
            deterministic: false,
        }
    }
}

impl fmt::Display for ClassTags {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut names = Vec::new();
        if self.nbue {
            names.push("NBUE");
        }
        if self.nwue {
            names.push("NWUE");
        }
        if self.imrl {
            names.push("IMRL");
        }
        if self.dfr {
            names.push("DFR");
        }
        if self.exponential {
            names.push("EXPONENTIAL");
        }
        if self.deterministic {
            names.push("DETERMINISTIC");
        }
        write!(f, "{{{}}}", names.join(","))
    }
}

/// First three raw moments plus the squared coefficient of variation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Moments<R> {
    /// Mean service time.
    pub alpha: R,
    /// Second raw moment.
    pub mu2: R,
    /// Third raw moment.
    pub mu3: R,
    /// Squared coefficient of variation, `mu2 / alpha^2 - 1`.
    pub scv: R,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DistError {
    #[error("malformed distribution spec {spec:?}: {reason}")]
    Malformed { spec: String, reason: String },
    #[error("unknown distribution kind {0:?}")]
    UnknownKind(String),
    #[error("parameter {name} must be positive, got {value}")]
    NonPositive { name: &'static str, value: f64 },
    #[error("mixing probability p must lie in (0,1), got {0}")]
    BadMixingProbability(f64),
    #[error("erlang phase count n must be >= 1, got {0}")]
    BadPhaseCount(i64),
    #[error("uniform endpoints require 0 <= a < b, got a={a}, b={b}")]
    BadUniformEndpoints { a: f64, b: f64 },
    #[error("negative time argument {0}")]
    NegativeTime(f64),
}

/// A validated member of the service-time catalog.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ServiceDistribution<R> {
    Exponential { alpha: R },
    Deterministic { alpha: R },
    Erlang { n: u32, alpha: R },
    HyperExp2 { p: R, alpha1: R, alpha2: R },
    Uniform { a: R, b: R },
}

impl<R: Real> ServiceDistribution<R> {
    pub fn exponential(alpha: R) -> Result<Self, DistError> {
        require_positive("alpha", alpha)?;
        Ok(ServiceDistribution::Exponential { alpha })
    }

    pub fn deterministic(alpha: R) -> Result<Self, DistError> {
        require_positive("alpha", alpha)?;
        Ok(ServiceDistribution::Deterministic { alpha })
    }

    pub fn erlang(n: u32, alpha: R) -> Result<Self, DistError> {
        if n < 1 {
            return Err(DistError::BadPhaseCount(n as i64));
        }
        require_positive("alpha", alpha)?;
        Ok(ServiceDistribution::Erlang { n, alpha })
    }

    pub fn hyperexp2(p: R, alpha1: R, alpha2: R) -> Result<Self, DistError> {
        if !(p > R::zero() && p < R::one()) {
            return Err(DistError::BadMixingProbability(p.to_f64().unwrap_or(f64::NAN)));
        }
        require_positive("alpha1", alpha1)?;
        require_positive("alpha2", alpha2)?;
        Ok(ServiceDistribution::HyperExp2 { p, alpha1, alpha2 })
    }

    pub fn uniform(a: R, b: R) -> Result<Self, DistError> {
        if !(a >= R::zero() && a < b) {
            return Err(DistError::BadUniformEndpoints {
                a: a.to_f64().unwrap_or(f64::NAN),
                b: b.to_f64().unwrap_or(f64::NAN),
            });
        }
        Ok(ServiceDistribution::Uniform { a, b })
    }

    /// Mean service time.
    pub fn mean(&self) -> R {
        match *self {
            ServiceDistribution::Exponential { alpha }
            | ServiceDistribution::Deterministic { alpha }
            | ServiceDistribution::Erlang { alpha, .. } => alpha,
            ServiceDistribution::HyperExp2 { p, alpha1, alpha2 } => {
                p * alpha1 + (R::one() - p) * alpha2
            }
            ServiceDistribution::Uniform { a, b } => R::of(0.5) * (a + b),
        }
    }

    /// End of the support when finite, `None` otherwise.
    pub fn support_end(&self) -> Option<R> {
        match *self {
            ServiceDistribution::Deterministic { alpha } => Some(alpha),
            ServiceDistribution::Uniform { b, .. } => Some(b),
            _ => None,
        }
    }

    /// Survival function `1 - G(x)`.
    pub fn survival(&self, x: R) -> Result<R, DistError> {
        if x < R::zero() {
            return Err(DistError::NegativeTime(x.to_f64().unwrap_or(f64::NAN)));
        }
        Ok(match *self {
            ServiceDistribution::Exponential { alpha } => (-x / alpha).exp(),
            ServiceDistribution::Deterministic { alpha } => {
                if x < alpha {
                    R::one()
                } else {
                    R::zero()
                }
            }
            ServiceDistribution::Erlang { n, alpha } => {
                let rate = R::of_u32(n) / alpha;
                poisson_tail_sum(rate * x, n)
            }
            ServiceDistribution::HyperExp2 { p, alpha1, alpha2 } => {
                p * (-x / alpha1).exp() + (R::one() - p) * (-x / alpha2).exp()
            }
            ServiceDistribution::Uniform { a, b } => {
                if x < a {
                    R::one()
                } else if x < b {
                    (b - x) / (b - a)
                } else {
                    R::zero()
                }
            }
        })
    }

    /// Equilibrium survival `T(t) = (1/alpha) * int_t^inf S(x) dx`, closed form.
    pub fn equilibrium_survival(&self, t: R) -> Result<R, DistError> {
        if t < R::zero() {
            return Err(DistError::NegativeTime(t.to_f64().unwrap_or(f64::NAN)));
        }
        let raw = match *self {
            ServiceDistribution::Exponential { alpha } => (-t / alpha).exp(),
            ServiceDistribution::Deterministic { alpha } => {
                (R::one() - t / alpha).max(R::zero())
            }
            ServiceDistribution::Erlang { n, alpha } => {
                // T(t) = sum_{j<n} (n-j)/n * e^{-rt} (rt)^j / j!, r = n/alpha.
                let rate = R::of_u32(n) / alpha;
                let u = rate * t;
                let e = (-u).exp();
                let mut term = e;
                let mut acc = R::zero();
                for j in 0..n {
                    acc = acc + term * R::of_u32(n - j) / R::of_u32(n);
                    term = term * u / R::of_u32(j + 1);
                }
                acc
            }
            ServiceDistribution::HyperExp2 { p, alpha1, alpha2 } => {
                let alpha = p * alpha1 + (R::one() - p) * alpha2;
                (p * alpha1 * (-t / alpha1).exp() + (R::one() - p) * alpha2 * (-t / alpha2).exp())
                    / alpha
            }
            ServiceDistribution::Uniform { a, b } => {
                let alpha = R::of(0.5) * (a + b);
                let two = R::of(2.0);
                if t < a {
                    ((a - t) + (b - a) / two) / alpha
                } else if t < b {
                    (b - t) * (b - t) / (two * (b - a) * alpha)
                } else {
                    R::zero()
                }
            }
        };
        // Rounding can push the uniform branch a ulp above 1 at t = 0.
        Ok(raw.min(R::one()))
    }

    /// Closed-form raw moments and squared coefficient of variation.
    pub fn moments(&self) -> Moments<R> {
        let (alpha, mu2, mu3) = match *self {
            ServiceDistribution::Exponential { alpha } => {
                (alpha, R::of(2.0) * alpha * alpha, R::of(6.0) * alpha * alpha * alpha)
            }
            ServiceDistribution::Deterministic { alpha } => {
                (alpha, alpha * alpha, alpha * alpha * alpha)
            }
            ServiceDistribution::Erlang { n, alpha } => {
                let nf = R::of_u32(n);
                let mu2 = alpha * alpha * (nf + R::one()) / nf;
                let mu3 = alpha * alpha * alpha * (nf + R::one()) * (nf + R::of(2.0)) / (nf * nf);
                (alpha, mu2, mu3)
            }
            ServiceDistribution::HyperExp2 { p, alpha1, alpha2 } => {
                let q = R::one() - p;
                let alpha = p * alpha1 + q * alpha2;
                let mu2 = R::of(2.0) * (p * alpha1 * alpha1 + q * alpha2 * alpha2);
                let mu3 = R::of(6.0)
                    * (p * alpha1 * alpha1 * alpha1 + q * alpha2 * alpha2 * alpha2);
                (alpha, mu2, mu3)
            }
            ServiceDistribution::Uniform { a, b } => {
                let alpha = R::of(0.5) * (a + b);
                let mu2 = (a * a + a * b + b * b) / R::of(3.0);
                // (b^4 - a^4) / (4 (b - a))
                let mu3 = (a * a * a + a * a * b + a * b * b + b * b * b) / R::of(4.0);
                (alpha, mu2, mu3)
            }
        };
        Moments {
            alpha,
            mu2,
            mu3,
            scv: mu2 / (alpha * alpha) - R::one(),
        }
    }

    /// Squared coefficient of variation of the service time.
    pub fn scv(&self) -> R {
        self.moments().scv
    }

    /// Reliability-class tags; static per (kind, parameters).
    pub fn class_tags(&self) -> ClassTags {
        match *self {
            ServiceDistribution::Exponential { .. } => ClassTags::exponential_boundary(),
            ServiceDistribution::Deterministic { .. } => ClassTags {
                nbue: true,
                deterministic: true,
                ..ClassTags::default()
            },
            // Erlang(1) is exponential.
            ServiceDistribution::Erlang { n: 1, .. } => ClassTags::exponential_boundary(),
            ServiceDistribution::Erlang { .. } => ClassTags {
                nbue: true,
                ..ClassTags::default()
            },
            ServiceDistribution::HyperExp2 { alpha1, alpha2, .. } => {
                if alpha1 == alpha2 {
                    // Degenerate mixture collapses to exponential.
                    ClassTags::exponential_boundary()
                } else {
                    ClassTags {
                        nwue: true,
                        imrl: true,
                        dfr: true,
                        ..ClassTags::default()
                    }
                }
            }
            ServiceDistribution::Uniform { .. } => ClassTags {
                nbue: true,
                ..ClassTags::default()
            },
        }
    }
}

fn require_positive<R: Real>(name: &'static str, value: R) -> Result<(), DistError> {
    if value > R::zero() && value.is_finite() {
        Ok(())
    } else {
        Err(DistError::NonPositive {
            name,
            value: value.to_f64().unwrap_or(f64::NAN),
        })
    }
}

/// e^{-u} * sum_{i<n} u^i / i!  (Erlang survival).
fn poisson_tail_sum<R: Real>(u: R, n: u32) -> R {
    let e = (-u).exp();
    let mut term = e;
    let mut acc = R::zero();
    for i in 0..n {
        acc = acc + term;
        term = term * u / R::of_u32(i + 1);
    }
    acc
}

impl<R: Real> FromStr for ServiceDistribution<R> {
    type Err = DistError;

    /// Grammar: `exp:alpha=A | det:alpha=A | erlang:n=N,alpha=A |
    /// hyperexp2:p=P,alpha1=A1,alpha2=A2 | uniform:a=A,b=B`.
    fn from_str(text: &str) -> Result<Self, DistError> {
        let malformed = |reason: &str| DistError::Malformed {
            spec: text.to_string(),
            reason: reason.to_string(),
        };
        let (kind, rest) = text
            .split_once(':')
            .ok_or_else(|| malformed("missing ':' separator"))?;

        let mut pairs = Vec::new();
        for item in rest.split(',') {
            let (key, val) = item
                .split_once('=')
                .ok_or_else(|| malformed("expected key=value"))?;
            pairs.push((key, val));
        }
        let get = |name: &str| -> Result<f64, DistError> {
            let raw = pairs
                .iter()
                .find(|(k, _)| *k == name)
                .map(|(_, v)| *v)
                .ok_or_else(|| malformed(&format!("missing parameter {name:?}")))?;
            raw.parse::<f64>()
                .map_err(|_| malformed(&format!("parameter {name:?} is not a number")))
        };
        let expect_keys = |names: &[&str]| -> Result<(), DistError> {
            if pairs.len() != names.len() || pairs.iter().any(|(k, _)| !names.contains(k)) {
                return Err(malformed(&format!("expected parameters {names:?}")));
            }
            Ok(())
        };

        match kind {
            "exp" => {
                expect_keys(&["alpha"])?;
                ServiceDistribution::exponential(R::of(get("alpha")?))
            }
            "det" => {
                expect_keys(&["alpha"])?;
                ServiceDistribution::deterministic(R::of(get("alpha")?))
            }
            "erlang" => {
                expect_keys(&["n", "alpha"])?;
                let n = get("n")?;
                if n.fract() != 0.0 || n < 1.0 || n > u32::MAX as f64 {
                    return Err(DistError::BadPhaseCount(n as i64));
                }
                ServiceDistribution::erlang(n as u32, R::of(get("alpha")?))
            }
            "hyperexp2" => {
                expect_keys(&["p", "alpha1", "alpha2"])?;
                ServiceDistribution::hyperexp2(
                    R::of(get("p")?),
                    R::of(get("alpha1")?),
                    R::of(get("alpha2")?),
                )
            }
            "uniform" => {
                expect_keys(&["a", "b"])?;
                ServiceDistribution::uniform(R::of(get("a")?), R::of(get("b")?))
            }
            other => Err(DistError::UnknownKind(other.to_string())),
        }
    }
}

impl<R: Real> fmt::Display for ServiceDistribution<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            ServiceDistribution::Exponential { alpha } => write!(f, "exp:alpha={alpha}"),
            ServiceDistribution::Deterministic { alpha } => write!(f, "det:alpha={alpha}"),
            ServiceDistribution::Erlang { n, alpha } => write!(f, "erlang:n={n},alpha={alpha}"),
            ServiceDistribution::HyperExp2 { p, alpha1, alpha2 } => {
                write!(f, "hyperexp2:p={p},alpha1={alpha1},alpha2={alpha2}")
            }
            ServiceDistribution::Uniform { a, b } => write!(f, "uniform:a={a},b={b}"),
        }
    }
}
