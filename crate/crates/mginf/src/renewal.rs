//! Markov-renewal quantities for the infinite-server queue: state sojourn
//! means and distribution functions, the state-0 recurrence mean, the busy
//! period mean, visit counts per cycle and the constant-service recursion.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dist::{DistError, ServiceDistribution};
use crate::quad::{self, QuadError};
use crate::real::Real;

/// Absolute tolerance for all sojourn-mean quadratures.
const QUAD_ABS_TOL: f64 = 1e-10;
/// Refinement budget per integral.
const QUAD_MAX_EVALS: usize = 1_000_000;
/// Integrand truncation level for the semi-infinite integral.
const TAIL_CUTOFF: f64 = 1e-16;
/// Relative-term threshold for the recurrence series.
const SERIES_REL_TOL: f64 = 1e-12;
/// Hard cap on series terms.
const SERIES_MAX_TERMS: usize = 100_000;
/// Estimated relative error at which the forward recursion is abandoned.
const RECURSION_REL_LIMIT: f64 = 1e-9;

/// Arrival process plus service law.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QueueConfig<R> {
    pub lambda: R,
    pub dist: ServiceDistribution<R>,
}

impl<R: Real> QueueConfig<R> {
    pub fn new(lambda: R, dist: ServiceDistribution<R>) -> Result<Self, RenewalError> {
        if !(lambda > R::zero() && lambda.is_finite()) {
            return Err(RenewalError::BadLambda(lambda.to_f64().unwrap_or(f64::NAN)));
        }
        Ok(QueueConfig { lambda, dist })
    }

    /// Traffic intensity `rho = lambda * alpha`; always derived.
    pub fn rho(&self) -> R {
        self.lambda * self.dist.mean()
    }
}

/// How a sojourn mean was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SojournMethod {
    ClosedFormExponential,
    RecursionDeterministic,
    Quadrature,
}

impl std::fmt::Display for SojournMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            SojournMethod::ClosedFormExponential => "closed_form_exponential",
            SojournMethod::RecursionDeterministic => "recursion_deterministic",
            SojournMethod::Quadrature => "quadrature",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SojournRow<R> {
    pub k: u32,
    pub m: R,
    pub method: SojournMethod,
}

/// State-0 recurrence cycle quantities. `v` and `time_in_state` are indexed
/// from state 1 (element 0 holds the state-1 value) and are empty when only
/// the recurrence mean was requested.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CycleMetrics<R> {
    pub mu0: R,
    pub busy_period_mean: R,
    pub v: Vec<R>,
    pub time_in_state: Vec<R>,
    pub truncation_k: u32,
    pub truncation_error_estimate: R,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RecursionCheck<R> {
    pub k: u32,
    /// `m_{k+1}`.
    pub lhs: R,
    /// `1/lambda - (k+1)/rho * m_k`.
    pub rhs: R,
    pub holds: bool,
    pub slack: R,
}

#[derive(Debug, Error)]
pub enum RenewalError {
    #[error("arrival rate must be positive and finite, got {0}")]
    BadLambda(f64),
    #[error(transparent)]
    Dist(#[from] DistError),
    #[error(transparent)]
    Quadrature(#[from] QuadError),
    #[error("series ratio degenerate at k={k}: lambda*m_k = {lambda_m} too close to 1")]
    DegenerateRatio { k: u32, lambda_m: f64 },
    #[error("recurrence series did not settle within {0} terms")]
    SeriesExhausted(usize),
    #[error("operation requires a deterministic service distribution")]
    NotDeterministic,
}

/// Equilibrium tail raised to the k-th power, via `exp(k log T)` with a
/// guard at `T = 0` so large `k` cannot underflow through repeated products.
fn tail_power<R: Real>(tail: R, k: u32) -> R {
    if k == 0 {
        R::one()
    } else if tail <= R::zero() {
        R::zero()
    } else {
        (R::of_u32(k) * tail.ln()).exp()
    }
}

/// Upper integration limit: where `e^{-lambda t} T(t)^k` first drops below
/// the truncation level, or the end of the service support for k >= 1.
fn integration_horizon<R: Real>(cfg: &QueueConfig<R>, k: u32) -> R {
    let lambda = cfg.lambda;
    let cutoff_log = R::of(TAIL_CUTOFF.ln());
    // e^{-lambda t} alone reaches the cutoff here; T <= 1 only shrinks it.
    let t_hi = -cutoff_log / lambda;
    if k == 0 {
        return t_hi;
    }
    if let Some(end) = cfg.dist.support_end() {
        return end.min(t_hi);
    }
    // log integrand is strictly decreasing; bisect for the cutoff point.
    let log_integrand = |t: R| -> R {
        let tail = cfg.dist.equilibrium_survival(t).expect("t >= 0");
        if tail <= R::zero() {
            R::of(f64::NEG_INFINITY)
        } else {
            -lambda * t + R::of_u32(k) * tail.ln()
        }
    };
    let mut lo = R::zero();
    let mut hi = t_hi;
    for _ in 0..80 {
        let mid = R::of(0.5) * (lo + hi);
        if log_integrand(mid) > cutoff_log {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    hi
}

/// Direct quadrature of the sojourn-mean integral
/// `int_0^inf e^{-lambda t} T(t)^k dt`.
fn sojourn_mean_quadrature<R: Real>(cfg: &QueueConfig<R>, k: u32) -> Result<R, RenewalError> {
    let lambda = cfg.lambda;
    let horizon = integration_horizon(cfg, k);
    let result = quad::integrate(
        |t: R| {
            let tail = cfg.dist.equilibrium_survival(t.max(R::zero())).expect("t >= 0");
            (-lambda * t).exp() * tail_power(tail, k)
        },
        R::zero(),
        horizon,
        R::of(QUAD_ABS_TOL),
        QUAD_MAX_EVALS,
    )?;
    Ok(result.value)
}

/// Mean sojourn time in state `k`.
pub fn sojourn_mean<R: Real>(cfg: &QueueConfig<R>, k: u32) -> Result<SojournRow<R>, RenewalError> {
    match cfg.dist {
        ServiceDistribution::Exponential { alpha } => Ok(SojournRow {
            k,
            m: alpha / (R::of_u32(k) + cfg.rho()),
            method: SojournMethod::ClosedFormExponential,
        }),
        ServiceDistribution::Deterministic { .. } => {
            if k == 0 {
                Ok(SojournRow {
                    k,
                    m: cfg.lambda.recip(),
                    method: SojournMethod::RecursionDeterministic,
                })
            } else {
                let rows = det_recursion(cfg, k)?;
                Ok(rows[k as usize - 1])
            }
        }
        _ => {
            let m = if k == 0 {
                cfg.lambda.recip()
            } else {
                sojourn_mean_quadrature(cfg, k)?
            };
            Ok(SojournRow {
                k,
                m,
                method: SojournMethod::Quadrature,
            })
        }
    }
}

/// `m_1 = alpha (rho + e^{-rho} - 1) / rho^2`, series-guarded for small rho.
fn det_m1<R: Real>(alpha: R, rho: R) -> R {
    if rho < R::of(1e-4) {
        // rho + e^{-rho} - 1 = rho^2/2 - rho^3/6 + rho^4/24 - ...
        let poly = R::of(0.5) - rho / R::of(6.0) + rho * rho / R::of(24.0)
            - rho * rho * rho / R::of(120.0);
        alpha * poly
    } else {
        alpha * (rho + (-rho).exp() - R::one()) / (rho * rho)
    }
}

/// Sojourn means for constant service: `m_1` in closed form, then the
/// forward recursion `m_{k+1} = 1/lambda - (k+1)/rho * m_k`. The recursion
/// amplifies rounding by `(k+1)/rho` per step; once the propagated error
/// estimate crosses `RECURSION_REL_LIMIT` the affected and all larger states
/// fall back to direct quadrature of the finite-support integral.
pub fn det_recursion<R: Real>(
    cfg: &QueueConfig<R>,
    k_max: u32,
) -> Result<Vec<SojournRow<R>>, RenewalError> {
    let alpha = match cfg.dist {
        ServiceDistribution::Deterministic { alpha } => alpha,
        _ => return Err(RenewalError::NotDeterministic),
    };
    assert!(k_max >= 1, "det_recursion requires k_max >= 1");
    let lambda = cfg.lambda;
    let rho = cfg.rho();
    let eps = R::of(f64::EPSILON);

    let mut rows = Vec::with_capacity(k_max as usize);
    let mut m = det_m1(alpha, rho);
    let mut err = eps * m;
    let mut unstable = false;
    rows.push(SojournRow {
        k: 1,
        m,
        method: SojournMethod::RecursionDeterministic,
    });

    for k in 2..=k_max {
        if !unstable {
            let factor = R::of_u32(k) / rho;
            let next = lambda.recip() - factor * m;
            err = factor * err + eps / lambda;
            if next <= R::zero() || next > m || err > R::of(RECURSION_REL_LIMIT) * next {
                unstable = true;
            } else {
                m = next;
                rows.push(SojournRow {
                    k,
                    m,
                    method: SojournMethod::RecursionDeterministic,
                });
                continue;
            }
        }
        m = sojourn_mean_quadrature(cfg, k)?;
        rows.push(SojournRow {
            k,
            m,
            method: SojournMethod::Quadrature,
        });
    }
    Ok(rows)
}

/// Sojourn-time distribution function `C_k(t) = 1 - e^{-lambda t} T(t)^k`.
pub fn sojourn_cdf<R: Real>(cfg: &QueueConfig<R>, k: u32, t: R) -> Result<R, RenewalError> {
    if t < R::zero() {
        return Err(DistError::NegativeTime(t.to_f64().unwrap_or(f64::NAN)).into());
    }
    let tail = cfg.dist.equilibrium_survival(t)?;
    Ok(R::one() - (-cfg.lambda * t).exp() * tail_power(tail, k))
}

/// Ratio `lambda m_k / (1 - lambda m_k)` with the degeneracy guard.
fn series_ratio<R: Real>(lambda: R, k: u32, m: R) -> Result<R, RenewalError> {
    let lm = lambda * m;
    if lm >= R::one() - R::of(1e-12) {
        return Err(RenewalError::DegenerateRatio {
            k,
            lambda_m: lm.to_f64().unwrap_or(f64::NAN),
        });
    }
    Ok(lm / (R::one() - lm))
}

/// State-0 mean recurrence time by direct summation of the product series,
/// with a geometric-majorant estimate for the neglected tail.
pub fn recurrence_mean<R: Real>(cfg: &QueueConfig<R>) -> Result<CycleMetrics<R>, RenewalError> {
    let lambda = cfg.lambda;
    let mut sum = R::one();
    let mut term = R::one();
    let mut k = 0u32;
    loop {
        k += 1;
        if k as usize > SERIES_MAX_TERMS {
            return Err(RenewalError::SeriesExhausted(SERIES_MAX_TERMS));
        }
        let m = sojourn_mean(cfg, k)?.m;
        term = term * series_ratio(lambda, k, m)?;
        sum = sum + term;
        if term < R::of(SERIES_REL_TOL) * sum {
            break;
        }
    }
    // Tail majorant: the next ratio bounds all subsequent ratios since m_k
    // is nonincreasing, so the tail is at most term * r/(1-r).
    let next_m = sojourn_mean(cfg, k + 1)?.m;
    let next_ratio = series_ratio(lambda, k + 1, next_m)?;
    let tail = if next_ratio < R::one() {
        term * next_ratio / (R::one() - next_ratio)
    } else {
        R::of(f64::INFINITY)
    };

    let mu0 = sum / lambda;
    Ok(CycleMetrics {
        mu0,
        busy_period_mean: mu0 - lambda.recip(),
        v: Vec::new(),
        time_in_state: Vec::new(),
        truncation_k: k,
        truncation_error_estimate: tail / lambda,
    })
}

/// Mean number of entries in each state per state-0 cycle,
/// `v_k = lambda^{k-1} (m_1...m_{k-1}) / ((1-lambda m_1)...(1-lambda m_k))`,
/// together with the per-cycle time in state `m_k v_k`.
pub fn entries_mean<R: Real>(
    cfg: &QueueConfig<R>,
    k_max: u32,
) -> Result<CycleMetrics<R>, RenewalError> {
    assert!(k_max >= 1, "entries_mean requires k_max >= 1");
    let lambda = cfg.lambda;
    let base = recurrence_mean(cfg)?;

    let mut v = Vec::with_capacity(k_max as usize);
    let mut time_in_state = Vec::with_capacity(k_max as usize);
    let mut prev_m = R::zero();
    let mut value = R::one();
    for k in 1..=k_max {
        let m = sojourn_mean(cfg, k)?.m;
        let lm = lambda * m;
        if lm >= R::one() - R::of(1e-12) {
            return Err(RenewalError::DegenerateRatio {
                k,
                lambda_m: lm.to_f64().unwrap_or(f64::NAN),
            });
        }
        value = if k == 1 {
            (R::one() - lm).recip()
        } else {
            value * (lambda * prev_m) / (R::one() - lm)
        };
        v.push(value);
        time_in_state.push(m * value);
        prev_m = m;
    }

    Ok(CycleMetrics {
        v,
        time_in_state,
        ..base
    })
}

/// Alternative visit-count form
/// `lambda^{k-1} (m_1...m_k) / ((1-m_1)...(1-m_k))`, with bare `m_i` in the
/// denominator. Dimensionally inconsistent (breaks under a change of time
/// unit); kept as a diagnostic for comparison only, never used downstream.
pub fn entries_mean_literal_printed<R: Real>(
    cfg: &QueueConfig<R>,
    k_max: u32,
) -> Result<Vec<R>, RenewalError> {
    assert!(k_max >= 1);
    let lambda = cfg.lambda;
    let mut out = Vec::with_capacity(k_max as usize);
    let mut num = R::one();
    let mut den = R::one();
    for k in 1..=k_max {
        let m = sojourn_mean(cfg, k)?.m;
        num = num * m;
        den = den * (R::one() - m);
        let pow = if k == 1 {
            R::one()
        } else {
            (R::of_u32(k - 1) * lambda.ln()).exp()
        };
        out.push(pow * num / den);
    }
    Ok(out)
}

/// Checks the lower-bound recursion
/// `m_{k+1} >= 1/lambda - (k+1)/rho * m_k` for k = 1..k_max; equality is
/// expected for constant service.
pub fn recursion_lower_check<R: Real>(
    cfg: &QueueConfig<R>,
    k_max: u32,
) -> Result<Vec<RecursionCheck<R>>, RenewalError> {
    assert!(k_max >= 1);
    let lambda = cfg.lambda;
    let rho = cfg.rho();
    let tol = R::of(1e-9);

    let mut out = Vec::with_capacity(k_max as usize);
    let mut m_k = sojourn_mean(cfg, 1)?.m;
    for k in 1..=k_max {
        let m_next = sojourn_mean(cfg, k + 1)?.m;
        let rhs = lambda.recip() - R::of_u32(k + 1) / rho * m_k;
        let slack = m_next - rhs;
        out.push(RecursionCheck {
            k,
            lhs: m_next,
            rhs,
            holds: slack >= -tol,
            slack,
        });
        m_k = m_next;
    }
    Ok(out)
}
