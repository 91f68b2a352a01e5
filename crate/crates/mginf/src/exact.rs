//! Exact infinite-server queue quantities used as ground-truth anchors:
//! the cycle means (insensitive to the service law beyond its mean), the
//! exponential-service sojourn means, the per-cycle time in each state and
//! the stationary occupancy law.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dist::ServiceDistribution;
use crate::real::Real;
use crate::renewal::QueueConfig;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExactAnchors<R> {
    /// `e^rho / lambda`, the busy-cycle mean.
    pub mu0: R,
    /// `(e^rho - 1) / lambda`, the busy-period mean.
    pub eb: R,
    /// `1 / lambda`.
    pub m0: R,
    /// `alpha / (k + rho)` per k, exponential service only.
    pub mk_exponential: Option<Vec<R>>,
    /// `alpha rho^{k-1} / k!` per k (index = k; entry 0 is `1/lambda`).
    pub mkvk: Vec<R>,
    /// Stationary occupancy `e^{-rho} rho^k / k!` per k.
    pub p: Vec<R>,
}

#[derive(Debug, Error)]
pub enum ExactError {
    #[error("closed-form sojourn CDF requires exponential service for k >= 1")]
    RequiresExponential,
    #[error("negative time argument {0}")]
    NegativeTime(f64),
}

/// Anchors for `k = 0..=k_max`.
pub fn exact_anchors<R: Real>(cfg: &QueueConfig<R>, k_max: u32) -> ExactAnchors<R> {
    let lambda = cfg.lambda;
    let alpha = cfg.dist.mean();
    let rho = cfg.rho();

    let mk_exponential = match cfg.dist {
        ServiceDistribution::Exponential { .. } => Some(
            (0..=k_max)
                .map(|k| alpha / (R::of_u32(k) + rho))
                .collect(),
        ),
        _ => None,
    };

    let mut mkvk = Vec::with_capacity(k_max as usize + 1);
    let mut p = Vec::with_capacity(k_max as usize + 1);
    let e_neg_rho = (-rho).exp();
    // Running rho^k / k!.
    let mut pois = R::one();
    for k in 0..=k_max {
        if k > 0 {
            pois = pois * rho / R::of_u32(k);
        }
        // alpha rho^{k-1}/k! = (1/lambda) rho^k/k!.
        mkvk.push(pois / lambda);
        p.push(e_neg_rho * pois);
    }

    ExactAnchors {
        mu0: rho.exp() / lambda,
        eb: (rho.exp() - R::one()) / lambda,
        m0: lambda.recip(),
        mk_exponential,
        mkvk,
        p,
    }
}

/// Closed-form sojourn CDF `1 - e^{-(k+rho)t/alpha}`; for `k = 0` the law is
/// `1 - e^{-lambda t}` regardless of the service distribution.
pub fn exact_sojourn_cdf_exponential<R: Real>(
    cfg: &QueueConfig<R>,
    k: u32,
    t: R,
) -> Result<R, ExactError> {
    if t < R::zero() {
        return Err(ExactError::NegativeTime(t.to_f64().unwrap_or(f64::NAN)));
    }
    if k == 0 {
        return Ok(R::one() - (-cfg.lambda * t).exp());
    }
    match cfg.dist {
        ServiceDistribution::Exponential { alpha } => {
            Ok(R::one() - (-(R::of_u32(k) + cfg.rho()) * t / alpha).exp())
        }
        _ => Err(ExactError::RequiresExponential),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::renewal::{entries_mean, recurrence_mean};

    type Cfg = QueueConfig<f64>;

    fn cfg(lambda: f64, spec: &str) -> Cfg {
        QueueConfig::new(lambda, spec.parse().unwrap()).unwrap()
    }

    #[test]
    fn anchor_values() {
        let a = exact_anchors(&cfg(1.0, "det:alpha=1.0"), 4);
        assert!((a.mu0 - 1.0f64.exp()).abs() < 1e-12);
        assert!((a.eb - (1.0f64.exp() - 1.0)).abs() < 1e-12);
        assert!((a.mu0 - (a.eb + a.m0)).abs() < 1e-12);
        assert!((a.mkvk[2] - 0.5).abs() < 1e-12);
        assert!((a.mkvk[0] - 1.0).abs() < 1e-12);
        assert!(a.mk_exponential.is_none());

        let a = exact_anchors(&cfg(1.0, "exp:alpha=1.0"), 4);
        let mk = a.mk_exponential.unwrap();
        assert!((mk[4] - 0.2).abs() < 1e-12);
    }

    #[test]
    fn occupancy_sums_to_one() {
        let a = exact_anchors(&cfg(1.0, "exp:alpha=1.0"), 60);
        let total: f64 = a.p.iter().sum();
        assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn insensitivity() {
        // Cycle anchors depend on the distribution only through rho.
        let a = exact_anchors(&cfg(0.5, "exp:alpha=2.0"), 3);
        let b = exact_anchors(&cfg(0.5, "det:alpha=2.0"), 3);
        assert_eq!(a.mu0, b.mu0);
        assert_eq!(a.eb, b.eb);
        assert_eq!(a.mkvk, b.mkvk);
    }

    #[test]
    fn renewal_reproduces_exponential_anchors() {
        for lambda in [0.5, 1.0, 2.0] {
            let c = cfg(lambda, "exp:alpha=1.0");
            let a = exact_anchors(&c, 6);
            let metrics = recurrence_mean(&c).unwrap();
            assert!((metrics.mu0 - a.mu0).abs() / a.mu0 < 1e-8);
            assert!((metrics.busy_period_mean - a.eb).abs() / a.eb < 1e-8);
            let visits = entries_mean(&c, 6).unwrap();
            for k in 1..=6usize {
                let got = visits.time_in_state[k - 1];
                assert!(
                    (got - a.mkvk[k]).abs() / a.mkvk[k] < 1e-8,
                    "lambda={lambda} k={k}: {got} vs {}",
                    a.mkvk[k]
                );
            }
        }
    }

    #[test]
    fn cdf_closed_forms() {
        let c = cfg(1.0, "exp:alpha=1.0");
        let median = 2.0f64.ln();
        assert!((exact_sojourn_cdf_exponential(&c, 0, median).unwrap() - 0.5).abs() < 1e-12);
        let v = exact_sojourn_cdf_exponential(&c, 1, 1.0).unwrap();
        assert!((v - (1.0 - (-2.0f64).exp())).abs() < 1e-12);

        let det = cfg(1.0, "det:alpha=1.0");
        assert!(exact_sojourn_cdf_exponential(&det, 1, 1.0).is_err());
        // k = 0 works for any service law.
        assert!((exact_sojourn_cdf_exponential(&det, 0, median).unwrap() - 0.5).abs() < 1e-12);
        assert!(exact_sojourn_cdf_exponential(&c, 1, -0.5).is_err());
    }
}
