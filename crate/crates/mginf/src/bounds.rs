//! Closed-form bounds on the renewal quantities, the regime-based upper
//! bound selector for the sojourn means, and the relative-error criteria
//! for the cycle approximations.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::real::Real;
use crate::renewal::QueueConfig;

/// Which formula produced a bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum BoundSource {
    E0,
    E1,
    E2,
    RegimeMin,
    Nbue,
    Nwue,
    Imrl,
    Dfr,
    Mu0Cap,
    EbCap,
    VkCap,
    MkvkCap,
    /// The distribution-free sojourn-CDF floor.
    Universal,
}

impl std::fmt::Display for BoundSource {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            BoundSource::E0 => "E0",
            BoundSource::E1 => "E1",
            BoundSource::E2 => "E2",
            BoundSource::RegimeMin => "REGIME_MIN",
            BoundSource::Nbue => "NBUE",
            BoundSource::Nwue => "NWUE",
            BoundSource::Imrl => "IMRL",
            BoundSource::Dfr => "DFR",
            BoundSource::Mu0Cap => "MU0_CAP",
            BoundSource::EbCap => "EB_CAP",
            BoundSource::VkCap => "VK_CAP",
            BoundSource::MkvkCap => "MKVK_CAP",
            BoundSource::Universal => "UNIVERSAL",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Upper,
    Lower,
}

impl std::fmt::Display for Direction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Direction::Upper => "upper",
            Direction::Lower => "lower",
        })
    }
}

/// A single bound with provenance and an applicability flag. Inapplicable
/// bounds are values carried for table rendering, never errors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundValue<R> {
    pub value: R,
    pub direction: Direction,
    pub source: BoundSource,
    pub applicable: bool,
    pub inapplicability_reason: Option<String>,
}

impl<R: Real> BoundValue<R> {
    fn applicable(value: R, direction: Direction, source: BoundSource) -> Self {
        BoundValue {
            value,
            direction,
            source,
            applicable: true,
            inapplicability_reason: None,
        }
    }

    fn inapplicable(value: R, direction: Direction, source: BoundSource, reason: &str) -> Self {
        BoundValue {
            value,
            direction,
            source,
            applicable: false,
            inapplicability_reason: Some(reason.to_string()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BasicBounds<R> {
    pub e0: BoundValue<R>,
    pub e1: BoundValue<R>,
    pub e2: BoundValue<R>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CycleBounds<R> {
    pub mu0: Vec<BoundValue<R>>,
    pub busy_period: Vec<BoundValue<R>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VisitBounds<R> {
    pub vk: Vec<BoundValue<R>>,
    pub mkvk: Vec<BoundValue<R>>,
}

/// Relative-error criteria for replacing the cycle quantities by their
/// closed caps; only meaningful when `rho (scv + 1) <= 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorReport<R> {
    pub applicable: bool,
    pub inapplicability_reason: Option<String>,
    pub epsilon: Option<R>,
    pub epsilon_cap: Option<R>,
    pub delta: Option<R>,
    pub delta_cap: Option<R>,
    /// `e - 1`, the distribution-free ceiling on epsilon.
    pub universal_cap: R,
}

#[derive(Debug, Error)]
pub enum BoundsError {
    #[error("target relative error {r} outside admissible range (0, {limit})")]
    TargetOutOfRange { r: f64, limit: f64 },
}

fn scv_plus_one<R: Real>(cfg: &QueueConfig<R>) -> R {
    cfg.dist.scv() + R::one()
}

/// `E0 = 1/lambda`, `E1 = alpha sqrt((scv+1)/(2 rho (2k+1)))`,
/// `E2 = alpha (scv+1)/(k+1)`. E1 and E2 are stated for k >= 1 only.
pub fn basic_bounds<R: Real>(cfg: &QueueConfig<R>, k: u32) -> BasicBounds<R> {
    let alpha = cfg.dist.mean();
    let rho = cfg.rho();
    let c1 = scv_plus_one(cfg);
    let kf = R::of_u32(k);

    let e0 = BoundValue::applicable(cfg.lambda.recip(), Direction::Upper, BoundSource::E0);
    let e1_value = alpha * (c1 / (R::of(2.0) * rho * (R::of(2.0) * kf + R::one()))).sqrt();
    let e2_value = alpha * c1 / (kf + R::one());
    let (e1, e2) = if k >= 1 {
        (
            BoundValue::applicable(e1_value, Direction::Upper, BoundSource::E1),
            BoundValue::applicable(e2_value, Direction::Upper, BoundSource::E2),
        )
    } else {
        let reason = "stated for k >= 1 only";
        (
            BoundValue::inapplicable(e1_value, Direction::Upper, BoundSource::E1, reason),
            BoundValue::inapplicable(e2_value, Direction::Upper, BoundSource::E2, reason),
        )
    };
    BasicBounds { e0, e1, e2 }
}

/// Best upper bound on `m_k` per the three-regime selection table over
/// `q = rho (scv + 1)`.
pub fn regime_bound<R: Real>(cfg: &QueueConfig<R>, k: u32) -> BoundValue<R> {
    assert!(k >= 1, "regime_bound requires k >= 1");
    let BasicBounds { e0, e1, e2 } = basic_bounds(cfg, k);
    let q = cfg.rho() * scv_plus_one(cfg);
    let kf = R::of_u32(k);
    let quarter = R::of(0.25);
    let half = R::of(0.5);
    let two = R::of(2.0);
    let four = R::of(4.0);

    let min_e1_e2 = |e1: BoundValue<R>, e2: BoundValue<R>| {
        BoundValue::applicable(e1.value.min(e2.value), Direction::Upper, BoundSource::RegimeMin)
    };

    if q > R::of(2.0 / 3.0) {
        // Case A. Thresholds inclusive as printed.
        if kf < quarter * q - half {
            e0
        } else if kf <= two * q - R::one() {
            e1
        } else if kf < four * q - R::one() {
            min_e1_e2(e1, e2)
        } else {
            e2
        }
    } else if q > half {
        // Case B.
        if k == 1 {
            min_e1_e2(e1, e2)
        } else {
            e2
        }
    } else {
        // Case C.
        e2
    }
}

/// Reliability-class bounds on `m_k`: NBUE upper and NWUE lower
/// `alpha/(k+rho)`, the IMRL moment-based lower bound, and the DFR lower
/// bound. Bounds whose tag the distribution does not carry come back
/// flagged inapplicable.
pub fn class_bounds<R: Real>(cfg: &QueueConfig<R>, k: u32) -> Vec<BoundValue<R>> {
    assert!(k >= 1, "class_bounds requires k >= 1");
    let tags = cfg.dist.class_tags();
    let m = cfg.dist.moments();
    let alpha = m.alpha;
    let rho = cfg.rho();
    let kf = R::of_u32(k);
    let two = R::of(2.0);

    let ratio = alpha / (kf + rho);
    let imrl_value = (kf * (R::one() - two * alpha * m.mu3 / (R::of(3.0) * m.mu2 * m.mu2))).exp()
        * m.mu2
        / (m.mu2 * cfg.lambda + two * kf * alpha);
    let dfr_value = (kf * (R::one() - m.scv) / two).exp() * ratio;

    let entry = |value, direction, source, tagged: bool| {
        if tagged {
            BoundValue::applicable(value, direction, source)
        } else {
            BoundValue::inapplicable(value, direction, source, "distribution lacks the class tag")
        }
    };
    vec![
        entry(ratio, Direction::Upper, BoundSource::Nbue, tags.nbue),
        entry(ratio, Direction::Lower, BoundSource::Nwue, tags.nwue),
        entry(imrl_value, Direction::Lower, BoundSource::Imrl, tags.imrl),
        entry(dfr_value, Direction::Lower, BoundSource::Dfr, tags.dfr),
    ]
}

/// Caps on the recurrence mean and the busy-period mean: the general
/// `e^{rho(scv+1)}/lambda` caps (valid only when `rho(scv+1) <= 1`) plus the
/// class forms `e^rho/lambda` (NBUE upper, NWUE lower).
pub fn cycle_bounds<R: Real>(cfg: &QueueConfig<R>) -> CycleBounds<R> {
    let lambda = cfg.lambda;
    let rho = cfg.rho();
    let q = rho * scv_plus_one(cfg);
    let tags = cfg.dist.class_tags();
    let in_regime = q <= R::one();
    let regime_reason = "requires rho (scv + 1) <= 1";
    let tag_reason = "distribution lacks the class tag";

    let general_mu0 = q.exp() / lambda;
    let general_eb = (q.exp() - R::one()) / lambda;
    let class_mu0 = rho.exp() / lambda;
    let class_eb = (rho.exp() - R::one()) / lambda;

    let gate = |value, direction, source, ok: bool, reason: &str| {
        if ok {
            BoundValue::applicable(value, direction, source)
        } else {
            BoundValue::inapplicable(value, direction, source, reason)
        }
    };

    CycleBounds {
        mu0: vec![
            gate(general_mu0, Direction::Upper, BoundSource::Mu0Cap, in_regime, regime_reason),
            gate(class_mu0, Direction::Upper, BoundSource::Nbue, tags.nbue, tag_reason),
            gate(class_mu0, Direction::Lower, BoundSource::Nwue, tags.nwue, tag_reason),
        ],
        busy_period: vec![
            gate(general_eb, Direction::Upper, BoundSource::EbCap, in_regime, regime_reason),
            gate(class_eb, Direction::Upper, BoundSource::Nbue, tags.nbue, tag_reason),
            gate(class_eb, Direction::Lower, BoundSource::Nwue, tags.nwue, tag_reason),
        ],
    }
}

/// `rho^{k-1} / k!` computed without large intermediates.
fn rho_power_over_factorial<R: Real>(rho: R, k: u32) -> R {
    let mut acc = R::one();
    for i in 1..=k {
        acc = acc * rho / R::of_u32(i);
    }
    acc / rho
}

/// Caps on the per-cycle visit count `v_k` and on `m_k v_k`, general
/// (`(scv+1)` powers, valid in the regime) and class forms per NBUE/NWUE.
pub fn visit_bounds<R: Real>(cfg: &QueueConfig<R>, k: u32) -> VisitBounds<R> {
    assert!(k >= 1, "visit_bounds requires k >= 1");
    let alpha = cfg.dist.mean();
    let rho = cfg.rho();
    let c1 = scv_plus_one(cfg);
    let q = rho * c1;
    let tags = cfg.dist.class_tags();
    let in_regime = q <= R::one();
    let regime_reason = "requires rho (scv + 1) <= 1";
    let tag_reason = "distribution lacks the class tag";
    let kf = R::of_u32(k);

    let base = rho_power_over_factorial(rho, k);
    let c1_km1 = c1.powi(k as i32 - 1);
    let general_vk = (kf + R::one()) * base * c1_km1;
    let general_mkvk = alpha * base * c1_km1 * c1;
    let class_vk = (kf + R::one()) * base;
    let class_mkvk = alpha * base;

    let gate = |value, direction, source, ok: bool, reason: &str| {
        if ok {
            BoundValue::applicable(value, direction, source)
        } else {
            BoundValue::inapplicable(value, direction, source, reason)
        }
    };

    VisitBounds {
        vk: vec![
            gate(general_vk, Direction::Upper, BoundSource::VkCap, in_regime, regime_reason),
            gate(class_vk, Direction::Upper, BoundSource::Nbue, tags.nbue, tag_reason),
            gate(class_vk, Direction::Lower, BoundSource::Nwue, tags.nwue, tag_reason),
        ],
        mkvk: vec![
            gate(general_mkvk, Direction::Upper, BoundSource::MkvkCap, in_regime, regime_reason),
            gate(class_mkvk, Direction::Upper, BoundSource::Nbue, tags.nbue, tag_reason),
            gate(class_mkvk, Direction::Lower, BoundSource::Nwue, tags.nwue, tag_reason),
        ],
    }
}

fn clamp_unit<R: Real>(x: R) -> R {
    x.max(R::zero()).min(R::one())
}

/// Bounds on the sojourn CDF `C_k(t)`: the distribution-free floor
/// `1 - e^{-lambda t}`, the NBUE floor / NWUE ceiling `1 - e^{-(k+rho)t/alpha}`,
/// and the IMRL and DFR ceilings. Values are clamped to [0, 1].
pub fn cdf_bounds<R: Real>(cfg: &QueueConfig<R>, k: u32, t: R) -> Vec<BoundValue<R>> {
    let m = cfg.dist.moments();
    let alpha = m.alpha;
    let rho = cfg.rho();
    let lambda = cfg.lambda;
    let tags = cfg.dist.class_tags();
    let kf = R::of_u32(k);
    let two = R::of(2.0);
    let tag_reason = "distribution lacks the class tag";

    let universal = R::one() - (-lambda * t).exp();
    let class_rate = clamp_unit(R::one() - (-(kf + rho) * t / alpha).exp());
    let imrl_exponent = -lambda * t
        + kf * (-two * alpha * t / m.mu2 - two * alpha * m.mu3 / (R::of(3.0) * m.mu2 * m.mu2)
            + R::one());
    let imrl_value = clamp_unit(R::one() - imrl_exponent.exp());
    let dfr_exponent = -(kf + rho) * t / alpha + kf * (R::one() - m.scv) / two;
    let dfr_value = clamp_unit(R::one() - dfr_exponent.exp());

    let gate = |value, direction, source, ok: bool| {
        if ok {
            BoundValue::applicable(value, direction, source)
        } else {
            BoundValue::inapplicable(value, direction, source, tag_reason)
        }
    };

    vec![
        BoundValue::applicable(universal, Direction::Lower, BoundSource::Universal),
        gate(class_rate, Direction::Lower, BoundSource::Nbue, tags.nbue),
        gate(class_rate, Direction::Upper, BoundSource::Nwue, tags.nwue),
        gate(imrl_value, Direction::Upper, BoundSource::Imrl, tags.imrl),
        gate(dfr_value, Direction::Upper, BoundSource::Dfr, tags.dfr),
    ]
}

/// Relative errors of the closed cycle caps against the exact values:
/// `epsilon = e^{rho scv} - 1` with cap `e^{scv/(scv+1)} - 1`, and
/// `delta = epsilon / (1 - e^{-rho})`.
pub fn error_report<R: Real>(cfg: &QueueConfig<R>) -> ErrorReport<R> {
    let rho = cfg.rho();
    let scv = cfg.dist.scv();
    let universal_cap = R::of(std::f64::consts::E - 1.0);
    let q = rho * (scv + R::one());
    if q > R::one() {
        return ErrorReport {
            applicable: false,
            inapplicability_reason: Some(format!(
                "rho (scv + 1) = {} exceeds 1",
                q.to_f64().unwrap_or(f64::NAN)
            )),
            epsilon: None,
            epsilon_cap: None,
            delta: None,
            delta_cap: None,
            universal_cap,
        };
    }
    let epsilon = (rho * scv).exp() - R::one();
    let epsilon_cap = (scv / (scv + R::one())).exp() - R::one();
    let idle_factor = R::one() - (-rho).exp();
    ErrorReport {
        applicable: true,
        inapplicability_reason: None,
        epsilon: Some(epsilon),
        epsilon_cap: Some(epsilon_cap),
        delta: Some(epsilon / idle_factor),
        delta_cap: Some(epsilon_cap / idle_factor),
        universal_cap,
    }
}

/// Largest squared coefficient of variation for which the relative error
/// stays below `r`: the epsilon form when `rho` is absent, the delta form
/// when present. Natural logarithm throughout.
pub fn goodness_threshold<R: Real>(r: R, rho: Option<R>) -> Result<R, BoundsError> {
    let e_minus_1 = R::of(std::f64::consts::E - 1.0);
    let arg = match rho {
        None => {
            if !(r > R::zero() && r < e_minus_1) {
                return Err(BoundsError::TargetOutOfRange {
                    r: r.to_f64().unwrap_or(f64::NAN),
                    limit: std::f64::consts::E - 1.0,
                });
            }
            r + R::one()
        }
        Some(rho) => {
            let idle_factor = R::one() - (-rho).exp();
            let limit = e_minus_1 / idle_factor;
            if !(r > R::zero() && r < limit) {
                return Err(BoundsError::TargetOutOfRange {
                    r: r.to_f64().unwrap_or(f64::NAN),
                    limit: limit.to_f64().unwrap_or(f64::NAN),
                });
            }
            r * idle_factor + R::one()
        }
    };
    let log = arg.ln();
    Ok(log / (R::one() - log))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::renewal::{entries_mean, recurrence_mean, sojourn_mean};

    type Cfg = QueueConfig<f64>;

    fn cfg(lambda: f64, spec: &str) -> Cfg {
        QueueConfig::new(lambda, spec.parse().unwrap()).unwrap()
    }

    #[test]
    fn basic_bound_values() {
        let c = cfg(1.0, "exp:alpha=1.0");
        let b = basic_bounds(&c, 1);
        assert!((b.e0.value - 1.0).abs() < 1e-15);
        assert!((b.e1.value - (2.0f64 / 6.0).sqrt()).abs() < 1e-12);
        assert!((b.e2.value - 1.0).abs() < 1e-15);

        let b0 = basic_bounds(&c, 0);
        assert!(b0.e0.applicable && !b0.e1.applicable && !b0.e2.applicable);
    }

    #[test]
    fn regime_examples() {
        let c = cfg(1.0, "exp:alpha=1.0"); // q = 2, case A
        let b1 = regime_bound(&c, 1);
        assert_eq!(b1.source, BoundSource::E1);
        assert!((b1.value - (2.0f64 / 6.0).sqrt()).abs() < 1e-12);
        assert!(sojourn_mean(&c, 1).unwrap().m <= b1.value);

        let b8 = regime_bound(&c, 8);
        assert_eq!(b8.source, BoundSource::E2);
        assert!((b8.value - 2.0 / 9.0).abs() < 1e-12);
        // k = 7 sits exactly on 4q - 1 = 7: inclusive, selects E2.
        assert_eq!(regime_bound(&c, 7).source, BoundSource::E2);
        // k in (3, 7) takes the minimum branch.
        assert_eq!(regime_bound(&c, 5).source, BoundSource::RegimeMin);

        let det = cfg(0.4, "det:alpha=1.0"); // q = 0.4, case C
        let b = regime_bound(&det, 1);
        assert_eq!(b.source, BoundSource::E2);
        assert!((b.value - 0.5).abs() < 1e-15);

        let b_case_b = regime_bound(&cfg(0.6, "det:alpha=1.0"), 1); // q = 0.6, case B
        assert_eq!(b_case_b.source, BoundSource::RegimeMin);
        assert_eq!(regime_bound(&cfg(0.6, "det:alpha=1.0"), 2).source, BoundSource::E2);
    }

    #[test]
    fn class_bound_examples() {
        let c = cfg(1.0, "exp:alpha=1.0");
        let bounds = class_bounds(&c, 1);
        let nbue = &bounds[0];
        let nwue = &bounds[1];
        assert!(nbue.applicable && (nbue.value - 0.5).abs() < 1e-15);
        assert!(nwue.applicable && (nwue.value - 0.5).abs() < 1e-15);

        // scv = 1 kills the DFR exponential factor: bound equals alpha/(k+rho).
        let dfr = &class_bounds(&c, 3)[3];
        assert!(dfr.applicable && (dfr.value - 0.25).abs() < 1e-12);

        let h = cfg(0.25, "hyperexp2:p=0.5,alpha1=0.5,alpha2=1.5");
        let nwue = &class_bounds(&h, 1)[1];
        assert!(nwue.applicable && (nwue.value - 0.8).abs() < 1e-12);
        assert!(sojourn_mean(&h, 1).unwrap().m >= 0.8 - 1e-9);
        let nbue = &class_bounds(&h, 1)[0];
        assert!(!nbue.applicable);
    }

    #[test]
    fn imrl_sanity_for_exponential() {
        // The IMRL lower bound must not exceed alpha/(k+rho) for exponential
        // service; a violation would mean the exponent is misread.
        let c = cfg(1.0, "exp:alpha=1.0");
        for k in 1..=10u32 {
            let bounds = class_bounds(&c, k);
            let imrl = &bounds[2];
            let exact = 1.0 / (k as f64 + 1.0);
            assert!(imrl.value <= exact + 1e-12, "k={k}: {} vs {exact}", imrl.value);
        }
    }

    #[test]
    fn cycle_bound_examples() {
        let c = cfg(0.5, "exp:alpha=1.0"); // q = 1
        let cb = cycle_bounds(&c);
        let cap = &cb.mu0[0];
        assert!(cap.applicable);
        assert!((cap.value - 1.0f64.exp() / 0.5).abs() < 1e-12);
        assert!(recurrence_mean(&c).unwrap().mu0 <= cap.value);

        let det = cfg(1.0, "det:alpha=1.0"); // q = 1, NBUE
        let cb = cycle_bounds(&det);
        assert!((cb.mu0[0].value - 1.0f64.exp()).abs() < 1e-12);
        assert!((cb.mu0[1].value - 1.0f64.exp()).abs() < 1e-12);

        let erl = cfg(1.0, "erlang:n=2,alpha=1.0"); // q = 1.5: general cap off, NBUE on
        let cb = cycle_bounds(&erl);
        assert!(!cb.busy_period[0].applicable);
        let nbue_eb = &cb.busy_period[1];
        assert!(nbue_eb.applicable);
        assert!((nbue_eb.value - (1.0f64.exp() - 1.0)).abs() < 1e-12);
    }

    #[test]
    fn visit_bound_examples() {
        let c = cfg(0.5, "exp:alpha=1.0");
        let vb1 = visit_bounds(&c, 1);
        assert!(vb1.vk[0].applicable);
        assert!((vb1.vk[0].value - 2.0).abs() < 1e-12);
        let v1 = entries_mean(&c, 1).unwrap().v[0];
        assert!((v1 - 1.5).abs() < 1e-12 && v1 <= vb1.vk[0].value);

        let vb2 = visit_bounds(&c, 2);
        assert!((vb2.mkvk[0].value - 1.0).abs() < 1e-12);
        let mkvk2 = entries_mean(&c, 2).unwrap().time_in_state[1];
        assert!((mkvk2 - 0.25).abs() < 1e-12);

        let det = cfg(1.0, "det:alpha=1.0");
        let vb = visit_bounds(&det, 2);
        assert!((vb.mkvk[1].value - 0.5).abs() < 1e-12);
    }

    #[test]
    fn cdf_bound_examples() {
        let c = cfg(1.0, "exp:alpha=1.0");
        let bounds = cdf_bounds(&c, 0, 1.0);
        let universal = &bounds[0];
        assert!((universal.value - (1.0 - (-1.0f64).exp())).abs() < 1e-12);

        let bounds = cdf_bounds(&c, 1, 1.0);
        let nbue = &bounds[1];
        assert!(nbue.applicable);
        assert!((nbue.value - (1.0 - (-2.0f64).exp())).abs() < 1e-12);

        let h = cfg(1.0, "hyperexp2:p=0.5,alpha1=0.5,alpha2=1.5");
        let rho = h.rho();
        let bounds = cdf_bounds(&h, 1, 0.5);
        let dfr = &bounds[4];
        assert!(dfr.applicable);
        let expect = 1.0 - (-(1.0 + rho) * 0.5 + (1.0 - 1.5) / 2.0).exp();
        assert!((dfr.value - expect).abs() < 1e-12);
        let numeric = crate::renewal::sojourn_cdf(&h, 1, 0.5).unwrap();
        assert!(dfr.value >= numeric - 1e-12);
    }

    #[test]
    fn error_report_examples() {
        let det = cfg(0.8, "det:alpha=1.0");
        let rep = error_report(&det);
        assert!(rep.applicable);
        assert!(rep.epsilon.unwrap().abs() < 1e-15);

        let c = cfg(0.5, "exp:alpha=1.0");
        let rep = error_report(&c);
        let eps = rep.epsilon.unwrap();
        assert!((eps - (0.5f64.exp() - 1.0)).abs() < 1e-12);
        assert!((rep.epsilon_cap.unwrap() - eps).abs() < 1e-12); // q = 1 exactly
        let delta = rep.delta.unwrap();
        assert!((delta - (0.5f64.exp() - 1.0) / (1.0 - (-0.5f64).exp())).abs() < 1e-12);
        assert!(delta >= eps);

        let hot = cfg(1.0, "exp:alpha=1.0");
        assert!(!error_report(&hot).applicable);
    }

    #[test]
    fn goodness_examples() {
        let g = goodness_threshold(0.5f64, None).unwrap();
        assert!((g - 1.5f64.ln() / (1.0 - 1.5f64.ln())).abs() < 1e-12);

        let g = goodness_threshold(0.5f64, Some(1.0)).unwrap();
        let x = (0.5 * (1.0 - (-1.0f64).exp()) + 1.0).ln();
        assert!((g - x / (1.0 - x)).abs() < 1e-12);
        assert!((g - 0.378631).abs() < 1e-6);

        // Boundary is strict.
        assert!(goodness_threshold(std::f64::consts::E - 1.0, None).is_err());
        assert!(goodness_threshold(0.0f64, None).is_err());
        assert!(goodness_threshold(-0.1f64, Some(1.0)).is_err());
    }
}
