//! Randomized invariants over the catalog, driven by proptest.

use proptest::prelude::*;

use mginf::bounds;
use mginf::renewal::{self, QueueConfig};
use mginf::ServiceDistribution64;

type Cfg = QueueConfig<f64>;

fn arb_dist() -> impl Strategy<Value = ServiceDistribution64> {
    prop_oneof![
        (0.2f64..3.0).prop_map(|a| ServiceDistribution64::exponential(a).unwrap()),
        (0.2f64..3.0).prop_map(|a| ServiceDistribution64::deterministic(a).unwrap()),
        (1u32..6, 0.2f64..3.0).prop_map(|(n, a)| ServiceDistribution64::erlang(n, a).unwrap()),
        (0.05f64..0.95, 0.2f64..1.0, 1.0f64..3.0)
            .prop_map(|(p, a1, a2)| ServiceDistribution64::hyperexp2(p, a1, a2).unwrap()),
        (0.0f64..1.0, 1.2f64..3.0)
            .prop_map(|(a, b)| ServiceDistribution64::uniform(a, b).unwrap()),
    ]
}

fn arb_cfg() -> impl Strategy<Value = Cfg> {
    (0.05f64..3.0, arb_dist()).prop_map(|(lambda, d)| QueueConfig::new(lambda, d).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    // Text form round-trips through parsing for every catalog member.
    #[test]
    fn dist_display_parse_round_trip(d in arb_dist()) {
        let back: ServiceDistribution64 = d.to_string().parse().unwrap();
        prop_assert_eq!(back, d);
    }

    // Sojourn means are positive, bounded by the idle mean, and
    // nonincreasing in the state index.
    #[test]
    fn sojourn_means_monotone(c in arb_cfg()) {
        let mut prev = f64::INFINITY;
        for k in 0..=8u32 {
            let m = renewal::sojourn_mean(&c, k).unwrap().m;
            prop_assert!(m > 0.0);
            prop_assert!(m <= 1.0 / c.lambda + 1e-12);
            prop_assert!(m <= prev + 1e-12, "m_{k} = {m} > m_{} = {prev}", k - 1);
            prev = m;
        }
    }

    // The sojourn CDF is a proper distribution function in t.
    #[test]
    fn sojourn_cdf_monotone(c in arb_cfg(), k in 0u32..5) {
        let mut prev = 0.0;
        for i in 0..=20 {
            let t = i as f64 * 0.25;
            let p = renewal::sojourn_cdf(&c, k, t).unwrap();
            prop_assert!((0.0..=1.0).contains(&p));
            prop_assert!(p + 1e-9 >= prev);
            prev = p;
        }
    }

    // The recurrence mean exceeds the idle mean, and for exponential
    // service equals e^rho/lambda.
    #[test]
    fn recurrence_mean_sane(lambda in 0.05f64..2.0, alpha in 0.2f64..2.0) {
        let c = QueueConfig::new(
            lambda,
            ServiceDistribution64::exponential(alpha).unwrap(),
        ).unwrap();
        let cm = renewal::recurrence_mean(&c).unwrap();
        prop_assert!(cm.mu0 > 1.0 / lambda);
        let exact = c.rho().exp() / lambda;
        prop_assert!((cm.mu0 - exact).abs() <= 1e-8 * exact);
    }

    // The regime bound equals the smallest applicable basic bound.
    #[test]
    fn regime_is_min_of_basics(c in arb_cfg(), k in 1u32..12) {
        let b = bounds::basic_bounds(&c, k);
        let rb = bounds::regime_bound(&c, k);
        let min = b.e0.value.min(b.e1.value).min(b.e2.value);
        prop_assert!(rb.applicable);
        prop_assert!(rb.value >= min - 1e-12);
    }

    // Sojourn-CDF bounds stay inside [0,1] and respect their directions
    // against the numeric CDF.
    #[test]
    fn cdf_bounds_bracket_numeric(c in arb_cfg(), k in 1u32..4, i in 1u32..12) {
        let t = i as f64 * 0.2;
        let p = renewal::sojourn_cdf(&c, k, t).unwrap();
        for b in bounds::cdf_bounds(&c, k, t) {
            prop_assert!((0.0..=1.0).contains(&b.value));
            if !b.applicable {
                continue;
            }
            match b.direction {
                bounds::Direction::Lower => prop_assert!(
                    b.value <= p + 1e-9,
                    "{} lower bound {} above CDF {p}", b.source, b.value
                ),
                bounds::Direction::Upper => prop_assert!(
                    b.value >= p - 1e-9,
                    "{} upper bound {} below CDF {p}", b.source, b.value
                ),
            }
        }
    }

    // Plugging the goodness threshold back into the epsilon cap recovers
    // the requested target.
    #[test]
    fn goodness_threshold_inverts_cap(r in 0.01f64..1.6) {
        let g = bounds::goodness_threshold(r, None).unwrap();
        let cap = (g / (g + 1.0)).exp() - 1.0;
        prop_assert!((cap - r).abs() <= 1e-9 * r);
    }

    // Exact anchors: the occupancy law sums to at most one and the
    // per-cycle state times match alpha rho^{k-1}/k!.
    #[test]
    fn exact_anchor_consistency(c in arb_cfg()) {
        let a = mginf::exact::exact_anchors(&c, 8);
        let total: f64 = a.p.iter().sum();
        prop_assert!(total <= 1.0 + 1e-12);
        prop_assert!((a.mu0 - c.rho().exp() / c.lambda).abs() <= 1e-12 * a.mu0);
        let alpha = c.dist.mean();
        let mut fact = 1.0;
        for k in 1..=8usize {
            fact *= k as f64;
            let expect = alpha * c.rho().powi(k as i32 - 1) / fact;
            prop_assert!((a.mkvk[k] - expect).abs() <= 1e-12 * expect.max(1e-300));
        }
    }
}
