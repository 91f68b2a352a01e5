//! Regenerative discrete-event simulation of the infinite-server queue.
//!
//! Cycles are delimited by the instants the system becomes empty, so a
//! cycle is one idle period (exponential at the arrival rate) followed by
//! one busy period. Cycles are i.i.d.; every estimate and standard error is
//! built from per-cycle totals, so no warm-up phase is needed.
//!
//! Randomness comes from one counter-based generator per replication,
//! derived from `(seed, stream index)`; a run is bit-for-bit reproducible
//! for a fixed configuration regardless of how replications are scheduled.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dist::ServiceDistribution;
use crate::renewal::QueueConfig;

/// Total cycles across all replications of one run.
const CYCLE_BUDGET: u64 = 50_000_000;
/// Events allowed within a single cycle before the run is declared stuck.
const MAX_EVENTS_PER_CYCLE: u64 = 100_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub queue: QueueConfig<f64>,
    pub cycles: u64,
    pub k_max: u32,
    pub seed: u64,
    pub replications: u32,
}

#[derive(Debug, Error)]
pub enum SimError {
    #[error("cycles must be >= 1")]
    NoCycles,
    #[error("replications must be >= 1")]
    NoReplications,
    #[error("cycles x replications = {0} exceeds the budget of {CYCLE_BUDGET}")]
    OverBudget(u64),
    #[error("event budget exhausted before the first complete cycle")]
    EventBudgetExhausted,
    #[error("cannot merge an empty report list")]
    EmptyMerge,
    #[error("mismatched configurations: {0}")]
    MismatchedConfig(String),
    #[error("reports share seed {seed} and stream {stream}")]
    DuplicateStream { seed: u64, stream: u64 },
}

/// Point estimate with its standard error and the number of contributing
/// observations (cycles, or visits for per-visit quantities).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub estimate: f64,
    pub standard_error: f64,
    pub count: u64,
}

impl Estimate {
    const EMPTY: Estimate = Estimate {
        estimate: 0.0,
        standard_error: 0.0,
        count: 0,
    };
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimReport {
    pub queue: QueueConfig<f64>,
    pub k_max: u32,
    pub seed: u64,
    /// Substream indices pooled into this report.
    pub streams: Vec<u64>,
    pub cycles: u64,
    pub total_time: f64,
    pub busy_cycle_mean: Estimate,
    pub busy_period_mean: Estimate,
    /// Mean duration of one visit to state k, index 0..=k_max.
    pub sojourn_mean: Vec<Estimate>,
    /// Entries into state k per cycle, counted from both neighbours.
    pub entries_per_cycle: Vec<Estimate>,
    /// Entries into state k per cycle, upward crossings only.
    pub entries_upward_per_cycle: Vec<Estimate>,
    /// Time spent in state k per cycle.
    pub time_in_state_per_cycle: Vec<Estimate>,
    /// Long-run fraction of time in state k.
    pub occupancy: Vec<Estimate>,
    /// Fraction of time in states above k_max.
    pub occupancy_overflow: Estimate,
}

/// One service draw; inversion for the memoryless kinds, phase sum for
/// Erlang, branch-then-invert for the hyperexponential.
pub fn sample_service(d: &ServiceDistribution<f64>, rng: &mut impl Rng) -> f64 {
    fn exp_draw(mean: f64, rng: &mut impl Rng) -> f64 {
        // 1 - U lies in (0, 1], keeping the logarithm finite.
        -mean * (1.0 - rng.gen::<f64>()).ln()
    }
    match *d {
        ServiceDistribution::Exponential { alpha } => exp_draw(alpha, rng),
        ServiceDistribution::Deterministic { alpha } => alpha,
        ServiceDistribution::Erlang { n, alpha } => {
            let phase_mean = alpha / n as f64;
            (0..n).map(|_| exp_draw(phase_mean, rng)).sum()
        }
        ServiceDistribution::HyperExp2 { p, alpha1, alpha2 } => {
            let mean = if rng.gen::<f64>() < p { alpha1 } else { alpha2 };
            exp_draw(mean, rng)
        }
        ServiceDistribution::Uniform { a, b } => a + (b - a) * rng.gen::<f64>(),
    }
}

/// Departure event key: ordered by time, ties broken by insertion order.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Departure {
    time: f64,
    seq: u64,
}

impl Eq for Departure {}

impl Ord for Departure {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.time
            .partial_cmp(&other.time)
            .expect("event times are never NaN")
            .then(self.seq.cmp(&other.seq))
    }
}

impl PartialOrd for Departure {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// Per-cycle observations, states tracked dynamically.
#[derive(Default)]
struct CycleRecord {
    length: f64,
    busy: f64,
    time_in_state: Vec<f64>,
    entries: Vec<u64>,
    entries_up: Vec<u64>,
}

impl CycleRecord {
    fn bump_time(&mut self, k: usize, dt: f64) {
        if self.time_in_state.len() <= k {
            self.time_in_state.resize(k + 1, 0.0);
        }
        self.time_in_state[k] += dt;
    }

    fn bump_entry(&mut self, k: usize, upward: bool) {
        if self.entries.len() <= k {
            self.entries.resize(k + 1, 0);
            self.entries_up.resize(k + 1, 0);
        }
        self.entries[k] += 1;
        if upward {
            self.entries_up[k] += 1;
        }
    }
}

/// Welford-style accumulator for per-cycle scalar totals.
#[derive(Debug, Default, Clone, Copy)]
struct MeanAcc {
    n: u64,
    sum: f64,
    sum_sq: f64,
}

impl MeanAcc {
    fn push(&mut self, x: f64) {
        self.n += 1;
        self.sum += x;
        self.sum_sq += x * x;
    }

    fn estimate(&self) -> Estimate {
        if self.n == 0 {
            return Estimate::EMPTY;
        }
        let n = self.n as f64;
        let mean = self.sum / n;
        let se = if self.n > 1 {
            let var = ((self.sum_sq - n * mean * mean) / (n - 1.0)).max(0.0);
            (var / n).sqrt()
        } else {
            0.0
        };
        Estimate {
            estimate: mean,
            standard_error: se,
            count: self.n,
        }
    }
}

/// Accumulator for regenerative ratio estimators `E[Y] / E[N]` over cycles.
#[derive(Debug, Default, Clone, Copy)]
struct RatioAcc {
    n: u64,
    sum_y: f64,
    sum_x: f64,
    sum_yy: f64,
    sum_xx: f64,
    sum_yx: f64,
}

impl RatioAcc {
    fn push(&mut self, y: f64, x: f64) {
        self.n += 1;
        self.sum_y += y;
        self.sum_x += x;
        self.sum_yy += y * y;
        self.sum_xx += x * x;
        self.sum_yx += y * x;
    }

    /// `count` reports the denominator total (e.g. number of visits).
    fn estimate(&self) -> Estimate {
        if self.n == 0 || self.sum_x == 0.0 {
            return Estimate::EMPTY;
        }
        let n = self.n as f64;
        let r = self.sum_y / self.sum_x;
        let mean_x = self.sum_x / n;
        let se = if self.n > 1 {
            // Var(Y - r X) over cycles, delta-method standard error.
            let s_yy = (self.sum_yy - self.sum_y * self.sum_y / n) / (n - 1.0);
            let s_xx = (self.sum_xx - self.sum_x * self.sum_x / n) / (n - 1.0);
            let s_yx = (self.sum_yx - self.sum_y * self.sum_x / n) / (n - 1.0);
            let var_z = (s_yy - 2.0 * r * s_yx + r * r * s_xx).max(0.0);
            (var_z / n).sqrt() / mean_x
        } else {
            0.0
        };
        Estimate {
            estimate: r,
            standard_error: se,
            count: self.sum_x.round() as u64,
        }
    }

    /// Like `estimate`, but `count` is the number of cycles (time ratios).
    fn estimate_cycle_count(&self) -> Estimate {
        Estimate {
            count: self.n,
            ..self.estimate()
        }
    }
}

struct ReplicationAcc {
    k_max: usize,
    cycle_len: MeanAcc,
    busy: MeanAcc,
    sojourn: Vec<RatioAcc>,
    entries: Vec<MeanAcc>,
    entries_up: Vec<MeanAcc>,
    time_in_state: Vec<MeanAcc>,
    occupancy: Vec<RatioAcc>,
    occupancy_overflow: RatioAcc,
    total_time: f64,
}

impl ReplicationAcc {
    fn new(k_max: usize) -> Self {
        ReplicationAcc {
            k_max,
            cycle_len: MeanAcc::default(),
            busy: MeanAcc::default(),
            sojourn: vec![RatioAcc::default(); k_max + 1],
            entries: vec![MeanAcc::default(); k_max + 1],
            entries_up: vec![MeanAcc::default(); k_max + 1],
            time_in_state: vec![MeanAcc::default(); k_max + 1],
            occupancy: vec![RatioAcc::default(); k_max + 1],
            occupancy_overflow: RatioAcc::default(),
            total_time: 0.0,
        }
    }

    fn push_cycle(&mut self, rec: &CycleRecord) {
        self.cycle_len.push(rec.length);
        self.busy.push(rec.busy);
        self.total_time += rec.length;
        let time = |k: usize| rec.time_in_state.get(k).copied().unwrap_or(0.0);
        let hits = |k: usize| rec.entries.get(k).copied().unwrap_or(0) as f64;
        let hits_up = |k: usize| rec.entries_up.get(k).copied().unwrap_or(0) as f64;
        for k in 0..=self.k_max {
            self.sojourn[k].push(time(k), hits(k));
            self.entries[k].push(hits(k));
            self.entries_up[k].push(hits_up(k));
            self.time_in_state[k].push(time(k));
            self.occupancy[k].push(time(k), rec.length);
        }
        let overflow: f64 = rec
            .time_in_state
            .iter()
            .skip(self.k_max + 1)
            .sum();
        self.occupancy_overflow.push(overflow, rec.length);
    }

    fn report(&self, sc: &SimConfig, stream: u64) -> SimReport {
        SimReport {
            queue: sc.queue,
            k_max: sc.k_max,
            seed: sc.seed,
            streams: vec![stream],
            cycles: self.cycle_len.n,
            total_time: self.total_time,
            busy_cycle_mean: self.cycle_len.estimate(),
            busy_period_mean: self.busy.estimate(),
            sojourn_mean: self.sojourn.iter().map(RatioAcc::estimate).collect(),
            entries_per_cycle: self.entries.iter().map(MeanAcc::estimate).collect(),
            entries_upward_per_cycle: self.entries_up.iter().map(MeanAcc::estimate).collect(),
            time_in_state_per_cycle: self.time_in_state.iter().map(MeanAcc::estimate).collect(),
            occupancy: self
                .occupancy
                .iter()
                .map(RatioAcc::estimate_cycle_count)
                .collect(),
            occupancy_overflow: self.occupancy_overflow.estimate_cycle_count(),
        }
    }
}

fn run_replication(sc: &SimConfig, stream: u64) -> Result<SimReport, SimError> {
    let lambda = sc.queue.lambda;
    let dist = sc.queue.dist;
    let mut rng = ChaCha12Rng::seed_from_u64(sc.seed);
    rng.set_stream(stream);

    let mut acc = ReplicationAcc::new(sc.k_max as usize);
    let mut departures: BinaryHeap<Reverse<Departure>> = BinaryHeap::new();
    let mut seq = 0u64;

    let mut clock = 0.0f64;
    for _ in 0..sc.cycles {
        let cycle_start = clock;
        let mut rec = CycleRecord::default();
        // Entering state 0 opens the cycle.
        rec.bump_entry(0, false);

        let idle = -(1.0 - rng.gen::<f64>()).ln() / lambda;
        let first_arrival = clock + idle;
        rec.bump_time(0, idle);
        clock = first_arrival;

        let mut state = 0usize;
        let mut events = 0u64;
        let mut next_arrival = first_arrival;
        // First arrival starts the busy period.
        loop {
            if events >= MAX_EVENTS_PER_CYCLE {
                return Err(SimError::EventBudgetExhausted);
            }
            events += 1;

            let next_departure = departures.peek().map(|Reverse(d)| d.time);
            // Departures processed first on ties.
            let departure_due = matches!(next_departure, Some(t) if t <= next_arrival);
            if departure_due {
                let Reverse(dep) = departures.pop().expect("peeked above");
                rec.bump_time(state, dep.time - clock);
                clock = dep.time;
                state -= 1;
                if state == 0 {
                    // The return to 0 opens the next cycle; its entry is
                    // counted there.
                    break;
                }
                rec.bump_entry(state, false);
            } else {
                rec.bump_time(state, next_arrival - clock);
                clock = next_arrival;
                state += 1;
                rec.bump_entry(state, true);
                let service = sample_service(&dist, &mut rng);
                departures.push(Reverse(Departure {
                    time: clock + service,
                    seq,
                }));
                seq += 1;
                next_arrival = clock + -(1.0 - rng.gen::<f64>()).ln() / lambda;
            }
        }

        rec.length = clock - cycle_start;
        rec.busy = clock - first_arrival;
        acc.push_cycle(&rec);
    }

    Ok(acc.report(sc, stream))
}

/// Runs `replications` independent substreams and pools them.
pub fn run(sc: &SimConfig) -> Result<SimReport, SimError> {
    if sc.cycles == 0 {
        return Err(SimError::NoCycles);
    }
    if sc.replications == 0 {
        return Err(SimError::NoReplications);
    }
    let total = sc.cycles.saturating_mul(sc.replications as u64);
    if total > CYCLE_BUDGET {
        return Err(SimError::OverBudget(total));
    }
    let reports = (0..sc.replications as u64)
        .map(|stream| run_replication(sc, stream))
        .collect::<Result<Vec<_>, _>>()?;
    merge(&reports)
}

fn merge_estimates(parts: Vec<Estimate>) -> Estimate {
    let total: u64 = parts.iter().map(|e| e.count).sum();
    if total == 0 {
        return Estimate::EMPTY;
    }
    let tf = total as f64;
    let mut mean = 0.0;
    let mut var = 0.0;
    for e in &parts {
        let w = e.count as f64 / tf;
        mean += w * e.estimate;
        var += w * w * e.standard_error * e.standard_error;
    }
    Estimate {
        estimate: mean,
        standard_error: var.sqrt(),
        count: total,
    }
}

/// Pools reports over a shared configuration: estimates are count-weighted
/// means, standard errors combine as independent weighted components.
pub fn merge(reports: &[SimReport]) -> Result<SimReport, SimError> {
    let first = reports.first().ok_or(SimError::EmptyMerge)?;
    if reports.len() == 1 {
        return Ok(first.clone());
    }
    for r in &reports[1..] {
        if r.queue != first.queue || r.k_max != first.k_max {
            return Err(SimError::MismatchedConfig(format!(
                "{:?} vs {:?}",
                (r.queue, r.k_max),
                (first.queue, first.k_max)
            )));
        }
    }
    let mut streams = Vec::new();
    for r in reports {
        for &s in &r.streams {
            if r.seed == first.seed && streams.contains(&s) {
                return Err(SimError::DuplicateStream {
                    seed: r.seed,
                    stream: s,
                });
            }
            streams.push(s);
        }
    }

    let col = |f: &dyn Fn(&SimReport) -> Estimate| -> Estimate {
        merge_estimates(reports.iter().map(f).collect())
    };
    let vec_col = |f: &dyn Fn(&SimReport, usize) -> Estimate| -> Vec<Estimate> {
        (0..=first.k_max as usize)
            .map(|k| merge_estimates(reports.iter().map(|r| f(r, k)).collect()))
            .collect()
    };

    Ok(SimReport {
        queue: first.queue,
        k_max: first.k_max,
        seed: first.seed,
        streams,
        cycles: reports.iter().map(|r| r.cycles).sum(),
        total_time: reports.iter().map(|r| r.total_time).sum(),
        busy_cycle_mean: col(&|r| r.busy_cycle_mean),
        busy_period_mean: col(&|r| r.busy_period_mean),
        sojourn_mean: vec_col(&|r, k| r.sojourn_mean[k]),
        entries_per_cycle: vec_col(&|r, k| r.entries_per_cycle[k]),
        entries_upward_per_cycle: vec_col(&|r, k| r.entries_upward_per_cycle[k]),
        time_in_state_per_cycle: vec_col(&|r, k| r.time_in_state_per_cycle[k]),
        occupancy: vec_col(&|r, k| r.occupancy[k]),
        occupancy_overflow: col(&|r| r.occupancy_overflow),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sc(lambda: f64, spec: &str, cycles: u64, seed: u64) -> SimConfig {
        SimConfig {
            queue: QueueConfig::new(lambda, spec.parse().unwrap()).unwrap(),
            cycles,
            k_max: 8,
            seed,
            replications: 1,
        }
    }

    fn within(est: &Estimate, target: f64, sigmas: f64) -> bool {
        (est.estimate - target).abs() <= sigmas * est.standard_error
    }

    #[test]
    fn sampler_deterministic_point_mass() {
        let d: ServiceDistribution<f64> = "det:alpha=1.0".parse().unwrap();
        let mut rng = ChaCha12Rng::seed_from_u64(1);
        for _ in 0..100 {
            assert_eq!(sample_service(&d, &mut rng), 1.0);
        }
    }

    #[test]
    fn sampler_moments() {
        let n = 1_000_000usize;
        let mut rng = ChaCha12Rng::seed_from_u64(7);
        let exp: ServiceDistribution<f64> = "exp:alpha=1.0".parse().unwrap();
        let mean: f64 = (0..n).map(|_| sample_service(&exp, &mut rng)).sum::<f64>() / n as f64;
        assert!((mean - 1.0).abs() < 3.0 / (n as f64).sqrt());

        let erl: ServiceDistribution<f64> = "erlang:n=2,alpha=1.0".parse().unwrap();
        let draws: Vec<f64> = (0..n).map(|_| sample_service(&erl, &mut rng)).collect();
        let m = draws.iter().sum::<f64>() / n as f64;
        let var = draws.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (n - 1) as f64;
        // Erlang variance alpha^2/n = 0.5; its sampling SE is ~ sqrt(2/n)*var.
        assert!((var - 0.5).abs() < 0.005, "variance {var}");

        let h: ServiceDistribution<f64> = "hyperexp2:p=0.5,alpha1=0.5,alpha2=1.5".parse().unwrap();
        let mean: f64 = (0..n).map(|_| sample_service(&h, &mut rng)).sum::<f64>() / n as f64;
        assert!((mean - 1.0).abs() < 4.0 * (1.5f64 / n as f64).sqrt());

        let u: ServiceDistribution<f64> = "uniform:a=0,b=2".parse().unwrap();
        let mean: f64 = (0..n).map(|_| sample_service(&u, &mut rng)).sum::<f64>() / n as f64;
        assert!((mean - 1.0).abs() < 3.0 * (1.0f64 / 3.0 / n as f64).sqrt());
    }

    #[test]
    fn determinism() {
        let c = sc(1.0, "erlang:n=2,alpha=1.0", 2_000, 42);
        let a = run(&c).unwrap();
        let b = run(&c).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn mm_inf_anchors() {
        let report = run(&sc(1.0, "exp:alpha=1.0", 100_000, 11)).unwrap();
        let e = std::f64::consts::E;
        assert!(within(&report.busy_cycle_mean, e, 3.0), "{:?}", report.busy_cycle_mean);
        assert!(within(&report.busy_period_mean, e - 1.0, 3.0));
        assert!(within(&report.sojourn_mean[0], 1.0, 3.0));
        // m_k = 1/(k+1) for exponential service at rho = 1.
        for k in 1..=4usize {
            assert!(
                within(&report.sojourn_mean[k], 1.0 / (k as f64 + 1.0), 3.5),
                "k={k}: {:?}",
                report.sojourn_mean[k]
            );
        }
        // v_1 = 2 at rho = 1.
        assert!(within(&report.entries_per_cycle[1], 2.0, 3.0));
        assert_eq!(report.entries_per_cycle[0].estimate, 1.0);
        assert_eq!(report.entries_per_cycle[0].standard_error, 0.0);
    }

    #[test]
    fn occupancy_is_poisson_and_sums_to_one() {
        let report = run(&sc(1.0, "uniform:a=0,b=2", 100_000, 5)).unwrap();
        let rho: f64 = 1.0;
        let mut pois = (-rho).exp();
        for k in 0..=6usize {
            if k > 0 {
                pois *= rho / k as f64;
            }
            assert!(
                within(&report.occupancy[k], pois, 3.5),
                "k={k}: {:?} vs {pois}",
                report.occupancy[k]
            );
        }
        let total: f64 = report.occupancy.iter().map(|e| e.estimate).sum::<f64>()
            + report.occupancy_overflow.estimate;
        assert!((total - 1.0).abs() < 1e-12, "sum {total}");
    }

    #[test]
    fn busy_cycle_decomposition() {
        let report = run(&sc(0.5, "erlang:n=2,alpha=1.0", 50_000, 3)).unwrap();
        let lhs = report.busy_cycle_mean.estimate;
        let rhs = report.busy_period_mean.estimate + report.sojourn_mean[0].estimate;
        let tol = 3.0
            * (report.busy_period_mean.standard_error + report.sojourn_mean[0].standard_error);
        assert!((lhs - rhs).abs() <= tol + 1e-12);
    }

    #[test]
    fn merge_identity_and_pooling() {
        let one = run(&sc(1.0, "exp:alpha=1.0", 5_000, 9)).unwrap();
        let merged = merge(std::slice::from_ref(&one)).unwrap();
        assert_eq!(one, merged);

        // Two equal-weight reports pool to the midpoint.
        let c2 = SimConfig {
            replications: 2,
            ..sc(1.0, "exp:alpha=1.0", 5_000, 9)
        };
        let pooled = run(&c2).unwrap();
        assert_eq!(pooled.cycles, 10_000);
        let a = run_replication(&c2, 0).unwrap();
        let b = run_replication(&c2, 1).unwrap();
        let expect = 0.5 * (a.busy_cycle_mean.estimate + b.busy_cycle_mean.estimate);
        assert!((pooled.busy_cycle_mean.estimate - expect).abs() < 1e-12);
    }

    #[test]
    fn merge_rejects_mismatch_and_duplicates() {
        let a = run(&sc(1.0, "exp:alpha=1.0", 1_000, 9)).unwrap();
        let b = run(&sc(0.5, "exp:alpha=1.0", 1_000, 10)).unwrap();
        assert!(matches!(merge(&[a.clone(), b]), Err(SimError::MismatchedConfig(_))));
        assert!(matches!(
            merge(&[a.clone(), a.clone()]),
            Err(SimError::DuplicateStream { .. })
        ));
    }

    #[test]
    fn replication_pooling_shrinks_standard_error() {
        let base = sc(1.0, "exp:alpha=1.0", 20_000, 21);
        let one = run(&base).unwrap();
        let four = run(&SimConfig {
            replications: 4,
            ..base
        })
        .unwrap();
        let ratio = four.busy_cycle_mean.standard_error / one.busy_cycle_mean.standard_error;
        assert!((ratio - 0.5).abs() < 0.1, "SE ratio {ratio}");
    }

    #[test]
    fn config_validation() {
        let mut c = sc(1.0, "exp:alpha=1.0", 0, 1);
        assert!(matches!(run(&c), Err(SimError::NoCycles)));
        c.cycles = 10;
        c.replications = 0;
        assert!(matches!(run(&c), Err(SimError::NoReplications)));
        c.cycles = CYCLE_BUDGET;
        c.replications = 2;
        assert!(matches!(run(&c), Err(SimError::OverBudget(_))));
    }
}
