//! Assembly of the analysis and comparison tables consumed by the CLI,
//! plus their CSV renderings. JSON comes straight from serde; CSV is the
//! long form `{k, quantity, value, source, direction, applicable, stderr}`
//! with every number printed to 12 significant digits.

use serde::{Deserialize, Serialize};

use crate::bounds::{
    self, BoundValue, CycleBounds, Direction, ErrorReport, VisitBounds,
};
use crate::exact;
use crate::renewal::{self, QueueConfig, RenewalError, SojournMethod};
use crate::sim::SimReport;

/// Locale-independent rendering at 12 significant digits.
pub fn fmt_sig12(x: f64) -> String {
    if !x.is_finite() {
        return format!("{x}");
    }
    format!("{:.11e}", x)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisRow {
    pub k: u32,
    pub m: f64,
    pub method: SojournMethod,
    /// Regime-selected upper bound, absent at k = 0.
    pub regime_bound: Option<BoundValue<f64>>,
    pub class_bounds: Vec<BoundValue<f64>>,
    /// Exponential-service exact sojourn mean, when it exists.
    pub exact_m: Option<f64>,
    /// Visit count per cycle, absent at k = 0 (v_0 = 1 by convention).
    pub v: Option<f64>,
    pub time_in_state: Option<f64>,
    /// `alpha rho^{k-1}/k!`, exact for every service law.
    pub exact_time_in_state: f64,
    pub visit_bounds: Option<VisitBounds<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CycleBlock {
    pub mu0: f64,
    pub busy_period_mean: f64,
    pub truncation_k: u32,
    pub truncation_error_estimate: f64,
    pub exact_mu0: f64,
    pub exact_busy_period_mean: f64,
    pub bounds: CycleBounds<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisTable {
    pub lambda: f64,
    pub dist: String,
    pub rho: f64,
    pub scv: f64,
    pub rows: Vec<AnalysisRow>,
    pub cycle: CycleBlock,
    pub errors: ErrorReport<f64>,
}

/// Full table over `k = 0..=k_max`.
pub fn analyze(cfg: &QueueConfig<f64>, k_max: u32) -> Result<AnalysisTable, RenewalError> {
    let anchors = exact::exact_anchors(cfg, k_max);
    let metrics = renewal::entries_mean(cfg, k_max.max(1))?;

    let mut rows = Vec::with_capacity(k_max as usize + 1);
    for k in 0..=k_max {
        let sojourn = renewal::sojourn_mean(cfg, k)?;
        let idx = k as usize;
        rows.push(AnalysisRow {
            k,
            m: sojourn.m,
            method: sojourn.method,
            regime_bound: (k >= 1).then(|| bounds::regime_bound(cfg, k)),
            class_bounds: if k >= 1 {
                bounds::class_bounds(cfg, k)
            } else {
                Vec::new()
            },
            exact_m: anchors.mk_exponential.as_ref().map(|mk| mk[idx]),
            v: (k >= 1).then(|| metrics.v[idx - 1]),
            time_in_state: (k >= 1).then(|| metrics.time_in_state[idx - 1]),
            exact_time_in_state: anchors.mkvk[idx],
            visit_bounds: (k >= 1).then(|| bounds::visit_bounds(cfg, k)),
        });
    }

    Ok(AnalysisTable {
        lambda: cfg.lambda,
        dist: cfg.dist.to_string(),
        rho: cfg.rho(),
        scv: cfg.dist.scv(),
        rows,
        cycle: CycleBlock {
            mu0: metrics.mu0,
            busy_period_mean: metrics.busy_period_mean,
            truncation_k: metrics.truncation_k,
            truncation_error_estimate: metrics.truncation_error_estimate,
            exact_mu0: anchors.mu0,
            exact_busy_period_mean: anchors.eb,
            bounds: bounds::cycle_bounds(cfg),
        },
        errors: bounds::error_report(cfg),
    })
}

const CSV_HEADER: &str = "k,quantity,value,source,direction,applicable,stderr";

fn csv_line(
    k: Option<u32>,
    quantity: &str,
    value: f64,
    source: &str,
    direction: &str,
    applicable: bool,
    stderr: Option<f64>,
) -> String {
    format!(
        "{},{},{},{},{},{},{}",
        k.map(|k| k.to_string()).unwrap_or_default(),
        quantity,
        fmt_sig12(value),
        source,
        direction,
        applicable,
        stderr.map(fmt_sig12).unwrap_or_default()
    )
}

fn push_bound(lines: &mut Vec<String>, k: Option<u32>, quantity: &str, b: &BoundValue<f64>) {
    lines.push(csv_line(
        k,
        quantity,
        b.value,
        &b.source.to_string(),
        &b.direction.to_string(),
        b.applicable,
        None,
    ));
}

impl AnalysisTable {
    pub fn to_csv(&self) -> String {
        let mut lines = vec![CSV_HEADER.to_string()];
        lines.push(csv_line(None, "lambda", self.lambda, "config", "", true, None));
        lines.push(csv_line(None, "rho", self.rho, "config", "", true, None));
        lines.push(csv_line(None, "scv", self.scv, "config", "", true, None));

        for row in &self.rows {
            let k = Some(row.k);
            lines.push(csv_line(
                k,
                "m_k",
                row.m,
                &format!("computed({})", row.method),
                "",
                true,
                None,
            ));
            if let Some(b) = &row.regime_bound {
                push_bound(&mut lines, k, "m_k_regime_bound", b);
            }
            for b in &row.class_bounds {
                push_bound(&mut lines, k, "m_k_class_bound", b);
            }
            if let Some(exact_m) = row.exact_m {
                lines.push(csv_line(k, "m_k_exact", exact_m, "exact", "", true, None));
            }
            if let Some(v) = row.v {
                lines.push(csv_line(k, "v_k", v, "computed", "", true, None));
            }
            if let Some(t) = row.time_in_state {
                lines.push(csv_line(k, "mkvk", t, "computed", "", true, None));
            }
            lines.push(csv_line(
                k,
                "mkvk_exact",
                row.exact_time_in_state,
                "exact",
                "",
                true,
                None,
            ));
            if let Some(vb) = &row.visit_bounds {
                for b in &vb.vk {
                    push_bound(&mut lines, k, "v_k_bound", b);
                }
                for b in &vb.mkvk {
                    push_bound(&mut lines, k, "mkvk_bound", b);
                }
            }
        }

        let c = &self.cycle;
        lines.push(csv_line(None, "mu0", c.mu0, "computed", "", true, None));
        lines.push(csv_line(None, "busy_period_mean", c.busy_period_mean, "computed", "", true, None));
        lines.push(csv_line(
            None,
            "truncation_error_estimate",
            c.truncation_error_estimate,
            "computed",
            "",
            true,
            None,
        ));
        lines.push(csv_line(None, "mu0_exact", c.exact_mu0, "exact", "", true, None));
        lines.push(csv_line(
            None,
            "busy_period_mean_exact",
            c.exact_busy_period_mean,
            "exact",
            "",
            true,
            None,
        ));
        for b in &c.bounds.mu0 {
            push_bound(&mut lines, None, "mu0_bound", b);
        }
        for b in &c.bounds.busy_period {
            push_bound(&mut lines, None, "busy_period_bound", b);
        }

        let e = &self.errors;
        if let (Some(eps), Some(eps_cap), Some(delta), Some(delta_cap)) =
            (e.epsilon, e.epsilon_cap, e.delta, e.delta_cap)
        {
            lines.push(csv_line(None, "epsilon", eps, "computed", "", true, None));
            lines.push(csv_line(None, "epsilon_cap", eps_cap, "computed", "", true, None));
            lines.push(csv_line(None, "delta", delta, "computed", "", true, None));
            lines.push(csv_line(None, "delta_cap", delta_cap, "computed", "", true, None));
        }
        lines.push(csv_line(None, "universal_cap", e.universal_cap, "computed", "", true, None));

        lines.join("\n") + "\n"
    }
}

impl SimReport {
    pub fn to_csv(&self) -> String {
        let mut lines = vec![CSV_HEADER.to_string()];
        let scalar = |lines: &mut Vec<String>, name: &str, e: &crate::sim::Estimate| {
            lines.push(csv_line(
                None,
                name,
                e.estimate,
                "simulated",
                "",
                true,
                Some(e.standard_error),
            ));
        };
        scalar(&mut lines, "busy_cycle_mean", &self.busy_cycle_mean);
        scalar(&mut lines, "busy_period_mean", &self.busy_period_mean);
        let per_k = |lines: &mut Vec<String>, name: &str, v: &[crate::sim::Estimate]| {
            for (k, e) in v.iter().enumerate() {
                lines.push(csv_line(
                    Some(k as u32),
                    name,
                    e.estimate,
                    "simulated",
                    "",
                    true,
                    Some(e.standard_error),
                ));
            }
        };
        per_k(&mut lines, "sojourn_mean", &self.sojourn_mean);
        per_k(&mut lines, "entries_per_cycle", &self.entries_per_cycle);
        per_k(&mut lines, "entries_upward_per_cycle", &self.entries_upward_per_cycle);
        per_k(&mut lines, "time_in_state_per_cycle", &self.time_in_state_per_cycle);
        per_k(&mut lines, "occupancy", &self.occupancy);
        scalar(&mut lines, "occupancy_overflow", &self.occupancy_overflow);
        lines.join("\n") + "\n"
    }
}

/// Verdict of a bound checked against the simulation estimate at 3 SE.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundCheck {
    pub source: String,
    pub direction: Direction,
    pub value: f64,
    pub held: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub quantity: String,
    pub k: Option<u32>,
    pub mrp: f64,
    pub exact: Option<f64>,
    pub sim: f64,
    pub sim_stderr: f64,
    /// `(mrp - sim) / sim`.
    pub relative_deviation: f64,
    pub bound_checks: Vec<BoundCheck>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonTable {
    pub analysis: AnalysisTable,
    pub seed: u64,
    pub cycles: u64,
    pub rows: Vec<ComparisonRow>,
}

fn check_bounds(applicable: Vec<&BoundValue<f64>>, sim: f64, se: f64) -> Vec<BoundCheck> {
    applicable
        .into_iter()
        .filter(|b| b.applicable)
        .map(|b| BoundCheck {
            source: b.source.to_string(),
            direction: b.direction,
            held: match b.direction {
                Direction::Upper => b.value >= sim - 3.0 * se,
                Direction::Lower => b.value <= sim + 3.0 * se,
            },
            value: b.value,
        })
        .collect()
}

/// Joins the analytic table with a simulation report over the same queue.
pub fn compare(analysis: AnalysisTable, report: &SimReport) -> ComparisonTable {
    let mut rows = Vec::new();
    let k_reported = report.k_max.min(analysis.rows.len() as u32 - 1);

    for k in 0..=k_reported {
        let row = &analysis.rows[k as usize];
        let sim = &report.sojourn_mean[k as usize];
        let mut checks: Vec<&BoundValue<f64>> = row.class_bounds.iter().collect();
        if let Some(b) = &row.regime_bound {
            checks.push(b);
        }
        rows.push(ComparisonRow {
            quantity: "m_k".into(),
            k: Some(k),
            mrp: row.m,
            exact: row.exact_m,
            sim: sim.estimate,
            sim_stderr: sim.standard_error,
            relative_deviation: (row.m - sim.estimate) / sim.estimate,
            bound_checks: check_bounds(checks, sim.estimate, sim.standard_error),
        });
        if k >= 1 {
            let vb = row.visit_bounds.as_ref().expect("present for k >= 1");
            let sim = &report.entries_per_cycle[k as usize];
            let v = row.v.expect("present for k >= 1");
            rows.push(ComparisonRow {
                quantity: "v_k".into(),
                k: Some(k),
                mrp: v,
                exact: None,
                sim: sim.estimate,
                sim_stderr: sim.standard_error,
                relative_deviation: (v - sim.estimate) / sim.estimate,
                bound_checks: check_bounds(vb.vk.iter().collect(), sim.estimate, sim.standard_error),
            });
            let sim = &report.time_in_state_per_cycle[k as usize];
            let t = row.time_in_state.expect("present for k >= 1");
            rows.push(ComparisonRow {
                quantity: "mkvk".into(),
                k: Some(k),
                mrp: t,
                exact: Some(row.exact_time_in_state),
                sim: sim.estimate,
                sim_stderr: sim.standard_error,
                relative_deviation: (t - sim.estimate) / sim.estimate,
                bound_checks: check_bounds(
                    vb.mkvk.iter().collect(),
                    sim.estimate,
                    sim.standard_error,
                ),
            });
        }
    }

    let c = &analysis.cycle;
    rows.push(ComparisonRow {
        quantity: "mu0".into(),
        k: None,
        mrp: c.mu0,
        exact: Some(c.exact_mu0),
        sim: report.busy_cycle_mean.estimate,
        sim_stderr: report.busy_cycle_mean.standard_error,
        relative_deviation: (c.mu0 - report.busy_cycle_mean.estimate)
            / report.busy_cycle_mean.estimate,
        bound_checks: check_bounds(
            c.bounds.mu0.iter().collect(),
            report.busy_cycle_mean.estimate,
            report.busy_cycle_mean.standard_error,
        ),
    });
    rows.push(ComparisonRow {
        quantity: "busy_period_mean".into(),
        k: None,
        mrp: c.busy_period_mean,
        exact: Some(c.exact_busy_period_mean),
        sim: report.busy_period_mean.estimate,
        sim_stderr: report.busy_period_mean.standard_error,
        relative_deviation: (c.busy_period_mean - report.busy_period_mean.estimate)
            / report.busy_period_mean.estimate,
        bound_checks: check_bounds(
            c.bounds.busy_period.iter().collect(),
            report.busy_period_mean.estimate,
            report.busy_period_mean.standard_error,
        ),
    });

    ComparisonTable {
        analysis,
        seed: report.seed,
        cycles: report.cycles,
        rows,
    }
}

impl ComparisonTable {
    pub fn to_csv(&self) -> String {
        let mut lines =
            vec!["k,quantity,mrp,exact,sim,sim_stderr,relative_deviation,bounds_status".to_string()];
        for row in &self.rows {
            let status = if row.bound_checks.is_empty() {
                String::new()
            } else if row.bound_checks.iter().all(|c| c.held) {
                "HELD".to_string()
            } else {
                let violated: Vec<&str> = row
                    .bound_checks
                    .iter()
                    .filter(|c| !c.held)
                    .map(|c| c.source.as_str())
                    .collect();
                format!("VIOLATED({})", violated.join(";"))
            };
            lines.push(format!(
                "{},{},{},{},{},{},{},{}",
                row.k.map(|k| k.to_string()).unwrap_or_default(),
                row.quantity,
                fmt_sig12(row.mrp),
                row.exact.map(fmt_sig12).unwrap_or_default(),
                fmt_sig12(row.sim),
                fmt_sig12(row.sim_stderr),
                fmt_sig12(row.relative_deviation),
                status
            ));
        }
        lines.join("\n") + "\n"
    }
}
