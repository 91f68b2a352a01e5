use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use mginf::bounds;
use mginf::sim::{self, SimConfig};
use mginf::table::{self, fmt_sig12};
use mginf::{QueueConfig64, ServiceDistribution64};

/// Infinite-server queue analysis: Markov-renewal approximations, bounds,
/// exact anchors and a regenerative simulator.
#[derive(Parser)]
#[command(name = "mginf", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Analytic table: sojourn means, bounds, visit counts, cycle block.
    Analyze(AnalyzeArgs),
    /// Regenerative simulation of the true queue.
    Simulate(SimulateArgs),
    /// Joined table: approximation vs bounds vs exact vs simulation.
    Compare(CompareArgs),
    /// Relative-error report or goodness-threshold query.
    Errors(ErrorsArgs),
}

#[derive(Args, Clone)]
struct CommonArgs {
    /// Poisson arrival rate.
    #[arg(long)]
    lambda: Option<f64>,
    /// Service distribution spec, e.g. exp:alpha=1.0 or erlang:n=2,alpha=1.0.
    #[arg(long)]
    dist: Option<String>,
    /// Output format.
    #[arg(long, value_parser = ["csv", "json"])]
    format: Option<String>,
    /// Write output to a file instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Optional TOML config file; flags override file values.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct AnalyzeArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Largest state in the table.
    #[arg(long)]
    kmax: Option<u32>,
}

#[derive(Args)]
struct SimulateArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Regeneration cycles per replication.
    #[arg(long)]
    cycles: Option<u64>,
    /// RNG seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Independent replications (substreams), pooled into one report.
    #[arg(long)]
    replications: Option<u32>,
    /// Largest state tracked.
    #[arg(long)]
    kmax: Option<u32>,
}

#[derive(Args)]
struct CompareArgs {
    #[command(flatten)]
    common: CommonArgs,
    #[arg(long)]
    kmax: Option<u32>,
    #[arg(long)]
    cycles: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    replications: Option<u32>,
}

#[derive(Args)]
struct ErrorsArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Target relative error for the goodness-threshold query.
    #[arg(long = "target-r")]
    target_r: Option<f64>,
    /// Traffic intensity; switches the threshold query to the delta form.
    #[arg(long)]
    rho: Option<f64>,
}

/// Same key names as the flags.
#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    lambda: Option<f64>,
    dist: Option<String>,
    kmax: Option<u32>,
    cycles: Option<u64>,
    seed: Option<u64>,
    replications: Option<u32>,
    format: Option<String>,
    out: Option<PathBuf>,
    #[serde(rename = "target-r")]
    target_r: Option<f64>,
    rho: Option<f64>,
}

enum CliError {
    /// Bad flags or parameters: exit 1.
    Usage(String),
    /// Quadrature or simulation failure: exit 2.
    Numeric(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Numeric(_) => 2,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Numeric(m) => m,
        }
    }
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn load_config(path: &Option<PathBuf>) -> Result<FileConfig, CliError> {
    match path {
        None => Ok(FileConfig::default()),
        Some(p) => {
            let text = fs::read_to_string(p)
                .map_err(|e| usage(format!("cannot read config {}: {e}", p.display())))?;
            toml::from_str(&text).map_err(|e| usage(format!("bad config {}: {e}", p.display())))
        }
    }
}

fn queue_config(
    lambda: Option<f64>,
    dist: Option<&str>,
) -> Result<QueueConfig64, CliError> {
    let lambda = lambda.ok_or_else(|| usage("--lambda is required"))?;
    let spec = dist.ok_or_else(|| usage("--dist is required"))?;
    let dist: ServiceDistribution64 = spec
        .parse()
        .map_err(|e| usage(format!("invalid --dist: {e}")))?;
    QueueConfig64::new(lambda, dist).map_err(|e| usage(format!("invalid --lambda: {e}")))
}

fn emit(
    format: Option<&str>,
    out: &Option<PathBuf>,
    json: String,
    csv: String,
) -> Result<(), CliError> {
    let body = match format.unwrap_or("json") {
        "csv" => csv,
        _ => json,
    };
    match out {
        None => {
            print!("{body}");
            Ok(())
        }
        Some(p) => fs::write(p, body)
            .map_err(|e| usage(format!("cannot write {}: {e}", p.display()))),
    }
}

fn build_analysis(
    queue: &QueueConfig64,
    k_max: u32,
) -> Result<table::AnalysisTable, CliError> {
    let t = table::analyze(queue, k_max).map_err(|e| CliError::Numeric(e.to_string()))?;
    // Diagnostics only; they never affect the exit status.
    eprintln!(
        "note: recurrence series truncated at k={} (tail estimate {})",
        t.cycle.truncation_k,
        fmt_sig12(t.cycle.truncation_error_estimate)
    );
    if !t.errors.applicable {
        eprintln!(
            "note: error criteria inapplicable: {}",
            t.errors.inapplicability_reason.as_deref().unwrap_or("")
        );
    }
    for b in t.cycle.bounds.mu0.iter().chain(&t.cycle.bounds.busy_period) {
        if !b.applicable {
            eprintln!(
                "note: bound {} inapplicable: {}",
                b.source,
                b.inapplicability_reason.as_deref().unwrap_or("")
            );
        }
    }
    Ok(t)
}

fn cmd_analyze(args: AnalyzeArgs) -> Result<(), CliError> {
    let file = load_config(&args.common.config)?;
    let queue = queue_config(
        args.common.lambda.or(file.lambda),
        args.common.dist.as_deref().or(file.dist.as_deref()),
    )?;
    let k_max = args.kmax.or(file.kmax).ok_or_else(|| usage("--kmax is required"))?;
    let t = build_analysis(&queue, k_max)?;
    emit(
        args.common.format.as_deref().or(file.format.as_deref()),
        &args.common.out.clone().or(file.out),
        serde_json::to_string_pretty(&t).expect("serializable") + "\n",
        t.to_csv(),
    )
}

fn sim_config(
    queue: QueueConfig64,
    cycles: Option<u64>,
    seed: Option<u64>,
    replications: Option<u32>,
    k_max: Option<u32>,
) -> Result<SimConfig, CliError> {
    Ok(SimConfig {
        queue,
        cycles: cycles.ok_or_else(|| usage("--cycles is required"))?,
        seed: seed.ok_or_else(|| usage("--seed is required"))?,
        replications: replications.unwrap_or(1),
        k_max: k_max.unwrap_or(10),
    })
}

fn cmd_simulate(args: SimulateArgs) -> Result<(), CliError> {
    let file = load_config(&args.common.config)?;
    let queue = queue_config(
        args.common.lambda.or(file.lambda),
        args.common.dist.as_deref().or(file.dist.as_deref()),
    )?;
    let sc = sim_config(
        queue,
        args.cycles.or(file.cycles),
        args.seed.or(file.seed),
        args.replications.or(file.replications),
        args.kmax.or(file.kmax),
    )?;
    let report = sim::run(&sc).map_err(|e| CliError::Numeric(e.to_string()))?;
    emit(
        args.common.format.as_deref().or(file.format.as_deref()),
        &args.common.out.clone().or(file.out),
        serde_json::to_string_pretty(&report).expect("serializable") + "\n",
        report.to_csv(),
    )
}

fn cmd_compare(args: CompareArgs) -> Result<(), CliError> {
    let file = load_config(&args.common.config)?;
    let queue = queue_config(
        args.common.lambda.or(file.lambda),
        args.common.dist.as_deref().or(file.dist.as_deref()),
    )?;
    let k_max = args.kmax.or(file.kmax).ok_or_else(|| usage("--kmax is required"))?;
    let analysis = build_analysis(&queue, k_max)?;
    let sc = sim_config(
        queue,
        args.cycles.or(file.cycles),
        args.seed.or(file.seed),
        args.replications.or(file.replications),
        Some(k_max),
    )?;
    let report = sim::run(&sc).map_err(|e| CliError::Numeric(e.to_string()))?;
    let joined = table::compare(analysis, &report);
    emit(
        args.common.format.as_deref().or(file.format.as_deref()),
        &args.common.out.clone().or(file.out),
        serde_json::to_string_pretty(&joined).expect("serializable") + "\n",
        joined.to_csv(),
    )
}

#[derive(Serialize)]
struct ThresholdAnswer {
    target_r: f64,
    rho: Option<f64>,
    scv_max: f64,
}

fn cmd_errors(args: ErrorsArgs) -> Result<(), CliError> {
    let file = load_config(&args.common.config)?;
    let format = args.common.format.as_deref().or(file.format.as_deref()).map(str::to_owned);
    let out = args.common.out.clone().or(file.out);

    if let Some(r) = args.target_r.or(file.target_r) {
        let rho = args.rho.or(file.rho);
        let scv_max =
            bounds::goodness_threshold(r, rho).map_err(|e| usage(e.to_string()))?;
        let answer = ThresholdAnswer { target_r: r, rho, scv_max };
        let csv = format!(
            "quantity,value\ntarget_r,{}\nrho,{}\nscv_max,{}\n",
            fmt_sig12(r),
            rho.map(fmt_sig12).unwrap_or_default(),
            fmt_sig12(scv_max)
        );
        return emit(
            format.as_deref(),
            &out,
            serde_json::to_string_pretty(&answer).expect("serializable") + "\n",
            csv,
        );
    }

    let queue = queue_config(
        args.common.lambda.or(file.lambda),
        args.common.dist.as_deref().or(file.dist.as_deref()),
    )?;
    let report = bounds::error_report(&queue);
    if !report.applicable {
        eprintln!(
            "note: inapplicable: {}",
            report.inapplicability_reason.as_deref().unwrap_or("")
        );
    }
    let mut csv = String::from("quantity,value,applicable\n");
    let mut push = |name: &str, v: Option<f64>| {
        csv.push_str(&format!(
            "{name},{},{}\n",
            v.map(fmt_sig12).unwrap_or_default(),
            report.applicable
        ));
    };
    push("epsilon", report.epsilon);
    push("epsilon_cap", report.epsilon_cap);
    push("delta", report.delta);
    push("delta_cap", report.delta_cap);
    push("universal_cap", Some(report.universal_cap));
    emit(
        format.as_deref(),
        &out,
        serde_json::to_string_pretty(&report).expect("serializable") + "\n",
        csv,
    )
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::Analyze(args) => cmd_analyze(args),
        Command::Simulate(args) => cmd_simulate(args),
        Command::Compare(args) => cmd_compare(args),
        Command::Errors(args) => cmd_errors(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.code())
        }
    }
}
