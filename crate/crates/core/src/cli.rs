//! Command-line front end: sweeps, trajectories, thresholds and the oracle
//! verification suite.

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use thiserror::Error;

use crate::bipartite::{self, SuccessRule};
use crate::error::PurifyError;
use crate::multipartite;
use crate::oracle::{self, OracleCap, VerificationReport};
use crate::states::{convert_noise, max_in_fidelity, NoiseInput, MAX_PARTIES, MIN_PARTIES};

pub const CSV_HEADER: &str = "n,delta,epsilon,k_bi,cost_bi,k_multi,cost_multi,log2_ratio,status";

/// Largest register the verify subcommand accepts even with an override.
pub const ORACLE_CAP_LIMIT: usize = 12;

pub const FIG1_N_RANGE: (u32, u32) = (3, 20);
pub const FIG1_DELTA: f64 = 0.2;
pub const FIG2_N: u32 = 10;
pub const FIG2_DELTA_RANGE: (f64, f64) = (0.01, 0.9);
pub const FIG2_POINTS: usize = 30;
pub const DEFAULT_EPSILON: f64 = 0.01;
pub const DEFAULT_TOL: f64 = 1e-10;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Purify(#[from] PurifyError),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            _ => 1,
        }
    }
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Default)]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Default)]
pub enum CostModel {
    /// `1 / (q + r + s)` of the final unnormalized weights.
    #[default]
    Paper,
    /// `2^k / prod(P_i)`.
    Expected,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Protocol {
    Bipartite,
    Multipartite,
}

#[derive(Debug, Parser)]
#[command(name = "ghz-purify", version, about = "GHZ purification cost analysis and oracle checks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct SharedArgs {
    #[arg(long, default_value_t = DEFAULT_EPSILON)]
    pub epsilon: f64,
    /// Write to this path instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = OutputFormat::Csv)]
    pub format: OutputFormat,
    #[arg(long, value_enum, default_value_t = CostModel::Paper)]
    pub cost_model: CostModel,
    #[arg(long, default_value_t = oracle::DEFAULT_SEED)]
    pub seed: u64,
    /// Largest oracle register in qubits; 12 enables n = 6 for the two-copy map.
    #[arg(long, default_value_t = OracleCap::DEFAULT_QUBITS)]
    pub oracle_cap: usize,
    #[arg(long, default_value_t = DEFAULT_TOL)]
    pub tol: f64,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Cost comparison sweep over n (fixed delta) or over delta (fixed n).
    Compare {
        #[arg(long)]
        n_min: Option<u32>,
        #[arg(long)]
        n_max: Option<u32>,
        #[arg(long)]
        delta: Option<f64>,
        #[arg(long)]
        n: Option<u32>,
        #[arg(long)]
        delta_min: Option<f64>,
        #[arg(long)]
        delta_max: Option<f64>,
        #[arg(long)]
        delta_points: Option<usize>,
        #[command(flatten)]
        shared: SharedArgs,
    },
    /// Per-round dump of one protocol.
    Trajectory {
        #[arg(long, value_enum)]
        protocol: Protocol,
        #[arg(long)]
        n: u32,
        #[arg(long)]
        q0: f64,
        #[arg(long, default_value_t = 5)]
        k: usize,
        #[command(flatten)]
        shared: SharedArgs,
    },
    /// Dense-oracle checks of every closed form.
    Verify {
        #[arg(long, default_value_t = 2)]
        n_min: u32,
        #[arg(long, default_value_t = 5)]
        n_max: u32,
        #[command(flatten)]
        shared: SharedArgs,
    },
    /// Closed-form and numeric distillability thresholds.
    Threshold {
        #[arg(long, default_value_t = 3)]
        n_min: u32,
        #[arg(long, default_value_t = 12)]
        n_max: u32,
        #[command(flatten)]
        shared: SharedArgs,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub enum Sweep {
    /// Fixed delta, n over a range.
    Parties { n_min: u32, n_max: u32, delta: f64 },
    /// Fixed n, log-spaced delta grid.
    Noise { n: u32, delta_min: f64, delta_max: f64, points: usize },
}

impl Sweep {
    pub fn points(&self) -> Vec<(u32, f64)> {
        match *self {
            Sweep::Parties { n_min, n_max, delta } => (n_min..=n_max).map(|n| (n, delta)).collect(),
            Sweep::Noise { n, delta_min, delta_max, points } => log_grid(delta_min, delta_max, points)
                .into_iter()
                .map(|d| (n, d))
                .collect(),
        }
    }
}

/// `points` log-spaced values from `lo` to `hi` inclusive.
pub fn log_grid(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    if points == 1 {
        return vec![lo];
    }
    let (a, b) = (lo.ln(), hi.ln());
    (0..points)
        .map(|i| match i {
            0 => lo,
            _ if i == points - 1 => hi,
            _ => (a + (b - a) * i as f64 / (points - 1) as f64).exp(),
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub enum Task {
    Compare(Sweep),
    Trajectory { protocol: Protocol, n: u32, q0: f64, k: usize },
    Verify { n_min: u32, n_max: u32 },
    Threshold { n_min: u32, n_max: u32 },
}

/// A validated invocation.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub task: Task,
    pub epsilon: f64,
    pub cost_model: CostModel,
    pub out: Option<PathBuf>,
    pub format: OutputFormat,
    pub seed: u64,
    pub oracle_cap: OracleCap,
    pub tol: f64,
}

fn check_n(n: u32, what: &str) -> Result<(), CliError> {
    if !(MIN_PARTIES..=MAX_PARTIES).contains(&n) {
        return Err(usage(format!("{what} = {n} outside {MIN_PARTIES}..={MAX_PARTIES}")));
    }
    Ok(())
}

fn check_range(lo: u32, hi: u32, what: &str) -> Result<(), CliError> {
    check_n(lo, &format!("{what} min"))?;
    check_n(hi, &format!("{what} max"))?;
    if lo > hi {
        return Err(usage(format!("{what} range {lo}..{hi} is empty")));
    }
    Ok(())
}

fn check_delta(n: u32, delta: f64) -> Result<(), CliError> {
    let max = max_in_fidelity(n);
    if !(0.0..=max).contains(&delta) {
        return Err(usage(format!("delta = {delta} outside [0, {max}] for n = {n}")));
    }
    Ok(())
}

impl RunConfig {
    pub fn from_cli(cli: Cli) -> Result<Self, CliError> {
        let (task, shared) = match cli.command {
            Command::Compare { n_min, n_max, delta, n, delta_min, delta_max, delta_points, shared } => {
                let fig1 = n_min.is_some() || n_max.is_some() || delta.is_some();
                let fig2 = n.is_some() || delta_min.is_some() || delta_max.is_some() || delta_points.is_some();
                let sweep = if fig1 && fig2 {
                    return Err(usage(
                        "compare takes either --n-min/--n-max/--delta or --n/--delta-min/--delta-max/--delta-points",
                    ));
                } else if fig2 {
                    Sweep::Noise {
                        n: n.unwrap_or(FIG2_N),
                        delta_min: delta_min.unwrap_or(FIG2_DELTA_RANGE.0),
                        delta_max: delta_max.unwrap_or(FIG2_DELTA_RANGE.1),
                        points: delta_points.unwrap_or(FIG2_POINTS),
                    }
                } else {
                    Sweep::Parties {
                        n_min: n_min.unwrap_or(FIG1_N_RANGE.0),
                        n_max: n_max.unwrap_or(FIG1_N_RANGE.1),
                        delta: delta.unwrap_or(FIG1_DELTA),
                    }
                };
                match &sweep {
                    Sweep::Parties { n_min, n_max, delta } => {
                        check_range(*n_min, *n_max, "n")?;
                        for n in *n_min..=*n_max {
                            check_delta(n, *delta)?;
                        }
                    }
                    Sweep::Noise { n, delta_min, delta_max, points } => {
                        check_n(*n, "n")?;
                        if *points == 0 {
                            return Err(usage("--delta-points must be at least 1"));
                        }
                        if !(*delta_min > 0.0 && delta_min <= delta_max) {
                            return Err(usage("log-spaced delta grid needs 0 < delta-min <= delta-max"));
                        }
                        check_delta(*n, *delta_max)?;
                    }
                }
                (Task::Compare(sweep), shared)
            }
            Command::Trajectory { protocol, n, q0, k, shared } => {
                check_n(n, "n")?;
                if !(0.0..=1.0).contains(&q0) {
                    return Err(usage(format!("--q0 = {q0} outside [0, 1]")));
                }
                (Task::Trajectory { protocol, n, q0, k }, shared)
            }
            Command::Verify { n_min, n_max, shared } => {
                check_range(n_min, n_max, "n")?;
                if shared.oracle_cap > ORACLE_CAP_LIMIT {
                    return Err(usage(format!(
                        "--oracle-cap {} exceeds the supported limit of {ORACLE_CAP_LIMIT} qubits",
                        shared.oracle_cap
                    )));
                }
                if 2 * n_max as usize > shared.oracle_cap {
                    return Err(usage(format!(
                        "verifying n = {n_max} needs {} oracle qubits; the cap is {} (raise it with --oracle-cap)",
                        2 * n_max,
                        shared.oracle_cap
                    )));
                }
                (Task::Verify { n_min, n_max }, shared)
            }
            Command::Threshold { n_min, n_max, shared } => {
                check_range(n_min, n_max, "n")?;
                (Task::Threshold { n_min, n_max }, shared)
            }
        };
        if !(shared.epsilon > 0.0 && shared.epsilon < 1.0) {
            return Err(usage(format!("--epsilon = {} outside (0, 1)", shared.epsilon)));
        }
        if !(shared.tol > 0.0) {
            return Err(usage(format!("--tol = {} must be positive", shared.tol)));
        }
        Ok(Self {
            task,
            epsilon: shared.epsilon,
            cost_model: shared.cost_model,
            out: shared.out,
            format: shared.format,
            seed: shared.seed,
            oracle_cap: OracleCap::new(shared.oracle_cap),
            tol: shared.tol,
        })
    }
}

/// Why a protocol produced no cost for a sweep point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Infeasible {
    Unreachable,
    BelowThreshold,
    CapExceeded,
}

impl Infeasible {
    fn from_error(e: &PurifyError) -> Option<Self> {
        match e {
            PurifyError::Unreachable { .. } => Some(Self::Unreachable),
            PurifyError::BelowThreshold { .. } => Some(Self::BelowThreshold),
            PurifyError::CapExceeded { .. } => Some(Self::CapExceeded),
            _ => None,
        }
    }

    fn tag(self) -> &'static str {
        match self {
            Self::Unreachable => "unreachable",
            Self::BelowThreshold => "below_threshold",
            Self::CapExceeded => "cap_exceeded",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonRecord {
    pub n: u32,
    pub delta: f64,
    pub epsilon: f64,
    pub k_bi: Option<usize>,
    pub cost_bi: Option<f64>,
    pub k_multi: Option<usize>,
    pub cost_multi: Option<f64>,
    pub log2_ratio: Option<f64>,
    pub status: String,
}

impl ComparisonRecord {
    pub fn is_ok(&self) -> bool {
        self.status == "ok"
    }
}

/// Evaluates both planners at one `(n, delta)` point.
pub fn compare_point(n: u32, delta: f64, epsilon: f64, model: CostModel) -> Result<ComparisonRecord, CliError> {
    let q0 = convert_noise(n, NoiseInput::InFidelity(delta))?.q;
    let mut status = Vec::new();
    let bi = match bipartite::plan_bipartite(n, q0, epsilon, bipartite::DEFAULT_K_MAX) {
        Ok(p) => Some((p.k, p.expected_cost)),
        Err(e) => match Infeasible::from_error(&e) {
            Some(why) => {
                status.push(format!("bi_{}", why.tag()));
                None
            }
            None => return Err(e.into()),
        },
    };
    let multi = match multipartite::plan_multipartite(n, q0, epsilon, multipartite::DEFAULT_K_MAX) {
        Ok((p, _)) => Some((
            p.k,
            match model {
                CostModel::Paper => p.cost_paper,
                CostModel::Expected => p.cost_expected,
            },
        )),
        Err(e) => match Infeasible::from_error(&e) {
            Some(why) => {
                status.push(format!("multi_{}", why.tag()));
                None
            }
            None => return Err(e.into()),
        },
    };
    let log2_ratio = match (bi, multi) {
        (Some((_, b)), Some((_, m))) if b.is_finite() && m.is_finite() => Some((b / m).log2()),
        _ => None,
    };
    Ok(ComparisonRecord {
        n,
        delta,
        epsilon,
        k_bi: bi.map(|x| x.0),
        cost_bi: bi.map(|x| x.1).filter(|c| c.is_finite()),
        k_multi: multi.map(|x| x.0),
        cost_multi: multi.map(|x| x.1).filter(|c| c.is_finite()),
        log2_ratio,
        status: if status.is_empty() { "ok".into() } else { status.join("+") },
    })
}

pub fn run_compare(sweep: &Sweep, epsilon: f64, model: CostModel) -> Result<Vec<ComparisonRecord>, CliError> {
    sweep
        .points()
        .into_iter()
        .map(|(n, delta)| compare_point(n, delta, epsilon, model))
        .collect()
}

/// 17 significant digits.
pub fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

fn fmt_opt_float(x: Option<f64>) -> String {
    x.map(fmt_float).unwrap_or_default()
}

fn fmt_opt_int(x: Option<usize>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

fn csv_string(header: &[&str], rows: Vec<Vec<String>>) -> Result<String, CliError> {
    let mut w = csv::WriterBuilder::new().from_writer(Vec::new());
    w.write_record(header)?;
    for row in rows {
        w.write_record(&row)?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

pub fn render_comparison(records: &[ComparisonRecord], format: OutputFormat) -> Result<String, CliError> {
    match format {
        OutputFormat::Json => Ok(serde_json::to_string_pretty(records)? + "\n"),
        OutputFormat::Csv => {
            let header: Vec<&str> = CSV_HEADER.split(',').collect();
            let rows = records
                .iter()
                .map(|r| {
                    vec![
                        r.n.to_string(),
                        fmt_float(r.delta),
                        fmt_float(r.epsilon),
                        fmt_opt_int(r.k_bi),
                        fmt_opt_float(r.cost_bi),
                        fmt_opt_int(r.k_multi),
                        fmt_opt_float(r.cost_multi),
                        fmt_opt_float(r.log2_ratio),
                        r.status.clone(),
                    ]
                })
                .collect();
            csv_string(&header, rows)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThresholdRow {
    pub n: u32,
    pub closed_form: f64,
    pub numeric: Option<f64>,
    pub abs_diff: Option<f64>,
    /// `1 - closed_form`: the white-noise weight tolerated at the threshold.
    pub noise_tolerance: f64,
}

pub fn run_threshold(n_min: u32, n_max: u32, tol: f64) -> Result<Vec<ThresholdRow>, CliError> {
    (n_min..=n_max)
        .map(|n| {
            let t = multipartite::distillability_threshold(n, tol)?;
            Ok(ThresholdRow {
                n,
                closed_form: t.closed_form,
                numeric: t.numeric,
                abs_diff: t.numeric.map(|x| (x - t.closed_form).abs()),
                noise_tolerance: 1.0 - t.closed_form,
            })
        })
        .collect()
}

fn render_threshold(rows: &[ThresholdRow], format: OutputFormat) -> Result<String, CliError> {
    match format {
        OutputFormat::Json => Ok(serde_json::to_string_pretty(rows)? + "\n"),
        OutputFormat::Csv => csv_string(
            &["n", "closed_form", "numeric", "abs_diff", "noise_tolerance"],
            rows.iter()
                .map(|r| {
                    vec![
                        r.n.to_string(),
                        fmt_float(r.closed_form),
                        fmt_opt_float(r.numeric),
                        fmt_opt_float(r.abs_diff),
                        fmt_float(r.noise_tolerance),
                    ]
                })
                .collect(),
        ),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrajectoryRow {
    pub round: usize,
    pub q: f64,
    pub r: Option<f64>,
    pub s: Option<f64>,
    pub trace: Option<f64>,
    pub fidelity: f64,
    pub p_success: Option<f64>,
    pub cost: f64,
}

pub fn run_trajectory(
    protocol: Protocol,
    n: u32,
    q0: f64,
    k: usize,
    model: CostModel,
) -> Result<Vec<TrajectoryRow>, CliError> {
    match protocol {
        Protocol::Bipartite => Ok(bipartite::trajectory(n, q0, k, SuccessRule::default())?
            .into_iter()
            .map(|p| TrajectoryRow {
                round: p.round,
                q: p.q,
                r: None,
                s: None,
                trace: None,
                fidelity: p.teleport_fidelity,
                p_success: p.step.map(|s| s.p_success),
                cost: p.cumulative_cost,
            })
            .collect()),
        Protocol::Multipartite => {
            let t = multipartite::trajectory(n, q0, k)?;
            let mut prod = 1.0;
            Ok(t.states
                .iter()
                .enumerate()
                .map(|(i, st)| {
                    let p = (i > 0).then(|| t.success_probs[i - 1]);
                    if let Some(p) = p {
                        prod *= p;
                    }
                    let cost = match model {
                        CostModel::Paper => 1.0 / st.trace(),
                        CostModel::Expected => 2f64.powi(i as i32) / prod,
                    };
                    TrajectoryRow {
                        round: i,
                        q: st.q,
                        r: Some(st.r),
                        s: Some(st.s),
                        trace: Some(st.trace()),
                        fidelity: t.fidelities[i],
                        p_success: p,
                        cost,
                    }
                })
                .collect())
        }
    }
}

fn render_trajectory(rows: &[TrajectoryRow], format: OutputFormat) -> Result<String, CliError> {
    match format {
        OutputFormat::Json => Ok(serde_json::to_string_pretty(rows)? + "\n"),
        OutputFormat::Csv => csv_string(
            &["round", "q", "r", "s", "trace", "fidelity", "p_success", "cost"],
            rows.iter()
                .map(|r| {
                    vec![
                        r.round.to_string(),
                        fmt_float(r.q),
                        fmt_opt_float(r.r),
                        fmt_opt_float(r.s),
                        fmt_opt_float(r.trace),
                        fmt_float(r.fidelity),
                        fmt_opt_float(r.p_success),
                        fmt_float(r.cost),
                    ]
                })
                .collect(),
        ),
    }
}

/// Runs every oracle suite for `n_min..=n_max`, sequentially.
pub fn run_verify(n_min: u32, n_max: u32, tol: f64, seed: u64, cap: OracleCap) -> Result<VerificationReport, CliError> {
    let mut rep = VerificationReport::new();
    for n in n_min..=n_max {
        let n = n as usize;
        rep.extend(oracle::verify_lambda_identities(n, tol, seed, cap)?);
        if n >= 3 {
            rep.extend(oracle::preparation_checks(n, tol, cap)?);
        }
        rep.extend(oracle::teleport_checks(n, tol, cap)?);
    }
    rep.extend(oracle::bbpssw_checks(tol)?);
    Ok(rep)
}

fn render_report(rep: &VerificationReport, format: OutputFormat) -> Result<String, CliError> {
    match format {
        OutputFormat::Json => Ok(serde_json::to_string_pretty(rep)? + "\n"),
        OutputFormat::Csv => csv_string(
            &["check", "max_error", "tolerance", "pass"],
            rep.checks
                .iter()
                .map(|c| vec![c.name.clone(), fmt_float(c.max_error), fmt_float(c.tolerance), c.pass.to_string()])
                .collect(),
        ),
    }
}

/// Output text plus the process exit code.
pub struct RunOutput {
    pub text: String,
    pub exit_code: i32,
}

pub fn execute(config: &RunConfig) -> Result<RunOutput, CliError> {
    let (text, exit_code) = match &config.task {
        Task::Compare(sweep) => {
            let recs = run_compare(sweep, config.epsilon, config.cost_model)?;
            (render_comparison(&recs, config.format)?, 0)
        }
        Task::Trajectory { protocol, n, q0, k } => {
            let rows = run_trajectory(*protocol, *n, *q0, *k, config.cost_model)?;
            (render_trajectory(&rows, config.format)?, 0)
        }
        Task::Verify { n_min, n_max } => {
            let rep = run_verify(*n_min, *n_max, config.tol, config.seed, config.oracle_cap)?;
            (render_report(&rep, config.format)?, if rep.pass { 0 } else { 1 })
        }
        Task::Threshold { n_min, n_max } => {
            let rows = run_threshold(*n_min, *n_max, config.tol)?;
            (render_threshold(&rows, config.format)?, 0)
        }
    };
    Ok(RunOutput { text, exit_code })
}

/// Parses, validates, runs and writes output. Returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    let result = RunConfig::from_cli(cli).and_then(|cfg| {
        let out = execute(&cfg)?;
        match &cfg.out {
            Some(path) => std::fs::write(path, &out.text)?,
            None => std::io::stdout().write_all(out.text.as_bytes())?,
        }
        Ok(out.exit_code)
    });
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
