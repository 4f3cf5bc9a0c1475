//! `nasearch` command-line front end.
//!
//! Exit codes: 0 success, 1 verification or I/O failure, 2 invalid
//! arguments, 3 integration failure, 4 accuracy failure.

pub mod verify;

use std::ffi::OsString;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::analytic::{AnalyticError, LimitProbability};
use crate::model::{ModelError, ScheduleI, ScheduleII};
use crate::propagator::{
    simulate_i, simulate_ii, uniform_grid, PropagatorError, Trajectory, DEFAULT_TOL, TOL_RANGE,
};
use crate::sweep::{
    figure_dataset, grid_meta, limit_cell, sweep_ab, write_grid_json, write_trajectory_csv,
    FigureId, FigureOverrides, GridN, GridSpec, SweepError, FIGURE_SAMPLES,
};

pub use verify::{run_verify, Suite, VerifyReport};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_INTEGRATION: i32 = 3;
pub const EXIT_ACCURACY: i32 = 4;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("integration failed: {0}")]
    Integration(#[from] PropagatorError),
    #[error("accuracy: {0}")]
    Accuracy(String),
    #[error("{0}")]
    Failure(String),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Integration(_) => EXIT_INTEGRATION,
            CliError::Accuracy(_) => EXIT_ACCURACY,
            CliError::Failure(_) | CliError::Io(_) | CliError::Json(_) => EXIT_FAILURE,
        }
    }
}

impl From<ModelError> for CliError {
    fn from(e: ModelError) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl From<AnalyticError> for CliError {
    fn from(e: AnalyticError) -> Self {
        match e {
            AnalyticError::Usage(m) => CliError::Usage(m),
            other => CliError::Accuracy(other.to_string()),
        }
    }
}

impl From<SweepError> for CliError {
    fn from(e: SweepError) -> Self {
        match e {
            SweepError::InvalidGrid(m) => CliError::Usage(format!("invalid grid: {m}")),
            SweepError::Model(m) => m.into(),
            SweepError::Propagator(p) => p.into(),
            SweepError::Analytic(a) => a.into(),
            SweepError::Io(io) => io.into(),
            SweepError::Json(j) => j.into(),
            SweepError::Pool(m) => CliError::Failure(m),
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "nasearch", version, about = "Non-adiabatic continuous-time search: simulation, closed forms and sweeps")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Integrate the Schrödinger equation for one schedule and write a trajectory CSV.
    Simulate(SimulateArgs),
    /// Print the limiting success probability p(a, b) of the linear sweep.
    Limit(LimitArgs),
    /// Evaluate p(a, b) on a grid and write it as JSON.
    Sweep(SweepArgs),
    /// Regenerate the trajectories behind a figure.
    Figure(FigureArgs),
    /// Run the self-verification suites.
    Verify(VerifyArgs),
    /// Re-run a command from the metadata it wrote.
    Replay(ReplayArgs),
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=2))]
    pub algorithm: u8,
    #[arg(long, value_parser = parse_count)]
    pub n: u64,
    #[arg(long, allow_negative_numbers = true)]
    pub epsilon: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub alpha: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub a: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub b: Option<f64>,
    /// End time (absolute units).
    #[arg(long, allow_negative_numbers = true, conflicts_with = "t_max_in_tau")]
    pub t_max: Option<f64>,
    /// End time in units of τ (algorithm 1 only).
    #[arg(long, allow_negative_numbers = true)]
    pub t_max_in_tau: Option<f64>,
    #[arg(long, default_value_t = FIGURE_SAMPLES)]
    pub samples: usize,
    #[arg(long, default_value_t = DEFAULT_TOL)]
    pub tol: f64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct LimitArgs {
    /// Database size, or `inf` for the N → ∞ limit.
    #[arg(long, default_value = "inf")]
    pub n: GridN,
    #[arg(long, allow_negative_numbers = true)]
    pub a: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub b: f64,
    /// Print a JSON object instead of text.
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// `lo:hi`
    #[arg(long, default_value = "0.2:25", allow_hyphen_values = true)]
    pub a_range: String,
    #[arg(long, default_value = "0:10", allow_hyphen_values = true)]
    pub b_range: String,
    /// `n_a x n_b`
    #[arg(long, default_value = "250x250")]
    pub cells: String,
    #[arg(long)]
    pub n: GridN,
    #[arg(long)]
    pub out: PathBuf,
    /// Worker threads (default: $NASEARCH_WORKERS, else all cores).
    #[arg(long)]
    pub workers: Option<usize>,
}

#[derive(Debug, Args)]
pub struct FigureArgs {
    /// fig1, fig2 or fig5
    #[arg(long)]
    pub id: FigureId,
    #[arg(long)]
    pub out_dir: PathBuf,
    #[arg(long, default_value_t = FIGURE_SAMPLES)]
    pub samples: usize,
    #[arg(long, default_value_t = DEFAULT_TOL)]
    pub tol: f64,
    #[arg(long)]
    pub workers: Option<usize>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, value_enum, default_value_t = Suite::All)]
    pub suite: Suite,
    /// Coarser lattices and grids.
    #[arg(long)]
    pub fast: bool,
    /// Also write the JSON report to this file.
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ReplayArgs {
    /// A `.meta.json` sidecar or a grid JSON file.
    pub meta: PathBuf,
    /// Output path (directory for figures) overriding the recorded one.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub workers: Option<usize>,
}

/// Integer count; exact values like `1e6` are accepted.
fn parse_count(s: &str) -> Result<u64, String> {
    match s.parse::<GridN>()? {
        GridN::Finite(n) => Ok(n),
        GridN::Infinite => Err("a finite N is required here".into()),
    }
}

fn parse_range(s: &str, what: &str) -> Result<(f64, f64), CliError> {
    let bad = || CliError::Usage(format!("--{what} expects lo:hi, got {s:?}"));
    let (lo, hi) = s.split_once(':').ok_or_else(bad)?;
    let lo: f64 = lo.trim().parse().map_err(|_| bad())?;
    let hi: f64 = hi.trim().parse().map_err(|_| bad())?;
    Ok((lo, hi))
}

fn parse_cells(s: &str) -> Result<(usize, usize), CliError> {
    let bad = || CliError::Usage(format!("--cells expects NAxNB, got {s:?}"));
    let (a, b) = s.to_ascii_lowercase().split_once('x').map(|(a, b)| (a.to_string(), b.to_string())).ok_or_else(bad)?;
    Ok((a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?))
}

/// Resolved configuration of a run; written next to every output and
/// accepted back by `replay`. Output locations and worker counts are kept
/// out of it since they do not change any result.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "lowercase")]
pub enum RunConfig {
    Simulate(SimulateConfig),
    Sweep(SweepConfig),
    Figure(FigureConfig),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulateConfig {
    pub algorithm: u8,
    #[serde(rename = "N")]
    pub n: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_max: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_max_in_tau: Option<f64>,
    pub samples: usize,
    pub tol: f64,
}

#[derive(Debug, Clone, Copy)]
pub enum ResolvedSchedule {
    I(ScheduleI),
    II(ScheduleII),
}

impl SimulateConfig {
    /// Checks flag combinations and builds the schedule and end time.
    pub fn resolve(&self) -> Result<(ResolvedSchedule, f64), CliError> {
        let usage = |m: &str| Err(CliError::Usage(m.to_string()));
        check_tol(self.tol)?;
        if self.samples < 2 {
            return usage("--samples must be at least 2");
        }
        let (sched, tau) = match self.algorithm {
            1 => {
                if self.a.is_some() || self.b.is_some() {
                    return usage("--a/--b belong to algorithm 2");
                }
                let (Some(eps), Some(alpha)) = (self.epsilon, self.alpha) else {
                    return usage("algorithm 1 requires --epsilon and --alpha");
                };
                let s = ScheduleI::new(self.n, eps, alpha)?;
                (ResolvedSchedule::I(s), Some(s.tau()))
            }
            2 => {
                if self.epsilon.is_some() || self.alpha.is_some() {
                    return usage("--epsilon/--alpha belong to algorithm 1");
                }
                if self.t_max_in_tau.is_some() {
                    return usage("--t-max-in-tau applies to algorithm 1 only");
                }
                let (Some(a), Some(b)) = (self.a, self.b) else {
                    return usage("algorithm 2 requires --a and --b");
                };
                (ResolvedSchedule::II(ScheduleII::new(self.n, a, b)?), None)
            }
            k => return usage(&format!("unknown algorithm {k}")),
        };
        let t_max = match (self.t_max, self.t_max_in_tau, tau) {
            (Some(t), None, _) => t,
            (None, Some(x), Some(tau)) => x * tau,
            (None, None, _) => return usage("one of --t-max or --t-max-in-tau is required"),
            _ => return usage("--t-max and --t-max-in-tau are mutually exclusive"),
        };
        if !(t_max.is_finite() && t_max > 0.0) {
            return usage(&format!("end time {t_max} must be positive and finite"));
        }
        Ok((sched, t_max))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub grid: GridSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FigureConfig {
    pub id: FigureId,
    pub samples: usize,
    pub tol: f64,
}

fn check_tol(tol: f64) -> Result<(), CliError> {
    if !(TOL_RANGE.0..=TOL_RANGE.1).contains(&tol) {
        return Err(CliError::Usage(format!(
            "--tol {tol:e} outside [{:e}, {:e}]",
            TOL_RANGE.0, TOL_RANGE.1
        )));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulateSummary {
    pub t_max: f64,
    pub final_p_s: f64,
    pub final_p_p: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tau: Option<f64>,
    pub t_c: Option<f64>,
    pub accepted_steps: usize,
    pub rejected_steps: usize,
    pub max_norm_drift: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SimulateMeta {
    pub config: RunConfig,
    pub output: PathBuf,
    pub time_unit: String,
    pub code_version: String,
    pub summary: SimulateSummary,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FigureCurveMeta {
    pub label: String,
    pub file: String,
    pub time_unit: String,
    pub time_unit_value: f64,
    pub schedule: crate::propagator::ScheduleTag,
    pub final_p_s: f64,
    pub max_norm_drift: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FigureMeta {
    pub config: RunConfig,
    pub code_version: String,
    pub curves: Vec<FigureCurveMeta>,
}

pub fn sidecar_path(out: &Path) -> PathBuf {
    let mut s: OsString = out.as_os_str().to_owned();
    s.push(".meta.json");
    PathBuf::from(s)
}

fn write_json(path: &Path, value: &impl Serialize) -> Result<(), CliError> {
    let mut w = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map_or_else(|| "none".to_string(), |v| format!("{v:.10}"))
}

fn write_csv(path: &Path, traj: &Trajectory, unit: f64) -> Result<(), CliError> {
    let mut w = BufWriter::new(File::create(path)?);
    write_trajectory_csv(&mut w, traj, unit)?;
    w.flush()?;
    Ok(())
}

pub fn simulate(cfg: &SimulateConfig, out: &Path, stdout: &mut dyn Write) -> Result<SimulateSummary, CliError> {
    let (sched, t_max) = cfg.resolve()?;
    let grid = uniform_grid(t_max, cfg.samples);
    let (traj, tau, tc) = match sched {
        ResolvedSchedule::I(s) => (simulate_i(&s, &grid, cfg.tol)?, Some(s.tau()), s.tc()),
        ResolvedSchedule::II(s) => (simulate_ii(&s, &grid, cfg.tol)?, None, Some(s.tc())),
    };
    write_csv(out, &traj, 1.0)?;
    let last = traj.last().expect("grid has at least two points");
    let summary = SimulateSummary {
        t_max,
        final_p_s: last.p_s,
        final_p_p: last.p_p,
        tau,
        t_c: tc,
        accepted_steps: traj.meta.accepted_steps,
        rejected_steps: traj.meta.rejected_steps,
        max_norm_drift: traj.meta.max_norm_drift,
    };
    let meta = SimulateMeta {
        config: RunConfig::Simulate(cfg.clone()),
        output: out.to_path_buf(),
        time_unit: "absolute".into(),
        code_version: env!("CARGO_PKG_VERSION").into(),
        summary: summary.clone(),
    };
    write_json(&sidecar_path(out), &meta)?;
    writeln!(
        stdout,
        "final P_s = {:.10}  t_max = {t_max:.10}  tau = {}  t_c = {}  norm drift = {:.2e}",
        last.p_s,
        fmt_opt(tau),
        fmt_opt(tc),
        traj.meta.max_norm_drift
    )?;
    Ok(summary)
}

pub fn limit(args: &LimitArgs, stdout: &mut dyn Write) -> Result<LimitProbability, CliError> {
    if !(args.a.is_finite() && args.a > 0.0) {
        return Err(CliError::Usage(format!("--a {} must be > 0", args.a)));
    }
    if !args.b.is_finite() {
        return Err(CliError::Usage("--b must be finite".into()));
    }
    let lp = limit_cell(args.n, args.a, args.b)?;
    if args.json {
        let v = serde_json::json!({
            "N": args.n, "a": args.a, "b": args.b,
            "p": lp.value, "raw": lp.raw, "estimated_error": lp.estimated_error,
            "accurate": lp.accurate(),
        });
        writeln!(stdout, "{v}")?;
    } else {
        writeln!(
            stdout,
            "p = {:.16e}  (N = {}, a = {}, b = {}, estimated error {:.1e}, raw {:.16e})",
            lp.value, args.n, args.a, args.b, lp.estimated_error, lp.raw
        )?;
    }
    if !lp.accurate() {
        return Err(CliError::Accuracy(format!(
            "estimated error {:.2e} exceeds the accuracy target",
            lp.estimated_error
        )));
    }
    Ok(lp)
}

pub fn sweep(cfg: &SweepConfig, out: &Path, workers: Option<usize>, stdout: &mut dyn Write) -> Result<(), CliError> {
    let grid = sweep_ab(&cfg.grid, workers)?;
    let meta = grid_meta(&grid, Some(serde_json::to_value(RunConfig::Sweep(cfg.clone()))?));
    let mut w = BufWriter::new(File::create(out)?);
    write_grid_json(&mut w, &grid, &meta)?;
    w.flush()?;
    writeln!(
        stdout,
        "{} cells, accurate fraction {:.6}, {} failed, {} clamped -> {}",
        meta.cells,
        meta.accurate_fraction,
        meta.failed_cells.len(),
        meta.clamped_cells.len(),
        out.display()
    )?;
    if !meta.failed_cells.is_empty() {
        return Err(CliError::Accuracy(format!("{} cells could not be evaluated", meta.failed_cells.len())));
    }
    Ok(())
}

pub fn figure(cfg: &FigureConfig, out_dir: &Path, workers: Option<usize>, stdout: &mut dyn Write) -> Result<(), CliError> {
    check_tol(cfg.tol)?;
    fs::create_dir_all(out_dir)?;
    let ov = FigureOverrides { samples: Some(cfg.samples), tol: Some(cfg.tol) };
    let curves = figure_dataset(cfg.id, &ov, workers)?;
    let mut metas = vec![];
    for c in &curves {
        let file = format!("{}_{}.csv", cfg.id, c.label);
        write_csv(&out_dir.join(&file), &c.trajectory, c.time_unit)?;
        let last = c.trajectory.last().expect("non-empty trajectory");
        writeln!(stdout, "{file}: final P_s = {:.10}", last.p_s)?;
        metas.push(FigureCurveMeta {
            label: c.label.clone(),
            file,
            time_unit: c.time_unit_name.into(),
            time_unit_value: c.time_unit,
            schedule: c.trajectory.meta.schedule,
            final_p_s: last.p_s,
            max_norm_drift: c.trajectory.meta.max_norm_drift,
        });
    }
    let meta = FigureMeta {
        config: RunConfig::Figure(cfg.clone()),
        code_version: env!("CARGO_PKG_VERSION").into(),
        curves: metas,
    };
    write_json(&out_dir.join(format!("{}.meta.json", cfg.id)), &meta)?;
    Ok(())
}

pub fn replay(args: &ReplayArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let text = fs::read_to_string(&args.meta)?;
    let v: serde_json::Value = serde_json::from_str(&text)?;
    let cfg_value = v
        .get("config")
        .or_else(|| v.get("meta").and_then(|m| m.get("config")))
        .ok_or_else(|| CliError::Usage(format!("{} holds no run configuration", args.meta.display())))?;
    let cfg: RunConfig = serde_json::from_value(cfg_value.clone())
        .map_err(|e| CliError::Usage(format!("bad configuration in {}: {e}", args.meta.display())))?;
    let recorded_out = v.get("output").and_then(|o| o.as_str()).map(PathBuf::from);
    let meta_dir = args.meta.parent().map(Path::to_path_buf).unwrap_or_default();
    match cfg {
        RunConfig::Simulate(c) => {
            let out = args.out.clone().or(recorded_out).ok_or_else(|| CliError::Usage("no output path".into()))?;
            simulate(&c, &out, stdout).map(|_| ())
        }
        RunConfig::Sweep(c) => {
            let out = args.out.clone().unwrap_or_else(|| args.meta.clone());
            sweep(&c, &out, args.workers, stdout)
        }
        RunConfig::Figure(c) => {
            let out = args.out.clone().unwrap_or(meta_dir);
            figure(&c, &out, args.workers, stdout)
        }
    }
}

fn verify_cmd(args: &VerifyArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<(), CliError> {
    let report = run_verify(args.suite, args.fast);
    for c in &report.checks {
        let tag = if c.passed { "PASS" } else { "FAIL" };
        match &c.error {
            Some(e) => writeln!(stderr, "{tag} {}/{}: {e}", c.suite, c.name)?,
            None => writeln!(stderr, "{tag} {}/{}: {:.3e} {} {:.3e}", c.suite, c.name, c.value, c.relation, c.limit)?,
        }
    }
    let json = serde_json::to_string_pretty(&report)?;
    writeln!(stdout, "{json}")?;
    if let Some(p) = &args.report {
        fs::write(p, format!("{json}\n"))?;
    }
    if !report.passed {
        let names: Vec<String> = report.failures().map(|c| format!("{}/{}", c.suite, c.name)).collect();
        return Err(CliError::Failure(format!("failed invariants: {}", names.join(", "))));
    }
    Ok(())
}

pub fn execute(cli: Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<(), CliError> {
    match cli.command {
        Command::Simulate(a) => {
            let cfg = SimulateConfig {
                algorithm: a.algorithm,
                n: a.n,
                epsilon: a.epsilon,
                alpha: a.alpha,
                a: a.a,
                b: a.b,
                t_max: a.t_max,
                t_max_in_tau: a.t_max_in_tau,
                samples: a.samples,
                tol: a.tol,
            };
            simulate(&cfg, &a.out, stdout).map(|_| ())
        }
        Command::Limit(a) => limit(&a, stdout).map(|_| ()),
        Command::Sweep(a) => {
            let (a_min, a_max) = parse_range(&a.a_range, "a-range")?;
            let (b_min, b_max) = parse_range(&a.b_range, "b-range")?;
            let (n_a, n_b) = parse_cells(&a.cells)?;
            let grid = GridSpec { a_min, a_max, b_min, b_max, n_a, n_b, n: a.n };
            grid.validate()?;
            sweep(&SweepConfig { grid }, &a.out, a.workers, stdout)
        }
        Command::Figure(a) => {
            if a.samples < 2 {
                return Err(CliError::Usage("--samples must be at least 2".into()));
            }
            figure(&FigureConfig { id: a.id, samples: a.samples, tol: a.tol }, &a.out_dir, a.workers, stdout)
        }
        Command::Verify(a) => verify_cmd(&a, stdout, stderr),
        Command::Replay(a) => replay(&a, stdout),
    }
}

/// Parses `args` (program name first), runs the command and returns the exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            let text = e.render().to_string();
            let _ = if code == 0 { write!(stdout, "{text}") } else { write!(stderr, "{text}") };
            return code;
        }
    };
    match execute(cli, stdout, stderr) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}
