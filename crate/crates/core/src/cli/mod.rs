//! Command-line front end: `run`, `sweep` and `list-presets`.
//!
//! Exit codes: 0 success, 1 invalid configuration, 2 `--check` violation,
//! 3 I/O failure.

mod report;

use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use crate::error::Error;
use crate::experiments::{run_trials, ExperimentConfig, Protocol, SummaryStats};
use crate::tol;

pub use report::{format_f64, to_stable_json, RunReport, SweepReport, SweepRow, REPORT_VERSION};

/// Built-in configurations, also shipped under `presets/`.
pub const PRESETS: [(&str, &str); 9] = [
    ("epr_ideal", include_str!("../../presets/epr_ideal.json")),
    ("epr_eta", include_str!("../../presets/epr_eta.json")),
    (
        "epr_thermal",
        include_str!("../../presets/epr_thermal.json"),
    ),
    (
        "epr_p_therm_sweep",
        include_str!("../../presets/epr_p_therm_sweep.json"),
    ),
    (
        "joint_eta05",
        include_str!("../../presets/joint_eta05.json"),
    ),
    ("gate_eta05", include_str!("../../presets/gate_eta05.json")),
    (
        "gate_detuning",
        include_str!("../../presets/gate_detuning.json"),
    ),
    (
        "gate_raw_eta05",
        include_str!("../../presets/gate_raw_eta05.json"),
    ),
    (
        "stationarity_thermal",
        include_str!("../../presets/stationarity_thermal.json"),
    ),
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Exit {
    Ok = 0,
    InvalidConfig = 1,
    CheckFailed = 2,
    Io = 3,
}

#[derive(Debug, Parser)]
#[command(
    name = "cavityq",
    version,
    about = "Cavity-QED purification protocol simulator"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run one configuration and write report.json and trials.csv.
    Run(RunArgs),
    /// Run a configuration over a parameter grid and write sweep.csv.
    Sweep(SweepArgs),
    /// Print the built-in presets, one JSON record per line.
    ListPresets,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    /// Config file, or the name of a built-in preset.
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub trials: Option<usize>,
    /// Exit with code 2 if the run violates the acceptance tolerance.
    #[arg(long)]
    pub check: bool,
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
    /// Worker threads (default: all cores).
    #[arg(long, env = "CAVITYQ_JOBS")]
    pub jobs: Option<usize>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub run: RunArgs,
    /// Grid as `name=v1,v2,...`; defaults to the config's sweep axis.
    #[arg(long)]
    pub axis: Option<String>,
}

/// Parses `args` (including the program name) and runs the command.
pub fn run_cli<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() {
                Exit::InvalidConfig
            } else {
                Exit::Ok
            };
            let _ = e.print();
            return code as i32;
        }
    };
    let result = match cli.command {
        Command::Run(a) => cmd_run(&a),
        Command::Sweep(a) => cmd_sweep(&a),
        Command::ListPresets => cmd_list_presets(),
    };
    match result {
        Ok(code) => code as i32,
        Err((code, msg)) => {
            eprintln!("error: {msg}");
            code as i32
        }
    }
}

type CmdResult = Result<Exit, (Exit, String)>;

fn invalid(e: impl std::fmt::Display) -> (Exit, String) {
    (Exit::InvalidConfig, e.to_string())
}

fn io_error(path: &Path, e: impl std::fmt::Display) -> (Exit, String) {
    (Exit::Io, format!("{}: {e}", path.display()))
}

/// Reads a config file; a path that does not exist but names a built-in
/// preset (with or without `.json`) loads the preset.
pub fn load_config(path: &Path) -> Result<ExperimentConfig, Error> {
    let text = match std::fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) => {
            let stem = path
                .file_stem()
                .and_then(|s| s.to_str())
                .unwrap_or_default();
            let builtin = path.parent().is_none_or(|p| p.as_os_str().is_empty());
            match PRESETS.iter().find(|(n, _)| *n == stem) {
                Some((_, body)) if builtin => body.to_string(),
                _ => {
                    return Err(Error::Config(format!(
                        "cannot read {}: {e}",
                        path.display()
                    )))
                }
            }
        }
    };
    ExperimentConfig::from_json(&text).map_err(|e| match e {
        Error::Config(m) => Error::Config(format!("{}: {m}", path.display())),
        other => other,
    })
}

fn resolve(args: &RunArgs) -> Result<ExperimentConfig, (Exit, String)> {
    let mut cfg = load_config(&args.config).map_err(invalid)?;
    if let Some(s) = args.seed {
        cfg.seed = s;
    }
    if let Some(t) = args.trials {
        cfg.trials = t;
    }
    cfg.validate().map_err(invalid)?;
    Ok(cfg)
}

/// Acceptance check behind `--check`.
///
/// Stationary noise (`p_therm = 0`) must give at least one success and
/// every successful trial at fidelity `>= 1 - 1e-9`. Thermal noise is not
/// expected to purify, so only a success is required. Stationarity scans
/// need a nondecreasing deviation column that vanishes at `p_therm = 0`.
pub fn check_passes(cfg: &ExperimentConfig, stats: &SummaryStats) -> bool {
    if cfg.protocol == Protocol::StationarityScan {
        let Some(points) = &stats.stationarity else {
            return false;
        };
        let monotone = points
            .windows(2)
            .all(|w| w[1].p_therm < w[0].p_therm || w[1].deviation >= w[0].deviation);
        return monotone
            && points
                .iter()
                .all(|p| p.p_therm > 0.0 || p.deviation <= tol::EXACT);
    }
    match stats.min_fidelity {
        Some(f) if cfg.noise.p_therm == 0.0 => f >= 1.0 - tol::PURITY,
        Some(_) => true,
        None => false,
    }
}

fn write(path: &Path, body: &[u8]) -> Result<(), (Exit, String)> {
    std::fs::write(path, body).map_err(|e| io_error(path, e))
}

fn prepare_out(dir: &Path) -> Result<(), (Exit, String)> {
    std::fs::create_dir_all(dir).map_err(|e| io_error(dir, e))
}

fn cmd_run(args: &RunArgs) -> CmdResult {
    let cfg = resolve(args)?;
    let start = Instant::now();
    let (stats, trials) = run_trials(&cfg, args.jobs).map_err(invalid)?;
    let elapsed = start.elapsed().as_secs_f64();
    prepare_out(&args.out)?;
    let report = RunReport::new(&cfg, &stats, "trials.csv");
    write(
        &args.out.join("report.json"),
        to_stable_json(&report).as_bytes(),
    )?;
    let csv_path = args.out.join("trials.csv");
    report::write_trials_csv(&csv_path, &trials).map_err(|e| io_error(&csv_path, e))?;
    write(
        &args.out.join("timing.json"),
        format!("{{\"wall_clock_seconds\": {}}}\n", format_f64(elapsed)).as_bytes(),
    )?;
    eprintln!(
        "{} trials, success {:.6} +- {:.6}, min fidelity {}, {elapsed:.2} s",
        stats.trials,
        stats.success_probability,
        stats.standard_error,
        stats
            .min_fidelity
            .map_or("n/a".to_string(), |f| format!("{f:.12}"))
    );
    if args.check && !check_passes(&cfg, &stats) {
        eprintln!("check failed");
        return Ok(Exit::CheckFailed);
    }
    Ok(Exit::Ok)
}

/// Parses `name=v1,v2,...`.
pub fn parse_axis(spec: &str) -> Result<(String, Vec<f64>), Error> {
    let (name, values) = spec
        .split_once('=')
        .ok_or_else(|| Error::Config(format!("axis `{spec}` is not of the form name=v1,v2")))?;
    let values = values
        .split(',')
        .map(str::trim)
        .filter(|v| !v.is_empty())
        .map(|v| {
            v.parse::<f64>()
                .map_err(|e| Error::Config(format!("axis value `{v}`: {e}")))
        })
        .collect::<Result<Vec<_>, _>>()?;
    if values.is_empty() {
        return Err(Error::Config("sweep grid is empty".into()));
    }
    Ok((name.trim().to_string(), values))
}

fn cmd_sweep(args: &SweepArgs) -> CmdResult {
    let cfg = resolve(&args.run)?;
    let (name, values) = match (&args.axis, &cfg.sweep) {
        (Some(a), _) => parse_axis(a).map_err(invalid)?,
        (None, Some(ax)) => (ax.parameter.clone(), ax.values.clone()),
        (None, None) => {
            return Err(invalid(
                "no sweep axis: pass --axis or set `sweep` in the config",
            ))
        }
    };
    let mut rows = Vec::with_capacity(values.len());
    let mut all_pass = true;
    let start = Instant::now();
    for v in values {
        let point = cfg.with_parameter(&name, v).map_err(invalid)?;
        point.validate().map_err(invalid)?;
        let (stats, _) = run_trials(&point, args.run.jobs).map_err(invalid)?;
        all_pass &= check_passes(&point, &stats);
        rows.push(SweepRow {
            value: v,
            summary: stats,
        });
    }
    let elapsed = start.elapsed().as_secs_f64();
    prepare_out(&args.run.out)?;
    let report = SweepReport::new(&cfg, &name, rows);
    write(
        &args.run.out.join("report.json"),
        to_stable_json(&report).as_bytes(),
    )?;
    let csv_path = args.run.out.join("sweep.csv");
    report::write_sweep_csv(&csv_path, &report).map_err(|e| io_error(&csv_path, e))?;
    write(
        &args.run.out.join("timing.json"),
        format!("{{\"wall_clock_seconds\": {}}}\n", format_f64(elapsed)).as_bytes(),
    )?;
    if args.run.check && !all_pass {
        eprintln!("check failed");
        return Ok(Exit::CheckFailed);
    }
    Ok(Exit::Ok)
}

fn cmd_list_presets() -> CmdResult {
    for (name, body) in PRESETS {
        let cfg = ExperimentConfig::from_json(body).map_err(invalid)?;
        let record = serde_json::json!({ "name": name, "config": cfg });
        println!("{}", serde_json::to_string(&record).map_err(invalid)?);
    }
    Ok(Exit::Ok)
}
