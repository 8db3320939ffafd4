use std::fmt::Write as _;
use std::path::Path;

use serde::Serialize;
use serde_json::Value;

use crate::experiments::{ExperimentConfig, SummaryStats, TrialResult};

pub const REPORT_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub version: String,
    pub config: ExperimentConfig,
    pub summary: SummaryStats,
    pub trials_csv: String,
}

impl RunReport {
    pub fn new(cfg: &ExperimentConfig, summary: &SummaryStats, trials_csv: &str) -> Self {
        Self {
            version: REPORT_VERSION.to_string(),
            config: cfg.clone(),
            summary: summary.clone(),
            trials_csv: trials_csv.to_string(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepRow {
    pub value: f64,
    pub summary: SummaryStats,
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepReport {
    pub version: String,
    pub config: ExperimentConfig,
    pub parameter: String,
    pub rows: Vec<SweepRow>,
}

impl SweepReport {
    pub fn new(cfg: &ExperimentConfig, parameter: &str, rows: Vec<SweepRow>) -> Self {
        Self {
            version: REPORT_VERSION.to_string(),
            config: cfg.clone(),
            parameter: parameter.to_string(),
            rows,
        }
    }
}

/// 17 significant digits, scientific notation.
pub fn format_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// Pretty JSON with sorted keys and every float written by [`format_f64`].
pub fn to_stable_json<T: Serialize>(value: &T) -> String {
    let v = serde_json::to_value(value).expect("report serializes");
    let mut out = String::new();
    write_value(&mut out, &v, 0);
    out.push('\n');
    out
}

fn write_value(out: &mut String, v: &Value, depth: usize) {
    let pad = |out: &mut String, d: usize| out.extend(std::iter::repeat_n("  ", d));
    match v {
        Value::Null | Value::Bool(_) | Value::String(_) => out.push_str(&v.to_string()),
        Value::Number(n) => match (n.as_u64(), n.as_i64(), n.as_f64()) {
            (Some(u), _, _) if !n.is_f64() => write!(out, "{u}").expect("string write"),
            (_, Some(i), _) if !n.is_f64() => write!(out, "{i}").expect("string write"),
            (_, _, Some(f)) => out.push_str(&format_f64(f)),
            _ => out.push_str(&n.to_string()),
        },
        Value::Array(items) => {
            if items.is_empty() {
                out.push_str("[]");
                return;
            }
            out.push_str("[\n");
            for (k, item) in items.iter().enumerate() {
                pad(out, depth + 1);
                write_value(out, item, depth + 1);
                out.push_str(if k + 1 < items.len() { ",\n" } else { "\n" });
            }
            pad(out, depth);
            out.push(']');
        }
        Value::Object(map) => {
            if map.is_empty() {
                out.push_str("{}");
                return;
            }
            out.push_str("{\n");
            for (k, (key, item)) in map.iter().enumerate() {
                pad(out, depth + 1);
                out.push_str(&Value::String(key.clone()).to_string());
                out.push_str(": ");
                write_value(out, item, depth + 1);
                out.push_str(if k + 1 < map.len() { ",\n" } else { "\n" });
            }
            pad(out, depth);
            out.push('}');
        }
    }
}

fn outcomes_field(outcomes: &[(String, usize)]) -> String {
    outcomes
        .iter()
        .map(|(l, k)| format!("{l}={k}"))
        .collect::<Vec<_>>()
        .join(";")
}

pub(crate) fn write_trials_csv(path: &Path, trials: &[TrialResult]) -> Result<(), csv::Error> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["trial", "success", "attempts", "fidelity", "outcomes"])?;
    for t in trials {
        w.write_record([
            t.trial.to_string(),
            t.success.to_string(),
            t.attempts.to_string(),
            format_f64(t.fidelity),
            outcomes_field(&t.outcomes),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub(crate) fn write_sweep_csv(path: &Path, report: &SweepReport) -> Result<(), csv::Error> {
    let opt = |v: Option<f64>| v.map(format_f64).unwrap_or_default();
    let mut w = csv::Writer::from_path(path)?;
    w.write_record([
        "parameter",
        "value",
        "trials",
        "success_probability",
        "standard_error",
        "mean_fidelity",
        "min_fidelity",
        "mean_attempts",
    ])?;
    for r in &report.rows {
        let s = &r.summary;
        w.write_record([
            report.parameter.clone(),
            format_f64(r.value),
            s.trials.to_string(),
            format_f64(s.success_probability),
            format_f64(s.standard_error),
            opt(s.mean_fidelity),
            opt(s.min_fidelity),
            format_f64(s.mean_attempts),
        ])?;
    }
    w.flush()?;
    Ok(())
}
