//! Report rows, CSV emission and the JSON summary.

use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::Value;

use crate::CliError;

pub const CSV_HEADER: [&str; 6] = ["experiment", "param_json", "measured", "expected", "tolerance", "pass"];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportRow {
    pub experiment: String,
    pub params: Value,
    pub measured: f64,
    pub expected: Option<f64>,
    pub tolerance: Option<f64>,
    pub pass: bool,
    /// Distance to failure when the row has one; negative on failure.
    #[serde(skip)]
    pub margin: Option<f64>,
}

impl ReportRow {
    /// Passes when `|measured − expected| ≤ tolerance`.
    pub fn within(experiment: impl Into<String>, params: Value, measured: f64, expected: f64, tolerance: f64) -> Self {
        let margin = tolerance - (measured - expected).abs();
        Self {
            experiment: experiment.into(),
            params,
            measured,
            expected: Some(expected),
            tolerance: Some(tolerance),
            pass: margin >= 0.0,
            margin: Some(margin),
        }
    }

    /// Passes on a predicate decided by the caller.
    pub fn predicate(
        experiment: impl Into<String>,
        params: Value,
        measured: f64,
        expected: Option<f64>,
        pass: bool,
    ) -> Self {
        Self { experiment: experiment.into(), params, measured, expected, tolerance: None, pass, margin: None }
    }

    /// Informational row: passes while the value is finite.
    pub fn info(experiment: impl Into<String>, params: Value, measured: f64) -> Self {
        Self::predicate(experiment, params, measured, None, measured.is_finite())
    }

    pub fn with_margin(mut self, margin: f64) -> Self {
        self.margin = Some(margin);
        self
    }
}

/// Shortest round-trip form, in exponent notation outside `[1e-4, 1e15)`.
pub fn format_f64(x: f64) -> String {
    let a = x.abs();
    if x == 0.0 || !x.is_finite() || (1e-4..1e15).contains(&a) {
        x.to_string()
    } else {
        format!("{x:e}")
    }
}

fn opt(x: Option<f64>) -> String {
    x.map(format_f64).unwrap_or_default()
}

pub fn write_csv<W: Write>(rows: &[ReportRow], w: W) -> Result<(), CliError> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(CSV_HEADER)?;
    for r in rows {
        let params = serde_json::to_string(&r.params).map_err(|e| CliError::Io(e.to_string()))?;
        out.write_record([
            r.experiment.clone(),
            params,
            format_f64(r.measured),
            opt(r.expected),
            opt(r.tolerance),
            r.pass.to_string(),
        ])?;
    }
    out.flush().map_err(|e| CliError::Io(e.to_string()))?;
    Ok(())
}

pub fn csv_string(rows: &[ReportRow]) -> Result<String, CliError> {
    let mut buf = Vec::new();
    write_csv(rows, &mut buf)?;
    String::from_utf8(buf).map_err(|e| CliError::Io(e.to_string()))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WorstMargin {
    pub experiment: String,
    pub margin: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary {
    pub total: usize,
    pub failed: usize,
    pub failed_experiments: Vec<String>,
    pub worst_margin: Option<WorstMargin>,
    pub note: &'static str,
}

const NOTE: &str = "probe-norm spread thresholds (<= 10 bounded, >= 10 divergent) are heuristics; \
scaling rows are evidence, not proofs";

pub fn summarize(rows: &[ReportRow]) -> Summary {
    let failed_experiments: Vec<String> = rows.iter().filter(|r| !r.pass).map(|r| r.experiment.clone()).collect();
    let worst_margin = rows
        .iter()
        .filter_map(|r| r.margin.map(|m| (r, m)))
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .map(|(r, m)| WorstMargin { experiment: r.experiment.clone(), margin: m });
    Summary { total: rows.len(), failed: failed_experiments.len(), failed_experiments, worst_margin, note: NOTE }
}

pub fn summary_json(rows: &[ReportRow]) -> Result<String, CliError> {
    let mut s = serde_json::to_string_pretty(&summarize(rows)).map_err(|e| CliError::Io(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Csv,
    Json,
}

/// Writes the rows as CSV, or their summary as JSON, to `path`.
pub fn emit_report(rows: &[ReportRow], format: ReportFormat, path: &Path) -> Result<(), CliError> {
    if rows.is_empty() {
        return Err(CliError::Usage("report has no rows".into()));
    }
    let bytes = match format {
        ReportFormat::Csv => csv_string(rows)?,
        ReportFormat::Json => summary_json(rows)?,
    };
    std::fs::write(path, bytes).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

/// `report.csv` → `report.summary.json`.
pub fn summary_path(csv_path: &Path) -> PathBuf {
    csv_path.with_extension("summary.json")
}
