//! CSV rows and the JSON run summary.
//!
//! CSV header: `experiment,parameters,trial,metric,value,bound,pass`.
//! `parameters` is the flattened configuration as `key=value` pairs joined by
//! `;`. Numbers are written as `{:.16e}` (17 significant digits); `bound` and
//! `pass` are empty for unbounded metrics and `trial` is empty for aggregates.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::config::ExperimentConfig;
use crate::CliError;

#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub trial: Option<usize>,
    pub metric: String,
    pub value: f64,
    pub bound: Option<f64>,
    pub tolerance: f64,
}

impl ReportRow {
    pub fn measured(metric: impl Into<String>, value: f64) -> Self {
        ReportRow {
            trial: None,
            metric: metric.into(),
            value,
            bound: None,
            tolerance: 0.0,
        }
    }

    pub fn bounded(metric: impl Into<String>, value: f64, bound: f64) -> Self {
        ReportRow {
            bound: Some(bound),
            ..Self::measured(metric, value)
        }
    }

    pub fn trial(mut self, t: usize) -> Self {
        self.trial = Some(t);
        self
    }

    pub fn tolerance(mut self, tol: f64) -> Self {
        self.tolerance = tol;
        self
    }

    /// `value ≤ bound·(1 + tolerance)`; NaN fails.
    pub fn pass(&self) -> Option<bool> {
        self.bound.map(|b| self.value <= b * (1.0 + self.tolerance))
    }
}

/// Rows plus the empirical constants and remarks of one run.
#[derive(Debug, Clone, Default)]
pub struct Outcome {
    pub rows: Vec<ReportRow>,
    pub constants: BTreeMap<String, f64>,
    pub notes: Vec<String>,
}

impl Outcome {
    pub fn push(&mut self, row: ReportRow) {
        self.rows.push(row);
    }

    pub fn constant(&mut self, name: &str, value: f64) {
        self.constants.insert(name.to_string(), value);
    }

    pub fn note(&mut self, text: impl Into<String>) {
        self.notes.push(text.into());
    }

    pub fn bounded_count(&self) -> usize {
        self.rows.iter().filter(|r| r.bound.is_some()).count()
    }

    pub fn failures(&self) -> Vec<&ReportRow> {
        self.rows.iter().filter(|r| r.pass() == Some(false)).collect()
    }

    pub fn passed(&self) -> bool {
        self.failures().is_empty()
    }
}

pub fn fmt_num(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn write_csv(path: &Path, cfg: &ExperimentConfig, outcome: &Outcome) -> Result<(), CliError> {
    let params = cfg
        .flattened()
        .into_iter()
        .map(|(k, v)| format!("{k}={v}"))
        .collect::<Vec<_>>()
        .join(";");
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["experiment", "parameters", "trial", "metric", "value", "bound", "pass"])?;
    for r in &outcome.rows {
        w.write_record([
            cfg.experiment.clone(),
            params.clone(),
            r.trial.map(|t| t.to_string()).unwrap_or_default(),
            r.metric.clone(),
            fmt_num(r.value),
            r.bound.map(fmt_num).unwrap_or_default(),
            r.pass().map(|p| p.to_string()).unwrap_or_default(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct Summary<'a> {
    experiment: &'a str,
    anchor: &'a str,
    config: BTreeMap<String, String>,
    rows: usize,
    bounded: usize,
    failed: usize,
    pass: bool,
    constants: &'a BTreeMap<String, f64>,
    notes: &'a [String],
    wall_time_s: f64,
}

pub fn write_summary(
    path: &Path,
    cfg: &ExperimentConfig,
    anchor: &str,
    outcome: &Outcome,
    wall_time_s: f64,
) -> Result<(), CliError> {
    let summary = Summary {
        experiment: &cfg.experiment,
        anchor,
        config: cfg.flattened().into_iter().collect(),
        rows: outcome.rows.len(),
        bounded: outcome.bounded_count(),
        failed: outcome.failures().len(),
        pass: outcome.passed(),
        constants: &outcome.constants,
        notes: &outcome.notes,
        wall_time_s,
    };
    let mut f = std::fs::File::create(path)?;
    serde_json::to_writer_pretty(&mut f, &summary)?;
    writeln!(f)?;
    Ok(())
}

/// `<dir>/<experiment>.csv` and `<dir>/<experiment>.json`.
pub fn output_paths(cfg: &ExperimentConfig) -> (PathBuf, PathBuf) {
    (
        cfg.output.join(format!("{}.csv", cfg.experiment)),
        cfg.output.join(format!("{}.json", cfg.experiment)),
    )
}
