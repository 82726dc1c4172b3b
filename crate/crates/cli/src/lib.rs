//! Experiment harness for `lab-core`: configuration, registry, CSV/JSON
//! reports and the acceptance checks behind `lab verify`.

pub mod acceptance;
pub mod config;
pub mod experiments;
pub mod inputs;
pub mod registry;
pub mod report;

use std::time::Instant;

use lab_core::LabError;
use thiserror::Error;

use crate::config::ExperimentConfig;
use crate::report::{output_paths, write_csv, write_summary, Outcome};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Lab(#[from] LabError),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl CliError {
    /// 2 for usage and configuration problems, 1 for everything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Lab(LabError::Config(_) | LabError::Parse(_)) => 2,
            _ => 1,
        }
    }
}

/// Runs one configured experiment and writes `<out>/<name>.csv` and `.json`.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Outcome, CliError> {
    let entry = registry::find(&cfg.experiment).ok_or_else(|| {
        CliError::Usage(format!("unknown experiment {:?}; see `lab list`", cfg.experiment))
    })?;
    let start = Instant::now();
    let outcome = (entry.run)(cfg)?;
    let wall = start.elapsed().as_secs_f64();
    std::fs::create_dir_all(&cfg.output)?;
    let (csv, json) = output_paths(cfg);
    write_csv(&csv, cfg, &outcome)?;
    write_summary(&json, cfg, entry.anchor, &outcome, wall)?;
    Ok(outcome)
}
