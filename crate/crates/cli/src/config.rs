//! Flat `key = value` experiment configuration.
//!
//! ```text
//! # comments start with '#'
//! experiment = stechkin
//! grid = 32,4096
//! space = Lp:4
//! wavelet = db6
//! window = 6,6
//! trials = 64
//! seed = 1
//! tol.ratio = 1e-9
//! symbol = sign
//! ```
//!
//! `tol.<name>` entries go to the tolerance map; unknown keys are kept as
//! experiment parameters. Command-line flags override the file.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use lab_core::{Grid, SpaceSpec};

use crate::CliError;

pub const OUTPUT_DIR_VAR: &str = "LAB_OUTPUT_DIR";

#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub experiment: String,
    pub grid: (f64, usize),
    pub space: SpaceSpec,
    pub wavelet: String,
    pub window: (u32, u32),
    pub trials: usize,
    pub seed: u64,
    pub tolerances: BTreeMap<String, f64>,
    pub params: BTreeMap<String, String>,
    pub output: PathBuf,
}

impl ExperimentConfig {
    pub fn new(experiment: &str) -> Self {
        ExperimentConfig {
            experiment: experiment.to_string(),
            grid: (32.0, 1 << 12),
            space: SpaceSpec::lebesgue(4.0).expect("valid exponent"),
            wavelet: "db6".into(),
            window: (6, 6),
            trials: 64,
            seed: 1,
            tolerances: BTreeMap::new(),
            params: BTreeMap::new(),
            output: default_output_dir(),
        }
    }

    /// Applies a config file on top of the current values. An `experiment`
    /// key, when present, must name this experiment.
    pub fn apply_file(&mut self, path: &Path) -> Result<(), CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
        for (k, v) in parse_pairs(&text)? {
            if k == "experiment" && v != self.experiment {
                return Err(CliError::Usage(format!(
                    "{} configures {v:?}, not {:?}",
                    path.display(),
                    self.experiment
                )));
            }
            self.set(&k, &v)?;
        }
        Ok(())
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<(), CliError> {
        let bad = |what: &str| CliError::Usage(format!("{key} = {value:?}: {what}"));
        match key {
            "experiment" => self.experiment = value.to_string(),
            "grid" => {
                let (t, n) = value.split_once(',').ok_or_else(|| bad("expected T,N"))?;
                let t: f64 = t.trim().parse().map_err(|_| bad("T is not a number"))?;
                let n: usize = n.trim().parse().map_err(|_| bad("N is not an integer"))?;
                Grid::new(t, n).map_err(|e| bad(&e.to_string()))?;
                self.grid = (t, n);
            }
            "space" => self.space = value.parse().map_err(|e: lab_core::LabError| bad(&e.to_string()))?,
            "wavelet" => {
                lab_core::wavelets::Wavelet::new(value).map_err(|e| bad(&e.to_string()))?;
                self.wavelet = value.to_string();
            }
            "window" => {
                let (j, k) = value.split_once(',').ok_or_else(|| bad("expected J,K"))?;
                let j = j.trim().parse().map_err(|_| bad("J is not a nonnegative integer"))?;
                let k = k.trim().parse().map_err(|_| bad("K is not a nonnegative integer"))?;
                self.window = (j, k);
            }
            "trials" => {
                self.trials = value.parse().map_err(|_| bad("not an integer"))?;
                if self.trials == 0 {
                    return Err(bad("trials must be at least 1"));
                }
            }
            "seed" => self.seed = value.parse().map_err(|_| bad("not a 64-bit integer"))?,
            "output" | "out" => self.output = PathBuf::from(value),
            _ => {
                if let Some(name) = key.strip_prefix("tol.") {
                    let v: f64 = value.parse().map_err(|_| bad("not a number"))?;
                    self.tolerances.insert(name.to_string(), v);
                } else {
                    self.params.insert(key.to_string(), value.to_string());
                }
            }
        }
        Ok(())
    }

    pub fn grid(&self) -> Result<Grid, CliError> {
        Ok(Grid::new(self.grid.0, self.grid.1)?)
    }

    pub fn tolerance(&self, name: &str, default: f64) -> f64 {
        self.tolerances.get(name).copied().unwrap_or(default)
    }

    pub fn param<T: std::str::FromStr>(&self, name: &str, default: T) -> Result<T, CliError> {
        match self.params.get(name) {
            None => Ok(default),
            Some(v) => v
                .parse()
                .map_err(|_| CliError::Usage(format!("parameter {name} = {v:?} does not parse"))),
        }
    }

    pub fn param_str<'a>(&'a self, name: &str, default: &'a str) -> &'a str {
        self.params.get(name).map(String::as_str).unwrap_or(default)
    }

    /// `key=value` pairs describing the run, in a fixed order.
    pub fn flattened(&self) -> Vec<(String, String)> {
        let mut out = vec![
            ("grid".to_string(), format!("{}x{}", self.grid.0, self.grid.1)),
            ("space".to_string(), self.space.to_string()),
            ("wavelet".to_string(), self.wavelet.clone()),
            ("window".to_string(), format!("{}x{}", self.window.0, self.window.1)),
            ("trials".to_string(), self.trials.to_string()),
            ("seed".to_string(), self.seed.to_string()),
        ];
        out.extend(self.params.iter().map(|(k, v)| (k.clone(), v.clone())));
        out.extend(self.tolerances.iter().map(|(k, v)| (format!("tol.{k}"), v.to_string())));
        out
    }
}

pub fn default_output_dir() -> PathBuf {
    std::env::var_os(OUTPUT_DIR_VAR)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("lab-output"))
}

fn parse_pairs(text: &str) -> Result<Vec<(String, String)>, CliError> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("line {}: expected key = value", i + 1)))?;
        out.push((k.trim().to_string(), v.trim().to_string()));
    }
    Ok(out)
}
