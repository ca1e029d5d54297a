//! The JSON config file: every flag of every subcommand, all optional.

use std::path::PathBuf;

use serde::Deserialize;

use crate::CliError;

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub subcommand: Option<String>,
    pub instance: Option<PathBuf>,
    pub dimacs: Option<PathBuf>,
    pub solution: Option<PathBuf>,
    pub certificate: Option<PathBuf>,
    pub witness: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub trials_csv: Option<PathBuf>,
    pub template: Option<String>,
    pub scheme: Option<String>,
    pub method: Option<String>,
    pub problem: Option<String>,
    pub family: Option<String>,
    pub kind: Option<String>,
    pub epsilon: Option<f64>,
    pub grid: Option<Vec<f64>>,
    pub trials: Option<usize>,
    pub seed: Option<u64>,
    pub tol: Option<f64>,
    pub handover: Option<f64>,
    pub max_iter: Option<usize>,
    pub n: Option<usize>,
    pub m: Option<usize>,
    pub q: Option<usize>,
    pub arity: Option<usize>,
    pub fold: Option<bool>,
    pub pair: Option<usize>,
    pub b: Option<Vec<usize>>,
    pub all: Option<bool>,
    pub dim: Option<usize>,
    pub samples: Option<usize>,
}

impl ExperimentConfig {
    pub fn load(path: &std::path::Path) -> Result<Self, CliError> {
        let bytes = std::fs::read(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        serde_json::from_slice(&bytes).map_err(|e| CliError::Usage(format!("config {}: {e}", path.display())))
    }
}

/// Flag value if given, else the config value.
pub fn pick<T: Clone>(flag: &Option<T>, config: &Option<T>) -> Option<T> {
    flag.clone().or_else(|| config.clone())
}
