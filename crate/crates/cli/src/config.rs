use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

pub const DEFAULT_SEED: u64 = 7;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

/// Settings shared by all subcommands. Unset optional fields fall back to
/// per-suite defaults.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub suite: Option<String>,
    pub lambda: Option<f64>,
    pub horizon: Option<f64>,
    pub scales: Option<Vec<f64>>,
    pub reps: Option<usize>,
    pub grid: usize,
    pub seed: u64,
    pub out: Option<PathBuf>,
    pub format: Format,
    /// Worker threads; never affects results.
    pub workers: Option<usize>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            suite: None,
            lambda: None,
            horizon: None,
            scales: None,
            reps: None,
            grid: recordtime::scaling::DEFAULT_GRID_POINTS,
            seed: DEFAULT_SEED,
            out: None,
            format: Format::Csv,
            workers: None,
        }
    }
}

impl ExperimentConfig {
    pub fn from_toml_file(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        toml::from_str(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
    }

    pub fn validate(&self) -> CliResult<()> {
        let bad = |msg: String| Err(CliError::Usage(msg));
        if let Some(l) = self.lambda {
            if !(l > 0.0 && l.is_finite()) {
                return bad(format!("lambda must be positive, got {l}"));
            }
        }
        if let Some(h) = self.horizon {
            if !(h >= 0.0 && h.is_finite()) {
                return bad(format!("horizon must be finite and >= 0, got {h}"));
            }
        }
        if self.reps == Some(0) {
            return bad("reps must be at least 1".into());
        }
        if self.grid < 2 {
            return bad(format!("grid must have at least 2 points, got {}", self.grid));
        }
        if let Some(s) = &self.scales {
            if s.is_empty() || s.iter().any(|x| !(x.is_finite() && *x > 0.0)) {
                return bad(format!("scales must be a non-empty list of positive numbers, got {s:?}"));
            }
        }
        if self.workers == Some(0) {
            return bad("workers must be at least 1".into());
        }
        Ok(())
    }

    pub fn lambda_or(&self, default: f64) -> f64 {
        self.lambda.unwrap_or(default)
    }

    pub fn reps_or(&self, default: usize) -> usize {
        self.reps.unwrap_or(default)
    }

    pub fn scales_or(&self, default: &[f64]) -> Vec<f64> {
        self.scales.clone().unwrap_or_else(|| default.to_vec())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn toml_round_trip_and_unknown_keys() {
        let cfg: ExperimentConfig = toml::from_str("suite = \"clt\"\nreps = 10\nscales = [6.0, 9.0]\nformat = \"json\"").unwrap();
        assert_eq!(cfg.reps, Some(10));
        assert_eq!(cfg.format, Format::Json);
        assert_eq!(cfg.grid, 513);
        assert!(toml::from_str::<ExperimentConfig>("bogus = 1").is_err());
    }

    #[test]
    fn validation() {
        let ok = ExperimentConfig::default();
        assert!(ok.validate().is_ok());
        for bad in [
            ExperimentConfig { reps: Some(0), ..ok.clone() },
            ExperimentConfig { grid: 1, ..ok.clone() },
            ExperimentConfig { lambda: Some(0.0), ..ok.clone() },
            ExperimentConfig { scales: Some(vec![]), ..ok.clone() },
            ExperimentConfig { workers: Some(0), ..ok.clone() },
        ] {
            assert!(bad.validate().is_err());
        }
    }
}
