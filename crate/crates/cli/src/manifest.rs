//! Machine-readable record of a run, written next to its output.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use skyhaul::Scheme;

use crate::config::{parse_table, ScenarioConfig};
use crate::error::CliError;
use crate::figures::CurveDeviation;
use crate::run::Mode;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool_version: String,
    /// Subcommand: `eval`, `sweep`, `reproduce` or `validate`.
    pub command: String,
    pub mode: Mode,
    pub scheme: Scheme,
    pub seed: u64,
    pub trials: u64,
    pub workers: usize,
    pub use_cache: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep_var: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep_values: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub figure: Option<String>,
    /// `--set` arguments as given; already folded into `config`.
    #[serde(default)]
    pub overrides: Vec<String>,
    /// Settings applied to the analytic side only (`validate --analytic-set`).
    #[serde(default)]
    pub analytic_overrides: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub slack: Option<f64>,
    pub wall_time_s: f64,
    #[serde(default)]
    pub warnings: Vec<String>,
    #[serde(default)]
    pub deviations: Vec<CurveDeviation>,
    /// Scenario after overrides.
    pub config: ScenarioConfig,
}

impl RunManifest {
    pub fn to_toml_string(&self) -> Result<String, CliError> {
        toml::to_string(self).map_err(|e| CliError::Output(format!("cannot serialize manifest: {e}")))
    }

    /// Reads a manifest; `None` when the text is a plain config.
    pub fn parse(text: &str) -> Result<Option<Self>, CliError> {
        let table = parse_table(text)?;
        if !table.contains_key("config") {
            return Ok(None);
        }
        toml::Value::Table(table)
            .try_into()
            .map(Some)
            .map_err(|e: toml::de::Error| CliError::Config(format!("malformed manifest: {}", e.message())))
    }

    pub fn write(&self, path: &Path) -> Result<(), CliError> {
        std::fs::write(path, self.to_toml_string()?)
            .map_err(|e| CliError::Output(format!("cannot write manifest {}: {e}", path.display())))
    }
}

/// `results.csv` → `results.manifest.toml`.
pub fn manifest_path(out: &Path) -> PathBuf {
    out.with_extension("manifest.toml")
}
