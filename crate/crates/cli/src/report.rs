use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::args::{KnotsArgs, SubsetArgs};
use crate::data::write_csv;
use crate::error::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Knots,
    Subset,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Best {
    Knots {
        /// 1-based positions in the sorted unique x grid.
        knot_indices: Vec<usize>,
        knot_values: Vec<f64>,
        rss: f64,
        free_params: usize,
        coefficients: Vec<f64>,
    },
    Subset {
        /// 1-based predictor positions.
        selected: Vec<usize>,
        selected_names: Vec<String>,
        intercept: Option<f64>,
        coefficients: Vec<f64>,
        deviance: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleReport {
    pub best_score: f64,
    /// Optimal configurations as 1-based indices.
    pub best_configurations: Vec<Vec<usize>>,
    pub evaluated_count: u64,
    pub ga_attains_optimum: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ConfigEcho {
    Knots(KnotsArgs),
    Subset(SubsetArgs),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub mode: Mode,
    pub seed: u64,
    pub best: Best,
    pub best_fitness: f64,
    pub ic_kind: String,
    pub generations: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wall_time_secs: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub oracle: Option<OracleReport>,
    pub config: ConfigEcho,
}

impl RunReport {
    pub fn to_json(&self) -> Result<String, CliError> {
        serde_json::to_string_pretty(self).map(|s| s + "\n").map_err(|e| CliError::Io(e.to_string()))
    }

    pub fn write(&self, dir: &Path) -> Result<(), CliError> {
        std::fs::write(dir.join("report.json"), self.to_json()?)?;
        Ok(())
    }
}

pub fn write_trace(dir: &Path, best: &[f64], accepted: &[usize]) -> Result<(), CliError> {
    let rows = best.iter().zip(accepted).enumerate().map(|(g, (b, a))| vec![(g + 1).to_string(), b.to_string(), a.to_string()]);
    write_csv(&dir.join("trace.csv"), &["generation", "best_fitness", "accepted"], rows)
}
