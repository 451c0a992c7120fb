use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

#[derive(Debug, Parser)]
#[command(name = "gareg", version, about = "Genetic-algorithm knot placement and best-subset regression")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Search spline knot locations for a univariate fit.
    Knots(KnotsArgs),
    /// Search predictor subsets by BIC.
    Subset(SubsetArgs),
    /// Write a synthetic dataset and its ground truth.
    Simulate(SimulateArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BasisArg {
    Ppolys,
    Ns,
    Bs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
pub enum IcArg {
    #[value(name = "BIC")]
    #[serde(rename = "BIC")]
    Bic,
    #[value(name = "AIC")]
    #[serde(rename = "AIC")]
    Aic,
    #[value(name = "AICc")]
    #[serde(rename = "AICc")]
    Aicc,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MethodArg {
    Single,
    Island,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FamilyArg {
    Gaussian,
    Binomial,
    Poisson,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SimKind {
    Subset,
    Knots,
}

/// Engine and island controls shared by both searches.
#[derive(Debug, Clone, Args, Serialize, Deserialize, PartialEq)]
pub struct EngineArgs {
    #[arg(long, value_enum, default_value = "single")]
    pub method: MethodArg,
    /// Master seed; falls back to GAREG_SEED, then to the clock.
    #[arg(long, env = "GAREG_SEED")]
    pub seed: Option<u64>,
    /// Number of islands for --method island.
    #[arg(long, default_value_t = 4)]
    pub islands: usize,
    #[arg(long, default_value_t = 5)]
    pub migration_interval: usize,
    #[arg(long, default_value_t = 100)]
    pub max_mig: usize,
    /// Members swapped per migration event.
    #[arg(long, default_value_t = 1)]
    pub migrants: usize,
    /// Threads used to evolve islands; results do not depend on it.
    #[arg(long, default_value_t = 1)]
    #[serde(skip)]
    pub workers: usize,
    #[arg(long, default_value_t = 100)]
    pub restart_cap: usize,
    /// Print one line per generation to stderr.
    #[arg(long)]
    #[serde(skip)]
    pub monitor: bool,
    /// Record elapsed wall time in report.json (makes the report run-dependent).
    #[arg(long)]
    #[serde(skip)]
    pub report_time: bool,
    #[arg(long, default_value = ".")]
    #[serde(skip)]
    pub out: PathBuf,
}

impl EngineArgs {
    /// Copy with the settings that cannot change results cleared, for the
    /// config echo in the report.
    pub fn echo(&self, seed: u64) -> Self {
        Self {
            seed: Some(seed),
            workers: 0,
            monitor: false,
            report_time: false,
            out: PathBuf::new(),
            ..self.clone()
        }
    }
}

#[derive(Debug, Clone, Args, Serialize, Deserialize, PartialEq)]
pub struct KnotsArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, default_value = "x")]
    pub x_col: String,
    #[arg(long, default_value = "y")]
    pub y_col: String,
    /// Number of knots; omit to search over the knot count as well.
    #[arg(long)]
    pub fixed_knots: Option<usize>,
    /// Upper bound on the knot count when it is searched.
    #[arg(long)]
    pub m_max: Option<usize>,
    #[arg(long, default_value_t = 3.0)]
    pub min_dist: f64,
    #[arg(long = "type", value_enum, default_value = "ppolys")]
    pub basis: BasisArg,
    /// Spline degree (default 3); has no effect for ns.
    #[arg(long)]
    pub degree: Option<usize>,
    #[arg(long)]
    pub no_intercept: bool,
    #[arg(long, value_enum, default_value = "BIC")]
    pub ic: IcArg,
    #[arg(long, default_value_t = 200)]
    pub pop_size: usize,
    #[arg(long, default_value_t = 0.9)]
    pub p_crossover: f64,
    #[arg(long, default_value_t = 0.3)]
    pub p_mutation: f64,
    #[arg(long, default_value_t = 10_000)]
    pub max_gen: usize,
    /// Generations without an accepted child before stopping.
    #[arg(long, default_value_t = 50)]
    pub stall: usize,
    /// Children tried per steady-state step.
    #[arg(long, default_value_t = 100)]
    pub step_retries: usize,
    /// Also run the exhaustive search and report it.
    #[arg(long)]
    pub oracle: bool,
    #[command(flatten)]
    pub engine: EngineArgs,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize, PartialEq)]
pub struct SubsetArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, default_value = "y")]
    pub y_col: String,
    #[arg(long, value_enum, default_value = "gaussian")]
    pub family: FamilyArg,
    #[arg(long, default_value_t = 120)]
    pub pop_size: usize,
    #[arg(long, default_value_t = 0.8)]
    pub p_crossover: f64,
    #[arg(long, default_value_t = 0.02)]
    pub p_mutation: f64,
    #[arg(long, default_value_t = 20_000)]
    pub max_gen: usize,
    #[arg(long, default_value_t = 4000)]
    pub stall: usize,
    #[arg(long, default_value_t = 1)]
    pub step_retries: usize,
    /// Also run the exhaustive search (at most 20 predictors).
    #[arg(long)]
    pub oracle: bool,
    #[command(flatten)]
    pub engine: EngineArgs,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize, PartialEq)]
pub struct SimulateArgs {
    #[arg(long, value_enum, default_value = "subset")]
    pub kind: SimKind,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long, default_value_t = 50)]
    pub p: usize,
    #[arg(long, default_value_t = 25)]
    pub s0: usize,
    #[arg(long)]
    pub sigma: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub rho: Option<f64>,
    #[arg(long, default_value_t = 0.5)]
    pub mag_lo: f64,
    #[arg(long, default_value_t = 2.0)]
    pub mag_hi: f64,
    /// Break locations for knot data, comma separated.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub breaks: Option<Vec<f64>>,
    /// Segment slopes for knot data (one more than breaks), comma separated.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub slopes: Option<Vec<f64>>,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub intercept: f64,
    /// Use the smooth test curve instead of a piecewise-linear mean.
    #[arg(long)]
    pub smooth: bool,
    #[arg(long, env = "GAREG_SEED")]
    pub seed: Option<u64>,
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}
