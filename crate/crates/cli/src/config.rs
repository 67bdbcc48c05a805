use std::path::{Path, PathBuf};

use clap::Args;
use frontfix::{build_grid, GridSpec, ModelParams, Scheme};
use serde::Deserialize;

use crate::error::CliError;

/// Values read from `--config`. Every key is optional; flags win.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub r: Option<f64>,
    pub sigma: Option<f64>,
    #[serde(rename = "T")]
    pub maturity: Option<f64>,
    #[serde(rename = "E")]
    pub strike: Option<f64>,
    pub x_inf: Option<f64>,
    #[serde(rename = "J")]
    pub intervals: Option<usize>,
    pub mu: Option<f64>,
    pub scheme: Option<Scheme>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text =
            std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("reading {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| CliError::Invalid(format!("invalid config {}: {e}", path.display())))
    }
}

/// Flags shared by every subcommand.
#[derive(Debug, Args)]
pub struct CommonArgs {
    /// Risk-free rate.
    #[arg(long)]
    pub r: Option<f64>,
    /// Volatility.
    #[arg(long)]
    pub sigma: Option<f64>,
    /// Maturity in years.
    #[arg(long = "T")]
    pub maturity: Option<f64>,
    /// Strike.
    #[arg(long = "E")]
    pub strike: Option<f64>,
    /// Truncation of the transformed domain.
    #[arg(long = "xinf")]
    pub x_inf: Option<f64>,
    /// Number of space intervals.
    #[arg(long = "J")]
    pub intervals: Option<usize>,
    /// Scheme: implicit or explicit.
    #[arg(long)]
    pub scheme: Option<Scheme>,
    /// Output directory.
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
    /// JSON file with keys r, sigma, T, E, x_inf, J, mu, scheme.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

/// Fully resolved run settings.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub params: ModelParams,
    pub x_inf: f64,
    pub intervals: usize,
    pub mu: f64,
    pub scheme: Scheme,
    pub out: PathBuf,
}

impl RunConfig {
    /// Merges defaults, the config file and the flags, in increasing
    /// precedence, and validates the model parameters.
    pub fn resolve(common: &CommonArgs, mu_flag: Option<f64>, default_j: usize) -> Result<Self, CliError> {
        let file = match &common.config {
            Some(path) => FileConfig::load(path)?,
            None => FileConfig::default(),
        };
        let d = ModelParams::default();
        let params = ModelParams::new(
            common.r.or(file.r).unwrap_or(d.r),
            common.sigma.or(file.sigma).unwrap_or(d.sigma),
            common.maturity.or(file.maturity).unwrap_or(d.maturity),
            common.strike.or(file.strike).unwrap_or(d.strike),
        )?;
        Ok(Self {
            params,
            x_inf: common.x_inf.or(file.x_inf).unwrap_or(1.0),
            intervals: common.intervals.or(file.intervals).unwrap_or(default_j),
            mu: mu_flag.or(file.mu).unwrap_or(20.0),
            scheme: common.scheme.or(file.scheme).unwrap_or(Scheme::Implicit),
            out: common.out.clone(),
        })
    }

    pub fn grid(&self) -> Result<GridSpec, CliError> {
        self.grid_with(self.intervals)
    }

    pub fn grid_with(&self, intervals: usize) -> Result<GridSpec, CliError> {
        Ok(build_grid(self.x_inf, intervals, self.mu, self.params.maturity)?)
    }
}
