//! Batch runner for swarmtrack experiments.
//!
//! [`experiment`] parses grid configs, [`batch`] executes them to disk and
//! pools the results, [`ecdf`] turns reports into plot-ready CSV.

pub mod batch;
pub mod ecdf;
pub mod experiment;

use std::path::{Path, PathBuf};

use swarmtrack_core::engine::ConfigError;
use swarmtrack_core::log_io::{write_run_log, RUN_CONFIG_FILE};
use swarmtrack_core::{run, RunLog, SimConfig};
use thiserror::Error;

pub use batch::{run_batch, BatchError, BatchOptions, BatchSummary};
pub use ecdf::emit_ecdf_csv;
pub use experiment::{derive_seed, load_config, parse_config, ExperimentConfig, ExperimentError, RunKey};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Experiment(#[from] ExperimentError),
    #[error("cannot read {path}: {source}")]
    ReadSim { path: PathBuf, source: std::io::Error },
    #[error("invalid run config: {0}")]
    ParseSim(#[from] toml::de::Error),
    #[error("invalid run config: {0}")]
    Sim(#[from] ConfigError),
    #[error(transparent)]
    Batch(#[from] BatchError),
}

impl CliError {
    /// 1 for anything wrong with the input, 2 for failures while running.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Batch(_) => 2,
            _ => 1,
        }
    }
}

/// Reads a single-run config: the fields of a [`SimConfig`] at top level.
pub fn load_sim_config(path: &Path) -> Result<SimConfig, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|source| CliError::ReadSim { path: path.to_path_buf(), source })?;
    let config: SimConfig = toml::from_str(&text)?;
    config.validate()?;
    Ok(config)
}

/// Runs one simulation and writes its log into `out`.
pub fn run_single(config: SimConfig, out: &Path, force: bool) -> Result<RunLog, CliError> {
    let marker = out.join(RUN_CONFIG_FILE);
    if marker.exists() && !force {
        return Err(BatchError::Exists(marker).into());
    }
    let log = run(config)?;
    write_run_log(&log, out).map_err(|source| BatchError::Log { path: out.to_path_buf(), source })?;
    Ok(log)
}
