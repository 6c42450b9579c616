//! Batch front end for the link simulator: config loading, sweeps, CSV
//! output and the oracle cross-check report.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod output;
pub mod validate;

use std::fs;
use std::path::{Path, PathBuf};

use fso_core::engine::{sweep, EngineError, SweepRow};
use thiserror::Error;

pub use config::{ConfigError, RunConfig};
pub use output::{render_csv, CSV_HEADER};
pub use validate::{cross_check, core_formula, CheckKind, CheckResult, Formula};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid configuration: {0}")]
    Config(#[from] ConfigError),
    #[error("invalid configuration: {0}")]
    Engine(#[from] EngineError),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{failed} of {total} cross-checks failed")]
    ChecksFailed { failed: usize, total: usize },
}

impl CliError {
    /// Process exit status for this error.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Engine(_) => 2,
            CliError::Io { .. } => 3,
            CliError::ChecksFailed { .. } => 1,
        }
    }
}

/// Reads the optional config file and applies `key=value` overrides in order.
pub fn load_config(path: Option<&Path>, overrides: &[String]) -> Result<RunConfig, CliError> {
    let mut cfg = RunConfig::default();
    if let Some(path) = path {
        let text = fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        cfg.apply_text(&text)?;
    }
    for o in overrides {
        cfg.apply_override(o)?;
    }
    Ok(cfg)
}

/// Validates `cfg` and runs its sweep.
pub fn run_sweep(cfg: &RunConfig) -> Result<Vec<SweepRow>, CliError> {
    cfg.validate()?;
    Ok(sweep(
        cfg.axis,
        &cfg.grid,
        &cfg.resolved_scenario(),
        &cfg.schemes,
        cfg.metric(),
        &cfg.mc,
    )?)
}

/// Writes `bytes` to `path`, mapping failures to [`CliError::Io`].
pub fn write_output(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    fs::write(path, bytes).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}
