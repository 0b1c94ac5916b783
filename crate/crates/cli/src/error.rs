use std::io;
use std::path::PathBuf;

use thiserror::Error;

/// Failures of a CLI invocation, each mapped to a process exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("cannot read {}: {source}", path.display())]
    Input { path: PathBuf, source: io::Error },
    #[error("cannot parse {}: {message}", path.display())]
    Parse { path: PathBuf, message: String },
    #[error("solver error: {0}")]
    Solver(sweep_core::Error),
    #[error("no convergence after {iterations} sweeps (last gap {gap:e})")]
    NoConvergence { iterations: usize, gap: f64 },
    #[error("cannot write {}: {source}", path.display())]
    Output { path: PathBuf, source: io::Error },
}

impl CliError {
    pub fn config(msg: impl Into<String>) -> Self {
        CliError::Config(msg.into())
    }

    /// 2 for bad input, 3 for solver failures, 1 when output cannot be written.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) | CliError::Input { .. } | CliError::Parse { .. } => 2,
            CliError::Solver(_) | CliError::NoConvergence { .. } => 3,
            CliError::Output { .. } => 1,
        }
    }
}

/// Core errors raised while building problem data are configuration errors.
pub(crate) fn invalid(e: sweep_core::Error) -> CliError {
    CliError::Config(e.to_string())
}
