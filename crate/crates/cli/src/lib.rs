//! Experiment runner for the `sweep-core` solvers: JSON configs, CSV
//! trajectories and reports, seeded fBm drivers.

#![allow(clippy::neg_cmp_op_on_partial_ord)] // negated comparisons also reject NaN

pub mod commands;
pub mod config;
pub mod csvio;
pub mod error;
pub mod problem;

pub use commands::{execute, Cli, Env};
pub use config::ExperimentConfig;
pub use error::CliError;
pub use problem::Problem;
