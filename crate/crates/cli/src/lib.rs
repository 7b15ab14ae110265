//! Command-line front end for the qclab experiments.

pub mod config;
pub mod error;
pub mod experiments;
pub mod expr;
pub mod report;

use std::path::Path;

pub use config::Config;
pub use error::CliError;
pub use report::Outcome;

/// Runs the configured experiment, writing artifacts under `cfg.out()`.
pub fn run(cfg: &Config) -> Result<Outcome, CliError> {
    let dir = cfg.out();
    std::fs::create_dir_all(&dir).map_err(|e| CliError::Output(format!("{}: {e}", dir.display())))?;
    experiments::run(cfg, Path::new(&dir))
}
