//! Config-driven scenario runner for the squeezed-cavity simulations.
//!
//! A TOML config names a scenario (one per figure of interest, or `custom`)
//! and optionally overrides its parameters; [`run_scenario`] solves every
//! point and writes CSV files.

pub mod config;
pub mod diagnostics;
pub mod error;
pub mod output;
pub mod records;
pub mod runner;

use std::path::{Path, PathBuf};

pub use config::{Scenario, ScenarioConfig};
pub use diagnostics::{validate_config, Diagnostics};
pub use error::{CliError, Result};
pub use runner::{compute_scenario, ScenarioOutput};

/// Files written by a run, plus warnings for the user.
#[derive(Debug)]
pub struct RunSummary {
    pub files: Vec<PathBuf>,
    pub warnings: Vec<String>,
}

/// Computes a scenario and writes its files to `output_dir`, or to the
/// config's `output_path` when none is given.
pub fn run_scenario(cfg: &ScenarioConfig, output_dir: Option<&Path>) -> Result<RunSummary> {
    let out = compute_scenario(cfg)?;
    let dir = output_dir.unwrap_or(&cfg.output_path);
    let files = output::write_outputs(cfg, &out, dir)?;
    Ok(RunSummary { files, warnings: out.warnings })
}
