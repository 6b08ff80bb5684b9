//! Experiment runner for the `Omega_n` submodule model: configuration,
//! mode dispatch and CSV/JSON reports.

pub mod config;
pub mod decimal;
pub mod error;
pub mod report;
pub mod runner;

pub use config::{ExperimentConfig, Flags, Format, Invocation, Mode};
pub use error::CliError;
pub use report::{emit_csv, emit_json, ExperimentReport, ReportRow};
pub use runner::run;

/// Resolves flags, runs, and writes the requested files. Returns the paths written.
pub fn execute(flags: &Flags) -> Result<(ExperimentReport, Vec<std::path::PathBuf>), CliError> {
    let inv = flags.resolve()?;
    let report = run(&inv)?;
    let mut written = Vec::new();
    if inv.config.format.csv() {
        written.push(emit_csv(&report)?);
    }
    if inv.config.format.json() {
        written.push(emit_json(&report)?);
    }
    Ok((report, written))
}
