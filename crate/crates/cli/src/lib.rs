//! Configuration, experiment orchestration and output for the simulation suite.

pub mod config;
pub mod datum;
pub mod error;
pub mod experiments;
pub mod outcome;
pub mod output;

pub use config::{parse_config, Experiment, ExperimentConfig, QValue};
pub use error::CliError;
pub use experiments::{execute, Report};
pub use outcome::{Assertion, Checked};
pub use output::{config_hash, run_and_report, run_experiment, Manifest};

/// Environment variable overriding the worker thread count.
pub const THREADS_ENV: &str = "ACSIM_THREADS";

/// Sizes the global thread pool from [`THREADS_ENV`] when it is set.
pub fn configure_threads() -> Result<Option<usize>, CliError> {
    let Ok(text) = std::env::var(THREADS_ENV) else {
        return Ok(None);
    };
    let n: usize = text
        .trim()
        .parse()
        .ok()
        .filter(|n| *n > 0)
        .ok_or_else(|| CliError::invalid(THREADS_ENV, format!("expected a positive integer, got {text:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::invalid(THREADS_ENV, e.to_string()))?;
    Ok(Some(n))
}
