//! Configuration, experiment registry and data emission for the `catqubit`
//! command-line tool.

pub mod config;
pub mod error;
pub mod experiments;
pub mod output;
pub mod registry;

use std::path::{Path, PathBuf};

pub use config::{parse_config, resolve, ExperimentConfig, Resolved};
pub use error::{CliError, CliResult};
pub use registry::Experiment;

/// Environment variable holding the worker-thread count.
pub const WORKERS_ENV: &str = "CATQUBIT_WORKERS";

/// Sizes the global worker pool from [`WORKERS_ENV`]. Unset or empty keeps
/// the rayon default.
pub fn init_workers() -> CliResult<()> {
    let Ok(v) = std::env::var(WORKERS_ENV) else {
        return Ok(());
    };
    if v.trim().is_empty() {
        return Ok(());
    }
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Config(format!("{WORKERS_ENV} must be a positive integer, got {v:?}")))?;
    // A second initialization (tests calling this twice) is harmless.
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

/// Parses and validates a configuration file.
pub fn load(path: &Path) -> CliResult<(String, Resolved)> {
    let text = std::fs::read_to_string(path)?;
    let cfg = parse_config(&text)?;
    let resolved = resolve(&cfg)?;
    Ok((text, resolved))
}

/// Runs the experiment of a resolved configuration and writes its outputs.
pub fn run(text: &str, resolved: &Resolved) -> CliResult<Vec<PathBuf>> {
    let out = resolved.experiment.run(resolved)?;
    output::write_outputs(&resolved.output_dir, resolved, text, &out)
}
