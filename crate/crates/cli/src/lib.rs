pub mod commands;
pub mod config;
pub mod output;

use std::fs;
use std::path::{Path, PathBuf};

use commands::{AppError, Subcommand};
use config::{ConfigError, Overrides, RunConfig};

/// Environment variable capping the worker threads.
pub const THREADS_ENV: &str = "RESONANCE_LAB_THREADS";

/// Reads the config at `path`, runs `sub` and writes its artifacts. Returns the files written.
pub fn execute(sub: Subcommand, path: &Path, overrides: &Overrides) -> Result<Vec<PathBuf>, AppError> {
    let text = fs::read_to_string(path)
        .map_err(|e| ConfigError::general(format!("cannot read {}: {e}", path.display())))?;
    let base = path.parent().unwrap_or(Path::new("."));
    let cfg = RunConfig::build(&text, sub.section(), base, overrides)?;
    fs::create_dir_all(&cfg.output_dir).map_err(|e| {
        ConfigError::general(format!("output directory {} is not writable: {e}", cfg.output_dir.display()))
    })?;
    let artifacts = sub.run(&cfg)?;
    Ok(output::emit(&artifacts, &cfg.formats, &cfg.output_dir)?)
}

/// Thread cap from [`THREADS_ENV`], if set.
pub fn thread_cap(value: Option<&str>) -> Result<Option<usize>, ConfigError> {
    match value {
        None => Ok(None),
        Some(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(ConfigError::general(format!("{THREADS_ENV} must be a positive integer, got `{v}`"))),
        },
    }
}
