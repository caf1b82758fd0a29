//! Command-line front end and experiment harness for `gpnet`.

pub mod cli;
pub mod commands;
pub mod config;
pub mod error;
pub mod output;

pub use cli::{Cli, Command};
pub use config::Settings;
pub use error::CliError;
pub use output::Output;

use std::path::{Path, PathBuf};

/// Resolves settings from the config file and flags, runs the command and
/// writes its outputs.
pub fn execute(cli: &Cli) -> Result<(), CliError> {
    let mut settings = match &cli.config {
        Some(path) => Settings::from_file(path)?,
        None => Settings::default(),
    };
    settings.overlay(cli.settings());
    let output = commands::run(&cli.command, &settings)?;
    match &settings.out {
        Some(path) => {
            write(path, &output.body)?;
            let timing = output::json_bytes(&output.timings)?;
            write(&timing_path(path), &timing)?;
        }
        None => {
            use std::io::Write;
            std::io::stdout()
                .write_all(&output.body)
                .map_err(|e| CliError::Output { path: "stdout".into(), message: e.to_string() })?;
            for (phase, secs) in &output.timings.phases {
                log::info!("{phase}: {secs:.3} s");
            }
        }
    }
    Ok(())
}

/// `results.csv` -> `results.csv.timing.json`.
pub fn timing_path(out: &Path) -> PathBuf {
    let mut name = out.as_os_str().to_owned();
    name.push(".timing.json");
    PathBuf::from(name)
}

fn write(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    std::fs::write(path, bytes).map_err(|e| CliError::Output { path: path.display().to_string(), message: e.to_string() })
}
