//! `fbms`: command-line front end of the spectral library.
//!
//! Exit codes: 0 success, 1 runtime failure, 2 invalid configuration,
//! 3 a requested certification did not pass its guard band.

mod args;
mod commands;
mod report;

use std::io::Write;
use std::process::ExitCode;

use anyhow::Result;
use clap::Parser;

use args::{Cli, Command};

const EXIT_RUNTIME: u8 = 1;
const EXIT_CONFIG: u8 = 2;
const EXIT_UNCERTIFIED: u8 = 3;

/// An error the user can fix by changing arguments.
#[derive(Debug)]
pub struct ConfigError(pub String);

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

fn configure_threads() -> Result<(), ConfigError> {
    let Ok(text) = std::env::var("FBMS_THREADS") else {
        return Ok(());
    };
    let threads: usize = text
        .trim()
        .parse()
        .ok()
        .filter(|&t| t > 0)
        .ok_or_else(|| ConfigError(format!("FBMS_THREADS must be a positive integer, got `{text}`")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| ConfigError(e.to_string()))
}

fn is_config_error(err: &anyhow::Error) -> bool {
    use fbms::Error as E;
    if err.downcast_ref::<ConfigError>().is_some() {
        return true;
    }
    matches!(
        err.downcast_ref::<E>(),
        Some(E::GridTooSmall { .. } | E::CatenoidOnly(_) | E::ModeOverflow(_) | E::TooFewGrids(_) | E::OutsideDomain(..))
    )
}

fn run(cli: &Cli) -> Result<commands::Outcome> {
    let common = match &cli.command {
        Command::Spectrum(a) | Command::Convergence(a) => &a.common,
        Command::Index(a) => &a.common,
        Command::Nonlocal(a) => &a.common,
        Command::Verify(a) => &a.common,
    };
    args::validate(common).map_err(ConfigError)?;
    let outcome = match &cli.command {
        Command::Spectrum(a) => commands::spectrum(a)?,
        Command::Convergence(a) => commands::convergence(a)?,
        Command::Index(a) => commands::index(a)?,
        Command::Nonlocal(a) => commands::nonlocal(a)?,
        Command::Verify(a) => commands::verify(a)?,
    };
    let json = outcome.report.to_json()?;
    match &common.output {
        Some(path) => report::write_atomic(path, json.as_bytes())?,
        None => std::io::stdout().write_all(json.as_bytes())?,
    }
    if let Some(path) = &common.csv {
        report::write_atomic(path, &outcome.report.to_csv()?)?;
    }
    Ok(outcome)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = configure_threads() {
        eprintln!("error: {e}");
        return ExitCode::from(EXIT_CONFIG);
    }
    match run(&cli) {
        Ok(outcome) => {
            eprint!("{}", outcome.table);
            if outcome.certified {
                ExitCode::SUCCESS
            } else {
                eprintln!("certification failed: a value lies inside the guard band or the mode tail is not resolved");
                ExitCode::from(EXIT_UNCERTIFIED)
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            if is_config_error(&e) {
                ExitCode::from(EXIT_CONFIG)
            } else {
                ExitCode::from(EXIT_RUNTIME)
            }
        }
    }
}
