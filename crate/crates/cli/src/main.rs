mod args;
mod commands;
mod config;
mod report;

use std::fs;
use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Bad flags, config values or preconditions; exit code 2.
    #[error("{0}")]
    Usage(String),
    /// Failure inside the engine; exit code 1.
    #[error("numerical error: {0}")]
    Numerical(#[from] bell_core::Error),
    #[error("i/o error: {0}")]
    Io(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Numerical(_) | CliError::Io(_) => 1,
        }
    }
}

fn run(cli: args::Cli) -> Result<(), CliError> {
    let config = config::resolve(cli)?;
    let report = commands::execute(&config)?;
    let rendered = report.render(config.format);
    match &config.out {
        Some(path) => fs::write(path, rendered).map_err(|e| CliError::Io(format!("{}: {e}", path.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(rendered.as_bytes())
                .and_then(|()| stdout.flush())
                .map_err(|e| CliError::Io(e.to_string()))
        }
    }
}

fn main() -> ExitCode {
    let cli = match args::Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
