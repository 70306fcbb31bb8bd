mod args;
mod commands;
mod config;

use args::Cli;
use clap::Parser;
use std::process::ExitCode;

/// Failure modes mapped to exit codes.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Hit(#[from] hitlab::HitError),
    #[error("{0}")]
    Usage(String),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("config: {0}")]
    Config(#[from] toml::de::Error),
    /// A numeric check in `report` missed its tolerance.
    #[error("{0}")]
    Breach(String),
}

impl CliError {
    fn kind(&self) -> &'static str {
        match self {
            CliError::Hit(_) => "validation",
            CliError::Usage(_) => "usage",
            CliError::Io(_) => "io",
            CliError::Json(_) => "json",
            CliError::Csv(_) => "csv",
            CliError::Config(_) => "config",
            CliError::Breach(_) => "tolerance",
        }
    }

    fn code(&self) -> u8 {
        match self {
            CliError::Breach(_) => 1,
            _ => 2,
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            // --help and --version
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let err = serde_json::json!({ "error": e.to_string().trim(), "kind": "usage" });
            eprintln!("{err}");
            return ExitCode::from(2);
        }
    };
    match commands::run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let err = serde_json::json!({ "error": e.to_string(), "kind": e.kind() });
            eprintln!("{err}");
            ExitCode::from(e.code())
        }
    }
}
