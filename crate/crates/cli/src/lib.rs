//! Command-line front end for the `cqres` toolkit.

pub mod args;
pub mod commands;
pub mod input;
pub mod output;

use std::io::Write;

pub use args::Cli;
pub use commands::{execute, Outcome};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Unreadable, malformed or invalid input.
    #[error("{0}")]
    Input(String),
    #[error(transparent)]
    Core(#[from] cqres::Error),
    #[error("{0}")]
    Io(String),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    StdIo(#[from] std::io::Error),
    #[error("thread pool: {0}")]
    Pool(#[from] rayon::ThreadPoolBuildError),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 2,
            CliError::Core(cqres::Error::ResourceCap { .. }) => 3,
            CliError::Core(cqres::Error::NoConvergence { .. }) => 1,
            CliError::Core(_) => 2,
            _ => 1,
        }
    }
}

/// Runs the command on a pool of `--threads` workers and writes its CSV.
pub fn run_with(cli: &Cli) -> Result<Outcome, CliError> {
    let outcome = match cli.threads {
        Some(k) => rayon::ThreadPoolBuilder::new().num_threads(k).build()?.install(|| execute(cli))?,
        None => execute(cli)?,
    };
    outcome.table.emit(cli.out.as_deref())?;
    Ok(outcome)
}

/// Process entry point: report on stderr, exit code 0 / 2 (validation) / 3 (resource cap).
pub fn run(cli: &Cli) -> i32 {
    match run_with(cli) {
        Ok(outcome) => {
            let mut err = std::io::stderr().lock();
            for line in &outcome.report {
                let _ = writeln!(err, "{line}");
            }
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
