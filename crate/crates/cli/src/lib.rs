//! Command-line front end for the `matdisc` library.
//!
//! Exit codes: 0 when every check passed, 2 when a coloring was valid but
//! over its bound, 1 on any hard failure or guarantee violation.

pub mod args;
pub mod commands;
pub mod config;
pub mod output;

use std::fmt;
use std::process::ExitCode;

pub use args::Cli;

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Core(matdisc::Error),
    Io(std::io::Error),
    Csv(csv::Error),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(s) => write!(f, "config: {s}"),
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Io(e) => write!(f, "io: {e}"),
            CliError::Csv(e) => write!(f, "csv: {e}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<matdisc::Error> for CliError {
    fn from(e: matdisc::Error) -> Self {
        CliError::Core(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Csv(e)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Pass,
    OverBound,
    Violation,
}

impl Status {
    pub fn worst(self, other: Status) -> Status {
        match (self, other) {
            (Status::Violation, _) | (_, Status::Violation) => Status::Violation,
            (Status::OverBound, _) | (_, Status::OverBound) => Status::OverBound,
            _ => Status::Pass,
        }
    }

    pub fn code(self) -> u8 {
        match self {
            Status::Pass => 0,
            Status::OverBound => 2,
            Status::Violation => 1,
        }
    }
}

pub fn run(cli: &Cli) -> Result<Status, CliError> {
    let resolved = config::resolve(cli)?;
    if let Some(w) = resolved.workers {
        if w == 0 {
            return Err(CliError::Config("workers must be positive".into()));
        }
        // A second call in the same process keeps the first pool.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(w).build_global();
    }
    commands::dispatch(&resolved)
}

pub fn main_with(cli: Cli) -> ExitCode {
    match run(&cli) {
        Ok(s) => ExitCode::from(s.code()),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
