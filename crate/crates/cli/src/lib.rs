//! Report-emitting commands over the `ppt-robust` library.
//!
//! Every report is a JSON object `{tool, version, config, result}`; the CSV
//! form carries the same numbers as `# key=value` lines followed by one
//! plot-ready table.
//!
//! Exit status: 0 success, 1 a verification check failed, 2 usage or
//! validation error, 3 the λ minimization did not converge.
//!
//! `export` writes a product set as
//! `{"name": .., "dims": [d1, ..], "vectors": [[[re, im], ..] per party] per member}`.

pub mod args;
pub mod commands;
pub mod report;

use std::path::Path;

pub use args::{Cli, Command, Format, RunConfig};
pub use commands::{execute, Outcome};
pub use report::Report;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Library(#[from] ppt_robust::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Ok = 0,
    Violation = 1,
    Invalid = 2,
    NotConverged = 3,
}

impl CliError {
    pub fn status(&self) -> Status {
        Status::Invalid
    }
}

/// Renders the outcome and writes it to the requested destination.
pub fn emit(outcome: &Outcome, format: Format, output: Option<&Path>) -> Result<(), CliError> {
    let text = outcome.report.render(format)?;
    match output {
        Some(path) => std::fs::write(path, text)?,
        None => {
            use std::io::Write;
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            stdout.flush()?;
        }
    }
    Ok(())
}
