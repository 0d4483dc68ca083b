use std::process::ExitCode;

use clap::Parser;
use ppt_robust_cli::{emit, execute, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let output = cli.command.output().clone();
    let result = execute(&cli.command).and_then(|outcome| {
        emit(&outcome, output.format, output.output.as_deref())?;
        Ok(outcome.status)
    });
    match result {
        Ok(status) => ExitCode::from(status as u8),
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.status() as u8)
        }
    }
}
