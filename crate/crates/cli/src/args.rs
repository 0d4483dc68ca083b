use std::path::PathBuf;

use clap::builder::PossibleValuesParser;
use clap::{Args, Parser, Subcommand, ValueEnum};
use ppt_robust::upb::CATALOG;
use serde::Serialize;

#[derive(Debug, Parser)]
#[command(
    name = "ppt-robust",
    version,
    about = "Bound entangled states from unextendible product bases and their robustness radii"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// List the built-in product sets.
    UpbList(OutputArgs),
    /// Minimum overlap λ by multi-start see-saw, checked against a grid search.
    Lambda(RunArgs),
    /// Closed-form robustness profile of the BE-UPB line.
    Profile(RunArgs),
    /// Randomized checks of the ball radius and the separable mixing threshold.
    Verify(RunArgs),
    /// Hilbert–Schmidt fraction of states inside the widest ball on the line.
    Membership(RunArgs),
    /// Member vectors of a product set as JSON or CSV.
    Export(RunArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::UpbList(_) => "upb-list",
            Command::Lambda(_) => "lambda",
            Command::Profile(_) => "profile",
            Command::Verify(_) => "verify",
            Command::Membership(_) => "membership",
            Command::Export(_) => "export",
        }
    }

    pub fn output(&self) -> &OutputArgs {
        match self {
            Command::UpbList(o) => o,
            Command::Lambda(r)
            | Command::Profile(r)
            | Command::Verify(r)
            | Command::Membership(r)
            | Command::Export(r) => &r.output,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Clone, Debug, Args)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Write the report here instead of stdout.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Clone, Debug, Args)]
pub struct RunArgs {
    /// Name of a catalog set (see `upb-list`).
    #[arg(long, value_parser = PossibleValuesParser::new(CATALOG))]
    pub upb: String,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Random trials per configuration point.
    #[arg(long, default_value_t = 1000)]
    pub trials: usize,
    /// Number of x grid points.
    #[arg(long, default_value_t = 10)]
    pub grid: usize,
    #[command(flatten)]
    pub output: OutputArgs,
}

/// The effective configuration echoed in every report. The output path is a
/// destination, not a parameter, so it is left out.
#[derive(Clone, Debug, Serialize)]
pub struct RunConfig {
    pub command: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub upb: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trials: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid: Option<usize>,
    pub format: Format,
}

impl RunConfig {
    pub fn from_command(command: &Command) -> Self {
        let format = command.output().format;
        match command {
            Command::UpbList(_) => {
                Self { command: command.name(), upb: None, seed: None, trials: None, grid: None, format }
            }
            Command::Lambda(r)
            | Command::Profile(r)
            | Command::Verify(r)
            | Command::Membership(r)
            | Command::Export(r) => Self {
                command: command.name(),
                upb: Some(r.upb.clone()),
                seed: Some(r.seed),
                trials: Some(r.trials),
                grid: Some(r.grid),
                format,
            },
        }
    }
}
