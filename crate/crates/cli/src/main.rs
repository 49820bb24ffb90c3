//! `chaff`: redundancy reports, information curves, parameter sweeps and
//! oracle validation for good/bad spin environments.
//!
//! Exit codes: 0 success, 1 a validation check failed, 2 bad input,
//! 3 the information deficit cannot be reached.

mod commands;
mod config;
mod output;

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use config::{GridArgs, RunArgs, RunConfig};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Model(#[from] chaff::Error),
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Io(String),
    #[error("validation check {0} failed")]
    ValidationFailed(String),
}

impl CliError {
    fn from_csv(e: csv::Error) -> Self {
        CliError::Io(e.to_string())
    }

    fn exit_code(&self) -> u8 {
        match self {
            CliError::ValidationFailed(_) => 1,
            CliError::Model(chaff::Error::DeficitUnreachable { .. }) => 3,
            _ => 2,
        }
    }

    fn kind(&self) -> &'static str {
        match self {
            CliError::Model(chaff::Error::DeficitUnreachable { .. }) => "deficit_unreachable",
            CliError::Model(chaff::Error::InvalidSpec(_)) => "invalid_spec",
            CliError::Model(_) | CliError::Input(_) => "invalid_input",
            CliError::Io(_) => "io",
            CliError::ValidationFailed(_) => "validation_failed",
        }
    }

    fn to_json(&self) -> serde_json::Value {
        let mut error = json!({
            "kind": self.kind(),
            "message": self.to_string(),
            "exit_code": self.exit_code(),
        });
        match self {
            CliError::Model(chaff::Error::InvalidSpec(violations)) => {
                error["violations"] = violations.iter().map(|v| v.to_string()).collect();
            }
            CliError::ValidationFailed(check) => error["check"] = json!(check),
            _ => {}
        }
        json!({ "error": error })
    }
}

#[derive(Debug, Parser)]
#[command(name = "chaff", version, about = "Redundancy of pointer-state records in good/bad spin environments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Fragment size and every redundancy estimate for one deficit
    Redundancy(RunArgs),
    /// Averaged Holevo information against fragment size
    Curve(RunArgs),
    /// Cross-check the closed forms against the dense-state oracle
    Validate(ValidateArgs),
    /// Redundancy table over grids of n_bad, gamma2_good and delta
    Sweep(SweepArgs),
}

#[derive(Debug, Args)]
struct ValidateArgs {
    #[command(flatten)]
    run: RunArgs,
    /// Replace every check tolerance (exercises the failure path)
    #[arg(long, hide = true, allow_negative_numbers = true)]
    inject_tolerance: Option<f64>,
}

#[derive(Debug, Args)]
struct SweepArgs {
    #[command(flatten)]
    run: RunArgs,
    #[command(flatten)]
    grids: GridArgs,
}

fn run(cli: Cli) -> Result<(), CliError> {
    let no_grids = GridArgs::default();
    match cli.command {
        Command::Redundancy(args) => commands::cmd_redundancy(&RunConfig::resolve(&args, &no_grids)?),
        Command::Curve(args) => commands::cmd_curve(&RunConfig::resolve(&args, &no_grids)?),
        Command::Validate(args) => {
            let cfg = RunConfig::resolve(&args.run, &no_grids)?;
            let summary = commands::cmd_validate(&cfg, args.inject_tolerance)?;
            match summary.first_failure {
                Some(check) => Err(CliError::ValidationFailed(check)),
                None => Ok(()),
            }
        }
        Command::Sweep(args) => commands::cmd_sweep(&RunConfig::resolve(&args.run, &args.grids)?),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.to_json());
            ExitCode::from(e.exit_code())
        }
    }
}
