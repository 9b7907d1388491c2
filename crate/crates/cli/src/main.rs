//! Binary entry point: argument parsing and the error-to-exit-code boundary.

use std::fs;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use quad_eit::config::{self, CommonArgs, Run};
use quad_eit::{commands, CliError};

#[derive(Parser)]
#[command(
    name = "quad-eit",
    version,
    about = "Probe response of a driven cavity with a quadratically coupled membrane"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the operating point and print its parameters
    Steady(CommonArgs),
    /// Sweep the probe detuning and write the response CSV
    Sweep(CommonArgs),
    /// Sweep the probe detuning, then append dip metrics as a JSON line
    Dip(CommonArgs),
    /// Integrate the mean-field equations and compare with the analytic response
    Verify(CommonArgs),
    /// Write the bare-cavity response CSV
    Baseline(CommonArgs),
}

fn load(args: &CommonArgs) -> Result<Run, CliError> {
    let text = fs::read_to_string(&args.config)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", args.config.display())))?;
    config::parse_config(&text)?.assemble(args)
}

fn dispatch(command: &Command) -> Result<(), CliError> {
    match command {
        Command::Steady(a) => commands::steady(&load(a)?),
        Command::Sweep(a) => commands::sweep(&load(a)?),
        Command::Dip(a) => commands::dip(&load(a)?),
        Command::Verify(a) => commands::verify(&load(a)?),
        Command::Baseline(a) => commands::baseline(&load(a)?),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(&cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("quad-eit: {err}");
            ExitCode::from(err.exit_code())
        }
    }
}
