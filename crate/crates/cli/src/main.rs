//! `ginibre` command-line driver.
//!
//! Exit codes: 0 success, 1 usage or IO error, 2 verification failure, 3 numerical failure.

mod commands;
mod config;

use std::process::ExitCode;

use clap::Parser;

use commands::Failure;
use config::{Cli, Command, RunConfig};

fn run(cli: Cli) -> Result<(), Failure> {
    match &cli.command {
        Command::Scatter(a) => commands::scatter(&RunConfig::resolve("scatter", a).map_err(Failure::Usage)?),
        Command::Exponents(a) => commands::exponents(&RunConfig::resolve("exponents", a).map_err(Failure::Usage)?),
        Command::Convergence(a) => {
            commands::convergence(&RunConfig::resolve("convergence", a).map_err(Failure::Usage)?)
        }
        Command::Verify(a) => commands::verify(a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("ginibre: {f}");
            ExitCode::from(f.exit_code())
        }
    }
}
