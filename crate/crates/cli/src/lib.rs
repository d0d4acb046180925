//! Driver for the `sun-phase` command-line tool: argument parsing,
//! seeded sweeps and JSON/CSV output.
//!
//! Exit codes: 0 all checks pass, 1 a check failed, 2 configuration
//! error, 3 inconclusive sweep.

pub mod args;
pub mod commands;
pub mod config;
pub mod error;
pub mod report;
pub mod sweep;

use std::path::Path;

use args::{Cli, Command};
use error::CliResult;
use report::Report;

/// Run a parsed command, returning its report without emitting it.
pub fn execute(cli: &Cli) -> CliResult<Report> {
    match &cli.command {
        Command::VerifySurel(a) => commands::surel::run(a),
        Command::VerifyCprel(a) => commands::cprel::run(a),
        Command::Su2Demo(a) => commands::demo::run(a),
        Command::Superosc(a) => commands::superosc::run(a),
        Command::Vortex(a) => commands::vortex::run(a),
    }
}

pub fn output_path(cli: &Cli) -> Option<&Path> {
    let out = match &cli.command {
        Command::VerifySurel(a) => &a.output,
        Command::VerifyCprel(a) => &a.output,
        Command::Su2Demo(a) => &a.output,
        Command::Superosc(a) => &a.output,
        Command::Vortex(a) => &a.output,
    };
    out.out.as_deref()
}
