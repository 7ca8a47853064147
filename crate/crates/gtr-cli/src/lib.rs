//! Command-line front end for the `gtr-fading` library.

pub mod args;
pub mod commands;
pub mod config;
pub mod error;
pub mod output;

use std::ffi::OsString;

use clap::Parser;

use args::{Cli, Command};
use error::{CliError, CliResult, EXIT_INVALID};

fn dispatch(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Stats(a) => commands::stats::run(a),
        Command::Sep(a) => commands::sep::run(a),
        Command::Capacity(a) => commands::capacity::run(a),
        Command::Mc(c) => commands::mc::run(c),
        Command::Figure(a) => commands::figure::run(a),
    }
}

/// Runs the CLI on `args` (including the program name) and returns the
/// process exit code.
pub fn run(args: Vec<OsString>) -> i32 {
    let result = config::expand_config(args).and_then(|args| {
        let cli = match Cli::try_parse_from(args) {
            Ok(cli) => cli,
            Err(e) => {
                let code = if e.use_stderr() { EXIT_INVALID } else { 0 };
                let _ = e.print();
                return Err(CliError { code, message: String::new() });
            }
        };
        dispatch(cli)
    });
    match result {
        Ok(()) => 0,
        Err(e) => {
            if !e.message.is_empty() {
                eprintln!("error: {}", e.message);
            }
            e.code
        }
    }
}
