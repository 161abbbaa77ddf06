//! `remest` — experiment runner for remote-estimation transmission policies.
//!
//! Exit codes: 0 success, 1 validation error, 2 check failure,
//! 3 solver non-convergence or truncation budget exhausted.

mod commands;
mod config;
mod csvout;

use std::process::ExitCode;

use clap::Parser;
use remest_core::Error;

fn main() -> ExitCode {
    let cli = match config::Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Help and version requests are not errors.
            if e.use_stderr() {
                eprintln!("{e}");
                return ExitCode::from(1);
            }
            print!("{e}");
            return ExitCode::SUCCESS;
        }
    };
    let cfg = match config::resolve(cli) {
        Ok(cfg) => cfg,
        Err(message) => {
            eprintln!("error: {message}");
            return ExitCode::from(1);
        }
    };
    match commands::run(&cfg) {
        Ok(commands::Outcome::Done) => ExitCode::SUCCESS,
        Ok(commands::Outcome::ChecksFailed) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::NonConvergence { .. } | Error::TruncationBudgetExceeded { .. } => {
                    ExitCode::from(3)
                }
                _ => ExitCode::from(1),
            }
        }
    }
}
