//! Command-line frontend: `score`, `importance`, `explain`, `pick` and
//! `plot-data`.
//!
//! Exit codes: 0 success, 1 internal or output failure, 2 input or
//! validation error, 3 degenerate math (constant importance, collinear
//! design, constant target, empty sampling kernel).

pub mod commands;
pub mod config;
pub mod error;
pub mod report;

use std::ffi::OsString;
use std::panic;

use clap::Parser;

use config::{Action, Cli, RunConfig};
use error::CliError;

pub fn dispatch(cfg: &RunConfig) -> Result<(), CliError> {
    match cfg.subcommand {
        Action::Score => commands::cmd_score(cfg),
        Action::Importance => commands::cmd_importance(cfg),
        Action::Explain => commands::cmd_explain(cfg),
        Action::Pick => commands::cmd_pick(cfg),
        Action::PlotData => commands::cmd_plot_data(cfg),
    }
}

/// Parses `args` (including the program name) and runs; returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let _ = e.print();
            return code;
        }
    };
    let (action, flags) = cli.command.parts();
    let result =
        panic::catch_unwind(|| RunConfig::resolve(action, flags).and_then(|cfg| dispatch(&cfg)));
    match result {
        Ok(Ok(())) => 0,
        Ok(Err(e)) => {
            eprintln!("pie: {e}");
            e.exit_code()
        }
        Err(_) => {
            eprintln!("pie: internal error: unexpected panic");
            1
        }
    }
}
