// `!(x > 0.0)` is the NaN-rejecting form used throughout.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod cli;
mod commands;
mod config;
mod error;
mod report;
mod series;

use std::ffi::OsString;

use clap::{CommandFactory, FromArgMatches};

use crate::cli::Cli;

fn run(argv: Vec<OsString>) -> i32 {
    let root = Cli::command();
    let argv = match config::expand_argv(argv, &root) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("cirlan: {e}");
            return e.exit_code();
        }
    };
    let parsed = root
        .try_get_matches_from(argv)
        .and_then(|m| Cli::from_arg_matches(&m));
    let cli = match parsed {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match commands::dispatch(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("cirlan: {e}");
            e.exit_code()
        }
    }
}

fn main() {
    std::process::exit(run(std::env::args_os().collect()));
}
