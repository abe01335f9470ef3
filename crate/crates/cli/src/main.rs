// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod args;
mod error;
mod output;
mod verbs;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};
use error::{CliError, SCHEMA_HELP};
use verbs::Outcome;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Generate(a) => verbs::generate(a),
        Command::Stats(a) => verbs::stats(a),
        Command::Theory(a) => verbs::theory(a),
        Command::Validate(a) => verbs::validate(a),
        Command::Epidemic(a) => verbs::epidemic(a),
        Command::Route(a) => verbs::route(a),
    };
    match result {
        Ok(Outcome::Success) => ExitCode::SUCCESS,
        Ok(Outcome::ValidationFailed) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            if let Some(CliError::Config { .. }) = e.downcast_ref::<CliError>() {
                eprintln!("\n{SCHEMA_HELP}");
            }
            ExitCode::from(2)
        }
    }
}
