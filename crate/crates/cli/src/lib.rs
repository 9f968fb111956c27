//! Command-line front end for the `setclass` library: data and model files,
//! training, prediction, risk estimation and simulation sweeps.

pub mod args;
pub mod commands;
pub mod data;
pub mod error;
pub mod model_file;
pub mod population;

use args::{Cli, Command};
use error::CliResult;

/// Runs one command; the returned text is printed on standard output.
pub fn run(cli: &Cli) -> CliResult<Option<String>> {
    match &cli.command {
        Command::Train(a) => commands::train(a).map(Some),
        Command::Predict(a) => commands::predict(a).map(|_| None),
        Command::Simulate(a) => commands::simulate(a).map(|_| None),
        Command::Risk(a) => commands::risk(a).map(Some),
        Command::Generate(a) => commands::generate(a).map(|_| None),
    }
}
