mod cli;
mod commands;
mod config;
mod error;
mod tables;

use std::process::ExitCode;

use clap::Parser;

use crate::cli::{Cli, Command};
use crate::config::RunConfig;
use crate::error::CliError;

fn run(cli: Cli) -> Result<(), CliError> {
    let mut cfg = RunConfig::resolve(&cli.global)?;
    match cli.command {
        Command::Prepare { data } => commands::prepare_cmd(&mut cfg, data),
        Command::Train => commands::train_cmd(&cfg),
        Command::Calibrate { plan } => commands::calibrate_cmd(&mut cfg, plan),
        Command::Reliability(input) => commands::reliability_cmd(&cfg, &input),
        Command::Report(input) => commands::report_cmd(&cfg, &input),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
