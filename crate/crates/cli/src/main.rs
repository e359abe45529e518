//! `mediatrend`: a batch pipeline from a dated news corpus and survey waves
//! to yearly sentiment series, a harmonized opinion series, and a sparse
//! non-negative lag model linking the two.
//!
//! Exit codes: 0 success, 1 invalid configuration (the message names the
//! field), 2 missing upstream artifact (the message names it and the
//! subcommand that produces it), 3 broken data invariant or internal
//! failure.

mod commands;
mod config;
mod error;
mod manifest;
mod model_file;
mod plot;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::error::CliError;

#[derive(Parser)]
#[command(
    name = "mediatrend",
    version,
    about = "Media-sentiment series and survey-opinion pipeline",
    long_about = "Runs a deterministic batch pipeline: ingest a keyword-filtered news corpus, \
score sentences on eight topics, aggregate to per-article sentiment, build yearly fraction \
series, harmonize survey waves into one opinion series, fit nested non-negative lag models, \
predict, and render reports. Every subcommand persists its artifacts plus a manifest of \
input hashes into the output directory."
)]
struct Cli {
    #[command(flatten)]
    overrides: config::Overrides,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Filter the corpus by keyword and segment bodies into sentences.
    Ingest,
    /// Score every sentence on all eight topics.
    Score,
    /// Collapse sentence scores into per-article topic categories.
    Aggregate,
    /// Build the yearly per-topic positive/negative fraction series.
    Series,
    /// Calibrate survey waves into one baseline-anchored opinion series.
    Harmonize,
    /// Fit nested lagged-fraction models by greedy forward selection.
    Fit,
    /// Evaluate the fitted model over (and just past) the series years.
    Predict,
    /// Render the standard figures and tables from the artifacts.
    Report,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            use clap::error::ErrorKind;
            // --help/--version are successful outcomes; anything else is a
            // configuration problem surfaced by the parser.
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = err.print();
            return ExitCode::from(code);
        }
    };

    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code())
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let config = config::resolve(&cli.overrides)?;
    match cli.command {
        Command::Ingest => commands::ingest::run(&config),
        Command::Score => commands::score::run(&config),
        Command::Aggregate => commands::aggregate::run(&config),
        Command::Series => commands::series::run(&config),
        Command::Harmonize => commands::harmonize::run(&config),
        Command::Fit => commands::fit::run(&config),
        Command::Predict => commands::predict::run(&config),
        Command::Report => commands::report::run(&config),
    }
}
