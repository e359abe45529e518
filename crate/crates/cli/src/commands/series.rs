//! `series`: build the yearly per-topic positive/negative fraction series.

use mediatrend::io::{read_article_sentiments, write_csv};
use mediatrend::{build_series, ArticleSentiment};

use super::{artifact_path, create_out_dir, open_reader, require_artifact, write_artifact};
use crate::config::RunConfig;
use crate::error::CliError;
use crate::manifest::ManifestBuilder;

pub fn run(config: &RunConfig) -> Result<(), CliError> {
    let sentiment_path = require_artifact(config, super::SENTIMENT)?;
    create_out_dir(config)?;

    let mut sentiments: Vec<ArticleSentiment> = read_article_sentiments(open_reader(&sentiment_path)?)
        .map_err(|e| CliError::internal(format!("{}: {e}", sentiment_path.display())))?;
    if sentiments.is_empty() {
        return Err(CliError::internal(format!(
            "{} contains no articles",
            super::SENTIMENT
        )));
    }

    // An explicitly configured window restricts the analysis to it; without
    // one the window is the data's own span.
    let data_start = sentiments.iter().map(|s| s.year).min().unwrap();
    let data_end = sentiments.iter().map(|s| s.year).max().unwrap();
    let start = config.year_start.unwrap_or(data_start);
    let end = config.year_end.unwrap_or(data_end);
    let before = sentiments.len();
    sentiments.retain(|s| s.year >= start && s.year <= end);
    if sentiments.len() < before {
        eprintln!(
            "series: {} articles outside the {start}..={end} window dropped",
            before - sentiments.len()
        );
    }
    if sentiments.is_empty() {
        return Err(CliError::internal(format!(
            "no articles fall inside the {start}..={end} window"
        )));
    }

    let series = build_series(&sentiments, start, end, config.denominator.to_core())
        .map_err(CliError::internal)?;

    let series_path = artifact_path(config, super::SERIES);
    write_artifact(&series_path, |w| {
        write_csv(w, &series).map_err(CliError::internal)
    })?;

    let mut manifest = ManifestBuilder::new("series");
    manifest.input(&sentiment_path)?;
    manifest.output(&series_path)?;
    manifest.write(config)?;

    eprintln!(
        "series: {} (topic, year) cells over {start}..={end}",
        series.len()
    );
    Ok(())
}
