//! The eight pipeline subcommands.

pub mod aggregate;
pub mod fit;
pub mod harmonize;
pub mod ingest;
pub mod predict;
pub mod report;
pub mod score;
pub mod series;

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use crate::config::RunConfig;
use crate::error::CliError;

// Canonical artifact file names, all relative to the output directory.
pub const ARTICLES: &str = "articles.jsonl";
pub const SENTENCES: &str = "sentences.jsonl";
pub const SCORES: &str = "scores.jsonl";
pub const SENTIMENT: &str = "article_sentiment.jsonl";
pub const SERIES: &str = "series.csv";
pub const OPINION: &str = "opinion.csv";
pub const CALIBRATION: &str = "calibration.csv";
pub const MODEL: &str = "model.json";
pub const NESTED_MODELS: &str = "nested_models.csv";
pub const PREDICTIONS: &str = "predictions.csv";

/// Which subcommand produces a given artifact (used in exit-code-2 hints).
fn producer_of(name: &str) -> &'static str {
    match name {
        ARTICLES | SENTENCES => "ingest",
        SCORES => "score",
        SENTIMENT => "aggregate",
        SERIES => "series",
        OPINION | CALIBRATION => "harmonize",
        MODEL | NESTED_MODELS => "fit",
        PREDICTIONS => "predict",
        _ => unreachable!("unknown artifact name"),
    }
}

pub(crate) fn artifact_path(config: &RunConfig, name: &str) -> PathBuf {
    config.out_dir.join(name)
}

/// Resolves an artifact a previous subcommand must have produced.
pub(crate) fn require_artifact(
    config: &RunConfig,
    name: &'static str,
) -> Result<PathBuf, CliError> {
    let path = artifact_path(config, name);
    if path.is_file() {
        Ok(path)
    } else {
        Err(CliError::MissingArtifact {
            name,
            producer: producer_of(name),
        })
    }
}

/// Resolves a user-supplied input path; absence is a configuration error.
pub(crate) fn require_input<'a>(
    path: &'a Option<PathBuf>,
    field: &'static str,
) -> Result<&'a Path, CliError> {
    match path {
        Some(p) if p.is_file() => Ok(p),
        Some(p) => Err(CliError::config(
            field,
            format!("path {} does not exist", p.display()),
        )),
        None => Err(CliError::config(field, "no path configured")),
    }
}

pub(crate) fn create_out_dir(config: &RunConfig) -> Result<(), CliError> {
    std::fs::create_dir_all(&config.out_dir).map_err(|e| {
        CliError::internal(format!(
            "cannot create output directory {}: {e}",
            config.out_dir.display()
        ))
    })
}

pub(crate) fn open_reader(path: &Path) -> Result<BufReader<File>, CliError> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| CliError::internal(format!("cannot open {}: {e}", path.display())))
}

/// Writes an artifact through a buffered writer and flushes it, so the file
/// is complete before it is hashed into the manifest.
pub(crate) fn write_artifact<F>(path: &Path, write: F) -> Result<(), CliError>
where
    F: FnOnce(&mut BufWriter<File>) -> Result<(), CliError>,
{
    let file = File::create(path)
        .map_err(|e| CliError::internal(format!("cannot create {}: {e}", path.display())))?;
    let mut writer = BufWriter::new(file);
    write(&mut writer)?;
    writer
        .flush()
        .map_err(|e| CliError::internal(format!("cannot write {}: {e}", path.display())))?;
    Ok(())
}
