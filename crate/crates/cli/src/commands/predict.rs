//! `predict`: evaluate the fitted model wherever its lagged inputs exist.

use std::collections::BTreeMap;

use mediatrend::io::{read_csv, read_opinion, write_csv};
use mediatrend::{evaluate_model, FractionTable, TopicYearSeries};
use serde::{Deserialize, Serialize};

use super::{artifact_path, create_out_dir, open_reader, require_artifact, write_artifact};
use crate::config::RunConfig;
use crate::error::CliError;
use crate::manifest::ManifestBuilder;
use crate::model_file::ModelFile;

/// One row of `predictions.csv`; `actual` is blank for years the opinion
/// series does not cover (including pure forecasts past its end).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredictionRow {
    pub year: i32,
    pub predicted: f64,
    pub actual: Option<f64>,
}

pub fn run(config: &RunConfig) -> Result<(), CliError> {
    let model_path = require_artifact(config, super::MODEL)?;
    let series_path = require_artifact(config, super::SERIES)?;
    let opinion_path = require_artifact(config, super::OPINION)?;
    create_out_dir(config)?;

    let model_file: ModelFile = serde_json::from_reader(open_reader(&model_path)?)
        .map_err(|e| CliError::internal(format!("{}: {e}", model_path.display())))?;
    let model = model_file.to_model();
    let series: Vec<TopicYearSeries> = read_csv(open_reader(&series_path)?)
        .map_err(|e| CliError::internal(format!("{}: {e}", series_path.display())))?;
    let opinion_points = read_opinion(open_reader(&opinion_path)?)
        .map_err(|e| CliError::internal(format!("{}: {e}", opinion_path.display())))?;
    let actual: BTreeMap<i32, f64> = opinion_points.iter().map(|p| (p.year, p.mu)).collect();

    let table = FractionTable::new(&series).map_err(CliError::internal)?;
    let series_start = series.iter().map(|c| c.year).min();
    let series_end = series.iter().map(|c| c.year).max();
    let (Some(start), Some(end)) = (series_start, series_end) else {
        return Err(CliError::internal(format!("{} is empty", super::SERIES)));
    };
    // A term with lag L lets the model see L years past the series end.
    let max_term_lag = model.terms.iter().map(|t| t.predictor.lag).max().unwrap_or(0) as i32;

    let mut rows: Vec<PredictionRow> = Vec::new();
    for year in start..=end + max_term_lag {
        if let Ok(predicted) = evaluate_model(&model, &table, year) {
            rows.push(PredictionRow {
                year,
                predicted,
                actual: actual.get(&year).copied(),
            });
        }
    }
    if rows.is_empty() {
        return Err(CliError::internal(
            "model cannot be evaluated at any year of the series".to_string(),
        ));
    }

    let predictions_path = artifact_path(config, super::PREDICTIONS);
    write_artifact(&predictions_path, |w| {
        write_csv(w, &rows).map_err(CliError::internal)
    })?;

    let mut manifest = ManifestBuilder::new("predict");
    manifest.input(&model_path)?;
    manifest.input(&series_path)?;
    manifest.input(&opinion_path)?;
    manifest.output(&predictions_path)?;
    manifest.write(config)?;

    let forecasts = rows.iter().filter(|r| r.actual.is_none()).count();
    eprintln!(
        "predict: {} years evaluated ({} without an observed opinion value)",
        rows.len(),
        forecasts
    );
    Ok(())
}
