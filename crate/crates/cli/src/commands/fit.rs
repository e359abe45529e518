//! `fit`: greedy forward selection of nested non-negative lag models.

use std::collections::BTreeSet;

use mediatrend::io::{read_csv, read_opinion};
use mediatrend::{greedy_select, CandidatePredictor, SparseLagModel, TopicYearSeries};

use super::{artifact_path, create_out_dir, open_reader, require_artifact, write_artifact};
use crate::config::RunConfig;
use crate::error::CliError;
use crate::manifest::{config_hash, ManifestBuilder};
use crate::model_file::ModelFile;

pub fn run(config: &RunConfig) -> Result<(), CliError> {
    let series_path = require_artifact(config, super::SERIES)?;
    let opinion_path = require_artifact(config, super::OPINION)?;
    create_out_dir(config)?;

    let series: Vec<TopicYearSeries> = read_csv(open_reader(&series_path)?)
        .map_err(|e| CliError::internal(format!("{}: {e}", series_path.display())))?;
    let opinion_points = read_opinion(open_reader(&opinion_path)?)
        .map_err(|e| CliError::internal(format!("{}: {e}", opinion_path.display())))?;
    let opinion: Vec<(i32, f64)> = opinion_points.iter().map(|p| (p.year, p.mu)).collect();

    let models = greedy_select(&opinion, &series, config.max_lag, config.max_topics)
        .map_err(CliError::internal)?;
    let final_model = models.last().expect("greedy_select returns ≥ 1 model");

    let model_path = artifact_path(config, super::MODEL);
    let model_file = ModelFile::from_model(final_model, config_hash(config));
    write_artifact(&model_path, |w| {
        let mut body = serde_json::to_string_pretty(&model_file)
            .map_err(|e| CliError::internal(format!("model serialization failed: {e}")))?;
        body.push('\n');
        use std::io::Write;
        w.write_all(body.as_bytes()).map_err(CliError::from)
    })?;

    let nested_path = artifact_path(config, super::NESTED_MODELS);
    write_artifact(&nested_path, |w| write_nested_table(w, &models))?;

    let mut manifest = ManifestBuilder::new("fit");
    manifest.input(&series_path)?;
    manifest.input(&opinion_path)?;
    manifest.output(&model_path)?;
    manifest.output(&nested_path)?;
    manifest.write(config)?;

    eprintln!(
        "fit: {} nested models over {} years; final r² = {:.3} with {} terms",
        models.len(),
        final_model.fitted_years.len(),
        final_model.r_squared,
        final_model.terms.len()
    );
    Ok(())
}

/// Writes the nested-model comparison table: one column per model, one row
/// per selected predictor (in selection order), then intercept and r² rows.
/// A blank cell means the predictor is not part of that model.
fn write_nested_table<W: std::io::Write>(
    writer: &mut W,
    models: &[SparseLagModel],
) -> Result<(), CliError> {
    let mut predictors: Vec<CandidatePredictor> = Vec::new();
    let mut seen: BTreeSet<CandidatePredictor> = BTreeSet::new();
    for model in models {
        for term in &model.terms {
            if seen.insert(term.predictor) {
                predictors.push(term.predictor);
            }
        }
    }

    let mut csv = csv::Writer::from_writer(writer);
    let mut header = vec!["term".to_string()];
    header.extend((1..=models.len()).map(|k| format!("model_{k}")));
    csv.write_record(&header).map_err(table_error)?;

    for predictor in &predictors {
        let mut row = vec![predictor.to_string()];
        for model in models {
            let cell = model
                .terms
                .iter()
                .find(|term| term.predictor == *predictor)
                .map(|term| term.coefficient.to_string())
                .unwrap_or_default();
            row.push(cell);
        }
        csv.write_record(&row).map_err(table_error)?;
    }

    let mut intercept_row = vec!["intercept".to_string()];
    intercept_row.extend(models.iter().map(|m| m.intercept.to_string()));
    csv.write_record(&intercept_row).map_err(table_error)?;

    let mut r2_row = vec!["r_squared".to_string()];
    r2_row.extend(models.iter().map(|m| m.r_squared.to_string()));
    csv.write_record(&r2_row).map_err(table_error)?;

    csv.flush().map_err(|e| table_error(csv::Error::from(e)))?;
    Ok(())
}

fn table_error(e: csv::Error) -> CliError {
    CliError::internal(format!("cannot write nested-model table: {e}"))
}
