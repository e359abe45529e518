//! `report`: render the pipeline's standard figures and tables.
//!
//! Each figure is written as a standalone SVG plus the tabular data it was
//! drawn from, side by side under `<out_dir>/plots/`.

use std::collections::BTreeSet;
use std::path::Path;

use mediatrend::io::{read_csv, read_opinion, write_csv};
use mediatrend::harmonize::OpinionPoint;
use mediatrend::{Topic, TopicYearSeries};
use serde::Serialize;

use super::{create_out_dir, open_reader, require_artifact};
use crate::commands::predict::PredictionRow;
use crate::config::RunConfig;
use crate::error::CliError;
use crate::manifest::ManifestBuilder;
use crate::model_file::ModelFile;
use crate::plot::{self, Element, Panel};

pub fn run(config: &RunConfig) -> Result<(), CliError> {
    let series_path = require_artifact(config, super::SERIES)?;
    let opinion_path = require_artifact(config, super::OPINION)?;
    let model_path = require_artifact(config, super::MODEL)?;
    let nested_path = require_artifact(config, super::NESTED_MODELS)?;
    let predictions_path = require_artifact(config, super::PREDICTIONS)?;
    create_out_dir(config)?;

    let mut series: Vec<TopicYearSeries> = read_csv(open_reader(&series_path)?)
        .map_err(|e| CliError::internal(format!("{}: {e}", series_path.display())))?;
    series.sort_by_key(|c| (c.topic, c.year));
    let mut opinion: Vec<OpinionPoint> = read_opinion(open_reader(&opinion_path)?)
        .map_err(|e| CliError::internal(format!("{}: {e}", opinion_path.display())))?;
    opinion.sort_by_key(|p| p.year);
    let model_file: ModelFile = serde_json::from_reader(open_reader(&model_path)?)
        .map_err(|e| CliError::internal(format!("{}: {e}", model_path.display())))?;
    let mut predictions: Vec<PredictionRow> = read_csv(open_reader(&predictions_path)?)
        .map_err(|e| CliError::internal(format!("{}: {e}", predictions_path.display())))?;
    predictions.sort_by_key(|r| r.year);

    let series_years: BTreeSet<i32> = series.iter().map(|c| c.year).collect();
    if series_years.len() < 2 || opinion.len() < 2 {
        return Err(CliError::internal(
            "need ≥ 2 years for series plots".to_string(),
        ));
    }

    let plots_dir = config.out_dir.join("plots");
    std::fs::create_dir_all(&plots_dir)
        .map_err(|e| CliError::internal(format!("cannot create {}: {e}", plots_dir.display())))?;

    let mut manifest = ManifestBuilder::new("report");
    manifest.input(&series_path)?;
    manifest.input(&opinion_path)?;
    manifest.input(&model_path)?;
    manifest.input(&nested_path)?;
    manifest.input(&predictions_path)?;

    // Figure 1: the harmonized opinion series with its bootstrap band.
    let opinion_svg = plots_dir.join("opinion.svg");
    write_text(&opinion_svg, plot::render(&[opinion_panel(&opinion)], 1, 640.0, 360.0))?;
    let opinion_data = plots_dir.join("opinion.csv");
    copy_data(&opinion_path, &opinion_data)?;

    // Figure 2: stacked per-topic article volumes by year.
    let volumes_svg = plots_dir.join("volumes.svg");
    write_text(&volumes_svg, plot::render(&[volumes_panel(&series)], 1, 640.0, 360.0))?;
    let volumes_data = plots_dir.join("volumes.csv");
    super::write_artifact(&volumes_data, |w| {
        write_csv(w, &volume_rows(&series)).map_err(CliError::internal)
    })?;

    // Figure 3: per-topic positive/negative fraction lines, one panel each.
    let fractions_svg = plots_dir.join("fractions.svg");
    write_text(
        &fractions_svg,
        plot::render(&fraction_panels(&series), 2, 420.0, 260.0),
    )?;
    let fractions_data = plots_dir.join("fractions.csv");
    copy_data(&series_path, &fractions_data)?;

    // Figure 4: fitted/forecast opinion against the observed series.
    let fit_svg = plots_dir.join("fit.svg");
    write_text(
        &fit_svg,
        plot::render(&[fit_panel(&predictions, model_file.r_squared)], 1, 640.0, 360.0),
    )?;
    let fit_data = plots_dir.join("fit.csv");
    copy_data(&predictions_path, &fit_data)?;

    // The nested-model comparison table accompanies the figures.
    let nested_copy = plots_dir.join("nested_models.csv");
    copy_data(&nested_path, &nested_copy)?;

    for output in [
        &opinion_svg,
        &opinion_data,
        &volumes_svg,
        &volumes_data,
        &fractions_svg,
        &fractions_data,
        &fit_svg,
        &fit_data,
        &nested_copy,
    ] {
        manifest.output(output)?;
    }
    manifest.write(config)?;

    eprintln!("report: 4 figures and 5 data files under {}", plots_dir.display());
    Ok(())
}

fn opinion_panel(opinion: &[OpinionPoint]) -> Panel {
    let mu: Vec<(f64, f64)> = opinion.iter().map(|p| (p.year as f64, p.mu)).collect();
    let lower: Vec<(f64, f64)> = opinion.iter().map(|p| (p.year as f64, p.ci_low)).collect();
    let upper: Vec<(f64, f64)> = opinion.iter().map(|p| (p.year as f64, p.ci_high)).collect();
    Panel {
        title: "harmonized opinion by year".into(),
        x_label: "year".into(),
        y_label: "opinion (baseline year = 0)".into(),
        elements: vec![
            Element::Band {
                lower,
                upper,
                color: plot::ACCENT_COLOR,
                opacity: 0.2,
            },
            Element::Line {
                points: mu.clone(),
                color: plot::ACCENT_COLOR,
                dashed: false,
                width: 1.8,
            },
            Element::Markers {
                points: mu,
                color: plot::ACCENT_COLOR,
                radius: 2.5,
            },
        ],
        legend: vec![
            ("opinion".into(), plot::ACCENT_COLOR),
            ("bootstrap CI".into(), plot::MUTED_COLOR),
        ],
    }
}

/// One stacked layer per topic; layer k fills between the cumulative volume
/// of topics 0..k and 0..=k.
fn volumes_panel(series: &[TopicYearSeries]) -> Panel {
    let years: Vec<i32> = series
        .iter()
        .map(|c| c.year)
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let volume = |topic: Topic, year: i32| -> f64 {
        series
            .iter()
            .find(|c| c.topic == topic && c.year == year)
            .map(|c| (c.n_positive + c.n_negative) as f64)
            .unwrap_or(0.0)
    };

    let mut elements = Vec::new();
    let mut legend = Vec::new();
    let mut cumulative = vec![0.0f64; years.len()];
    for topic in Topic::ALL {
        let lower: Vec<(f64, f64)> = years
            .iter()
            .zip(&cumulative)
            .map(|(y, c)| (*y as f64, *c))
            .collect();
        for (i, year) in years.iter().enumerate() {
            cumulative[i] += volume(topic, *year);
        }
        let upper: Vec<(f64, f64)> = years
            .iter()
            .zip(&cumulative)
            .map(|(y, c)| (*y as f64, *c))
            .collect();
        let color = plot::PALETTE[topic.index()];
        elements.push(Element::Band {
            lower,
            upper,
            color,
            opacity: 0.85,
        });
        legend.push((topic.to_string(), color));
    }
    Panel {
        title: "articles with topic sentiment by year (stacked)".into(),
        x_label: "year".into(),
        y_label: "articles".into(),
        elements,
        legend,
    }
}

fn fraction_panels(series: &[TopicYearSeries]) -> Vec<Panel> {
    Topic::ALL
        .iter()
        .map(|topic| {
            let cells: Vec<&TopicYearSeries> =
                series.iter().filter(|c| c.topic == *topic).collect();
            let positive: Vec<(f64, f64)> = cells
                .iter()
                .map(|c| (c.year as f64, c.f_positive))
                .collect();
            let negative: Vec<(f64, f64)> = cells
                .iter()
                .map(|c| (c.year as f64, c.f_negative))
                .collect();
            Panel {
                title: topic.to_string(),
                x_label: "year".into(),
                y_label: "fraction".into(),
                elements: vec![
                    Element::Line {
                        points: positive,
                        color: plot::POSITIVE_COLOR,
                        dashed: false,
                        width: 1.6,
                    },
                    Element::Line {
                        points: negative,
                        color: plot::NEGATIVE_COLOR,
                        dashed: true,
                        width: 1.6,
                    },
                ],
                legend: vec![
                    ("positive".into(), plot::POSITIVE_COLOR),
                    ("negative".into(), plot::NEGATIVE_COLOR),
                ],
            }
        })
        .collect()
}

fn fit_panel(predictions: &[PredictionRow], r_squared: f64) -> Panel {
    let predicted: Vec<(f64, f64)> = predictions
        .iter()
        .map(|r| (r.year as f64, r.predicted))
        .collect();
    let actual: Vec<(f64, f64)> = predictions
        .iter()
        .filter_map(|r| r.actual.map(|a| (r.year as f64, a)))
        .collect();
    Panel {
        title: format!("fitted vs observed opinion (r² = {r_squared:.3})"),
        x_label: "year".into(),
        y_label: "opinion".into(),
        elements: vec![
            Element::Line {
                points: actual.clone(),
                color: plot::MUTED_COLOR,
                dashed: false,
                width: 1.6,
            },
            Element::Markers {
                points: actual,
                color: plot::MUTED_COLOR,
                radius: 2.5,
            },
            Element::Line {
                points: predicted.clone(),
                color: plot::ACCENT_COLOR,
                dashed: false,
                width: 1.8,
            },
            Element::Markers {
                points: predicted,
                color: plot::ACCENT_COLOR,
                radius: 2.0,
            },
        ],
        legend: vec![
            ("observed".into(), plot::MUTED_COLOR),
            ("fitted".into(), plot::ACCENT_COLOR),
        ],
    }
}

#[derive(Serialize)]
struct VolumeRow {
    topic: Topic,
    year: i32,
    articles: usize,
}

fn volume_rows(series: &[TopicYearSeries]) -> Vec<VolumeRow> {
    series
        .iter()
        .map(|c| VolumeRow {
            topic: c.topic,
            year: c.year,
            articles: c.n_positive + c.n_negative,
        })
        .collect()
}

fn write_text(path: &Path, body: String) -> Result<(), CliError> {
    std::fs::write(path, body)
        .map_err(|e| CliError::internal(format!("cannot write {}: {e}", path.display())))
}

fn copy_data(from: &Path, to: &Path) -> Result<(), CliError> {
    std::fs::copy(from, to).map_err(|e| {
        CliError::internal(format!(
            "cannot copy {} to {}: {e}",
            from.display(),
            to.display()
        ))
    })?;
    Ok(())
}
