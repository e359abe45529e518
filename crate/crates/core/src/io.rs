//! On-disk formats for pipeline artifacts.
//!
//! Structured records travel as JSON Lines; tabular series travel as CSV.
//! All writers are deterministic: fields serialize in declaration order and
//! floats use shortest round-trip formatting, so identical data produces
//! byte-identical files.

use std::collections::BTreeSet;
use std::io::{BufRead, Read, Write};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::aggregate::{ArticleSentiment, Category};
use crate::harmonize::{Calibration, OpinionPoint, SurveyWave};
use crate::topic::Topic;

#[derive(Debug, Error)]
pub enum IoError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("line {line}: {message}")]
    Record { line: usize, message: String },
}

impl IoError {
    fn record(line: usize, message: impl std::fmt::Display) -> Self {
        IoError::Record {
            line,
            message: message.to_string(),
        }
    }
}

/// Reads one JSON document per line. Line numbers in errors are 1-based.
pub fn read_jsonl<T: DeserializeOwned, R: BufRead>(reader: R) -> Result<Vec<T>, IoError> {
    let mut items = Vec::new();
    for (index, line) in reader.lines().enumerate() {
        let line_no = index + 1;
        let text = line?;
        if text.trim().is_empty() {
            return Err(IoError::record(line_no, "empty line"));
        }
        items.push(
            serde_json::from_str(&text).map_err(|e| IoError::record(line_no, e))?,
        );
    }
    Ok(items)
}

/// Writes one JSON document per line with a trailing newline.
pub fn write_jsonl<T: Serialize, W: Write>(mut writer: W, items: &[T]) -> Result<(), IoError> {
    for item in items {
        let line = serde_json::to_string(item)
            .map_err(|e| IoError::record(0, format!("serialization failed: {e}")))?;
        writeln!(writer, "{line}")?;
    }
    Ok(())
}

/// Reads a headered CSV into serde rows. Line numbers count the header.
pub fn read_csv<T: DeserializeOwned, R: Read>(reader: R) -> Result<Vec<T>, IoError> {
    let mut csv_reader = csv::Reader::from_reader(reader);
    let mut rows = Vec::new();
    for (index, row) in csv_reader.deserialize::<T>().enumerate() {
        rows.push(row.map_err(|e| IoError::record(index + 2, e))?);
    }
    Ok(rows)
}

/// Writes serde rows as headered CSV.
pub fn write_csv<T: Serialize, W: Write>(writer: W, rows: &[T]) -> Result<(), IoError> {
    let mut csv_writer = csv::Writer::from_writer(writer);
    for row in rows {
        csv_writer
            .serialize(row)
            .map_err(|e| IoError::record(0, format!("serialization failed: {e}")))?;
    }
    csv_writer
        .flush()
        .map_err(|e| IoError::record(0, format!("flush failed: {e}")))?;
    Ok(())
}

/// One line of the article-sentiment artifact: every article contributes
/// eight consecutive lines, one per topic in canonical order.
#[derive(Debug, Serialize, Deserialize)]
struct SentimentRow {
    article_id: String,
    year: i32,
    topic: Topic,
    category: Category,
}

pub fn write_article_sentiments<W: Write>(
    mut writer: W,
    sentiments: &[ArticleSentiment],
) -> Result<(), IoError> {
    for sentiment in sentiments {
        for topic in Topic::ALL {
            let row = SentimentRow {
                article_id: sentiment.article_id.clone(),
                year: sentiment.year,
                topic,
                category: sentiment.category(topic),
            };
            let line = serde_json::to_string(&row)
                .map_err(|e| IoError::record(0, format!("serialization failed: {e}")))?;
            writeln!(writer, "{line}")?;
        }
    }
    Ok(())
}

/// Reads the article-sentiment artifact back, validating that each article's
/// eight topic lines are complete, unique, and contiguous.
pub fn read_article_sentiments<R: BufRead>(
    reader: R,
) -> Result<Vec<ArticleSentiment>, IoError> {
    struct Group {
        article_id: String,
        year: i32,
        categories: [Option<Category>; Topic::COUNT],
        first_line: usize,
    }
    fn finalize(group: Group) -> Result<ArticleSentiment, IoError> {
        let mut categories = [Category::Neutral; Topic::COUNT];
        for topic in Topic::ALL {
            categories[topic.index()] = group.categories[topic.index()].ok_or_else(|| {
                IoError::record(
                    group.first_line,
                    format!(
                        "article {:?} is missing its {topic} line",
                        group.article_id
                    ),
                )
            })?;
        }
        Ok(ArticleSentiment {
            article_id: group.article_id,
            year: group.year,
            categories,
        })
    }

    let mut sentiments = Vec::new();
    let mut completed = BTreeSet::new();
    let mut current: Option<Group> = None;
    for (index, line) in reader.lines().enumerate() {
        let line_no = index + 1;
        let text = line?;
        let row: SentimentRow =
            serde_json::from_str(&text).map_err(|e| IoError::record(line_no, e))?;

        let start_new = match &current {
            Some(group) => group.article_id != row.article_id,
            None => true,
        };
        if start_new {
            if let Some(group) = current.take() {
                completed.insert(group.article_id.clone());
                sentiments.push(finalize(group)?);
            }
            if completed.contains(&row.article_id) {
                return Err(IoError::record(
                    line_no,
                    format!(
                        "lines for article {:?} are not contiguous",
                        row.article_id
                    ),
                ));
            }
            current = Some(Group {
                article_id: row.article_id.clone(),
                year: row.year,
                categories: [None; Topic::COUNT],
                first_line: line_no,
            });
        }
        let group = current.as_mut().unwrap();
        if group.year != row.year {
            return Err(IoError::record(
                line_no,
                format!(
                    "article {:?} has conflicting years {} and {}",
                    row.article_id, group.year, row.year
                ),
            ));
        }
        let slot = &mut group.categories[row.topic.index()];
        if slot.is_some() {
            return Err(IoError::record(
                line_no,
                format!(
                    "duplicate {} line for article {:?}",
                    row.topic, row.article_id
                ),
            ));
        }
        *slot = Some(row.category);
    }
    if let Some(group) = current.take() {
        sentiments.push(finalize(group)?);
    }
    Ok(sentiments)
}

/// Survey wave CSV row: response counts are semicolon-delimited, ordered
/// least to most favorable.
#[derive(Debug, Serialize, Deserialize)]
struct WaveRow {
    series_id: String,
    year: i32,
    scale_levels: usize,
    counts: String,
}

pub fn write_waves<W: Write>(writer: W, waves: &[SurveyWave]) -> Result<(), IoError> {
    let rows: Vec<WaveRow> = waves
        .iter()
        .map(|wave| WaveRow {
            series_id: wave.series_id().to_string(),
            year: wave.year(),
            scale_levels: wave.scale_levels(),
            counts: wave
                .response_counts()
                .iter()
                .map(|c| c.to_string())
                .collect::<Vec<_>>()
                .join(";"),
        })
        .collect();
    write_csv(writer, &rows)
}

pub fn read_waves<R: Read>(reader: R) -> Result<Vec<SurveyWave>, IoError> {
    let rows: Vec<WaveRow> = read_csv(reader)?;
    rows.into_iter()
        .enumerate()
        .map(|(index, row)| {
            let line = index + 2;
            let counts = row
                .counts
                .split(';')
                .map(|field| {
                    field
                        .trim()
                        .parse::<f64>()
                        .map_err(|e| IoError::record(line, format!("count {field:?}: {e}")))
                })
                .collect::<Result<Vec<f64>, _>>()?;
            if counts.len() != row.scale_levels {
                return Err(IoError::record(
                    line,
                    format!(
                        "scale_levels is {} but {} counts were given",
                        row.scale_levels,
                        counts.len()
                    ),
                ));
            }
            SurveyWave::new(row.series_id, row.year, counts)
                .map_err(|e| IoError::record(line, e))
        })
        .collect()
}

pub fn write_opinion<W: Write>(writer: W, points: &[OpinionPoint]) -> Result<(), IoError> {
    write_csv(writer, points)
}

pub fn read_opinion<R: Read>(reader: R) -> Result<Vec<OpinionPoint>, IoError> {
    read_csv(reader)
}

pub fn write_calibrations<W: Write>(
    writer: W,
    calibrations: &[Calibration],
) -> Result<(), IoError> {
    write_csv(writer, calibrations)
}

pub fn read_calibrations<R: Read>(reader: R) -> Result<Vec<Calibration>, IoError> {
    read_csv(reader)
}
