//! Sentence-to-article sentiment aggregation.
//!
//! Each article receives one category per topic: sentences assigned to the
//! topic (p_assign at or above a threshold) vote with their assignment
//! probability as weight; the weighted mean of their positive-sentiment
//! probabilities is compared against a decision boundary with an optional
//! dead-band.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scoring::SentenceScore;
use crate::topic::Topic;

/// Article-level sentiment class for one topic.
///
/// Ordered negative < neutral < positive so that monotonicity statements
/// about the decision rule can use the natural ordering.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
#[serde(rename_all = "snake_case")]
pub enum Category {
    Negative,
    Neutral,
    Positive,
}

impl std::fmt::Display for Category {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Category::Negative => "negative",
            Category::Neutral => "neutral",
            Category::Positive => "positive",
        })
    }
}

impl std::str::FromStr for Category {
    type Err = UnknownCategory;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "negative" => Ok(Category::Negative),
            "neutral" => Ok(Category::Neutral),
            "positive" => Ok(Category::Positive),
            other => Err(UnknownCategory(other.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown sentiment category: {0:?}")]
pub struct UnknownCategory(pub String);

/// One article's sentiment category in every topic, indexed in canonical
/// topic order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArticleSentiment {
    pub article_id: String,
    pub year: i32,
    pub categories: [Category; Topic::COUNT],
}

impl ArticleSentiment {
    pub fn category(&self, topic: Topic) -> Category {
        self.categories[topic.index()]
    }
}

/// Decision thresholds for the aggregation rule.
///
/// `tau_assign` selects which sentences count for a topic (inclusive lower
/// bound on p_assign); `tau_sent` is the sentiment decision boundary;
/// `delta` widens the boundary into a symmetric neutral dead-band.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AggregateThresholds {
    tau_assign: f64,
    tau_sent: f64,
    delta: f64,
}

impl AggregateThresholds {
    /// Validates `0 < tau_assign ≤ 1`, `0 < tau_sent < 1`, `delta ≥ 0`.
    ///
    /// `tau_assign = 1` is admitted deliberately: it expresses "only
    /// certainly-assigned sentences count", a meaningful degenerate setting.
    pub fn new(tau_assign: f64, tau_sent: f64, delta: f64) -> Result<Self, AggregateError> {
        if !(tau_assign > 0.0 && tau_assign <= 1.0) {
            return Err(AggregateError::InvalidThreshold {
                field: "tau_assign",
                value: tau_assign,
            });
        }
        if !(tau_sent > 0.0 && tau_sent < 1.0) {
            return Err(AggregateError::InvalidThreshold {
                field: "tau_sent",
                value: tau_sent,
            });
        }
        if !(delta >= 0.0 && delta.is_finite()) {
            return Err(AggregateError::InvalidThreshold {
                field: "delta",
                value: delta,
            });
        }
        Ok(Self {
            tau_assign,
            tau_sent,
            delta,
        })
    }

    pub fn tau_assign(&self) -> f64 {
        self.tau_assign
    }

    pub fn tau_sent(&self) -> f64 {
        self.tau_sent
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }
}

impl Default for AggregateThresholds {
    fn default() -> Self {
        Self {
            tau_assign: 0.5,
            tau_sent: 0.5,
            delta: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AggregateError {
    #[error("threshold {field} out of range: {value}")]
    InvalidThreshold { field: &'static str, value: f64 },
    #[error("no sentence scores supplied for article")]
    EmptyScores,
    #[error("scores mix articles {first:?} and {second:?}")]
    MixedArticles { first: String, second: String },
    #[error("sentence {sentence_index} of article {article_id:?} lacks a {topic} score")]
    MissingTopic {
        article_id: String,
        sentence_index: usize,
        topic: Topic,
    },
    #[error("sentence {sentence_index} of article {article_id:?} has duplicate {topic} scores")]
    DuplicateScore {
        article_id: String,
        sentence_index: usize,
        topic: Topic,
    },
}

/// Collapses all sentence scores of one article into per-topic categories.
///
/// For each topic: sentences with `p_assign ≥ tau_assign` form the assigned
/// set. An empty set yields neutral. Otherwise the p_assign-weighted mean of
/// p_positive decides: positive at or above `tau_sent + delta`, negative at
/// or below `tau_sent − delta`, neutral in between. The positive branch is
/// checked first, so with `delta = 0` a mean exactly at the boundary counts
/// as positive.
pub fn aggregate_article(
    scores: &[SentenceScore],
    year: i32,
    thresholds: &AggregateThresholds,
) -> Result<ArticleSentiment, AggregateError> {
    let first = scores.first().ok_or(AggregateError::EmptyScores)?;
    let article_id = first.article_id.clone();
    if let Some(other) = scores.iter().find(|s| s.article_id != article_id) {
        return Err(AggregateError::MixedArticles {
            first: article_id,
            second: other.article_id.clone(),
        });
    }

    // Verify full topic coverage per sentence: exactly one score per
    // (sentence, topic) pair.
    let mut sentence_indices: Vec<usize> = scores.iter().map(|s| s.sentence_index).collect();
    sentence_indices.sort_unstable();
    sentence_indices.dedup();
    let mut seen = vec![[false; Topic::COUNT]; sentence_indices.len()];
    for s in scores {
        let slot = sentence_indices.binary_search(&s.sentence_index).unwrap();
        let entry = &mut seen[slot][s.topic.index()];
        if *entry {
            return Err(AggregateError::DuplicateScore {
                article_id,
                sentence_index: s.sentence_index,
                topic: s.topic,
            });
        }
        *entry = true;
    }
    for (slot, flags) in seen.iter().enumerate() {
        for topic in Topic::ALL {
            if !flags[topic.index()] {
                return Err(AggregateError::MissingTopic {
                    article_id,
                    sentence_index: sentence_indices[slot],
                    topic,
                });
            }
        }
    }

    let mut categories = [Category::Neutral; Topic::COUNT];
    for topic in Topic::ALL {
        let mut weight_sum = 0.0;
        let mut weighted_positive = 0.0;
        for s in scores.iter().filter(|s| s.topic == topic) {
            if s.p_assign >= thresholds.tau_assign {
                weight_sum += s.p_assign;
                weighted_positive += s.p_assign * s.p_positive;
            }
        }
        categories[topic.index()] = if weight_sum == 0.0 {
            Category::Neutral
        } else {
            let mean = weighted_positive / weight_sum;
            if mean >= thresholds.tau_sent + thresholds.delta {
                Category::Positive
            } else if mean <= thresholds.tau_sent - thresholds.delta {
                Category::Negative
            } else {
                Category::Neutral
            }
        };
    }

    Ok(ArticleSentiment {
        article_id,
        year,
        categories,
    })
}
