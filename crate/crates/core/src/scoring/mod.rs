//! Per-sentence, per-topic probability scoring.
//!
//! The two binary classifiers behind the pipeline (topic assignment and
//! positive-vs-negative sentiment) are not trained here; their output contract
//! is carried by the [`SentenceScorer`] trait. Two implementations ship:
//! [`ReplayScorer`] feeds externally produced scores through the pipeline, and
//! [`LexiconScorer`] is a deterministic baseline that keeps the full pipeline
//! testable without any model weights.

mod eval;
mod lexicon;
mod replay;

pub use eval::{article_accuracy, auc, Accuracy};
pub use lexicon::{LexiconEntry, LexiconScorer};
pub use replay::ReplayScorer;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::aggregate::Category;
use crate::corpus::Sentence;
use crate::topic::Topic;

/// Assignment and sentiment probabilities for one (sentence, topic) pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SentenceScore {
    pub article_id: String,
    pub sentence_index: usize,
    pub topic: Topic,
    /// Probability the sentence expresses sentiment in `topic`.
    pub p_assign: f64,
    /// Probability the sentiment is positive, given assignment.
    pub p_positive: f64,
}

/// A human-coded label for one (unit, topic) pair. Units are article ids at
/// the article level and `article_id#index` strings at the sentence level.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GoldLabel {
    pub unit_id: String,
    pub topic: Topic,
    pub label: Category,
}

#[derive(Debug, Error)]
pub enum ScoringError {
    #[error("replay file missing entry for ({article_id}, {sentence_index}, {topic})")]
    MissingReplayEntry {
        article_id: String,
        sentence_index: usize,
        topic: Topic,
    },
    #[error(
        "probability out of [0,1] for ({article_id}, {sentence_index}, {topic}): \
         p_assign={p_assign}, p_positive={p_positive}"
    )]
    InvalidProbability {
        article_id: String,
        sentence_index: usize,
        topic: Topic,
        p_assign: f64,
        p_positive: f64,
    },
    #[error("duplicate replay entry for ({article_id}, {sentence_index}, {topic})")]
    DuplicateReplayEntry {
        article_id: String,
        sentence_index: usize,
        topic: Topic,
    },
    #[error("duplicate lexicon term {term:?} for topic {topic}")]
    DuplicateLexiconTerm { topic: Topic, term: String },
    #[error("non-finite lexicon weight for term {term:?}")]
    InvalidLexiconWeight { term: String },
    #[error("degenerate label set: need at least one positive and one negative")]
    DegenerateLabels,
    #[error("non-finite score in input")]
    NonFiniteScore,
    #[error("duplicate gold label for unit {unit_id:?}, topic {topic}")]
    DuplicateGoldLabel { unit_id: String, topic: Topic },
    #[error("article ids differ between predictions and gold labels; only in predictions: {only_predicted:?}, only in gold: {only_gold:?}")]
    IdMismatch {
        only_predicted: Vec<String>,
        only_gold: Vec<String>,
    },
}

/// A pluggable per-sentence scorer producing one score per topic.
pub trait SentenceScorer {
    /// Checks the scorer can cover every (sentence, topic) pair before any
    /// scoring starts. Called once, sequentially, so the first missing entry
    /// reported is deterministic.
    fn validate(&self, _sentences: &[Sentence]) -> Result<(), ScoringError> {
        Ok(())
    }

    /// Scores one sentence on all eight topics, in canonical topic order.
    fn score_sentence(&self, sentence: &Sentence) -> Result<Vec<SentenceScore>, ScoringError>;
}

/// Scores every sentence on every topic.
///
/// Returns exactly `8 * sentences.len()` scores, ordered by input sentence
/// then canonical topic order. Scoring is a pure per-sentence transform and
/// runs in parallel; output order is independent of thread count.
pub fn score_sentences<S>(
    sentences: &[Sentence],
    scorer: &S,
) -> Result<Vec<SentenceScore>, ScoringError>
where
    S: SentenceScorer + Sync,
{
    scorer.validate(sentences)?;
    let per_sentence: Vec<Vec<SentenceScore>> = sentences
        .par_iter()
        .map(|s| scorer.score_sentence(s))
        .collect::<Result<_, _>>()?;
    Ok(per_sentence.into_iter().flatten().collect())
}
