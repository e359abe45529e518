//! Deterministic lexicon baseline scorer.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::corpus::Sentence;
use crate::topic::Topic;

use super::{ScoringError, SentenceScore, SentenceScorer};

/// One lexicon row: a term that signals sentiment in a topic, with a signed
/// polarity weight (positive weights pull toward positive sentiment).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LexiconEntry {
    pub topic: Topic,
    pub term: String,
    pub weight: f64,
}

/// Scores sentences by counting lexicon matches.
///
/// For each topic, `m` counts matched term occurrences in the sentence and
/// the score is `p_assign = m / (m + 1)`,
/// `p_positive = logistic(sum of matched weights)`. Matching is
/// case-insensitive on whole words (maximal alphanumeric runs), so the scorer
/// is a pure function of the sentence text.
#[derive(Debug)]
pub struct LexiconScorer {
    by_topic: [HashMap<String, f64>; 8],
}

impl LexiconScorer {
    pub fn new(entries: Vec<LexiconEntry>) -> Result<Self, ScoringError> {
        let mut by_topic: [HashMap<String, f64>; 8] = Default::default();
        for e in entries {
            if !e.weight.is_finite() {
                return Err(ScoringError::InvalidLexiconWeight { term: e.term });
            }
            let term = e.term.trim().to_lowercase();
            if by_topic[e.topic.index()].insert(term, e.weight).is_some() {
                return Err(ScoringError::DuplicateLexiconTerm {
                    topic: e.topic,
                    term: e.term,
                });
            }
        }
        Ok(Self { by_topic })
    }
}

impl SentenceScorer for LexiconScorer {
    fn score_sentence(&self, sentence: &Sentence) -> Result<Vec<SentenceScore>, ScoringError> {
        let words: Vec<String> = sentence
            .text
            .split(|c: char| !c.is_alphanumeric())
            .filter(|w| !w.is_empty())
            .map(|w| w.to_lowercase())
            .collect();
        Ok(Topic::ALL
            .into_iter()
            .map(|topic| {
                let lexicon = &self.by_topic[topic.index()];
                let mut matches = 0usize;
                let mut weight_sum = 0.0;
                for word in &words {
                    if let Some(w) = lexicon.get(word) {
                        matches += 1;
                        weight_sum += w;
                    }
                }
                SentenceScore {
                    article_id: sentence.article_id.clone(),
                    sentence_index: sentence.index,
                    topic,
                    p_assign: matches as f64 / (matches as f64 + 1.0),
                    p_positive: logistic(weight_sum),
                }
            })
            .collect())
    }
}

fn logistic(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}
