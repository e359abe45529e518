//! Scorer that replays externally produced probabilities.

use std::collections::HashMap;

use crate::corpus::Sentence;
use crate::topic::Topic;

use super::{ScoringError, SentenceScore, SentenceScorer};

/// Replays scores from a pre-computed table keyed by
/// `(article_id, sentence_index, topic)`.
///
/// Output values are exactly the input values; the scorer adds nothing.
#[derive(Debug)]
pub struct ReplayScorer {
    table: HashMap<(String, usize, Topic), (f64, f64)>,
}

impl ReplayScorer {
    /// Builds a scorer from score records, validating every probability lies
    /// in [0, 1] and that no key repeats.
    pub fn new(records: Vec<SentenceScore>) -> Result<Self, ScoringError> {
        let mut table = HashMap::with_capacity(records.len());
        for r in records {
            if !(0.0..=1.0).contains(&r.p_assign) || !(0.0..=1.0).contains(&r.p_positive) {
                return Err(ScoringError::InvalidProbability {
                    article_id: r.article_id,
                    sentence_index: r.sentence_index,
                    topic: r.topic,
                    p_assign: r.p_assign,
                    p_positive: r.p_positive,
                });
            }
            let key = (r.article_id.clone(), r.sentence_index, r.topic);
            if table
                .insert(key, (r.p_assign, r.p_positive))
                .is_some()
            {
                return Err(ScoringError::DuplicateReplayEntry {
                    article_id: r.article_id,
                    sentence_index: r.sentence_index,
                    topic: r.topic,
                });
            }
        }
        Ok(Self { table })
    }

    fn lookup(&self, sentence: &Sentence, topic: Topic) -> Option<(f64, f64)> {
        self.table
            .get(&(sentence.article_id.clone(), sentence.index, topic))
            .copied()
    }
}

impl SentenceScorer for ReplayScorer {
    fn validate(&self, sentences: &[Sentence]) -> Result<(), ScoringError> {
        for sentence in sentences {
            for topic in Topic::ALL {
                if self.lookup(sentence, topic).is_none() {
                    return Err(ScoringError::MissingReplayEntry {
                        article_id: sentence.article_id.clone(),
                        sentence_index: sentence.index,
                        topic,
                    });
                }
            }
        }
        Ok(())
    }

    fn score_sentence(&self, sentence: &Sentence) -> Result<Vec<SentenceScore>, ScoringError> {
        Topic::ALL
            .into_iter()
            .map(|topic| {
                let (p_assign, p_positive) = self.lookup(sentence, topic).ok_or_else(|| {
                    ScoringError::MissingReplayEntry {
                        article_id: sentence.article_id.clone(),
                        sentence_index: sentence.index,
                        topic,
                    }
                })?;
                Ok(SentenceScore {
                    article_id: sentence.article_id.clone(),
                    sentence_index: sentence.index,
                    topic,
                    p_assign,
                    p_positive,
                })
            })
            .collect()
    }
}
