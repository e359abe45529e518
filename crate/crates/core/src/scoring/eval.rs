//! Scorer evaluation against gold labels.

use std::collections::BTreeMap;

use crate::aggregate::ArticleSentiment;
use crate::topic::Topic;

use super::{GoldLabel, ScoringError};

/// A fraction with its binomial standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Accuracy {
    pub fraction: f64,
    pub standard_error: f64,
    pub n: usize,
}

/// Area under the ROC curve by the pairwise (Mann-Whitney) definition.
///
/// Equals the probability that a uniformly random positive outscores a
/// uniformly random negative, with ties counting one half. Computed via
/// average ranks, which is algebraically identical to the exhaustive pairwise
/// count.
pub fn auc(scores: &[(f64, bool)]) -> Result<f64, ScoringError> {
    if scores.iter().any(|(s, _)| !s.is_finite()) {
        return Err(ScoringError::NonFiniteScore);
    }
    let n_pos = scores.iter().filter(|(_, label)| *label).count();
    let n_neg = scores.len() - n_pos;
    if n_pos == 0 || n_neg == 0 {
        return Err(ScoringError::DegenerateLabels);
    }

    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[a].0.partial_cmp(&scores[b].0).unwrap());

    // Average ranks over tied runs; accumulate the rank sum of positives.
    let mut rank_sum_pos = 0.0;
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j < order.len() && scores[order[j]].0 == scores[order[i]].0 {
            j += 1;
        }
        // 1-based ranks i+1 ..= j share the average rank (i + j + 1) / 2.
        let avg_rank = (i + j + 1) as f64 / 2.0;
        for &k in &order[i..j] {
            if scores[k].1 {
                rank_sum_pos += avg_rank;
            }
        }
        i = j;
    }

    let u = rank_sum_pos - (n_pos * (n_pos + 1)) as f64 / 2.0;
    Ok(u / (n_pos as f64 * n_neg as f64))
}

/// Fraction of articles whose predicted category matches gold for `topic`,
/// with binomial standard error `sqrt(p(1-p)/n)`.
///
/// The predicted and gold article-id sets must coincide; a mismatch is fatal
/// and lists the symmetric difference.
pub fn article_accuracy(
    predicted: &[ArticleSentiment],
    gold: &[GoldLabel],
    topic: Topic,
) -> Result<Accuracy, ScoringError> {
    let mut gold_by_id = BTreeMap::new();
    for g in gold.iter().filter(|g| g.topic == topic) {
        if gold_by_id.insert(g.unit_id.as_str(), g.label).is_some() {
            return Err(ScoringError::DuplicateGoldLabel {
                unit_id: g.unit_id.clone(),
                topic,
            });
        }
    }
    let predicted_by_id: BTreeMap<&str, _> = predicted
        .iter()
        .map(|p| (p.article_id.as_str(), p.category(topic)))
        .collect();

    let only_predicted: Vec<String> = predicted_by_id
        .keys()
        .filter(|id| !gold_by_id.contains_key(*id))
        .map(|id| id.to_string())
        .collect();
    let only_gold: Vec<String> = gold_by_id
        .keys()
        .filter(|id| !predicted_by_id.contains_key(*id))
        .map(|id| id.to_string())
        .collect();
    if !only_predicted.is_empty() || !only_gold.is_empty() {
        return Err(ScoringError::IdMismatch {
            only_predicted,
            only_gold,
        });
    }

    let n = gold_by_id.len();
    let correct = gold_by_id
        .iter()
        .filter(|(id, label)| predicted_by_id[*id] == **label)
        .count();
    let p = correct as f64 / n as f64;
    Ok(Accuracy {
        fraction: p,
        standard_error: (p * (1.0 - p) / n as f64).sqrt(),
        n,
    })
}
