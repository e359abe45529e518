//! Greedy forward topic selection for the sparse lag model.
//!
//! Builds nested models of 1..=max_topics terms. Each step tries every
//! (topic, lag, sign) candidate whose topic is still unused, jointly refits
//! it with the incumbent predictors under the non-negativity constraint, and
//! keeps the candidate with the highest r². Incumbents keep their (lag,
//! sign); only coefficients are refit.

use rayon::prelude::*;

use crate::series::{Sign, TopicYearSeries};
use crate::topic::Topic;

use super::{
    nnls_fit, CandidatePredictor, DesignMatrix, FractionTable, ModelTerm, NnlsFit,
    RegressionError, SparseLagModel,
};

/// Candidate ordering used both for the search grid and for documentation:
/// topic-major, then lag ascending, then positive before negative.
fn candidate_grid(max_lag: u32) -> Vec<CandidatePredictor> {
    let mut grid = Vec::with_capacity(Topic::COUNT * (max_lag as usize + 1) * 2);
    for topic in Topic::ALL {
        for lag in 0..=max_lag {
            for sign in Sign::ALL {
                grid.push(CandidatePredictor { topic, lag, sign });
            }
        }
    }
    grid
}

/// Within-step tie-break: smaller lag, then canonical topic order, then
/// positive before negative.
fn tie_key(p: &CandidatePredictor) -> (u32, usize, usize) {
    let sign_rank = match p.sign {
        Sign::Positive => 0,
        Sign::Negative => 1,
    };
    (p.lag, p.topic.index(), sign_rank)
}

/// Runs greedy forward selection and returns the nested models for
/// 1..=max_topics terms, in that order.
///
/// The fitted rows are the years with an opinion value and a complete set
/// of lagged fractions for the whole candidate grid, fixed once so every
/// model's r² is computed on the same data. The model list is nested by
/// construction, and r² is non-decreasing because each step's feasible set
/// contains the previous step's solution.
pub fn greedy_select(
    opinion: &[(i32, f64)],
    series: &[TopicYearSeries],
    max_lag: u32,
    max_topics: usize,
) -> Result<Vec<SparseLagModel>, RegressionError> {
    if max_topics == 0 || max_topics > Topic::COUNT {
        return Err(RegressionError::InvalidMaxTopics);
    }
    if opinion.iter().any(|(_, v)| !v.is_finite()) {
        return Err(RegressionError::NonFiniteInput);
    }
    let mut sorted_years: Vec<i32> = opinion.iter().map(|(t, _)| *t).collect();
    sorted_years.sort_unstable();
    if let Some(dup) = sorted_years.windows(2).find(|w| w[0] == w[1]) {
        return Err(RegressionError::DuplicateOpinionYear(dup[0]));
    }

    let table = FractionTable::new(series)?;
    let grid = candidate_grid(max_lag);

    // Complete-case rows over the full grid, in year order.
    let mut rows: Vec<(i32, f64)> = opinion
        .iter()
        .filter(|(t, _)| {
            grid.iter()
                .all(|c| table.signed(c.topic, t - c.lag as i32, c.sign).is_some())
        })
        .copied()
        .collect();
    rows.sort_by_key(|(t, _)| *t);
    if rows.is_empty() {
        return Err(RegressionError::NoOverlap);
    }
    let years: Vec<i32> = rows.iter().map(|(t, _)| *t).collect();
    let y: Vec<f64> = rows.iter().map(|(_, v)| *v).collect();

    let y_mean = y.iter().sum::<f64>() / y.len() as f64;
    if y.iter().all(|v| *v == y_mean) {
        return Err(RegressionError::ConstantResponse);
    }

    let full_design = DesignMatrix::build(&table, &years, &grid)?;

    let mut models = Vec::with_capacity(max_topics);
    let mut selected: Vec<usize> = Vec::new();
    let mut topic_used = [false; Topic::COUNT];

    for _ in 0..max_topics {
        let candidates: Vec<usize> = (0..grid.len())
            .filter(|&i| !topic_used[grid[i].topic.index()])
            .collect();

        // Candidate fits are independent; the indexed collect keeps results
        // in candidate order so the argmax below is deterministic.
        let fits: Vec<(usize, Result<NnlsFit, RegressionError>)> = candidates
            .par_iter()
            .map(|&candidate| {
                let mut indices = selected.clone();
                indices.push(candidate);
                let design = full_design.select(&indices);
                (candidate, nnls_fit(&y, &design))
            })
            .collect();

        let mut best: Option<(usize, NnlsFit)> = None;
        for (candidate, fit) in fits {
            let fit = fit?;
            let replace = match &best {
                None => true,
                Some((incumbent, best_fit)) => {
                    fit.r_squared > best_fit.r_squared
                        || (fit.r_squared == best_fit.r_squared
                            && tie_key(&grid[candidate]) < tie_key(&grid[*incumbent]))
                }
            };
            if replace {
                best = Some((candidate, fit));
            }
        }
        let (chosen, fit) = best.expect("candidate set is non-empty for max_topics ≤ topic count");

        selected.push(chosen);
        topic_used[grid[chosen].topic.index()] = true;
        models.push(SparseLagModel {
            intercept: fit.intercept,
            terms: selected
                .iter()
                .zip(&fit.coefficients)
                .map(|(&i, &coefficient)| ModelTerm {
                    predictor: grid[i],
                    coefficient,
                })
                .collect(),
            r_squared: fit.r_squared,
            fitted_years: years.clone(),
        });
    }

    Ok(models)
}
