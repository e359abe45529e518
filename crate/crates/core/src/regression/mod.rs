//! Regression of the opinion series on lagged signed media fractions.
//!
//! The model is μ_t ≈ intercept + Σ β·F(topic, t − lag, sign) with all β ≥ 0
//! (negative-sign fractions are reverse-coded, see
//! [`signed_fraction`](crate::series::signed_fraction)) and at most one term
//! per topic. Terms enter by greedy forward selection.

mod greedy;
pub mod nnls;

pub use greedy::greedy_select;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::series::{Sign, TopicYearSeries};
use crate::topic::Topic;

use nnls::{nnls_solve, sum_squared_residuals};

/// One potential regressor: a topic's positive or negative fraction at a
/// fixed lag (in years) behind the response.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct CandidatePredictor {
    pub topic: Topic,
    pub lag: u32,
    pub sign: Sign,
}

impl std::fmt::Display for CandidatePredictor {
    /// Renders like `culture[t-1,positive]`; lag 0 renders as `t`.
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.lag == 0 {
            write!(f, "{}[t,{}]", self.topic, self.sign)
        } else {
            write!(f, "{}[t-{},{}]", self.topic, self.lag, self.sign)
        }
    }
}

/// A selected predictor with its fitted non-negative coefficient.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelTerm {
    pub predictor: CandidatePredictor,
    pub coefficient: f64,
}

/// A fitted sparse lag model: intercept, selected terms (≤ 1 per topic,
/// all coefficients ≥ 0), explained variance, and the years the fit used.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SparseLagModel {
    pub intercept: f64,
    pub terms: Vec<ModelTerm>,
    pub r_squared: f64,
    pub fitted_years: Vec<i32>,
}

/// Signed-fraction lookup by (topic, year, sign), built from series cells.
#[derive(Debug, Clone, PartialEq)]
pub struct FractionTable {
    cells: BTreeMap<(Topic, i32), (f64, f64)>,
}

impl FractionTable {
    pub fn new(series: &[TopicYearSeries]) -> Result<Self, RegressionError> {
        let mut cells = BTreeMap::new();
        for cell in series {
            if !(cell.f_positive.is_finite() && cell.f_negative.is_finite()) {
                return Err(RegressionError::NonFiniteInput);
            }
            if cells
                .insert((cell.topic, cell.year), (cell.f_positive, cell.f_negative))
                .is_some()
            {
                return Err(RegressionError::DuplicateSeriesCell {
                    topic: cell.topic,
                    year: cell.year,
                });
            }
        }
        Ok(Self { cells })
    }

    /// Signed fraction for (topic, year): +f_positive or −f_negative.
    pub fn signed(&self, topic: Topic, year: i32, sign: Sign) -> Option<f64> {
        self.cells.get(&(topic, year)).map(|&(pos, neg)| match sign {
            Sign::Positive => pos,
            Sign::Negative => -neg,
        })
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }
}

/// A fully populated design: one row per fitted year, one column per
/// predictor, entries being signed fractions at the row's lagged year.
#[derive(Debug, Clone, PartialEq)]
pub struct DesignMatrix {
    pub years: Vec<i32>,
    pub predictors: Vec<CandidatePredictor>,
    /// Column-major values; `columns[j][i]` pairs with `years[i]`.
    pub columns: Vec<Vec<f64>>,
}

impl DesignMatrix {
    /// Builds the matrix, failing on the first (topic, lagged year) without
    /// a fraction.
    pub fn build(
        table: &FractionTable,
        years: &[i32],
        predictors: &[CandidatePredictor],
    ) -> Result<Self, RegressionError> {
        let columns = predictors
            .iter()
            .map(|p| {
                years
                    .iter()
                    .map(|&t| {
                        let source_year = t - p.lag as i32;
                        table.signed(p.topic, source_year, p.sign).ok_or(
                            RegressionError::MissingFraction {
                                topic: p.topic,
                                year: source_year,
                            },
                        )
                    })
                    .collect::<Result<Vec<f64>, _>>()
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self {
            years: years.to_vec(),
            predictors: predictors.to_vec(),
            columns,
        })
    }

    /// A sub-design keeping the given columns (indices into `predictors`).
    pub fn select(&self, indices: &[usize]) -> DesignMatrix {
        DesignMatrix {
            years: self.years.clone(),
            predictors: indices.iter().map(|&i| self.predictors[i]).collect(),
            columns: indices.iter().map(|&i| self.columns[i].clone()).collect(),
        }
    }
}

/// Result of one constrained fit on a fixed predictor set.
#[derive(Debug, Clone, PartialEq)]
pub struct NnlsFit {
    pub intercept: f64,
    /// One coefficient per design column, all ≥ 0.
    pub coefficients: Vec<f64>,
    pub r_squared: f64,
    /// Design columns dropped as collinear (coefficient forced to 0).
    pub dropped: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RegressionError {
    #[error("underdetermined: {rows} rows cannot support {columns} columns plus an intercept")]
    Underdetermined { rows: usize, columns: usize },
    #[error("no fraction for topic {topic} in year {year}")]
    MissingFraction { topic: Topic, year: i32 },
    #[error("duplicate series cell for topic {topic} in year {year}")]
    DuplicateSeriesCell { topic: Topic, year: i32 },
    #[error("duplicate opinion value for year {0}")]
    DuplicateOpinionYear(i32),
    #[error("response/design row mismatch: {response} values vs {rows} rows")]
    RowMismatch { response: usize, rows: usize },
    #[error("no years with both an opinion value and all lagged fractions")]
    NoOverlap,
    #[error("opinion series is constant over the fitted years; nothing to explain")]
    ConstantResponse,
    #[error("max_topics must be between 1 and {}", Topic::COUNT)]
    InvalidMaxTopics,
    #[error("non-finite value in regression input")]
    NonFiniteInput,
}

/// Least squares of `y` on the design columns with coefficients constrained
/// non-negative and a free intercept (handled by centering, which is exact:
/// for any fixed β the optimal intercept is ȳ − Σβx̄).
///
/// Requires one more row than columns. r² is 1 − SSR/SST, clamped to [0, 1];
/// a constant response yields 1 when fit exactly, else 0.
pub fn nnls_fit(y: &[f64], design: &DesignMatrix) -> Result<NnlsFit, RegressionError> {
    let rows = design.years.len();
    let k = design.predictors.len();
    if y.len() != rows {
        return Err(RegressionError::RowMismatch {
            response: y.len(),
            rows,
        });
    }
    if rows < k + 1 {
        return Err(RegressionError::Underdetermined { rows, columns: k });
    }
    if y.iter().any(|v| !v.is_finite()) {
        return Err(RegressionError::NonFiniteInput);
    }

    let y_mean = y.iter().sum::<f64>() / rows as f64;
    let centered_y: Vec<f64> = y.iter().map(|v| v - y_mean).collect();
    let column_means: Vec<f64> = design
        .columns
        .iter()
        .map(|c| c.iter().sum::<f64>() / rows as f64)
        .collect();
    let centered_columns: Vec<Vec<f64>> = design
        .columns
        .iter()
        .zip(&column_means)
        .map(|(c, &mean)| c.iter().map(|v| v - mean).collect())
        .collect();
    let refs: Vec<&[f64]> = centered_columns.iter().map(|c| c.as_slice()).collect();

    let solution = nnls_solve(&refs, &centered_y);
    let intercept = y_mean
        - solution
            .x
            .iter()
            .zip(&column_means)
            .map(|(b, m)| b * m)
            .sum::<f64>();

    let ssr = sum_squared_residuals(&refs, &centered_y, &solution.x);
    let sst: f64 = centered_y.iter().map(|v| v * v).sum();
    let r_squared = if sst > 0.0 {
        (1.0 - ssr / sst).clamp(0.0, 1.0)
    } else if ssr <= 1e-12 {
        1.0
    } else {
        0.0
    };

    Ok(NnlsFit {
        intercept,
        coefficients: solution.x,
        r_squared,
        dropped: solution.dropped,
    })
}

/// Evaluates a fitted model at one year: intercept + Σ β · signed fraction
/// at the term's lagged year. Fails if any needed fraction is missing.
pub fn evaluate_model(
    model: &SparseLagModel,
    table: &FractionTable,
    year: i32,
) -> Result<f64, RegressionError> {
    let mut value = model.intercept;
    for term in &model.terms {
        let source_year = year - term.predictor.lag as i32;
        let fraction = table
            .signed(term.predictor.topic, source_year, term.predictor.sign)
            .ok_or(RegressionError::MissingFraction {
                topic: term.predictor.topic,
                year: source_year,
            })?;
        value += term.coefficient * fraction;
    }
    Ok(value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn series_cell(topic: Topic, year: i32, f_positive: f64, f_negative: f64) -> TopicYearSeries {
        TopicYearSeries {
            topic,
            year,
            n_total: 1000,
            n_positive: (f_positive * 1000.0) as usize,
            n_negative: (f_negative * 1000.0) as usize,
            f_positive,
            f_negative,
            se_positive: 0.0,
            se_negative: 0.0,
        }
    }

    fn predictor(topic: Topic, lag: u32, sign: Sign) -> CandidatePredictor {
        CandidatePredictor { topic, lag, sign }
    }

    #[test]
    fn reference_two_term_prediction_matches_hand_arithmetic() {
        let table = FractionTable::new(&[
            series_cell(Topic::Culture, 1993, 0.539, 0.1),
            series_cell(Topic::Democracy, 1993, 0.1, 0.442),
        ])
        .unwrap();
        let model = SparseLagModel {
            intercept: -0.791,
            terms: vec![
                ModelTerm {
                    predictor: predictor(Topic::Culture, 1, Sign::Positive),
                    coefficient: 3.112,
                },
                ModelTerm {
                    predictor: predictor(Topic::Democracy, 1, Sign::Negative),
                    coefficient: 1.452,
                },
            ],
            r_squared: 0.539,
            fitted_years: vec![],
        };
        let predicted = evaluate_model(&model, &table, 1994).unwrap();
        // −0.791 + 3.112·0.539 + 1.452·(−0.442) = 0.244584
        assert_relative_eq!(predicted, 0.244584, epsilon = 1e-12);
    }

    #[test]
    fn all_zero_fractions_predict_the_intercept() {
        let table = FractionTable::new(&[series_cell(Topic::Culture, 1990, 0.0, 0.0)]).unwrap();
        let model = SparseLagModel {
            intercept: 0.35,
            terms: vec![ModelTerm {
                predictor: predictor(Topic::Culture, 0, Sign::Positive),
                coefficient: 2.0,
            }],
            r_squared: 0.0,
            fitted_years: vec![],
        };
        assert_eq!(evaluate_model(&model, &table, 1990).unwrap(), 0.35);
    }

    #[test]
    fn missing_lagged_year_is_named_in_the_error() {
        let table = FractionTable::new(&[series_cell(Topic::Culture, 1993, 0.5, 0.1)]).unwrap();
        let model = SparseLagModel {
            intercept: 0.0,
            terms: vec![ModelTerm {
                predictor: predictor(Topic::Culture, 2, Sign::Positive),
                coefficient: 1.0,
            }],
            r_squared: 0.0,
            fitted_years: vec![],
        };
        match evaluate_model(&model, &table, 1994).unwrap_err() {
            RegressionError::MissingFraction { topic, year } => {
                assert_eq!(topic, Topic::Culture);
                assert_eq!(year, 1992);
            }
            other => panic!("unexpected error: {other}"),
        }
    }

    #[test]
    fn duplicate_series_cells_are_rejected() {
        let cells = [
            series_cell(Topic::Culture, 1990, 0.5, 0.1),
            series_cell(Topic::Culture, 1990, 0.4, 0.2),
        ];
        assert!(matches!(
            FractionTable::new(&cells),
            Err(RegressionError::DuplicateSeriesCell {
                topic: Topic::Culture,
                year: 1990
            })
        ));
    }

    #[test]
    fn design_matrix_lags_and_reverse_codes() {
        let mut cells = Vec::new();
        for year in 1988..=1990 {
            let f = (year - 1988) as f64 / 10.0;
            cells.push(series_cell(Topic::Culture, year, 0.5 + f, 0.1));
            cells.push(series_cell(Topic::Democracy, year, 0.2, 0.3 + f));
        }
        let table = FractionTable::new(&cells).unwrap();
        let predictors = [
            predictor(Topic::Culture, 1, Sign::Positive),
            predictor(Topic::Democracy, 0, Sign::Negative),
        ];
        let design = DesignMatrix::build(&table, &[1989, 1990], &predictors).unwrap();
        assert_eq!(design.columns[0], vec![0.5, 0.6]);
        assert_eq!(design.columns[1], vec![-0.4, -0.5]);
        assert!(design.columns[1].iter().all(|&v| v <= 0.0));

        assert!(matches!(
            DesignMatrix::build(&table, &[1988], &predictors),
            Err(RegressionError::MissingFraction { year: 1987, .. })
        ));
    }

    #[test]
    fn anti_correlated_column_fits_the_mean() {
        let table = FractionTable::new(
            &(1990..=1992)
                .map(|year| series_cell(Topic::Culture, year, (1993 - year) as f64 / 10.0, 0.0))
                .collect::<Vec<_>>(),
        )
        .unwrap();
        let design = DesignMatrix::build(
            &table,
            &[1990, 1991, 1992],
            &[predictor(Topic::Culture, 0, Sign::Positive)],
        )
        .unwrap();
        let y = [1.0, 2.0, 3.0];
        let fit = nnls_fit(&y, &design).unwrap();
        assert_eq!(fit.coefficients, vec![0.0]);
        assert_relative_eq!(fit.intercept, 2.0, epsilon = 1e-12);
        assert_eq!(fit.r_squared, 0.0);
    }

    #[test]
    fn exact_linear_data_reaches_unit_r_squared() {
        let cells: Vec<TopicYearSeries> = (1980..=1989)
            .map(|year| {
                series_cell(Topic::Culture, year, 0.3 + 0.05 * ((year - 1980) % 4) as f64, 0.0)
            })
            .collect();
        let table = FractionTable::new(&cells).unwrap();
        let years: Vec<i32> = (1981..=1989).collect();
        let design = DesignMatrix::build(
            &table,
            &years,
            &[predictor(Topic::Culture, 1, Sign::Positive)],
        )
        .unwrap();
        let y: Vec<f64> = design.columns[0].iter().map(|f| 0.2 + 1.5 * f).collect();
        let fit = nnls_fit(&y, &design).unwrap();
        assert_relative_eq!(fit.coefficients[0], 1.5, epsilon = 1e-9);
        assert_relative_eq!(fit.intercept, 0.2, epsilon = 1e-9);
        assert_relative_eq!(fit.r_squared, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn too_few_rows_is_underdetermined() {
        let table = FractionTable::new(&[series_cell(Topic::Culture, 1990, 0.5, 0.1)]).unwrap();
        let design = DesignMatrix::build(
            &table,
            &[1990],
            &[predictor(Topic::Culture, 0, Sign::Positive)],
        )
        .unwrap();
        assert!(matches!(
            nnls_fit(&[0.5], &design),
            Err(RegressionError::Underdetermined { rows: 1, columns: 1 })
        ));
    }

    #[test]
    fn predictor_labels_render_with_lag_and_sign() {
        assert_eq!(
            predictor(Topic::Culture, 1, Sign::Positive).to_string(),
            "culture[t-1,positive]"
        );
        assert_eq!(
            predictor(Topic::GovernmentAdministration, 4, Sign::Negative).to_string(),
            "government_administration[t-4,negative]"
        );
        assert_eq!(
            predictor(Topic::Ideology, 0, Sign::Positive).to_string(),
            "ideology[t,positive]"
        );
    }
}
