//! On-disk representation of the fitted model (`model.json`).
//!
//! Terms are flattened to (topic, lag, sign, coefficient) for easy external
//! consumption, and the file carries the hash of the analysis configuration
//! that produced it.

use mediatrend::regression::ModelTerm;
use mediatrend::{CandidatePredictor, Sign, SparseLagModel, Topic};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelTermFile {
    pub topic: Topic,
    pub lag: u32,
    pub sign: Sign,
    pub coefficient: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelFile {
    pub intercept: f64,
    pub terms: Vec<ModelTermFile>,
    pub r_squared: f64,
    pub fitted_years: Vec<i32>,
    pub config_hash: String,
}

impl ModelFile {
    pub fn from_model(model: &SparseLagModel, config_hash: String) -> Self {
        Self {
            intercept: model.intercept,
            terms: model
                .terms
                .iter()
                .map(|term| ModelTermFile {
                    topic: term.predictor.topic,
                    lag: term.predictor.lag,
                    sign: term.predictor.sign,
                    coefficient: term.coefficient,
                })
                .collect(),
            r_squared: model.r_squared,
            fitted_years: model.fitted_years.clone(),
            config_hash,
        }
    }

    pub fn to_model(&self) -> SparseLagModel {
        SparseLagModel {
            intercept: self.intercept,
            terms: self
                .terms
                .iter()
                .map(|term| ModelTerm {
                    predictor: CandidatePredictor {
                        topic: term.topic,
                        lag: term.lag,
                        sign: term.sign,
                    },
                    coefficient: term.coefficient,
                })
                .collect(),
            r_squared: self.r_squared,
            fitted_years: self.fitted_years.clone(),
        }
    }
}
