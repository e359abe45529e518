//! Batch pipeline turning a dated news corpus into per-topic yearly sentiment
//! series, harmonizing heterogeneous opinion-survey waves into one
//! baseline-anchored time series, and fitting a non-negative, per-topic-sparse
//! lagged regression that links media sentiment to public opinion.
//!
//! The stages compose as:
//!
//! ```text
//! corpus --> segment --> score --> aggregate --> yearly series --+
//!                                                                +--> fit / predict
//! survey waves --> harmonize (baseline-anchored opinion) --------+
//! ```
//!
//! Each stage is a pure transform over plain data types and is exercised by
//! the `mediatrend` CLI, which persists every intermediate artifact.

pub mod aggregate;
pub mod corpus;
pub mod harmonize;
pub mod io;
pub mod regression;
pub mod scoring;
pub mod series;
pub mod topic;

mod seed;

pub use aggregate::{aggregate_article, AggregateThresholds, ArticleSentiment, Category};
pub use corpus::{ingest_corpus, segment, Article, IngestOutcome, Sentence};
pub use harmonize::{harmonize, wave_mean, HarmonizeOptions, OpinionSeries, SurveyWave};
pub use regression::{
    evaluate_model, greedy_select, nnls_fit, CandidatePredictor, DesignMatrix, FractionTable,
    SparseLagModel,
};
pub use scoring::{score_sentences, GoldLabel, SentenceScore, SentenceScorer};
pub use series::{build_series, signed_fraction, FractionDenominator, Sign, TopicYearSeries};
pub use topic::Topic;
