//! Run configuration: defaults ← config file ← command-line flags.
//!
//! Every field can be set in a flat TOML file (`--config file.toml`) or by a
//! flag of the same name; flags win. Environment variables are never read.

use std::path::PathBuf;

use clap::ValueEnum;
use mediatrend::aggregate::AggregateError;
use mediatrend::{AggregateThresholds, FractionDenominator};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

/// Which sentence scorer the `score` subcommand uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScorerKind {
    /// Term-counting baseline driven by a weighted lexicon CSV.
    Lexicon,
    /// Replays precomputed per-(sentence, topic) probabilities from a file.
    Replay,
}

/// Denominator for the yearly fraction series.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DenominatorKind {
    /// All articles published that year (fractions comparable across topics).
    AllArticles,
    /// Only articles with non-neutral sentiment in the topic that year.
    TopicAssigned,
}

impl DenominatorKind {
    pub fn to_core(self) -> FractionDenominator {
        match self {
            DenominatorKind::AllArticles => FractionDenominator::AllArticles,
            DenominatorKind::TopicAssigned => FractionDenominator::TopicAssigned,
        }
    }
}

/// The fully resolved configuration a subcommand runs under.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub corpus: Option<PathBuf>,
    pub lexicon: Option<PathBuf>,
    pub replay_scores: Option<PathBuf>,
    pub waves: Option<PathBuf>,
    pub out_dir: PathBuf,
    pub keywords: Vec<String>,
    pub scorer: ScorerKind,
    pub tau_assign: f64,
    pub tau_sent: f64,
    pub delta: f64,
    pub denominator: DenominatorKind,
    pub year_start: Option<i32>,
    pub year_end: Option<i32>,
    pub max_lag: u32,
    pub max_topics: usize,
    pub baseline_year: i32,
    pub bootstrap_replicates: usize,
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            corpus: None,
            lexicon: None,
            replay_scores: None,
            waves: None,
            out_dir: PathBuf::from("out"),
            keywords: ["China", "Chinese", "Beijing", "Peking", "Shanghai"]
                .map(String::from)
                .to_vec(),
            scorer: ScorerKind::Lexicon,
            tau_assign: 0.5,
            tau_sent: 0.5,
            delta: 0.0,
            denominator: DenominatorKind::AllArticles,
            year_start: None,
            year_end: None,
            max_lag: 5,
            max_topics: 8,
            baseline_year: 1974,
            bootstrap_replicates: 1000,
            seed: 42,
        }
    }
}

impl RunConfig {
    /// The validated aggregation thresholds (validation already ran in
    /// [`resolve`], so this cannot fail afterwards).
    pub fn thresholds(&self) -> AggregateThresholds {
        AggregateThresholds::new(self.tau_assign, self.tau_sent, self.delta)
            .expect("thresholds were validated at config resolution")
    }

    /// The analysis-parameter subset recorded in manifests. Paths are
    /// deliberately excluded so artifacts are byte-identical across
    /// machines and output directories.
    pub fn analysis(&self) -> AnalysisConfig {
        AnalysisConfig {
            keywords: self.keywords.clone(),
            scorer: self.scorer,
            tau_assign: self.tau_assign,
            tau_sent: self.tau_sent,
            delta: self.delta,
            denominator: self.denominator,
            year_start: self.year_start,
            year_end: self.year_end,
            max_lag: self.max_lag,
            max_topics: self.max_topics,
            baseline_year: self.baseline_year,
            bootstrap_replicates: self.bootstrap_replicates,
            seed: self.seed,
        }
    }
}

/// The path-free parameter subset embedded in every manifest.
#[derive(Debug, Clone, Serialize)]
pub struct AnalysisConfig {
    pub keywords: Vec<String>,
    pub scorer: ScorerKind,
    pub tau_assign: f64,
    pub tau_sent: f64,
    pub delta: f64,
    pub denominator: DenominatorKind,
    pub year_start: Option<i32>,
    pub year_end: Option<i32>,
    pub max_lag: u32,
    pub max_topics: usize,
    pub baseline_year: i32,
    pub bootstrap_replicates: usize,
    pub seed: u64,
}

/// Command-line overrides; every flag is optional and global.
#[derive(Debug, Clone, clap::Args)]
pub struct Overrides {
    /// Flat TOML config file; flags override its values.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    /// Corpus JSONL file (one {id, date, title, body} record per line).
    #[arg(long, global = true, value_name = "FILE")]
    pub corpus: Option<PathBuf>,

    /// Lexicon CSV file (topic, term, weight) for the lexicon scorer.
    #[arg(long, global = true, value_name = "FILE")]
    pub lexicon: Option<PathBuf>,

    /// Precomputed sentence-score JSONL file for the replay scorer.
    #[arg(long, global = true, value_name = "FILE")]
    pub replay_scores: Option<PathBuf>,

    /// Survey wave CSV file (series_id, year, scale_levels, counts).
    #[arg(long, global = true, value_name = "FILE")]
    pub waves: Option<PathBuf>,

    /// Directory all artifacts are written to (created if absent).
    #[arg(long, global = true, value_name = "DIR")]
    pub out_dir: Option<PathBuf>,

    /// Comma-separated keyword filter for corpus ingestion.
    #[arg(long, global = true, value_delimiter = ',', value_name = "WORDS")]
    pub keywords: Option<Vec<String>>,

    /// Sentence scorer implementation.
    #[arg(long, global = true, value_enum)]
    pub scorer: Option<ScorerKind>,

    /// Topic-assignment probability threshold, in (0, 1].
    #[arg(long, global = true, value_name = "P")]
    pub tau_assign: Option<f64>,

    /// Positive-vs-negative decision threshold, in (0, 1).
    #[arg(long, global = true, value_name = "P")]
    pub tau_sent: Option<f64>,

    /// Neutral dead-band half-width around tau_sent, ≥ 0.
    #[arg(long, global = true, value_name = "W")]
    pub delta: Option<f64>,

    /// Denominator for yearly fractions.
    #[arg(long, global = true, value_enum)]
    pub denominator: Option<DenominatorKind>,

    /// First year of the series window (default: earliest article year).
    #[arg(long, global = true, value_name = "YEAR")]
    pub year_start: Option<i32>,

    /// Last year of the series window (default: latest article year).
    #[arg(long, global = true, value_name = "YEAR")]
    pub year_end: Option<i32>,

    /// Largest lag (in years) considered for model predictors.
    #[arg(long, global = true, value_name = "YEARS")]
    pub max_lag: Option<u32>,

    /// Number of nested models to fit (1–8, one new topic each).
    #[arg(long, global = true, value_name = "N")]
    pub max_topics: Option<usize>,

    /// Year at which the harmonized opinion series is anchored to zero.
    #[arg(long, global = true, value_name = "YEAR")]
    pub baseline_year: Option<i32>,

    /// Bootstrap replicate count for opinion confidence intervals.
    #[arg(long, global = true, value_name = "N")]
    pub bootstrap_replicates: Option<usize>,

    /// Root seed; all randomness in the pipeline derives from it.
    #[arg(long, global = true, value_name = "SEED")]
    pub seed: Option<u64>,
}

/// Config-file counterpart of [`Overrides`]; unknown keys are rejected.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    corpus: Option<PathBuf>,
    lexicon: Option<PathBuf>,
    replay_scores: Option<PathBuf>,
    waves: Option<PathBuf>,
    out_dir: Option<PathBuf>,
    keywords: Option<Vec<String>>,
    scorer: Option<ScorerKind>,
    tau_assign: Option<f64>,
    tau_sent: Option<f64>,
    delta: Option<f64>,
    denominator: Option<DenominatorKind>,
    year_start: Option<i32>,
    year_end: Option<i32>,
    max_lag: Option<u32>,
    max_topics: Option<usize>,
    baseline_year: Option<i32>,
    bootstrap_replicates: Option<usize>,
    seed: Option<u64>,
}

/// Merges defaults, the optional config file, and flags, then validates.
pub fn resolve(overrides: &Overrides) -> Result<RunConfig, CliError> {
    let file = match &overrides.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| {
                CliError::config("config", format!("cannot read {}: {e}", path.display()))
            })?;
            toml::from_str::<FileConfig>(&text)
                .map_err(|e| CliError::config("config", format!("{}: {e}", path.display())))?
        }
        None => FileConfig::default(),
    };

    let defaults = RunConfig::default();
    let config = RunConfig {
        corpus: overrides.corpus.clone().or(file.corpus),
        lexicon: overrides.lexicon.clone().or(file.lexicon),
        replay_scores: overrides.replay_scores.clone().or(file.replay_scores),
        waves: overrides.waves.clone().or(file.waves),
        out_dir: overrides
            .out_dir
            .clone()
            .or(file.out_dir)
            .unwrap_or(defaults.out_dir),
        keywords: overrides
            .keywords
            .clone()
            .or(file.keywords)
            .unwrap_or(defaults.keywords),
        scorer: overrides.scorer.or(file.scorer).unwrap_or(defaults.scorer),
        tau_assign: overrides
            .tau_assign
            .or(file.tau_assign)
            .unwrap_or(defaults.tau_assign),
        tau_sent: overrides
            .tau_sent
            .or(file.tau_sent)
            .unwrap_or(defaults.tau_sent),
        delta: overrides.delta.or(file.delta).unwrap_or(defaults.delta),
        denominator: overrides
            .denominator
            .or(file.denominator)
            .unwrap_or(defaults.denominator),
        year_start: overrides.year_start.or(file.year_start),
        year_end: overrides.year_end.or(file.year_end),
        max_lag: overrides
            .max_lag
            .or(file.max_lag)
            .unwrap_or(defaults.max_lag),
        max_topics: overrides
            .max_topics
            .or(file.max_topics)
            .unwrap_or(defaults.max_topics),
        baseline_year: overrides
            .baseline_year
            .or(file.baseline_year)
            .unwrap_or(defaults.baseline_year),
        bootstrap_replicates: overrides
            .bootstrap_replicates
            .or(file.bootstrap_replicates)
            .unwrap_or(defaults.bootstrap_replicates),
        seed: overrides.seed.or(file.seed).unwrap_or(defaults.seed),
    };

    validate(&config)?;
    Ok(config)
}

fn validate(config: &RunConfig) -> Result<(), CliError> {
    if let Err(AggregateError::InvalidThreshold { field, value }) =
        AggregateThresholds::new(config.tau_assign, config.tau_sent, config.delta)
    {
        return Err(CliError::config(field, format!("value {value} out of range")));
    }
    if config.max_topics == 0 || config.max_topics > 8 {
        return Err(CliError::config(
            "max_topics",
            format!("must be between 1 and 8, got {}", config.max_topics),
        ));
    }
    if config.keywords.iter().all(|k| k.trim().is_empty()) {
        return Err(CliError::config("keywords", "keyword filter is empty"));
    }
    if let (Some(start), Some(end)) = (config.year_start, config.year_end) {
        if start > end {
            return Err(CliError::config(
                "year_start",
                format!("window {start}..={end} is empty"),
            ));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn no_overrides() -> Overrides {
        Overrides {
            config: None,
            corpus: None,
            lexicon: None,
            replay_scores: None,
            waves: None,
            out_dir: None,
            keywords: None,
            scorer: None,
            tau_assign: None,
            tau_sent: None,
            delta: None,
            denominator: None,
            year_start: None,
            year_end: None,
            max_lag: None,
            max_topics: None,
            baseline_year: None,
            bootstrap_replicates: None,
            seed: None,
        }
    }

    #[test]
    fn defaults_resolve_cleanly() {
        let config = resolve(&no_overrides()).unwrap();
        assert_eq!(config.tau_assign, 0.5);
        assert_eq!(config.tau_sent, 0.5);
        assert_eq!(config.delta, 0.0);
        assert_eq!(config.max_lag, 5);
        assert_eq!(config.max_topics, 8);
        assert_eq!(config.baseline_year, 1974);
        assert_eq!(config.bootstrap_replicates, 1000);
        assert_eq!(config.seed, 42);
        assert_eq!(config.keywords.len(), 5);
        assert_eq!(config.scorer, ScorerKind::Lexicon);
        assert_eq!(config.denominator, DenominatorKind::AllArticles);
    }

    #[test]
    fn flags_override_config_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.toml");
        std::fs::write(&path, "tau_sent = 0.7\nseed = 9\nmax_lag = 2\n").unwrap();
        let overrides = Overrides {
            config: Some(path),
            seed: Some(11),
            ..no_overrides()
        };
        let config = resolve(&overrides).unwrap();
        assert_eq!(config.tau_sent, 0.7); // from file
        assert_eq!(config.max_lag, 2); // from file
        assert_eq!(config.seed, 11); // flag wins
    }

    #[test]
    fn unknown_config_file_key_is_rejected_with_field_name() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.toml");
        std::fs::write(&path, "not_a_field = 1\n").unwrap();
        let overrides = Overrides {
            config: Some(path),
            ..no_overrides()
        };
        let err = resolve(&overrides).unwrap_err();
        assert_eq!(err.exit_code(), 1);
        assert!(err.to_string().contains("config"), "{err}");
    }

    #[test]
    fn out_of_range_threshold_names_the_field() {
        let overrides = Overrides {
            tau_sent: Some(1.0),
            ..no_overrides()
        };
        let err = resolve(&overrides).unwrap_err();
        assert_eq!(err.exit_code(), 1);
        assert!(err.to_string().contains("tau_sent"), "{err}");
    }

    #[test]
    fn empty_year_window_names_the_field() {
        let overrides = Overrides {
            year_start: Some(1990),
            year_end: Some(1980),
            ..no_overrides()
        };
        let err = resolve(&overrides).unwrap_err();
        assert_eq!(err.exit_code(), 1);
        assert!(err.to_string().contains("year_start"), "{err}");
    }

    #[test]
    fn max_topics_bounds_are_enforced() {
        for bad in [0usize, 9] {
            let overrides = Overrides {
                max_topics: Some(bad),
                ..no_overrides()
            };
            let err = resolve(&overrides).unwrap_err();
            assert_eq!(err.exit_code(), 1);
            assert!(err.to_string().contains("max_topics"), "{err}");
        }
    }
}
