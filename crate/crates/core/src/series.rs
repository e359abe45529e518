//! Yearly per-topic sentiment fractions and volumes.
//!
//! Collapses article-level categories into one record per (topic, year):
//! counts, fractions of positive/negative articles, and binomial standard
//! errors.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::aggregate::{ArticleSentiment, Category};
use crate::topic::Topic;

/// Sentiment polarity selector for fraction lookups and model predictors.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
#[serde(rename_all = "snake_case")]
pub enum Sign {
    Positive,
    Negative,
}

impl Sign {
    pub const ALL: [Sign; 2] = [Sign::Positive, Sign::Negative];
}

impl std::fmt::Display for Sign {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Sign::Positive => "positive",
            Sign::Negative => "negative",
        })
    }
}

impl std::str::FromStr for Sign {
    type Err = UnknownSign;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "positive" => Ok(Sign::Positive),
            "negative" => Ok(Sign::Negative),
            other => Err(UnknownSign(other.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown sign: {0:?} (expected \"positive\" or \"negative\")")]
pub struct UnknownSign(pub String);

/// Which article set forms the denominator of the yearly fractions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FractionDenominator {
    /// All corpus articles published that year (the default): fractions are
    /// comparable across topics because every topic shares the denominator.
    #[default]
    AllArticles,
    /// Only articles with non-neutral sentiment in the topic that year, so
    /// f_positive + f_negative = 1 wherever the topic appears at all.
    TopicAssigned,
}

/// One (topic, year) cell of the sentiment series.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TopicYearSeries {
    pub topic: Topic,
    pub year: i32,
    /// Articles published this year (all topics share this count).
    pub n_total: usize,
    pub n_positive: usize,
    pub n_negative: usize,
    pub f_positive: f64,
    pub f_negative: f64,
    pub se_positive: f64,
    pub se_negative: f64,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SeriesError {
    #[error("invalid year range: {start}..={end}")]
    InvalidRange { start: i32, end: i32 },
    #[error("empty year: no articles in {}", format_years(.0))]
    EmptyYear(Vec<i32>),
    #[error("article {article_id:?} has year {year}, outside {start}..={end}")]
    YearOutOfRange {
        article_id: String,
        year: i32,
        start: i32,
        end: i32,
    },
    #[error("duplicate article id {0:?} in sentiment input")]
    DuplicateArticle(String),
}

fn format_years(years: &[i32]) -> String {
    years
        .iter()
        .map(|y| y.to_string())
        .collect::<Vec<_>>()
        .join(", ")
}

/// Builds one record per (topic, year) over the inclusive year range,
/// ordered by (topic, year).
///
/// Every year in range must contain at least one article; sentiments must
/// fall inside the range and carry unique article ids.
pub fn build_series(
    sentiments: &[ArticleSentiment],
    year_start: i32,
    year_end: i32,
    denominator: FractionDenominator,
) -> Result<Vec<TopicYearSeries>, SeriesError> {
    if year_start > year_end {
        return Err(SeriesError::InvalidRange {
            start: year_start,
            end: year_end,
        });
    }
    let n_years = (year_end - year_start + 1) as usize;

    let mut ids: Vec<&str> = sentiments.iter().map(|s| s.article_id.as_str()).collect();
    ids.sort_unstable();
    if let Some(dup) = ids.windows(2).find(|w| w[0] == w[1]) {
        return Err(SeriesError::DuplicateArticle(dup[0].to_string()));
    }
    if let Some(outside) = sentiments
        .iter()
        .find(|s| s.year < year_start || s.year > year_end)
    {
        return Err(SeriesError::YearOutOfRange {
            article_id: outside.article_id.clone(),
            year: outside.year,
            start: year_start,
            end: year_end,
        });
    }

    // Integer count grids merge commutatively, so a parallel reduction is
    // deterministic regardless of chunking.
    #[derive(Clone)]
    struct Counts {
        total: Vec<usize>,
        positive: Vec<Vec<usize>>,
        negative: Vec<Vec<usize>>,
    }
    impl Counts {
        fn zero(n_years: usize) -> Self {
            Counts {
                total: vec![0; n_years],
                positive: vec![vec![0; n_years]; Topic::COUNT],
                negative: vec![vec![0; n_years]; Topic::COUNT],
            }
        }
        fn merge(mut self, other: Self) -> Self {
            for (a, b) in self.total.iter_mut().zip(&other.total) {
                *a += b;
            }
            for k in 0..Topic::COUNT {
                for (a, b) in self.positive[k].iter_mut().zip(&other.positive[k]) {
                    *a += b;
                }
                for (a, b) in self.negative[k].iter_mut().zip(&other.negative[k]) {
                    *a += b;
                }
            }
            self
        }
    }

    let counts = sentiments
        .par_iter()
        .fold(
            || Counts::zero(n_years),
            |mut acc, s| {
                let offset = (s.year - year_start) as usize;
                acc.total[offset] += 1;
                for topic in Topic::ALL {
                    match s.category(topic) {
                        Category::Positive => acc.positive[topic.index()][offset] += 1,
                        Category::Negative => acc.negative[topic.index()][offset] += 1,
                        Category::Neutral => {}
                    }
                }
                acc
            },
        )
        .reduce(|| Counts::zero(n_years), Counts::merge);

    let empty_years: Vec<i32> = (0..n_years)
        .filter(|&offset| counts.total[offset] == 0)
        .map(|offset| year_start + offset as i32)
        .collect();
    if !empty_years.is_empty() {
        return Err(SeriesError::EmptyYear(empty_years));
    }

    let mut series = Vec::with_capacity(Topic::COUNT * n_years);
    for topic in Topic::ALL {
        for offset in 0..n_years {
            let n_total = counts.total[offset];
            let n_positive = counts.positive[topic.index()][offset];
            let n_negative = counts.negative[topic.index()][offset];
            let denom = match denominator {
                FractionDenominator::AllArticles => n_total,
                FractionDenominator::TopicAssigned => n_positive + n_negative,
            };
            let fraction = |n: usize| {
                if denom == 0 {
                    (0.0, 0.0)
                } else {
                    let f = n as f64 / denom as f64;
                    (f, (f * (1.0 - f) / denom as f64).sqrt())
                }
            };
            let (f_positive, se_positive) = fraction(n_positive);
            let (f_negative, se_negative) = fraction(n_negative);
            series.push(TopicYearSeries {
                topic,
                year: year_start + offset as i32,
                n_total,
                n_positive,
                n_negative,
                f_positive,
                f_negative,
                se_positive,
                se_negative,
            });
        }
    }
    Ok(series)
}

/// Reverse-codes a fraction for the regression design: `+f_positive` for the
/// positive sign, `−f_negative` for the negative sign, so all model
/// coefficients can be constrained non-negative.
pub fn signed_fraction(series: &TopicYearSeries, sign: Sign) -> f64 {
    match sign {
        Sign::Positive => series.f_positive,
        Sign::Negative => -series.f_negative,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn article(id: &str, year: i32, marks: &[(Topic, Category)]) -> ArticleSentiment {
        let mut categories = [Category::Neutral; Topic::COUNT];
        for &(topic, category) in marks {
            categories[topic.index()] = category;
        }
        ArticleSentiment {
            article_id: id.to_string(),
            year,
            categories,
        }
    }

    fn cell<'a>(series: &'a [TopicYearSeries], topic: Topic, year: i32) -> &'a TopicYearSeries {
        series
            .iter()
            .find(|s| s.topic == topic && s.year == year)
            .unwrap()
    }

    #[test]
    fn half_positive_fraction_and_binomial_error() {
        let sentiments: Vec<ArticleSentiment> = (0..10)
            .map(|i| {
                let marks: &[(Topic, Category)] = if i < 5 {
                    &[(Topic::Culture, Category::Positive)]
                } else {
                    &[]
                };
                article(&format!("a{i}"), 1993, marks)
            })
            .collect();
        let series =
            build_series(&sentiments, 1993, 1993, FractionDenominator::AllArticles).unwrap();
        assert_eq!(series.len(), Topic::COUNT);
        let culture = cell(&series, Topic::Culture, 1993);
        assert_eq!(culture.n_total, 10);
        assert_eq!(culture.n_positive, 5);
        assert_eq!(culture.f_positive, 0.5);
        assert_relative_eq!(culture.se_positive, (0.25f64 / 10.0).sqrt());
        assert!((culture.se_positive - 0.158).abs() < 5e-4);
    }

    #[test]
    fn all_neutral_topic_has_zero_fractions_and_errors() {
        let sentiments: Vec<ArticleSentiment> = (0..4)
            .map(|i| article(&format!("a{i}"), 1980, &[(Topic::Culture, Category::Positive)]))
            .collect();
        let series =
            build_series(&sentiments, 1980, 1980, FractionDenominator::AllArticles).unwrap();
        let ideology = cell(&series, Topic::Ideology, 1980);
        assert_eq!(ideology.f_positive, 0.0);
        assert_eq!(ideology.f_negative, 0.0);
        assert_eq!(ideology.se_positive, 0.0);
        assert_eq!(ideology.se_negative, 0.0);
    }

    #[test]
    fn constructed_fraction_reproduces_exact_target() {
        // 539 of 1000 culture-positive articles in 1993.
        let sentiments: Vec<ArticleSentiment> = (0..1000)
            .map(|i| {
                let marks: &[(Topic, Category)] = if i < 539 {
                    &[(Topic::Culture, Category::Positive)]
                } else {
                    &[]
                };
                article(&format!("a{i:04}"), 1993, marks)
            })
            .collect();
        let series =
            build_series(&sentiments, 1993, 1993, FractionDenominator::AllArticles).unwrap();
        let culture = cell(&series, Topic::Culture, 1993);
        assert_eq!(culture.f_positive, 0.539);
        assert_eq!(signed_fraction(culture, Sign::Positive), 0.539);
    }

    #[test]
    fn signed_fraction_reverse_codes_the_negative_side() {
        let cell = TopicYearSeries {
            topic: Topic::Democracy,
            year: 1993,
            n_total: 1000,
            n_positive: 100,
            n_negative: 442,
            f_positive: 0.1,
            f_negative: 0.442,
            se_positive: 0.0,
            se_negative: 0.0,
        };
        assert_eq!(signed_fraction(&cell, Sign::Negative), -0.442);
        let zero = TopicYearSeries {
            f_positive: 0.0,
            ..cell
        };
        assert_eq!(signed_fraction(&zero, Sign::Positive), 0.0);
    }

    #[test]
    fn per_topic_denominator_uses_only_assigned_articles() {
        let mut sentiments: Vec<ArticleSentiment> = (0..4)
            .map(|i| article(&format!("p{i}"), 1990, &[(Topic::Culture, Category::Positive)]))
            .collect();
        sentiments.extend(
            (0..2).map(|i| article(&format!("n{i}"), 1990, &[(Topic::Culture, Category::Negative)])),
        );
        sentiments.extend((0..4).map(|i| article(&format!("z{i}"), 1990, &[])));

        let all = build_series(&sentiments, 1990, 1990, FractionDenominator::AllArticles).unwrap();
        let assigned =
            build_series(&sentiments, 1990, 1990, FractionDenominator::TopicAssigned).unwrap();
        assert_relative_eq!(cell(&all, Topic::Culture, 1990).f_positive, 0.4);
        assert_relative_eq!(cell(&assigned, Topic::Culture, 1990).f_positive, 4.0 / 6.0);
        assert_relative_eq!(
            cell(&assigned, Topic::Culture, 1990).se_positive,
            ((4.0 / 6.0) * (2.0 / 6.0) / 6.0f64).sqrt()
        );
        // Topics nobody mentions stay at zero rather than dividing by zero.
        assert_eq!(cell(&assigned, Topic::Ideology, 1990).f_positive, 0.0);
        assert_eq!(cell(&assigned, Topic::Ideology, 1990).se_positive, 0.0);
    }

    #[test]
    fn empty_year_in_range_is_fatal_and_lists_the_years() {
        let sentiments = vec![article("a1", 1990, &[]), article("a2", 1992, &[])];
        match build_series(&sentiments, 1990, 1993, FractionDenominator::AllArticles).unwrap_err()
        {
            SeriesError::EmptyYear(years) => assert_eq!(years, vec![1991, 1993]),
            other => panic!("unexpected error: {other}"),
        }
    }

    #[test]
    fn out_of_range_duplicate_and_inverted_inputs_are_rejected() {
        let sentiments = vec![article("a1", 1989, &[])];
        assert!(matches!(
            build_series(&sentiments, 1990, 1993, FractionDenominator::AllArticles),
            Err(SeriesError::YearOutOfRange { year: 1989, .. })
        ));

        let duplicated = vec![article("a1", 1990, &[]), article("a1", 1990, &[])];
        assert!(matches!(
            build_series(&duplicated, 1990, 1990, FractionDenominator::AllArticles),
            Err(SeriesError::DuplicateArticle(id)) if id == "a1"
        ));

        assert!(matches!(
            build_series(&[], 1993, 1990, FractionDenominator::AllArticles),
            Err(SeriesError::InvalidRange { .. })
        ));
    }

    fn sentiments_strategy() -> impl Strategy<Value = Vec<ArticleSentiment>> {
        proptest::collection::vec(
            (1990i32..=1992, proptest::array::uniform8(0u8..3)),
            1..40,
        )
        .prop_map(|rows| {
            rows.into_iter()
                .enumerate()
                .map(|(i, (year, cats))| {
                    let categories = cats.map(|c| match c {
                        0 => Category::Negative,
                        1 => Category::Neutral,
                        _ => Category::Positive,
                    });
                    ArticleSentiment {
                        article_id: format!("a{i}"),
                        year,
                        categories,
                    }
                })
                .collect()
        })
    }

    proptest! {
        #[test]
        fn counts_are_consistent_and_order_invariant(
            sentiments in sentiments_strategy(),
            seed in any::<u64>(),
        ) {
            let result = build_series(&sentiments, 1990, 1992, FractionDenominator::AllArticles);
            let Ok(series) = result else {
                // Only the empty-year precondition can fail under this strategy.
                prop_assert!(matches!(result, Err(SeriesError::EmptyYear(_))));
                return Ok(());
            };
            for cell in &series {
                prop_assert!(cell.n_positive + cell.n_negative <= cell.n_total);
                prop_assert!(cell.f_positive >= 0.0 && cell.f_negative >= 0.0);
                prop_assert!(cell.f_positive + cell.f_negative <= 1.0 + 1e-12);
                let neutral = sentiments
                    .iter()
                    .filter(|s| s.year == cell.year && s.category(cell.topic) == Category::Neutral)
                    .count();
                prop_assert_eq!(cell.n_positive + cell.n_negative + neutral, cell.n_total);
                prop_assert!(signed_fraction(cell, Sign::Negative) <= 0.0);
                prop_assert!(signed_fraction(cell, Sign::Positive) >= 0.0);
            }

            use rand::prelude::*;
            let mut shuffled = sentiments.clone();
            shuffled.shuffle(&mut rand_chacha::ChaCha8Rng::seed_from_u64(seed));
            let reshuffled =
                build_series(&shuffled, 1990, 1992, FractionDenominator::AllArticles).unwrap();
            prop_assert_eq!(series, reshuffled);
        }
    }
}
