//! Harmonization of heterogeneous survey waves into one opinion series.
//!
//! Different survey houses ask comparable questions on different response
//! scales in different years. Each survey series `s` is modeled as an affine
//! view of a shared latent yearly opinion value:
//!
//! ```text
//! wave_mean(s, t) ≈ a_s · μ_t + b_s        (a_s > 0)
//! ```
//!
//! The model is fit by alternating least squares weighted by respondent
//! counts, using years where series overlap to stitch scales together. The
//! gauge freedom (μ can be rescaled/shifted if every (a, b) compensates) is
//! fixed by setting a = 1 for the longest series and μ = 0 at the baseline
//! year. Confidence intervals come from a seeded nonparametric bootstrap
//! that resamples waves within each series.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::seed::derive_seed;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

/// One cross-sectional survey wave: a year's response counts on an ordered
/// scale, least favorable first.
///
/// Counts are reals, not integers, so weighted tallies (as released by
/// survey archives) are representable.
#[derive(Debug, Clone, PartialEq)]
pub struct SurveyWave {
    series_id: String,
    year: i32,
    response_counts: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SurveyWaveError {
    #[error("series {series_id:?} year {year}: scale needs ≥ 2 levels, got {levels}")]
    TooFewLevels {
        series_id: String,
        year: i32,
        levels: usize,
    },
    #[error("series {series_id:?} year {year}: response count {value} at level {level} is invalid")]
    InvalidCount {
        series_id: String,
        year: i32,
        level: usize,
        value: f64,
    },
    #[error("series {series_id:?} year {year}: no respondents")]
    NoRespondents { series_id: String, year: i32 },
}

impl SurveyWave {
    pub fn new(
        series_id: impl Into<String>,
        year: i32,
        response_counts: Vec<f64>,
    ) -> Result<Self, SurveyWaveError> {
        let series_id = series_id.into();
        if response_counts.len() < 2 {
            return Err(SurveyWaveError::TooFewLevels {
                series_id,
                year,
                levels: response_counts.len(),
            });
        }
        for (level, &value) in response_counts.iter().enumerate() {
            if !(value.is_finite() && value >= 0.0) {
                return Err(SurveyWaveError::InvalidCount {
                    series_id,
                    year,
                    level,
                    value,
                });
            }
        }
        if response_counts.iter().sum::<f64>() <= 0.0 {
            return Err(SurveyWaveError::NoRespondents { series_id, year });
        }
        Ok(Self {
            series_id,
            year,
            response_counts,
        })
    }

    pub fn series_id(&self) -> &str {
        &self.series_id
    }

    pub fn year(&self) -> i32 {
        self.year
    }

    pub fn scale_levels(&self) -> usize {
        self.response_counts.len()
    }

    pub fn response_counts(&self) -> &[f64] {
        &self.response_counts
    }

    /// Total respondents.
    pub fn n(&self) -> f64 {
        self.response_counts.iter().sum()
    }
}

/// Count-weighted mean of the wave's responses after mapping its L levels
/// linearly onto [−1, 1]: level i ↦ −1 + 2i/(L−1).
///
/// Always in [−1, 1]. The n ≥ 1 precondition is enforced by the
/// [`SurveyWave`] constructor.
pub fn wave_mean(wave: &SurveyWave) -> f64 {
    let levels = wave.scale_levels();
    let mut weighted = 0.0;
    for (i, &count) in wave.response_counts().iter().enumerate() {
        let position = -1.0 + 2.0 * i as f64 / (levels - 1) as f64;
        weighted += count * position;
    }
    weighted / wave.n()
}

/// Per-series affine calibration: wave_mean ≈ a·μ + b.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Calibration {
    pub series_id: String,
    pub a: f64,
    pub b: f64,
}

/// One year of the harmonized opinion series with its bootstrap interval.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OpinionPoint {
    pub year: i32,
    pub mu: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

/// The harmonized series: μ per observed year, anchored to zero at the
/// baseline year, clamped to [−1, 1].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OpinionSeries {
    pub baseline_year: i32,
    pub points: Vec<OpinionPoint>,
}

impl OpinionSeries {
    pub fn value(&self, year: i32) -> Option<f64> {
        self.points.iter().find(|p| p.year == year).map(|p| p.mu)
    }
}

#[derive(Debug, Clone)]
pub struct HarmonizeOptions {
    pub baseline_year: i32,
    pub bootstrap_replicates: usize,
    pub seed: u64,
    pub max_iterations: usize,
    pub tolerance: f64,
}

impl Default for HarmonizeOptions {
    fn default() -> Self {
        Self {
            baseline_year: 1974,
            bootstrap_replicates: 1000,
            seed: 42,
            max_iterations: 10_000,
            tolerance: 1e-9,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HarmonizeResult {
    pub opinion: OpinionSeries,
    pub calibrations: Vec<Calibration>,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum HarmonizeError {
    #[error("no survey waves supplied")]
    NoWaves,
    #[error("baseline year {0} has no survey wave")]
    BaselineYearMissing(i32),
    #[error("series overlap graph is disconnected; components: {}", format_components(.0))]
    DisconnectedOverlap(Vec<Vec<String>>),
    #[error("inverted series {series_id:?}: calibration slope collapsed to {a:e}")]
    InvertedSeries { series_id: String, a: f64 },
    #[error("calibration did not converge within {0} iterations")]
    NoConvergence(usize),
}

fn format_components(components: &[Vec<String>]) -> String {
    components
        .iter()
        .map(|c| format!("[{}]", c.join(", ")))
        .collect::<Vec<_>>()
        .join(" ")
}

/// One (series, year) cell: the respondent-weighted mean of that series'
/// waves in that year, which is the sufficient statistic under the affine
/// model.
struct Cell {
    series: usize,
    year: usize,
    mean: f64,
    weight: f64,
}

struct PointFit {
    /// μ per year index, gauge-fixed (baseline 0, a = 1 for the reference
    /// series), before clamping.
    mu: Vec<f64>,
    /// (a, b) per series index in the same gauge.
    calibration: Vec<(f64, f64)>,
}

/// Internal fit failure carrying a series index; the caller translates it
/// into a [`HarmonizeError`] with the series id.
enum FitFailure {
    Inverted { series: usize, a: f64 },
    NoConvergence,
}

/// A slope this far below the reference slope of 1 means the alternating
/// fit is squeezing the series against the a = 0 barrier — the data want a
/// negative slope (an inverted series) but the iteration cannot cross zero,
/// so it stalls instead of converging.
const COLLAPSED_SLOPE: f64 = 1e-3;

/// Collapses waves into cells. Returns (series ids sorted, years sorted,
/// cells).
fn build_cells(waves: &[SurveyWave]) -> (Vec<String>, Vec<i32>, Vec<Cell>) {
    let mut series_ids: Vec<String> = waves.iter().map(|w| w.series_id.clone()).collect();
    series_ids.sort();
    series_ids.dedup();
    let mut years: Vec<i32> = waves.iter().map(|w| w.year).collect();
    years.sort_unstable();
    years.dedup();

    let mut sums = std::collections::BTreeMap::<(usize, usize), (f64, f64)>::new();
    for wave in waves {
        let series = series_ids.binary_search_by(|s| s.as_str().cmp(wave.series_id())).unwrap();
        let year = years.binary_search(&wave.year).unwrap();
        let n = wave.n();
        let entry = sums.entry((series, year)).or_insert((0.0, 0.0));
        entry.0 += n * wave_mean(wave);
        entry.1 += n;
    }
    let cells = sums
        .into_iter()
        .map(|((series, year), (weighted_sum, weight))| Cell {
            series,
            year,
            mean: weighted_sum / weight,
            weight,
        })
        .collect();
    (series_ids, years, cells)
}

/// Connected components of the "series share a year" graph, each sorted.
fn overlap_components(n_series: usize, n_years: usize, cells: &[Cell]) -> Vec<Vec<usize>> {
    let mut series_by_year = vec![Vec::new(); n_years];
    for cell in cells {
        series_by_year[cell.year].push(cell.series);
    }
    let mut component = vec![usize::MAX; n_series];
    let mut next = 0;
    for start in 0..n_series {
        if component[start] != usize::MAX {
            continue;
        }
        let id = next;
        next += 1;
        let mut queue = vec![start];
        component[start] = id;
        while let Some(s) = queue.pop() {
            for neighbors in series_by_year.iter().filter(|ys| ys.contains(&s)) {
                for &other in neighbors {
                    if component[other] == usize::MAX {
                        component[other] = id;
                        queue.push(other);
                    }
                }
            }
        }
    }
    let mut groups = vec![Vec::new(); next];
    for (series, &id) in component.iter().enumerate() {
        groups[id].push(series);
    }
    groups
}

/// The core alternating-least-squares fit on pre-aggregated cells.
fn fit_cells(
    n_series: usize,
    n_years: usize,
    cells: &[Cell],
    baseline_idx: usize,
    reference_series: usize,
    options: &HarmonizeOptions,
) -> Result<PointFit, FitFailure> {
    const EPS: f64 = 1e-12;

    // Initialize μ as the weighted mean of raw cell means per year
    // (equivalent to one ALS μ-step with a = 1, b = 0).
    let mut mu = vec![0.0; n_years];
    {
        let mut denom = vec![0.0; n_years];
        for cell in cells {
            mu[cell.year] += cell.weight * cell.mean;
            denom[cell.year] += cell.weight;
        }
        for (m, d) in mu.iter_mut().zip(&denom) {
            *m /= *d;
        }
    }
    let mut a = vec![1.0; n_series];
    let mut b = vec![0.0; n_series];

    let mut converged = false;
    for _ in 0..options.max_iterations {
        let previous = mu.clone();

        // μ-step: weighted least squares per year with (a, b) fixed.
        let mut numer = vec![0.0; n_years];
        let mut denom = vec![0.0; n_years];
        for cell in cells {
            numer[cell.year] += cell.weight * a[cell.series] * (cell.mean - b[cell.series]);
            denom[cell.year] += cell.weight * a[cell.series] * a[cell.series];
        }
        for t in 0..n_years {
            if denom[t] > EPS {
                mu[t] = numer[t] / denom[t];
            }
        }

        // (a, b)-step: weighted simple regression of cell means on μ per
        // series. Series spanning no μ variation keep their slope.
        let mut w_sum = vec![0.0; n_series];
        let mut x_sum = vec![0.0; n_series];
        let mut y_sum = vec![0.0; n_series];
        for cell in cells {
            w_sum[cell.series] += cell.weight;
            x_sum[cell.series] += cell.weight * mu[cell.year];
            y_sum[cell.series] += cell.weight * cell.mean;
        }
        let mut sxx = vec![0.0; n_series];
        let mut sxy = vec![0.0; n_series];
        for cell in cells {
            let dx = mu[cell.year] - x_sum[cell.series] / w_sum[cell.series];
            let dy = cell.mean - y_sum[cell.series] / w_sum[cell.series];
            sxx[cell.series] += cell.weight * dx * dx;
            sxy[cell.series] += cell.weight * dx * dy;
        }
        for s in 0..n_series {
            if sxx[s] > EPS {
                a[s] = sxy[s] / sxx[s];
            }
            b[s] = (y_sum[s] - a[s] * x_sum[s]) / w_sum[s];
        }

        // Gauge fixing: a = 1 for the reference series, μ = 0 at baseline.
        // The model is invariant under (μ, a, b) ↦ (αμ + γ, a/α, b − (a/α)γ),
        // so this is a pure reparameterization.
        let alpha = a[reference_series];
        if alpha.abs() <= EPS {
            return Err(FitFailure::Inverted {
                series: reference_series,
                a: alpha,
            });
        }
        let base = mu[baseline_idx];
        for t in 0..n_years {
            mu[t] = alpha * (mu[t] - base);
        }
        mu[baseline_idx] = 0.0;
        for s in 0..n_series {
            a[s] /= alpha;
            b[s] += a[s] * alpha * base;
        }

        let delta = mu
            .iter()
            .zip(&previous)
            .map(|(m, p)| (m - p).abs())
            .fold(0.0, f64::max);
        if delta < options.tolerance {
            converged = true;
            break;
        }
    }
    if !converged {
        // Distinguish "stalled against the sign barrier" (an inverted
        // series) from a genuine convergence failure.
        let worst = (0..n_series)
            .min_by(|&p, &q| a[p].partial_cmp(&a[q]).unwrap())
            .unwrap();
        if a[worst] <= COLLAPSED_SLOPE {
            return Err(FitFailure::Inverted {
                series: worst,
                a: a[worst],
            });
        }
        return Err(FitFailure::NoConvergence);
    }

    Ok(PointFit {
        mu,
        calibration: a.into_iter().zip(b).collect(),
    })
}

/// Runs the full point fit for one wave set: cells, connectivity check,
/// baseline check, ALS, inversion check. Shared by the estimate and every
/// bootstrap replicate.
fn point_fit(
    waves: &[SurveyWave],
    options: &HarmonizeOptions,
) -> Result<(Vec<String>, Vec<i32>, PointFit), HarmonizeError> {
    if waves.is_empty() {
        return Err(HarmonizeError::NoWaves);
    }
    let (series_ids, years, cells) = build_cells(waves);
    let baseline_idx = years
        .binary_search(&options.baseline_year)
        .map_err(|_| HarmonizeError::BaselineYearMissing(options.baseline_year))?;

    let components = overlap_components(series_ids.len(), years.len(), &cells);
    if components.len() > 1 {
        let named = components
            .into_iter()
            .map(|group| group.into_iter().map(|s| series_ids[s].clone()).collect())
            .collect();
        return Err(HarmonizeError::DisconnectedOverlap(named));
    }

    // Reference series: most distinct observed years, ties to the
    // lexicographically smallest id (= lowest index, ids being sorted).
    let mut years_covered = vec![0usize; series_ids.len()];
    for cell in &cells {
        years_covered[cell.series] += 1;
    }
    let reference_series = (0..series_ids.len())
        .max_by_key(|&s| (years_covered[s], std::cmp::Reverse(s)))
        .unwrap();

    let fit = fit_cells(
        series_ids.len(),
        years.len(),
        &cells,
        baseline_idx,
        reference_series,
        options,
    )
    .map_err(|failure| match failure {
        FitFailure::Inverted { series, a } => HarmonizeError::InvertedSeries {
            series_id: series_ids[series].clone(),
            a,
        },
        FitFailure::NoConvergence => HarmonizeError::NoConvergence(options.max_iterations),
    })?;

    if let Some(s) = (0..series_ids.len()).find(|&s| fit.calibration[s].0 <= 0.0) {
        return Err(HarmonizeError::InvertedSeries {
            series_id: series_ids[s].clone(),
            a: fit.calibration[s].0,
        });
    }
    Ok((series_ids, years, fit))
}

/// Allowed overshoot of |μ| beyond 1 before clamping draws a warning.
const CLAMP_WARNING_SLACK: f64 = 0.05;

fn clamp_with_warnings(years: &[i32], mu: &mut [f64], warnings: &mut Vec<String>) {
    for (t, value) in mu.iter_mut().enumerate() {
        if value.abs() > 1.0 + CLAMP_WARNING_SLACK {
            warnings.push(format!(
                "opinion value {value:.4} in {} exceeds [-1, 1] by more than {CLAMP_WARNING_SLACK}; \
                 calibration may be poor",
                years[t]
            ));
        }
        *value = value.clamp(-1.0, 1.0);
    }
}

fn percentile(sorted: &[f64], q: f64) -> f64 {
    debug_assert!(!sorted.is_empty());
    if sorted.len() == 1 {
        return sorted[0];
    }
    let position = q * (sorted.len() - 1) as f64;
    let low = position.floor() as usize;
    let high = position.ceil() as usize;
    let weight = position - low as f64;
    sorted[low] * (1.0 - weight) + sorted[high] * weight
}

/// Fits the affine calibration model and returns the harmonized opinion
/// series with bootstrap confidence intervals and per-series calibrations.
///
/// Bootstrap replicates resample waves with replacement within each series;
/// replicates whose resample is no longer harmonizable (e.g. the overlap
/// graph disconnects or the baseline year drops out) are skipped and
/// counted in a warning. Replicate seeds are derived from `options.seed`,
/// so results are identical at any parallelism.
pub fn harmonize(
    waves: &[SurveyWave],
    options: &HarmonizeOptions,
) -> Result<HarmonizeResult, HarmonizeError> {
    let (series_ids, years, fit) = point_fit(waves, options)?;
    let mut warnings = Vec::new();
    let mut mu = fit.mu.clone();
    clamp_with_warnings(&years, &mut mu, &mut warnings);

    // Group waves by series (input order within a series preserved) so each
    // replicate resamples within series.
    let mut waves_by_series: Vec<Vec<&SurveyWave>> = vec![Vec::new(); series_ids.len()];
    for wave in waves {
        let s = series_ids
            .binary_search_by(|id| id.as_str().cmp(wave.series_id()))
            .unwrap();
        waves_by_series[s].push(wave);
    }

    let replicate_runs: Vec<Option<Vec<f64>>> = (0..options.bootstrap_replicates)
        .into_par_iter()
        .map(|rep| {
            let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(options.seed, rep as u64));
            let mut resampled = Vec::with_capacity(waves.len());
            for group in &waves_by_series {
                for _ in 0..group.len() {
                    resampled.push(group[rng.random_range(0..group.len())].clone());
                }
            }
            let (_, rep_years, rep_fit) = point_fit(&resampled, options).ok()?;
            let mut rep_mu = rep_fit.mu;
            clamp_with_warnings(&rep_years, &mut rep_mu, &mut Vec::new());
            // Align to the point estimate's year axis; unsampled years are NaN.
            let aligned = years
                .iter()
                .map(|year| {
                    rep_years
                        .binary_search(year)
                        .map(|i| rep_mu[i])
                        .unwrap_or(f64::NAN)
                })
                .collect();
            Some(aligned)
        })
        .collect();

    let skipped = replicate_runs.iter().filter(|r| r.is_none()).count();
    if skipped > 0 {
        warnings.push(format!(
            "skipped {skipped} of {} bootstrap replicates (resample not harmonizable)",
            options.bootstrap_replicates
        ));
    }

    let points = years
        .iter()
        .enumerate()
        .map(|(t, &year)| {
            let mut values: Vec<f64> = replicate_runs
                .iter()
                .flatten()
                .map(|rep| rep[t])
                .filter(|v| v.is_finite())
                .collect();
            let (ci_low, ci_high) = if values.is_empty() {
                (mu[t], mu[t])
            } else {
                values.sort_by(|x, y| x.partial_cmp(y).unwrap());
                (percentile(&values, 0.025), percentile(&values, 0.975))
            };
            OpinionPoint {
                year,
                mu: mu[t],
                ci_low,
                ci_high,
            }
        })
        .collect();

    let calibrations = series_ids
        .iter()
        .zip(&fit.calibration)
        .map(|(series_id, &(a, b))| Calibration {
            series_id: series_id.clone(),
            a,
            b,
        })
        .collect();

    Ok(HarmonizeResult {
        opinion: OpinionSeries {
            baseline_year: options.baseline_year,
            points,
        },
        calibrations,
        warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn wave(series: &str, year: i32, counts: &[f64]) -> SurveyWave {
        SurveyWave::new(series, year, counts.to_vec()).unwrap()
    }

    /// Two-level wave whose mean is exactly `value` (total 100 respondents).
    fn wave_with_mean(series: &str, year: i32, value: f64) -> SurveyWave {
        wave(series, year, &[50.0 * (1.0 - value), 50.0 * (1.0 + value)])
    }

    fn options(replicates: usize) -> HarmonizeOptions {
        HarmonizeOptions {
            bootstrap_replicates: replicates,
            ..HarmonizeOptions::default()
        }
    }

    #[test]
    fn wave_mean_maps_levels_onto_the_unit_interval() {
        assert_eq!(wave_mean(&wave("s", 1974, &[0.0, 0.0, 0.0, 10.0])), 1.0);
        assert_eq!(wave_mean(&wave("s", 1974, &[5.0, 5.0])), 0.0);
        // Levels −1, −1/3, 1/3, 1 with counts 1, 2, 3, 4:
        // (−1 − 2/3 + 1 + 4) / 10 = 10/30 = 1/3.
        let m = wave_mean(&wave("s", 1974, &[1.0, 2.0, 3.0, 4.0]));
        assert_relative_eq!(m, 1.0 / 3.0, epsilon = 1e-15);
        assert!((m - 0.333).abs() < 5e-4);
    }

    #[test]
    fn wave_constructor_rejects_degenerate_input() {
        assert!(matches!(
            SurveyWave::new("s", 1974, vec![3.0]),
            Err(SurveyWaveError::TooFewLevels { .. })
        ));
        assert!(matches!(
            SurveyWave::new("s", 1974, vec![1.0, -2.0]),
            Err(SurveyWaveError::InvalidCount { level: 1, .. })
        ));
        assert!(matches!(
            SurveyWave::new("s", 1974, vec![1.0, f64::NAN]),
            Err(SurveyWaveError::InvalidCount { .. })
        ));
        assert!(matches!(
            SurveyWave::new("s", 1974, vec![0.0, 0.0]),
            Err(SurveyWaveError::NoRespondents { .. })
        ));
    }

    #[test]
    fn single_series_reduces_to_baseline_differences() {
        let means = [(1974, 0.10), (1975, 0.25), (1976, -0.05), (1977, 0.40)];
        let waves: Vec<SurveyWave> = means
            .iter()
            .map(|&(year, value)| wave_with_mean("gss", year, value))
            .collect();
        let result = harmonize(&waves, &options(0)).unwrap();
        assert_eq!(result.opinion.value(1974), Some(0.0));
        for &(year, value) in &means {
            assert_relative_eq!(
                result.opinion.value(year).unwrap(),
                value - 0.10,
                epsilon = 1e-9
            );
        }
        assert_eq!(result.calibrations.len(), 1);
        assert_relative_eq!(result.calibrations[0].a, 1.0, epsilon = 1e-9);
    }

    #[test]
    fn baseline_year_is_exactly_zero() {
        let waves = vec![
            wave_with_mean("a", 1974, 0.123),
            wave_with_mean("a", 1975, 0.456),
            wave_with_mean("a", 1976, -0.2),
        ];
        let result = harmonize(&waves, &options(0)).unwrap();
        assert_eq!(result.opinion.value(1974), Some(0.0));
    }

    /// Smooth latent series within [−0.45, 0.45] so the shifted values stay
    /// inside [−1, 1].
    fn latent(year: i32) -> f64 {
        0.4 * ((year - 1974) as f64 * 0.6).sin()
    }

    fn two_series_waves(a: [f64; 2], b: [f64; 2]) -> Vec<SurveyWave> {
        let mut waves = Vec::new();
        for year in 1974..=1981 {
            waves.push(wave_with_mean("s1", year, a[0] * latent(year) + b[0]));
        }
        for year in 1980..=1986 {
            waves.push(wave_with_mean("s2", year, a[1] * latent(year) + b[1]));
        }
        waves
    }

    #[test]
    fn two_series_noise_free_recovery() {
        let waves = two_series_waves([1.0, 0.5], [0.0, 0.1]);
        let result = harmonize(&waves, &options(0)).unwrap();
        for year in 1974..=1986 {
            let expected = latent(year) - latent(1974);
            assert!(
                (result.opinion.value(year).unwrap() - expected).abs() < 1e-6,
                "year {year}"
            );
        }
        let cal: std::collections::HashMap<_, _> = result
            .calibrations
            .iter()
            .map(|c| (c.series_id.as_str(), (c.a, c.b)))
            .collect();
        assert_relative_eq!(cal["s1"].0, 1.0, epsilon = 1e-6);
        assert_relative_eq!(cal["s2"].0, 0.5, epsilon = 1e-6);
        assert!(result.warnings.is_empty());
    }

    #[test]
    fn affine_reexpression_of_one_series_leaves_mu_unchanged() {
        let baseline = harmonize(&two_series_waves([1.0, 0.5], [0.0, 0.1]), &options(0)).unwrap();
        // Re-express series 2 as 0.5·(old mean) + 0.2, i.e. a₂' = 0.25,
        // b₂' = 0.25. The latent series is unchanged.
        let reexpressed =
            harmonize(&two_series_waves([1.0, 0.25], [0.0, 0.25]), &options(0)).unwrap();
        for (p, q) in baseline.opinion.points.iter().zip(&reexpressed.opinion.points) {
            assert_eq!(p.year, q.year);
            assert!((p.mu - q.mu).abs() < 1e-6, "year {}", p.year);
        }
    }

    #[test]
    fn disconnected_overlap_graph_lists_components() {
        let waves = vec![
            wave_with_mean("a", 1974, 0.1),
            wave_with_mean("a", 1975, 0.2),
            wave_with_mean("b", 1980, 0.3),
            wave_with_mean("b", 1981, 0.4),
        ];
        match harmonize(&waves, &options(0)).unwrap_err() {
            HarmonizeError::DisconnectedOverlap(components) => {
                assert_eq!(components, vec![vec!["a".to_string()], vec!["b".to_string()]]);
            }
            other => panic!("unexpected error: {other}"),
        }
    }

    #[test]
    fn missing_baseline_year_is_fatal() {
        let waves = vec![wave_with_mean("a", 1975, 0.1), wave_with_mean("a", 1976, 0.2)];
        assert!(matches!(
            harmonize(&waves, &options(0)),
            Err(HarmonizeError::BaselineYearMissing(1974))
        ));
        assert!(matches!(
            harmonize(&[], &options(0)),
            Err(HarmonizeError::NoWaves)
        ));
    }

    #[test]
    fn negatively_calibrated_series_is_reported_as_inverted() {
        let mut waves = Vec::new();
        for year in 1974..=1981 {
            waves.push(wave_with_mean("s1", year, latent(year)));
        }
        for year in 1979..=1986 {
            waves.push(wave_with_mean("s2", year, -0.5 * latent(year) + 0.1));
        }
        match harmonize(&waves, &options(0)).unwrap_err() {
            HarmonizeError::InvertedSeries { series_id, a } => {
                assert_eq!(series_id, "s2");
                assert!(a <= COLLAPSED_SLOPE, "slope {a} should have collapsed");
            }
            other => panic!("unexpected error: {other}"),
        }
    }

    #[test]
    fn out_of_range_values_clamp_with_a_warning() {
        // Single series: μ(1980) = 0.9 − (−0.9) = 1.8, far outside [−1, 1].
        let waves = vec![
            wave_with_mean("a", 1974, -0.9),
            wave_with_mean("a", 1980, 0.9),
        ];
        let result = harmonize(&waves, &options(0)).unwrap();
        assert_eq!(result.opinion.value(1980), Some(1.0));
        assert!(result.warnings.iter().any(|w| w.contains("1980")));
    }

    /// Deterministic noisy waves: latent value plus a small hash-based
    /// perturbation, several waves per (series, year) so resampling varies.
    fn noisy_waves(per_year: usize) -> Vec<SurveyWave> {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut waves = Vec::new();
        for year in 1974..=1983 {
            for _ in 0..per_year {
                let noise = rng.random_range(-0.05..0.05);
                waves.push(wave_with_mean("a", year, latent(year) + noise));
            }
        }
        waves
    }

    #[test]
    fn bootstrap_is_deterministic_and_brackets_the_estimate() {
        let waves = noisy_waves(5);
        let first = harmonize(&waves, &options(200)).unwrap();
        let second = harmonize(&waves, &options(200)).unwrap();
        assert_eq!(first, second);
        for point in &first.opinion.points {
            assert!(point.ci_low <= point.mu + 1e-12, "year {}", point.year);
            assert!(point.ci_high >= point.mu - 1e-12, "year {}", point.year);
        }
        // Baseline anchoring makes the baseline CI degenerate at zero.
        let base = first.opinion.points.iter().find(|p| p.year == 1974).unwrap();
        assert_eq!((base.ci_low, base.ci_high), (0.0, 0.0));
    }

    #[test]
    fn intervals_shrink_with_more_waves() {
        let small = harmonize(&noisy_waves(4), &options(200)).unwrap();
        let large = harmonize(&noisy_waves(16), &options(200)).unwrap();
        let width = |r: &HarmonizeResult| {
            r.opinion
                .points
                .iter()
                .map(|p| p.ci_high - p.ci_low)
                .sum::<f64>()
        };
        assert!(width(&large) < width(&small));
    }

    #[test]
    fn zero_replicates_degenerate_to_point_intervals() {
        let waves = vec![wave_with_mean("a", 1974, 0.0), wave_with_mean("a", 1975, 0.3)];
        let result = harmonize(&waves, &options(0)).unwrap();
        for p in &result.opinion.points {
            assert_eq!(p.ci_low, p.mu);
            assert_eq!(p.ci_high, p.mu);
        }
    }
}
