use serde::{Deserialize, Serialize};

use super::config::{ExperimentConfig, ExperimentKind};
use crate::estimators::BoundKind;

/// Bins never exceed this count, whatever Freedman-Diaconis asks for.
pub const MAX_BINS: usize = 1000;

/// Bounds are only asserted from this target dimension upward.
pub const ASSERT_MIN_N: usize = 100;

/// Assertion slack, in binomial standard deviations.
pub const BINOMIAL_SLACK: f64 = 3.0;

/// JSON has no infinities; serde_json writes them as `null`, read back here.
fn infinite_if_null<'de, D: serde::Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
    Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::INFINITY))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial_index: u64,
    pub measured: f64,
    pub estimate: f64,
    pub deviation: f64,
    pub seed_used: u64,
}

impl TrialRecord {
    pub fn new(trial_index: u64, seed_used: u64, measured: f64, estimate: f64) -> Self {
        TrialRecord {
            trial_index,
            measured,
            estimate,
            deviation: (measured - estimate).abs(),
            seed_used,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    /// `counts.len() + 1` edges.
    pub edges: Vec<f64>,
    pub counts: Vec<u64>,
}

impl Histogram {
    /// Equal-width histogram over the sample range. Width follows
    /// Freedman-Diaconis (`2·IQR·T^{-1/3}`) unless `bins` is given; a sample
    /// with (numerically) no spread becomes a single bin.
    pub fn build(values: &[f64], bins: Option<usize>) -> Self {
        if values.is_empty() {
            return Histogram {
                edges: vec![0.0, 0.0],
                counts: vec![0],
            };
        }
        let mut sorted = values.to_vec();
        sorted.sort_by(f64::total_cmp);
        let lo = sorted[0];
        let hi = sorted[sorted.len() - 1];
        let range = hi - lo;
        let spike = !(range > 1e-9 * hi.abs().max(lo.abs()).max(1.0));
        let count = if spike {
            1
        } else if let Some(b) = bins {
            b.clamp(1, MAX_BINS)
        } else {
            let iqr = quantile(&sorted, 0.75) - quantile(&sorted, 0.25);
            let width = 2.0 * iqr / (values.len() as f64).cbrt();
            if width > 0.0 {
                ((range / width).ceil() as usize).clamp(1, MAX_BINS)
            } else {
                1
            }
        };
        let edges: Vec<f64> = (0..=count)
            .map(|k| if k == count { hi } else { lo + range * k as f64 / count as f64 })
            .collect();
        let mut counts = vec![0u64; count];
        for &v in values {
            let idx = if count == 1 {
                0
            } else {
                (((v - lo) / range * count as f64) as usize).min(count - 1)
            };
            counts[idx] += 1;
        }
        Histogram { edges, counts }
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// Centre of the fullest bin.
    pub fn mode_center(&self) -> f64 {
        let (idx, _) = self
            .counts
            .iter()
            .enumerate()
            .fold((0, 0), |best, (i, &c)| if c > best.1 { (i, c) } else { best });
        0.5 * (self.edges[idx] + self.edges[idx + 1])
    }
}

/// Linear-interpolation quantile of sorted data.
pub(crate) fn quantile(sorted: &[f64], p: f64) -> f64 {
    let pos = p * (sorted.len() - 1) as f64;
    let i = pos.floor() as usize;
    let frac = pos - i as f64;
    match sorted.get(i + 1) {
        Some(next) => sorted[i] + frac * (next - sorted[i]),
        None => sorted[i],
    }
}

/// Sample mean and (unbiased) standard deviation, summed in index order.
pub(crate) fn mean_std(values: &[f64]) -> (f64, f64) {
    let t = values.len() as f64;
    if values.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let mean = values.iter().sum::<f64>() / t;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (t - 1.0);
    (mean, var.sqrt())
}

/// One deviation event evaluated at one `ε`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpsilonRow {
    pub epsilon: f64,
    pub threshold_kind: BoundKind,
    /// Absolute threshold on `|measured − estimate|`; relative distortion for RIP rows.
    pub deviation_threshold: f64,
    pub violations: u64,
    pub empirical_violation: f64,
    /// Upper bound on the violation probability (failure mass for RIP rows).
    #[serde(deserialize_with = "infinite_if_null")]
    pub theoretical_bound: f64,
    pub vacuous: bool,
    /// Whether this row takes part in the pass/fail verdict.
    pub asserted: bool,
    pub passed: Option<bool>,
}

impl EpsilonRow {
    pub fn evaluate(
        epsilon: f64,
        threshold_kind: BoundKind,
        deviation_threshold: f64,
        violations: u64,
        trials: u64,
        theoretical_bound: f64,
        n: usize,
    ) -> Self {
        let vacuous = !(theoretical_bound < 1.0);
        let empirical_violation = violations as f64 / trials as f64;
        let asserted = !vacuous && n >= ASSERT_MIN_N;
        let passed = asserted.then(|| {
            let slack = BINOMIAL_SLACK
                * (theoretical_bound * (1.0 - theoretical_bound) / trials as f64).sqrt();
            empirical_violation <= theoretical_bound + slack
        });
        EpsilonRow {
            epsilon,
            threshold_kind,
            deviation_threshold,
            violations,
            empirical_violation,
            theoretical_bound,
            vacuous,
            asserted,
            passed,
        }
    }

    /// Empirical frequency of the complementary (success) event.
    pub fn empirical_success(&self) -> f64 {
        1.0 - self.empirical_violation
    }
}

/// Sample moments against closed-form ones.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentCheck {
    pub expected_mean: f64,
    pub expected_variance: f64,
    pub sample_mean: f64,
    pub sample_variance: f64,
    /// `(sample_mean − expected_mean) / (sample_std / √T)`.
    #[serde(deserialize_with = "infinite_if_null")]
    pub mean_z: f64,
}

/// Parameters of one grid cell, echoed into its summary.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct CellInfo {
    #[serde(rename = "N", skip_serializing_if = "Option::is_none")]
    pub ambient_dim: Option<usize>,
    pub n: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d1: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d2: Option<usize>,
    #[serde(rename = "L", skip_serializing_if = "Option::is_none")]
    pub set_size: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub affinity_sq: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub distance_sq: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cosines: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub omega: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSummary {
    pub kind: ExperimentKind,
    pub cell: CellInfo,
    pub trials: u64,
    /// What `measured` holds, e.g. `"aff_y_sq"`.
    pub statistic: String,
    pub mean: f64,
    pub std: f64,
    /// Closed-form centre the statistic is compared against.
    pub estimate: f64,
    /// `(mean − estimate) / (std / √T)`; zero when the sample has no spread.
    #[serde(deserialize_with = "infinite_if_null")]
    pub centering_z: f64,
    pub histogram: Histogram,
    pub per_epsilon: Vec<EpsilonRow>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub moments: Option<MomentCheck>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub records: Option<Vec<TrialRecord>>,
    pub wall_time_secs: f64,
}

impl ExperimentSummary {
    pub fn failed_rows(&self) -> impl Iterator<Item = &EpsilonRow> {
        self.per_epsilon.iter().filter(|r| r.passed == Some(false))
    }

    pub fn all_passed(&self) -> bool {
        self.failed_rows().next().is_none()
    }
}

/// Everything one config produced.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub config: ExperimentConfig,
    pub cells: Vec<ExperimentSummary>,
    pub all_passed: bool,
    pub wall_time_secs: f64,
}
