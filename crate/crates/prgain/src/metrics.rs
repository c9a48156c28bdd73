//! Quantifies a run along three axes: privacy achieved, information loss,
//! and execution time.

use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::anonymizer::{AnonymizationResult, ResidualPolicy};
use crate::hierarchy::QuasiIdentifier;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    /// Fraction of the data set released inside a group of size >= k.
    pub privacy_achieved: f64,
    /// Mean generalization-height ratio across released cells, in [0, 1].
    pub precision_loss: f64,
    /// Sum of squared group sizes plus residual_count * total.
    pub discernibility: u64,
    pub residual_count: usize,
    pub wall_time_ms: u64,
    pub iterations: usize,
    pub branch_count_peak: usize,
}

/// Fraction of tuples that made it into a released group.
pub fn privacy_achieved(result: &AnonymizationResult) -> f64 {
    result.anonymized_count() as f64 / result.total as f64
}

/// Mean over every quasi-identifier cell of (level used / max level).
/// Residual tuples count at max level under `drop` and `suppress`, and at
/// the branch's final level under `keep`.
pub fn precision_loss(
    result: &AnonymizationResult,
    qis: &[QuasiIdentifier],
    policy: ResidualPolicy,
) -> f64 {
    if result.total == 0 || qis.is_empty() {
        return 0.0;
    }
    let max_levels: Vec<f64> = qis
        .iter()
        .map(|q| q.hierarchy.max_level() as f64)
        .collect();
    let tuple_ratio = |levels: &[usize]| -> f64 {
        levels
            .iter()
            .zip(&max_levels)
            .map(|(&l, &m)| l as f64 / m)
            .sum::<f64>()
    };
    let mut ratio_sum = 0.0;
    for group in &result.groups {
        ratio_sum += group.member_ids.len() as f64 * tuple_ratio(group.vector.levels());
    }
    let residual_ratio = match policy {
        ResidualPolicy::Drop | ResidualPolicy::Suppress => qis.len() as f64,
        ResidualPolicy::Keep => tuple_ratio(result.final_vector.levels()),
    };
    ratio_sum += result.residual_ids.len() as f64 * residual_ratio;
    ratio_sum / (result.total * qis.len()) as f64
}

/// Σ |group|^2 + residual_count * total. Lower is better utility.
pub fn discernibility(result: &AnonymizationResult) -> u64 {
    let groups: u64 = result
        .groups
        .iter()
        .map(|g| (g.member_ids.len() as u64).pow(2))
        .sum();
    groups + result.residual_ids.len() as u64 * result.total as u64
}

/// Assembles the full report for one run.
pub fn summarize(
    result: &AnonymizationResult,
    qis: &[QuasiIdentifier],
    policy: ResidualPolicy,
    wall_time: Duration,
) -> MetricsReport {
    MetricsReport {
        privacy_achieved: privacy_achieved(result),
        precision_loss: precision_loss(result, qis, policy),
        discernibility: discernibility(result),
        residual_count: result.residual_ids.len(),
        wall_time_ms: wall_time.as_millis() as u64,
        iterations: result.trace.len(),
        branch_count_peak: result.branch_count_peak,
    }
}
