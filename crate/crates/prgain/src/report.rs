//! The machine-readable JSON report emitted by the anonymize command.

use serde::{Deserialize, Serialize};

use crate::anonymizer::{AnonymizationResult, BranchSummary};
use crate::metrics::MetricsReport;

/// One iteration of the winning branch, in machine form: the vector chosen,
/// the cumulative gain, and the sizes of the classes released at that step.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceEntry {
    pub vector: Vec<usize>,
    pub prgain: f64,
    pub newly_anonymized: usize,
    pub emitted_class_sizes: Vec<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunReport {
    pub k: usize,
    pub q: usize,
    pub privacy_achieved: f64,
    pub precision_loss: f64,
    pub discernibility: u64,
    pub residual_count: usize,
    pub wall_time_ms: u64,
    pub iterations: usize,
    pub branch_count_peak: usize,
    pub residual_policy: String,
    pub trace: Vec<TraceEntry>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub branches: Option<Vec<BranchSummary>>,
}

impl RunReport {
    pub fn new(
        result: &AnonymizationResult,
        metrics: &MetricsReport,
        q: usize,
        residual_policy: String,
    ) -> Self {
        let trace = result
            .trace
            .iter()
            .map(|rec| TraceEntry {
                vector: rec.chosen_vector.levels().to_vec(),
                prgain: rec.prgain,
                newly_anonymized: rec.newly_anonymized.len(),
                emitted_class_sizes: rec
                    .emitted_classes
                    .iter()
                    .map(|c| c.member_ids.len())
                    .collect(),
            })
            .collect();
        Self {
            k: result.k,
            q,
            privacy_achieved: metrics.privacy_achieved,
            precision_loss: metrics.precision_loss,
            discernibility: metrics.discernibility,
            residual_count: metrics.residual_count,
            wall_time_ms: metrics.wall_time_ms,
            iterations: metrics.iterations,
            branch_count_peak: metrics.branch_count_peak,
            residual_policy,
            trace,
            branches: result.explored_branches.clone(),
        }
    }

    pub fn to_json_pretty(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}
