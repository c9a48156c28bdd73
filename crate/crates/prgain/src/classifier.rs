//! Categorical Naive Bayes with Laplace smoothing, used to compare the
//! classification utility of a table before and after anonymization.
//!
//! Every attribute is treated as a categorical string. Interval-hierarchy
//! columns can be pre-binned with [`bin_interval_columns`] so raw and
//! generalized tables are compared under the same feature space.

use std::collections::BTreeMap;
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::hierarchy::{generalize, GeneralizationHierarchy, QuasiIdentifier};
use crate::model::Table;

#[derive(Debug, thiserror::Error)]
pub enum ClassifierError {
    #[error("table has no rows")]
    EmptyTable,
    #[error("attribute '{0}' not found")]
    MissingAttribute(String),
    #[error("smoothing alpha must be positive, got {0}")]
    BadAlpha(f64),
    #[error("split fraction must be in (0, 1], got {0}")]
    BadSplit(f64),
    #[error("test partition is empty")]
    EmptyTestPartition,
    #[error("training partition is empty")]
    EmptyTrainPartition,
}

/// Per-feature statistics: vocabulary plus smoothed conditionals.
#[derive(Debug, Clone)]
pub struct FeatureStats {
    pub attribute: String,
    /// Distinct values seen in training, sorted.
    pub vocabulary: Vec<String>,
    /// conditionals[value][label] = P(value | label), Laplace-smoothed.
    pub conditionals: BTreeMap<String, BTreeMap<String, f64>>,
}

#[derive(Debug, Clone)]
pub struct NaiveBayesModel {
    pub class_attr: String,
    pub smoothing_alpha: f64,
    /// Distinct class labels, sorted.
    pub labels: Vec<String>,
    pub label_counts: BTreeMap<String, usize>,
    pub class_priors: BTreeMap<String, f64>,
    /// Features in training-table column order (class column excluded).
    pub features: Vec<FeatureStats>,
}

impl NaiveBayesModel {
    /// Smoothed probability mass used for values never seen with any label.
    fn unseen_floor(&self, label: &str, vocab_size: usize) -> f64 {
        let n_label = self.label_counts[label] as f64;
        self.smoothing_alpha / (n_label + self.smoothing_alpha * (vocab_size as f64 + 1.0))
    }
}

/// Trains on every non-class column of the table.
///
/// prior(label) = (count(label) + alpha) / (N + alpha * L)
/// P(v | label) = (count(v, label) + alpha) / (count(label) + alpha * |vocab|)
pub fn train(table: &Table, class_attr: &str, alpha: f64) -> Result<NaiveBayesModel, ClassifierError> {
    if table.n_rows() == 0 {
        return Err(ClassifierError::EmptyTable);
    }
    if alpha <= 0.0 {
        return Err(ClassifierError::BadAlpha(alpha));
    }
    let class_col = table
        .column_index(class_attr)
        .ok_or_else(|| ClassifierError::MissingAttribute(class_attr.to_string()))?;

    let mut label_counts: BTreeMap<String, usize> = BTreeMap::new();
    for row in &table.rows {
        *label_counts.entry(row[class_col].clone()).or_default() += 1;
    }
    let labels: Vec<String> = label_counts.keys().cloned().collect();
    let n = table.n_rows() as f64;
    let l = labels.len() as f64;
    let class_priors: BTreeMap<String, f64> = label_counts
        .iter()
        .map(|(label, &c)| (label.clone(), (c as f64 + alpha) / (n + alpha * l)))
        .collect();

    let mut features = Vec::new();
    for (col, attr) in table.schema.iter().enumerate() {
        if col == class_col {
            continue;
        }
        let mut value_label_counts: BTreeMap<String, BTreeMap<String, usize>> = BTreeMap::new();
        for row in &table.rows {
            *value_label_counts
                .entry(row[col].clone())
                .or_default()
                .entry(row[class_col].clone())
                .or_default() += 1;
        }
        let vocabulary: Vec<String> = value_label_counts.keys().cloned().collect();
        let vocab = vocabulary.len() as f64;
        let mut conditionals: BTreeMap<String, BTreeMap<String, f64>> = BTreeMap::new();
        for value in &vocabulary {
            let per_label = conditionals.entry(value.clone()).or_default();
            for label in &labels {
                let count = value_label_counts[value].get(label).copied().unwrap_or(0) as f64;
                let n_label = label_counts[label] as f64;
                per_label.insert(
                    label.clone(),
                    (count + alpha) / (n_label + alpha * vocab),
                );
            }
        }
        features.push(FeatureStats {
            attribute: attr.name.clone(),
            vocabulary,
            conditionals,
        });
    }

    Ok(NaiveBayesModel {
        class_attr: class_attr.to_string(),
        smoothing_alpha: alpha,
        labels,
        label_counts,
        class_priors,
        features,
    })
}

/// Classifies one tuple given as feature values aligned with
/// `model.features`. Returns the winning label (ties go to the
/// lexicographically smaller one) and the log-posterior per label.
pub fn classify(model: &NaiveBayesModel, values: &[&str]) -> (String, BTreeMap<String, f64>) {
    assert_eq!(values.len(), model.features.len());
    let mut log_posteriors = BTreeMap::new();
    for label in &model.labels {
        let mut lp = model.class_priors[label].ln();
        for (feature, &value) in model.features.iter().zip(values) {
            let p = feature
                .conditionals
                .get(value)
                .map(|per_label| per_label[label])
                .unwrap_or_else(|| model.unseen_floor(label, feature.vocabulary.len()));
            lp += p.ln();
        }
        log_posteriors.insert(label.clone(), lp);
    }
    let best = log_posteriors
        .iter()
        .fold(None::<(&String, f64)>, |acc, (label, &lp)| match acc {
            Some((_, best_lp)) if lp <= best_lp => acc,
            _ => Some((label, lp)),
        })
        .map(|(label, _)| label.clone())
        .expect("at least one label");
    (best, log_posteriors)
}

fn feature_values<'a>(table: &'a Table, columns: &[usize], row: usize) -> Vec<&'a str> {
    columns.iter().map(|&c| table.rows[row][c].as_str()).collect()
}

fn accuracy_of_split(
    table: &Table,
    class_attr: &str,
    train_ids: &[usize],
    test_ids: &[usize],
    alpha: f64,
) -> Result<(f64, u64), ClassifierError> {
    if train_ids.is_empty() {
        return Err(ClassifierError::EmptyTrainPartition);
    }
    if test_ids.is_empty() {
        return Err(ClassifierError::EmptyTestPartition);
    }
    let train_table = Table {
        schema: table.schema.clone(),
        rows: train_ids.iter().map(|&i| table.rows[i].clone()).collect(),
    };
    let started = Instant::now();
    let model = train(&train_table, class_attr, alpha)?;
    let train_ms = started.elapsed().as_millis() as u64;

    let class_col = table
        .column_index(class_attr)
        .ok_or_else(|| ClassifierError::MissingAttribute(class_attr.to_string()))?;
    let feature_cols: Vec<usize> = (0..table.n_cols()).filter(|&c| c != class_col).collect();

    let mut correct = 0usize;
    for &id in test_ids {
        let values = feature_values(table, &feature_cols, id);
        let (predicted, _) = classify(&model, &values);
        if predicted == table.rows[id][class_col] {
            correct += 1;
        }
    }
    Ok((100.0 * correct as f64 / test_ids.len() as f64, train_ms))
}

/// Shuffles rows with the seeded generator, trains on the first
/// `split_fraction`, tests on the rest, and returns the accuracy percentage.
/// `split_fraction = 1.0` trains and tests on the full table
/// (resubstitution).
pub fn evaluate(
    table: &Table,
    class_attr: &str,
    split_fraction: f64,
    seed: u64,
) -> Result<f64, ClassifierError> {
    evaluate_timed(table, class_attr, split_fraction, seed).map(|(acc, _)| acc)
}

/// Like [`evaluate`], also reporting the model build time in milliseconds.
pub fn evaluate_timed(
    table: &Table,
    class_attr: &str,
    split_fraction: f64,
    seed: u64,
) -> Result<(f64, u64), ClassifierError> {
    if !(split_fraction > 0.0 && split_fraction <= 1.0) {
        return Err(ClassifierError::BadSplit(split_fraction));
    }
    if table.n_rows() == 0 {
        return Err(ClassifierError::EmptyTable);
    }
    let n = table.n_rows();
    if (split_fraction - 1.0).abs() < f64::EPSILON {
        let all: Vec<usize> = (0..n).collect();
        return accuracy_of_split(table, class_attr, &all, &all, 1.0);
    }
    let mut ids: Vec<usize> = (0..n).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    ids.shuffle(&mut rng);
    let train_count = (n as f64 * split_fraction).floor() as usize;
    let (train_ids, test_ids) = ids.split_at(train_count.min(n));
    accuracy_of_split(table, class_attr, train_ids, test_ids, 1.0)
}

/// Side-by-side utility comparison of an original table and its anonymized
/// release under one protocol (same seed, same split fraction).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UtilityReport {
    pub class_attr: String,
    pub seed: u64,
    pub split: f64,
    pub original_accuracy: f64,
    pub anonymized_accuracy: f64,
    /// original minus anonymized, in percentage points.
    pub delta: f64,
    pub original_train_ms: u64,
    pub anonymized_train_ms: u64,
}

pub fn utility_report(
    original: &Table,
    anonymized: &Table,
    class_attr: &str,
    seed: u64,
    split: f64,
) -> Result<UtilityReport, ClassifierError> {
    for t in [original, anonymized] {
        if t.column_index(class_attr).is_none() {
            return Err(ClassifierError::MissingAttribute(class_attr.to_string()));
        }
    }
    let (original_accuracy, original_train_ms) =
        evaluate_timed(original, class_attr, split, seed)?;
    let (anonymized_accuracy, anonymized_train_ms) =
        evaluate_timed(anonymized, class_attr, split, seed)?;
    Ok(UtilityReport {
        class_attr: class_attr.to_string(),
        seed,
        split,
        original_accuracy,
        anonymized_accuracy,
        delta: original_accuracy - anonymized_accuracy,
        original_train_ms,
        anonymized_train_ms,
    })
}

/// Replaces numeric cells of interval-hierarchy quasi-identifier columns with
/// their level-1 bin label, leaving already-generalized cells untouched.
/// Applying this to both sides puts the original and the anonymized table in
/// the same feature space before training.
pub fn bin_interval_columns(table: &Table, qis: &[QuasiIdentifier]) -> Table {
    let mut out = table.clone();
    for qi in qis {
        if let GeneralizationHierarchy::Interval { .. } = qi.hierarchy {
            for row in &mut out.rows {
                if let Ok(binned) = generalize(&row[qi.column], &qi.hierarchy, 1) {
                    row[qi.column] = binned;
                }
            }
        }
    }
    out
}
