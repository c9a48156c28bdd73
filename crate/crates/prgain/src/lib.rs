//! Privacy-gain driven multi-iterative k-anonymization for tabular microdata.
//!
//! The toolkit generalizes quasi-identifier columns level by level along
//! per-attribute hierarchies, greedily picking the candidate that turns the
//! largest share of the remaining records k-anonymous (the privacy gain),
//! branching on ties. Records are released at the level where their group
//! first reached size k (local recoding). A categorical Naive Bayes
//! classifier quantifies how much utility the anonymized release retains.

pub mod anonymizer;
pub mod classifier;
pub mod cli;
pub mod config;
pub mod hierarchy;
pub mod metrics;
pub mod model;
pub mod report;

#[cfg(test)]
pub(crate) mod testutil;

pub use anonymizer::{
    anonymize, equivalence_classes, prgain, score_candidates, split_k_anonymous,
    verify_k_anonymity, AnonymizationResult, AnonymizeError, EquivalenceClass, ResidualPolicy,
    SearchOptions,
};
pub use classifier::{classify, evaluate, train, utility_report, NaiveBayesModel, UtilityReport};
pub use config::{parse_config, ConfigError, RunConfig};
pub use hierarchy::{
    validate_hierarchy, GeneralizationHierarchy, GeneralizationVector, HierarchyError,
    QuasiIdentifier,
};
pub use metrics::{discernibility, precision_loss, privacy_achieved, summarize, MetricsReport};
pub use model::{
    drop_identifiers, load_table, write_table, AttributeRole, AttributeSchema, ModelError, Table,
};
