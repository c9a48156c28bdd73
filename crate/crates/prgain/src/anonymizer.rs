//! The privacy-gain driven multi-iterative search.
//!
//! Starting from raw data, every iteration raises one quasi-identifier by one
//! level, scores each candidate by the share of the data set that would be
//! k-anonymous after applying it, and keeps every candidate that attains the
//! maximum (ties branch). Groups reaching size k are frozen at the vector
//! where they qualified and removed from further consideration, so later
//! iterations rescan only the still-unanonymized remainder.

use std::collections::{BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::hierarchy::{
    generalize, validate_hierarchy, GeneralizationVector, HierarchyError, QuasiIdentifier,
};
use crate::model::{Table, TupleId};

#[derive(Debug, thiserror::Error)]
pub enum AnonymizeError {
    #[error("anonymization is not possible: {rows} rows with k = {k}")]
    NotPossible { rows: usize, k: usize },
    #[error("k must be at least 2, got {k}")]
    KTooSmall { k: usize },
    #[error("no quasi-identifiers configured")]
    NoQuasiIdentifiers,
    #[error("hierarchy for '{name}' failed validation: {detail}")]
    InvalidHierarchy { name: String, detail: String },
    #[error("privacy gain domain violation: total {total}, unanonymized {unanonymized}, newly {newly}")]
    PrGainDomain {
        total: usize,
        unanonymized: usize,
        newly: usize,
    },
    #[error(transparent)]
    Hierarchy(#[from] HierarchyError),
}

/// Bookkeeping for one search branch: which tuples still need anonymizing and
/// where the branch currently sits in the lattice.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AnonymizationState {
    pub total: usize,
    pub unanonymized_ids: BTreeSet<TupleId>,
    pub anonymized_ids: BTreeSet<TupleId>,
    pub current_vector: GeneralizationVector,
}

impl AnonymizationState {
    pub fn initial(total: usize, qi_count: usize) -> Self {
        Self {
            total,
            unanonymized_ids: (0..total).collect(),
            anonymized_ids: BTreeSet::new(),
            current_vector: GeneralizationVector::zero(qi_count),
        }
    }
}

/// A maximal set of tuples sharing identical generalized quasi-identifier
/// values at some vector.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EquivalenceClass {
    pub key: Vec<String>,
    pub member_ids: Vec<TupleId>,
}

/// A released group: an equivalence class frozen at the vector where it
/// reached size k.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnonymizedGroup {
    pub key: Vec<String>,
    pub member_ids: Vec<TupleId>,
    pub vector: GeneralizationVector,
}

/// One step of the winning branch.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IterationRecord {
    pub chosen_vector: GeneralizationVector,
    /// Cumulative anonymized fraction after this step.
    pub prgain: f64,
    pub newly_anonymized: Vec<TupleId>,
    pub emitted_classes: Vec<EquivalenceClass>,
}

/// What to do with tuples that never reached a group of size k.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ResidualPolicy {
    /// Leave them out of the release (k-anonymity is guaranteed).
    #[default]
    Drop,
    /// Release them generalized at the branch's final vector.
    Keep,
    /// Release them with every quasi-identifier cell replaced by "*".
    Suppress,
}

impl std::str::FromStr for ResidualPolicy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "drop" => Ok(Self::Drop),
            "keep" => Ok(Self::Keep),
            "suppress" => Ok(Self::Suppress),
            other => Err(format!("unknown residual policy '{other}'")),
        }
    }
}

impl std::fmt::Display for ResidualPolicy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Self::Drop => "drop",
            Self::Keep => "keep",
            Self::Suppress => "suppress",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone)]
pub struct SearchOptions {
    /// Cap on live branches; `usize::MAX` disables the cap.
    pub max_branches: usize,
    pub residual_policy: ResidualPolicy,
    /// Record a summary of every terminal branch, not just the winner.
    pub keep_all_branches: bool,
}

impl Default for SearchOptions {
    fn default() -> Self {
        Self {
            max_branches: 64,
            residual_policy: ResidualPolicy::Drop,
            keep_all_branches: false,
        }
    }
}

/// Digest of one terminal branch, for debugging tie behaviour.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BranchSummary {
    pub history: Vec<GeneralizationVector>,
    pub final_prgain: f64,
    pub residual_count: usize,
}

/// Everything a run produces: the released groups, the leftovers, and the
/// iteration trace of the winning branch.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AnonymizationResult {
    pub k: usize,
    pub groups: Vec<AnonymizedGroup>,
    pub residual_ids: Vec<TupleId>,
    pub trace: Vec<IterationRecord>,
    pub final_prgain: f64,
    pub final_vector: GeneralizationVector,
    pub total: usize,
    pub branch_count_peak: usize,
    /// Present when the search ran with `keep_all_branches`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub explored_branches: Option<Vec<BranchSummary>>,
}

impl AnonymizationResult {
    pub fn anonymized_count(&self) -> usize {
        self.groups.iter().map(|g| g.member_ids.len()).sum()
    }
}

/// Partitions `ids` by their generalized quasi-identifier values at `v`.
/// Classes come back ordered by smallest member id; members ascend.
pub fn equivalence_classes(
    table: &Table,
    ids: &BTreeSet<TupleId>,
    v: &GeneralizationVector,
    qis: &[QuasiIdentifier],
) -> Result<Vec<EquivalenceClass>, HierarchyError> {
    let mut by_key: HashMap<Vec<String>, Vec<TupleId>> = HashMap::new();
    for &id in ids {
        let row = table.row(id);
        let mut key = Vec::with_capacity(qis.len());
        for (qi, &level) in qis.iter().zip(v.levels()) {
            key.push(generalize(&row[qi.column], &qi.hierarchy, level)?);
        }
        by_key.entry(key).or_default().push(id);
    }
    let mut classes: Vec<EquivalenceClass> = by_key
        .into_iter()
        .map(|(key, member_ids)| EquivalenceClass { key, member_ids })
        .collect();
    classes.sort_by_key(|c| c.member_ids[0]);
    Ok(classes)
}

/// Splits classes into those already k-anonymous and the ids of the rest.
pub fn split_k_anonymous(
    classes: Vec<EquivalenceClass>,
    k: usize,
) -> (Vec<EquivalenceClass>, BTreeSet<TupleId>) {
    let mut qualifying = Vec::new();
    let mut rest = BTreeSet::new();
    for class in classes {
        if class.member_ids.len() >= k {
            qualifying.push(class);
        } else {
            rest.extend(class.member_ids);
        }
    }
    (qualifying, rest)
}

/// The cumulative anonymized fraction if a candidate anonymizing
/// `newly_anonymized` of the `unanonymized_before` remaining tuples is
/// applied: (total - (unanonymized_before - newly_anonymized)) / total.
pub fn prgain(
    total: usize,
    unanonymized_before: usize,
    newly_anonymized: usize,
) -> Result<f64, AnonymizeError> {
    if total < 1 || unanonymized_before > total || newly_anonymized > unanonymized_before {
        return Err(AnonymizeError::PrGainDomain {
            total,
            unanonymized: unanonymized_before,
            newly: newly_anonymized,
        });
    }
    Ok((total - unanonymized_before + newly_anonymized) as f64 / total as f64)
}

/// One scored successor vector. `prgain` is `None` when the candidate
/// anonymizes nothing new (NIL).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Candidate {
    pub vector: GeneralizationVector,
    pub qualifying: Vec<EquivalenceClass>,
    pub newly_anonymized: Vec<TupleId>,
    pub prgain: Option<f64>,
}

impl Candidate {
    pub fn is_nil(&self) -> bool {
        self.newly_anonymized.is_empty()
    }
}

/// Scores every successor of the state's current vector over the
/// still-unanonymized tuples.
pub fn score_candidates(
    table: &Table,
    state: &AnonymizationState,
    qis: &[QuasiIdentifier],
    k: usize,
) -> Result<Vec<Candidate>, AnonymizeError> {
    let max_levels = QuasiIdentifier::max_levels(qis);
    let mut out = Vec::new();
    for vector in state.current_vector.successors(&max_levels) {
        let classes = equivalence_classes(table, &state.unanonymized_ids, &vector, qis)?;
        let (qualifying, _) = split_k_anonymous(classes, k);
        let newly_anonymized: Vec<TupleId> = qualifying
            .iter()
            .flat_map(|c| c.member_ids.iter().copied())
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        let gain = if newly_anonymized.is_empty() {
            None
        } else {
            Some(prgain(
                state.total,
                state.unanonymized_ids.len(),
                newly_anonymized.len(),
            )?)
        };
        out.push(Candidate {
            vector,
            qualifying,
            newly_anonymized,
            prgain: gain,
        });
    }
    Ok(out)
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn lcm(a: u64, b: u64) -> u64 {
    a / gcd(a, b) * b
}

/// Exact precision-loss accounting: one fully generalized cell costs
/// `unit_scale` units, a cell at level l of a hierarchy with max level m
/// costs l * unit_scale / m.
#[derive(Debug, Clone)]
struct LossScale {
    per_level: Vec<u64>,
    unit_scale: u64,
}

impl LossScale {
    fn new(max_levels: &[usize]) -> Self {
        let unit_scale = max_levels.iter().fold(1u64, |acc, &m| lcm(acc, m as u64));
        let per_level = max_levels
            .iter()
            .map(|&m| unit_scale / m as u64)
            .collect();
        Self {
            per_level,
            unit_scale,
        }
    }

    fn tuple_units(&self, v: &GeneralizationVector) -> u64 {
        v.levels()
            .iter()
            .zip(&self.per_level)
            .map(|(&l, &u)| l as u64 * u)
            .sum()
    }

    fn max_tuple_units(&self) -> u64 {
        self.unit_scale * self.per_level.len() as u64
    }
}

#[derive(Debug, Clone)]
struct Branch {
    vector: GeneralizationVector,
    unanonymized: BTreeSet<TupleId>,
    groups: Vec<AnonymizedGroup>,
    trace: Vec<IterationRecord>,
    history: Vec<GeneralizationVector>,
    loss_units: u64,
}

impl Branch {
    fn total_loss_units(&self, scale: &LossScale, policy: ResidualPolicy) -> u64 {
        let residual_units = match policy {
            ResidualPolicy::Drop | ResidualPolicy::Suppress => scale.max_tuple_units(),
            ResidualPolicy::Keep => scale.tuple_units(&self.vector),
        };
        self.loss_units + self.unanonymized.len() as u64 * residual_units
    }
}

/// Merge/prune ordering: lower accumulated loss first, then shorter trace,
/// then lexicographically smaller vector history.
fn branch_order(a: &Branch, b: &Branch) -> std::cmp::Ordering {
    a.loss_units
        .cmp(&b.loss_units)
        .then(a.trace.len().cmp(&b.trace.len()))
        .then(a.history.cmp(&b.history))
}

/// Runs the branching privacy-gain search and returns the best terminal
/// branch. Ties on the per-iteration maximum gain fork the search; iterations
/// where no candidate makes progress expand every successor instead
/// (plateau traversal), so the search only stops at the lattice top or when
/// everything is anonymized.
pub fn anonymize(
    table: &Table,
    qis: &[QuasiIdentifier],
    k: usize,
    options: &SearchOptions,
) -> Result<AnonymizationResult, AnonymizeError> {
    if qis.is_empty() {
        return Err(AnonymizeError::NoQuasiIdentifiers);
    }
    if k < 2 {
        return Err(AnonymizeError::KTooSmall { k });
    }
    let total = table.n_rows();
    if total < k {
        return Err(AnonymizeError::NotPossible { rows: total, k });
    }
    for qi in qis {
        let sample = table.distinct_values(qi.column);
        let report = validate_hierarchy(&qi.hierarchy, &sample);
        if !report.passed() {
            return Err(AnonymizeError::InvalidHierarchy {
                name: qi.name.clone(),
                detail: report.violations.join("; "),
            });
        }
    }

    let max_levels = QuasiIdentifier::max_levels(qis);
    let scale = LossScale::new(&max_levels);

    let mut frontier = vec![Branch {
        vector: GeneralizationVector::zero(qis.len()),
        unanonymized: (0..total).collect(),
        groups: Vec::new(),
        trace: Vec::new(),
        history: Vec::new(),
        loss_units: 0,
    }];
    let mut terminal: Vec<Branch> = Vec::new();
    let mut branch_count_peak = 1usize;

    while !frontier.is_empty() {
        let mut expanded: Vec<Branch> = Vec::new();
        for branch in frontier.drain(..) {
            if branch.unanonymized.is_empty()
                || branch.vector.successors(&max_levels).is_empty()
            {
                terminal.push(branch);
                continue;
            }
            let state = AnonymizationState {
                total,
                unanonymized_ids: branch.unanonymized.clone(),
                anonymized_ids: (0..total)
                    .filter(|id| !branch.unanonymized.contains(id))
                    .collect(),
                current_vector: branch.vector.clone(),
            };
            let candidates = score_candidates(table, &state, qis, k)?;
            let best_newly = candidates
                .iter()
                .map(|c| c.newly_anonymized.len())
                .max()
                .unwrap_or(0);
            let chosen: Vec<&Candidate> = if best_newly > 0 {
                candidates
                    .iter()
                    .filter(|c| c.newly_anonymized.len() == best_newly)
                    .collect()
            } else {
                candidates.iter().collect()
            };
            for cand in chosen {
                let mut child = branch.clone();
                let unanonymized_before = child.unanonymized.len();
                for id in &cand.newly_anonymized {
                    child.unanonymized.remove(id);
                }
                let gain = prgain(total, unanonymized_before, cand.newly_anonymized.len())?;
                let cell_units = scale.tuple_units(&cand.vector);
                for class in &cand.qualifying {
                    child.loss_units += class.member_ids.len() as u64 * cell_units;
                    child.groups.push(AnonymizedGroup {
                        key: class.key.clone(),
                        member_ids: class.member_ids.clone(),
                        vector: cand.vector.clone(),
                    });
                }
                child.trace.push(IterationRecord {
                    chosen_vector: cand.vector.clone(),
                    prgain: gain,
                    newly_anonymized: cand.newly_anonymized.clone(),
                    emitted_classes: cand.qualifying.clone(),
                });
                child.history.push(cand.vector.clone());
                child.vector = cand.vector.clone();
                expanded.push(child);
            }
        }

        // Branches arriving at the same lattice node with the same remainder
        // are interchangeable from here on; keep the best-ordered one.
        let mut merged: HashMap<(GeneralizationVector, Vec<TupleId>), Branch> = HashMap::new();
        for branch in expanded {
            let key = (
                branch.vector.clone(),
                branch.unanonymized.iter().copied().collect::<Vec<_>>(),
            );
            match merged.entry(key) {
                std::collections::hash_map::Entry::Vacant(e) => {
                    e.insert(branch);
                }
                std::collections::hash_map::Entry::Occupied(mut e) => {
                    if branch_order(&branch, e.get()) == std::cmp::Ordering::Less {
                        e.insert(branch);
                    }
                }
            }
        }
        let mut next: Vec<Branch> = merged.into_values().collect();
        next.sort_by(branch_order);
        branch_count_peak = branch_count_peak.max(next.len());
        if next.len() > options.max_branches {
            next.truncate(options.max_branches);
        }
        frontier = next;
    }

    let explored_branches = if options.keep_all_branches {
        let mut summaries: Vec<BranchSummary> = terminal
            .iter()
            .map(|b| BranchSummary {
                history: b.history.clone(),
                final_prgain: (total - b.unanonymized.len()) as f64 / total as f64,
                residual_count: b.unanonymized.len(),
            })
            .collect();
        summaries.sort_by(|a, b| {
            a.residual_count
                .cmp(&b.residual_count)
                .then_with(|| a.history.cmp(&b.history))
        });
        Some(summaries)
    } else {
        None
    };

    // Winner: most anonymized, then least precision loss, then smallest
    // final vector.
    let winner = terminal
        .into_iter()
        .min_by(|a, b| {
            a.unanonymized
                .len()
                .cmp(&b.unanonymized.len())
                .then_with(|| {
                    a.total_loss_units(&scale, options.residual_policy)
                        .cmp(&b.total_loss_units(&scale, options.residual_policy))
                })
                .then_with(|| a.vector.cmp(&b.vector))
                .then_with(|| a.history.cmp(&b.history))
        })
        .expect("search always yields at least one terminal branch");

    let anonymized: usize = winner.groups.iter().map(|g| g.member_ids.len()).sum();
    Ok(AnonymizationResult {
        k,
        final_prgain: anonymized as f64 / total as f64,
        residual_ids: winner.unanonymized.iter().copied().collect(),
        groups: winner.groups,
        trace: winner.trace,
        final_vector: winner.vector,
        total,
        branch_count_peak,
        explored_branches,
    })
}

/// Per-class verification outcome.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VerifyViolation {
    pub key: Vec<String>,
    pub size: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VerifyReport {
    pub k: usize,
    pub passed: bool,
    pub violations: Vec<VerifyViolation>,
}

/// Groups table rows by exact string equality of the quasi-identifier cells
/// and reports every class smaller than k.
pub fn verify_k_anonymity(table: &Table, qi_columns: &[usize], k: usize) -> VerifyReport {
    let mut by_key: HashMap<Vec<String>, Vec<TupleId>> = HashMap::new();
    for (id, row) in table.rows.iter().enumerate() {
        let key: Vec<String> = qi_columns.iter().map(|&c| row[c].clone()).collect();
        by_key.entry(key).or_default().push(id);
    }
    let mut violations: Vec<(TupleId, VerifyViolation)> = by_key
        .into_iter()
        .filter(|(_, members)| members.len() < k)
        .map(|(key, members)| {
            (
                members[0],
                VerifyViolation {
                    key,
                    size: members.len(),
                },
            )
        })
        .collect();
    violations.sort_by_key(|(first, _)| *first);
    let violations: Vec<VerifyViolation> = violations.into_iter().map(|(_, v)| v).collect();
    VerifyReport {
        k,
        passed: violations.is_empty(),
        violations,
    }
}

/// Verifies the groups of a result directly (residual ignored).
pub fn verify_result(result: &AnonymizationResult, k: usize) -> VerifyReport {
    let violations: Vec<VerifyViolation> = result
        .groups
        .iter()
        .filter(|g| g.member_ids.len() < k)
        .map(|g| VerifyViolation {
            key: g.key.clone(),
            size: g.member_ids.len(),
        })
        .collect();
    VerifyReport {
        k,
        passed: violations.is_empty(),
        violations,
    }
}

/// Assembles the released table: group members carry their frozen generalized
/// quasi-identifier values, every other cell is the source value, and rows
/// keep the original file order. Residual tuples are rendered per policy.
pub fn build_output_table(
    table: &Table,
    result: &AnonymizationResult,
    qis: &[QuasiIdentifier],
    policy: ResidualPolicy,
) -> Result<Table, AnonymizeError> {
    let mut frozen: HashMap<TupleId, &AnonymizedGroup> = HashMap::new();
    for group in &result.groups {
        for &id in &group.member_ids {
            frozen.insert(id, group);
        }
    }
    let residual: BTreeSet<TupleId> = result.residual_ids.iter().copied().collect();

    let mut rows = Vec::new();
    for (id, row) in table.rows.iter().enumerate() {
        if let Some(group) = frozen.get(&id) {
            let mut out = row.clone();
            for (qi, value) in qis.iter().zip(&group.key) {
                out[qi.column] = value.clone();
            }
            rows.push(out);
        } else if residual.contains(&id) {
            match policy {
                ResidualPolicy::Drop => {}
                ResidualPolicy::Keep => {
                    let mut out = row.clone();
                    for (qi, &level) in qis.iter().zip(result.final_vector.levels()) {
                        out[qi.column] = generalize(&row[qi.column], &qi.hierarchy, level)?;
                    }
                    rows.push(out);
                }
                ResidualPolicy::Suppress => {
                    let mut out = row.clone();
                    for qi in qis {
                        out[qi.column] = "*".to_string();
                    }
                    rows.push(out);
                }
            }
        }
    }
    Ok(Table {
        schema: table.schema.clone(),
        rows,
    })
}
