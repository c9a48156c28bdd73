//! Generalization hierarchies (dimension tables) and the level lattice.
//!
//! A hierarchy maps raw values to coarser values per level; level 0 is always
//! the raw value. Three kinds are supported:
//!
//! * `interval` — integer bins per level, each level-l bin nested in exactly
//!   one level-(l+1) bin;
//! * `category` — one map per level from the previous level's values (raw
//!   values are accepted as fallback keys) to coarser labels;
//! * `mask` — the last l characters are replaced by a mask character.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

#[derive(Debug, thiserror::Error)]
pub enum HierarchyError {
    #[error("level {level} exceeds max level {max}")]
    LevelOutOfRange { level: usize, max: usize },
    #[error("value '{value}' is not an integer (interval hierarchy)")]
    NotANumber { value: String },
    #[error("value '{value}' falls outside every bin at level {level}")]
    OutsideBins { value: String, level: usize },
    #[error("value '{value}' is not mapped at level {level}")]
    Unmapped { value: String, level: usize },
}

/// One integer bin, inclusive on both ends.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntervalBin {
    pub lo: i64,
    pub hi: i64,
    pub label: String,
}

/// A per-attribute dimension table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum GeneralizationHierarchy {
    Interval {
        /// levels[l-1] holds the bins of level l, ordered by lower bound.
        levels: Vec<Vec<IntervalBin>>,
    },
    Category {
        /// levels[l-1] maps level-(l-1) values to level-l values.
        levels: Vec<BTreeMap<String, String>>,
    },
    Mask {
        #[serde(default = "default_mask_char")]
        mask_char: char,
        max_level: usize,
    },
}

fn default_mask_char() -> char {
    '*'
}

impl GeneralizationHierarchy {
    pub fn interval(levels: Vec<Vec<IntervalBin>>) -> Self {
        Self::Interval { levels }
    }

    pub fn category(levels: Vec<BTreeMap<String, String>>) -> Self {
        Self::Category { levels }
    }

    pub fn mask(mask_char: char, max_level: usize) -> Self {
        Self::Mask {
            mask_char,
            max_level,
        }
    }

    pub fn max_level(&self) -> usize {
        match self {
            Self::Interval { levels } => levels.len(),
            Self::Category { levels } => levels.len(),
            Self::Mask { max_level, .. } => *max_level,
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            Self::Interval { .. } => "interval",
            Self::Category { .. } => "category",
            Self::Mask { .. } => "mask",
        }
    }
}

/// Generalizes one value to the given level. Level 0 returns the value
/// unchanged for every kind.
pub fn generalize(
    value: &str,
    h: &GeneralizationHierarchy,
    level: usize,
) -> Result<String, HierarchyError> {
    let max = h.max_level();
    if level > max {
        return Err(HierarchyError::LevelOutOfRange { level, max });
    }
    if level == 0 {
        return Ok(value.to_string());
    }
    match h {
        GeneralizationHierarchy::Interval { levels } => {
            let n: i64 = value
                .trim()
                .parse()
                .map_err(|_| HierarchyError::NotANumber {
                    value: value.to_string(),
                })?;
            let bins = &levels[level - 1];
            bins.iter()
                .find(|b| b.lo <= n && n <= b.hi)
                .map(|b| b.label.clone())
                .ok_or_else(|| HierarchyError::OutsideBins {
                    value: value.to_string(),
                    level,
                })
        }
        GeneralizationHierarchy::Category { levels } => {
            let mut current = value.to_string();
            for (i, map) in levels.iter().take(level).enumerate() {
                // Maps are keyed by the previous level's values; raw values
                // are accepted as fallback so mis-nested configs surface as
                // nesting violations during validation instead of lookup
                // failures.
                current = match map.get(&current).or_else(|| map.get(value)) {
                    Some(next) => next.clone(),
                    None => {
                        return Err(HierarchyError::Unmapped {
                            value: current,
                            level: i + 1,
                        })
                    }
                };
            }
            Ok(current)
        }
        GeneralizationHierarchy::Mask { mask_char, .. } => {
            let chars: Vec<char> = value.chars().collect();
            let keep = chars.len().saturating_sub(level);
            let mut out: String = chars[..keep].iter().collect();
            out.extend(std::iter::repeat(*mask_char).take(chars.len() - keep));
            Ok(out)
        }
    }
}

/// Outcome of [`validate_hierarchy`]: empty violation list means pass.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct ValidationReport {
    pub violations: Vec<String>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks the structural invariants of a hierarchy and, over the given sample
/// of raw values, the nesting invariant: equal images at level l must stay
/// equal at every level above l. Violations are data, not errors.
pub fn validate_hierarchy(h: &GeneralizationHierarchy, domain_sample: &[String]) -> ValidationReport {
    let mut report = ValidationReport::default();
    structural_checks(h, &mut report);
    if report.passed() {
        sample_checks(h, domain_sample, &mut report);
    }
    report
}

fn structural_checks(h: &GeneralizationHierarchy, report: &mut ValidationReport) {
    match h {
        GeneralizationHierarchy::Interval { levels } => {
            if levels.is_empty() {
                report.violations.push("interval hierarchy has no levels".into());
                return;
            }
            for (li, bins) in levels.iter().enumerate() {
                let level = li + 1;
                if bins.is_empty() {
                    report.violations.push(format!("level {level} has no bins"));
                    continue;
                }
                let mut labels = std::collections::HashSet::new();
                for b in bins {
                    if b.lo > b.hi {
                        report
                            .violations
                            .push(format!("level {level} bin '{}' has lo > hi", b.label));
                    }
                    if !labels.insert(b.label.as_str()) {
                        report
                            .violations
                            .push(format!("level {level} label '{}' appears twice", b.label));
                    }
                }
                for pair in bins.windows(2) {
                    if pair[1].lo != pair[0].hi + 1 {
                        report.violations.push(format!(
                            "level {level} bins '{}' and '{}' are not contiguous",
                            pair[0].label, pair[1].label
                        ));
                    }
                }
            }
            for li in 0..levels.len().saturating_sub(1) {
                let child_level = li + 1;
                for b in &levels[li] {
                    let parents = levels[li + 1]
                        .iter()
                        .filter(|p| p.lo <= b.lo && b.hi <= p.hi)
                        .count();
                    if parents != 1 {
                        report.violations.push(format!(
                            "level {child_level} bin '{}' is contained in {parents} level-{} bins, expected exactly 1",
                            b.label,
                            child_level + 1
                        ));
                    }
                }
            }
        }
        GeneralizationHierarchy::Category { levels } => {
            if levels.is_empty() {
                report.violations.push("category hierarchy has no levels".into());
            }
            for (li, map) in levels.iter().enumerate() {
                if map.is_empty() {
                    report.violations.push(format!("level {} map is empty", li + 1));
                }
            }
        }
        GeneralizationHierarchy::Mask { max_level, .. } => {
            if *max_level == 0 {
                report.violations.push("mask hierarchy needs max_level >= 1".into());
            }
        }
    }
}

fn sample_checks(h: &GeneralizationHierarchy, sample: &[String], report: &mut ValidationReport) {
    let max = h.max_level();

    if let GeneralizationHierarchy::Mask { max_level, .. } = h {
        if let Some(shortest) = sample.iter().map(|v| v.chars().count()).min() {
            if *max_level > shortest {
                report.violations.push(format!(
                    "mask max_level {max_level} exceeds the shortest sample value length {shortest}"
                ));
            }
        }
    }

    // Deduplicate while keeping order so violation messages are stable.
    let mut values: Vec<&String> = Vec::new();
    let mut seen = std::collections::HashSet::new();
    for v in sample {
        if seen.insert(v.as_str()) {
            values.push(v);
        }
    }

    // Images per level; a lookup failure is itself a violation.
    let mut images: Vec<Vec<String>> = Vec::with_capacity(max + 1);
    images.push(values.iter().map(|v| v.to_string()).collect());
    for level in 1..=max {
        let mut row = Vec::with_capacity(values.len());
        for v in &values {
            match generalize(v, h, level) {
                Ok(img) => row.push(img),
                Err(e) => {
                    report.violations.push(format!("value '{v}': {e}"));
                    return;
                }
            }
        }
        images.push(row);
    }

    for level in 1..max {
        for i in 0..values.len() {
            for j in (i + 1)..values.len() {
                if images[level][i] == images[level][j] {
                    for upper in (level + 1)..=max {
                        if images[upper][i] != images[upper][j] {
                            report.violations.push(format!(
                                "nesting violation: '{}' and '{}' share image '{}' at level {} but split into '{}' / '{}' at level {}",
                                values[i], values[j], images[level][i], level,
                                images[upper][i], images[upper][j], upper
                            ));
                        }
                    }
                }
            }
        }
    }
}

/// One level per quasi-identifier; a node in the product lattice searched by
/// the anonymizer. The all-zero vector denotes raw data.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct GeneralizationVector(pub Vec<usize>);

impl GeneralizationVector {
    pub fn zero(len: usize) -> Self {
        Self(vec![0; len])
    }

    pub fn levels(&self) -> &[usize] {
        &self.0
    }

    pub fn level_sum(&self) -> usize {
        self.0.iter().sum()
    }

    /// All vectors reachable by raising exactly one coordinate by one,
    /// skipping coordinates already at their max; quasi-identifier
    /// declaration order.
    pub fn successors(&self, max_levels: &[usize]) -> Vec<GeneralizationVector> {
        assert_eq!(self.0.len(), max_levels.len());
        let mut out = Vec::new();
        for (i, (&lvl, &max)) in self.0.iter().zip(max_levels).enumerate() {
            if lvl < max {
                let mut next = self.0.clone();
                next[i] = lvl + 1;
                out.push(GeneralizationVector(next));
            }
        }
        out
    }
}

impl std::fmt::Display for GeneralizationVector {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "<")?;
        for (i, l) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{l}")?;
        }
        write!(f, ">")
    }
}

/// One quasi-identifier bound to its table column and hierarchy, in the
/// declaration order of the run configuration.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct QuasiIdentifier {
    pub name: String,
    pub column: usize,
    pub hierarchy: GeneralizationHierarchy,
}

impl QuasiIdentifier {
    pub fn max_levels(qis: &[QuasiIdentifier]) -> Vec<usize> {
        qis.iter().map(|q| q.hierarchy.max_level()).collect()
    }
}
