//! Independent reference search, written before and apart from the engine.
//!
//! It re-implements value generalization, grouping and the branch policy
//! (keep every candidate attaining the maximum gain; expand every successor
//! when no candidate makes progress) as a memoized exhaustive enumeration,
//! and reports the best final anonymized count any branch can reach.

use std::collections::{BTreeMap, BTreeSet, HashMap};

#[derive(Debug, Clone)]
pub enum OracleHierarchy {
    /// Per level: (lo, hi, label) bins, inclusive on both ends.
    Interval(Vec<Vec<(i64, i64, String)>>),
    /// Per level: map from previous-level value to coarser value.
    Category(Vec<BTreeMap<String, String>>),
    Mask(char, usize),
}

impl OracleHierarchy {
    pub fn max_level(&self) -> usize {
        match self {
            Self::Interval(levels) => levels.len(),
            Self::Category(levels) => levels.len(),
            Self::Mask(_, max) => *max,
        }
    }
}

#[derive(Debug, Clone)]
pub struct OracleQi {
    pub column: usize,
    pub hierarchy: OracleHierarchy,
}

fn oracle_generalize(value: &str, h: &OracleHierarchy, level: usize) -> String {
    if level == 0 {
        return value.to_string();
    }
    match h {
        OracleHierarchy::Interval(levels) => {
            let n: i64 = value.trim().parse().expect("oracle: integer value");
            for (lo, hi, label) in &levels[level - 1] {
                if *lo <= n && n <= *hi {
                    return label.clone();
                }
            }
            panic!("oracle: {value} outside bins at level {level}");
        }
        OracleHierarchy::Category(levels) => {
            let mut current = value.to_string();
            for map in levels.iter().take(level) {
                current = map
                    .get(&current)
                    .or_else(|| map.get(value))
                    .unwrap_or_else(|| panic!("oracle: {current} unmapped"))
                    .clone();
            }
            current
        }
        OracleHierarchy::Mask(c, _) => {
            let chars: Vec<char> = value.chars().collect();
            let keep = chars.len().saturating_sub(level);
            let mut out: String = chars[..keep].iter().collect();
            out.extend(std::iter::repeat(*c).take(chars.len() - keep));
            out
        }
    }
}

/// Groups `ids` by generalized key at `vector`; returns member-id lists.
pub fn oracle_groups(
    rows: &[Vec<String>],
    ids: &BTreeSet<usize>,
    vector: &[usize],
    qis: &[OracleQi],
) -> Vec<Vec<usize>> {
    let mut by_key: HashMap<Vec<String>, Vec<usize>> = HashMap::new();
    for &id in ids {
        let key: Vec<String> = qis
            .iter()
            .zip(vector)
            .map(|(qi, &level)| oracle_generalize(&rows[id][qi.column], &qi.hierarchy, level))
            .collect();
        by_key.entry(key).or_default().push(id);
    }
    let mut groups: Vec<Vec<usize>> = by_key.into_values().collect();
    groups.sort_by_key(|g| g[0]);
    groups
}

fn successors(vector: &[usize], maxes: &[usize]) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for i in 0..vector.len() {
        if vector[i] < maxes[i] {
            let mut next = vector.to_vec();
            next[i] += 1;
            out.push(next);
        }
    }
    out
}

/// Maximum number of tuples any branch of the policy can anonymize in total.
pub fn exhaustive_best_anonymized(rows: &[Vec<String>], qis: &[OracleQi], k: usize) -> usize {
    let maxes: Vec<usize> = qis.iter().map(|q| q.hierarchy.max_level()).collect();
    let all: BTreeSet<usize> = (0..rows.len()).collect();
    let zero = vec![0usize; qis.len()];
    let mut memo: HashMap<(Vec<usize>, Vec<usize>), usize> = HashMap::new();
    best_from(rows, qis, k, &maxes, &zero, &all, &mut memo)
}

fn best_from(
    rows: &[Vec<String>],
    qis: &[OracleQi],
    k: usize,
    maxes: &[usize],
    vector: &[usize],
    unanonymized: &BTreeSet<usize>,
    memo: &mut HashMap<(Vec<usize>, Vec<usize>), usize>,
) -> usize {
    if unanonymized.is_empty() {
        return 0;
    }
    let key = (
        vector.to_vec(),
        unanonymized.iter().copied().collect::<Vec<_>>(),
    );
    if let Some(&cached) = memo.get(&key) {
        return cached;
    }

    let succs = successors(vector, maxes);
    let mut best = 0usize;
    if !succs.is_empty() {
        // Score every successor.
        let mut scored: Vec<(Vec<usize>, Vec<usize>)> = Vec::new(); // (vector, newly ids)
        for next in succs {
            let groups = oracle_groups(rows, unanonymized, &next, qis);
            let newly: Vec<usize> = groups
                .into_iter()
                .filter(|g| g.len() >= k)
                .flatten()
                .collect();
            scored.push((next, newly));
        }
        let top = scored.iter().map(|(_, n)| n.len()).max().unwrap();
        let expand: Vec<&(Vec<usize>, Vec<usize>)> = if top > 0 {
            scored.iter().filter(|(_, n)| n.len() == top).collect()
        } else {
            scored.iter().collect()
        };
        for (next, newly) in expand {
            let mut remaining = unanonymized.clone();
            for id in newly {
                remaining.remove(id);
            }
            let future = best_from(rows, qis, k, maxes, next, &remaining, memo);
            best = best.max(newly.len() + future);
        }
    }

    memo.insert(key, best);
    best
}

/// The demo fixture's dimension tables in oracle form. Column order in the
/// fixture CSV is ZIP, Age, Gender, Condition; quasi-identifier declaration
/// order is Age, Gender, ZIP.
pub fn demo_oracle_qis() -> Vec<OracleQi> {
    vec![
        OracleQi {
            column: 1,
            hierarchy: OracleHierarchy::Interval(vec![
                vec![
                    (21, 30, "21-30".to_string()),
                    (31, 40, "31-40".to_string()),
                    (41, 50, "41-50".to_string()),
                    (51, 60, "51-60".to_string()),
                ],
                vec![
                    (21, 30, "young".to_string()),
                    (31, 50, "mid age".to_string()),
                    (51, 60, "older".to_string()),
                ],
            ]),
        },
        OracleQi {
            column: 2,
            hierarchy: OracleHierarchy::Category(vec![BTreeMap::from([
                ("Male".to_string(), "person".to_string()),
                ("Female".to_string(), "person".to_string()),
            ])]),
        },
        OracleQi {
            column: 0,
            hierarchy: OracleHierarchy::Mask('*', 4),
        },
    ]
}
