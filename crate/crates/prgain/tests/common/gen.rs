//! Seeded data generators: random small tables with valid hierarchies for
//! the property suites, and a census-shaped corpus for the desk-scale run.

use std::collections::BTreeMap;

use prgain::hierarchy::{GeneralizationHierarchy, IntervalBin, QuasiIdentifier};
use prgain::{AttributeSchema, Table};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use super::oracle::{OracleHierarchy, OracleQi};

/// A generated scenario: the table, the engine-facing quasi-identifiers and
/// their oracle-facing mirror.
pub struct GeneratedCase {
    pub table: Table,
    pub qis: Vec<QuasiIdentifier>,
    pub oracle_qis: Vec<OracleQi>,
    pub k: usize,
}

enum GenHierarchy {
    Interval {
        levels: Vec<Vec<(i64, i64, String)>>,
        hull: (i64, i64),
    },
    Category {
        levels: Vec<BTreeMap<String, String>>,
        raws: Vec<String>,
    },
    Mask {
        max_level: usize,
        value_len: usize,
    },
}

fn random_hierarchy(rng: &mut ChaCha8Rng, max_level_cap: usize) -> GenHierarchy {
    match rng.gen_range(0..3) {
        0 => {
            // Contiguous level-1 bins; level 2 merges pairs; optional top.
            let n_bins = rng.gen_range(2..=5);
            let width = rng.gen_range(1..=6);
            let mut bins = Vec::new();
            let mut lo = 0i64;
            for i in 0..n_bins {
                bins.push((lo, lo + width, format!("a{i}")));
                lo += width + 1;
            }
            let hull = (0, bins.last().unwrap().1);
            let mut levels = vec![bins.clone()];
            if max_level_cap >= 2 {
                let merged: Vec<(i64, i64, String)> = bins
                    .chunks(2)
                    .enumerate()
                    .map(|(i, c)| (c[0].0, c.last().unwrap().1, format!("b{i}")))
                    .collect();
                levels.push(merged);
                if max_level_cap >= 3 && rng.gen_bool(0.5) {
                    levels.push(vec![(hull.0, hull.1, "all".to_string())]);
                }
            }
            GenHierarchy::Interval { levels, hull }
        }
        1 => {
            let n_raw = rng.gen_range(2..=6);
            let fan = rng.gen_range(1..=3).min(n_raw);
            let raws: Vec<String> = (0..n_raw).map(|i| format!("v{i}")).collect();
            let l1: BTreeMap<String, String> = raws
                .iter()
                .enumerate()
                .map(|(i, r)| (r.clone(), format!("g{}", i / fan)))
                .collect();
            let mut levels = vec![l1.clone()];
            if max_level_cap >= 2 && rng.gen_bool(0.7) {
                let l2: BTreeMap<String, String> = l1
                    .values()
                    .map(|g| (g.clone(), "any".to_string()))
                    .collect();
                levels.push(l2);
            }
            GenHierarchy::Category { levels, raws }
        }
        _ => {
            let value_len = rng.gen_range(2..=4);
            let max_level = rng.gen_range(1..=value_len.min(max_level_cap));
            GenHierarchy::Mask {
                max_level,
                value_len,
            }
        }
    }
}

impl GenHierarchy {
    fn max_level(&self) -> usize {
        match self {
            Self::Interval { levels, .. } => levels.len(),
            Self::Category { levels, .. } => levels.len(),
            Self::Mask { max_level, .. } => *max_level,
        }
    }

    fn sample_value(&self, rng: &mut ChaCha8Rng) -> String {
        match self {
            Self::Interval { hull, .. } => rng.gen_range(hull.0..=hull.1).to_string(),
            Self::Category { raws, .. } => raws.choose(rng).unwrap().clone(),
            Self::Mask { value_len, .. } => (0..*value_len)
                .map(|_| char::from(b'0' + rng.gen_range(0..4u8)))
                .collect(),
        }
    }

    fn engine_form(&self) -> GeneralizationHierarchy {
        match self {
            Self::Interval { levels, .. } => GeneralizationHierarchy::interval(
                levels
                    .iter()
                    .map(|bins| {
                        bins.iter()
                            .map(|(lo, hi, label)| IntervalBin {
                                lo: *lo,
                                hi: *hi,
                                label: label.clone(),
                            })
                            .collect()
                    })
                    .collect(),
            ),
            Self::Category { levels, .. } => GeneralizationHierarchy::category(levels.clone()),
            Self::Mask { max_level, .. } => GeneralizationHierarchy::mask('*', *max_level),
        }
    }

    fn oracle_form(&self) -> OracleHierarchy {
        match self {
            Self::Interval { levels, .. } => OracleHierarchy::Interval(levels.clone()),
            Self::Category { levels, .. } => OracleHierarchy::Category(levels.clone()),
            Self::Mask { max_level, .. } => OracleHierarchy::Mask('*', *max_level),
        }
    }
}

/// Draws a random table with 2-3 quasi-identifiers, a sensitive column and
/// k in {2,3,4}. `lattice_cap`, when given, bounds the product of
/// (max_level + 1) over the quasi-identifiers.
pub fn random_case(
    rng: &mut ChaCha8Rng,
    min_rows: usize,
    max_rows: usize,
    lattice_cap: Option<usize>,
) -> GeneratedCase {
    loop {
        let n_qis = rng.gen_range(2..=3);
        let hierarchies: Vec<GenHierarchy> =
            (0..n_qis).map(|_| random_hierarchy(rng, 3)).collect();
        let lattice: usize = hierarchies.iter().map(|h| h.max_level() + 1).product();
        if let Some(cap) = lattice_cap {
            if lattice > cap {
                continue;
            }
        }

        let n_rows = rng.gen_range(min_rows..=max_rows);
        let k = rng.gen_range(2..=4usize);
        if n_rows < k {
            continue;
        }

        let mut schema: Vec<AttributeSchema> = Vec::new();
        let mut qis = Vec::new();
        let mut oracle_qis = Vec::new();
        for (i, h) in hierarchies.iter().enumerate() {
            schema.push(AttributeSchema::insensitive(format!("q{i}")));
            qis.push(QuasiIdentifier {
                name: format!("q{i}"),
                column: i,
                hierarchy: h.engine_form(),
            });
            oracle_qis.push(OracleQi {
                column: i,
                hierarchy: h.oracle_form(),
            });
        }
        schema.push(AttributeSchema::sensitive("s"));

        let rows: Vec<Vec<String>> = (0..n_rows)
            .map(|_| {
                let mut row: Vec<String> = hierarchies
                    .iter()
                    .map(|h| h.sample_value(rng))
                    .collect();
                row.push(format!("s{}", rng.gen_range(0..4)));
                row
            })
            .collect();

        let table = Table::new(schema, rows).expect("generated rows are rectangular");
        return GeneratedCase {
            table,
            qis,
            oracle_qis,
            k,
        };
    }
}

const WORKCLASSES: &[(&str, f64)] = &[
    ("Private", 0.70),
    ("Self-emp-not-inc", 0.08),
    ("Local-gov", 0.06),
    ("?", 0.06),
    ("State-gov", 0.04),
    ("Self-emp-inc", 0.03),
    ("Federal-gov", 0.03),
];

const EDUCATION: &[(&str, u32, f64)] = &[
    ("HS-grad", 9, 0.32),
    ("Some-college", 10, 0.22),
    ("Bachelors", 13, 0.17),
    ("Masters", 14, 0.05),
    ("Assoc-voc", 11, 0.04),
    ("11th", 7, 0.04),
    ("Assoc-acdm", 12, 0.03),
    ("10th", 6, 0.03),
    ("7th-8th", 4, 0.02),
    ("Prof-school", 15, 0.02),
    ("9th", 5, 0.02),
    ("12th", 8, 0.01),
    ("Doctorate", 16, 0.01),
    ("5th-6th", 3, 0.01),
    ("1st-4th", 2, 0.01),
];

const MARITAL: &[(&str, f64)] = &[
    ("Married-civ-spouse", 0.46),
    ("Never-married", 0.33),
    ("Divorced", 0.14),
    ("Separated", 0.03),
    ("Widowed", 0.03),
    ("Married-spouse-absent", 0.01),
];

const OCCUPATIONS: &[(&str, f64)] = &[
    ("Prof-specialty", 0.13),
    ("Craft-repair", 0.13),
    ("Exec-managerial", 0.12),
    ("Adm-clerical", 0.12),
    ("Sales", 0.11),
    ("Other-service", 0.10),
    ("Machine-op-inspct", 0.06),
    ("?", 0.06),
    ("Transport-moving", 0.05),
    ("Handlers-cleaners", 0.04),
    ("Farming-fishing", 0.03),
    ("Tech-support", 0.03),
    ("Protective-serv", 0.02),
];

const RELATIONSHIPS: &[(&str, f64)] = &[
    ("Husband", 0.40),
    ("Not-in-family", 0.26),
    ("Own-child", 0.15),
    ("Unmarried", 0.11),
    ("Wife", 0.05),
    ("Other-relative", 0.03),
];

const RACES: &[(&str, f64)] = &[
    ("White", 0.85),
    ("Black", 0.10),
    ("Asian-Pac-Islander", 0.03),
    ("Amer-Indian-Eskimo", 0.01),
    ("Other", 0.01),
];

const COUNTRIES: &[(&str, f64)] = &[
    ("United-States", 0.90),
    ("Mexico", 0.02),
    ("?", 0.018),
    ("Philippines", 0.006),
    ("Germany", 0.005),
    ("Canada", 0.004),
    ("Puerto-Rico", 0.004),
    ("El-Salvador", 0.003),
    ("India", 0.003),
    ("Cuba", 0.003),
    ("England", 0.003),
    ("China", 0.003),
    ("Jamaica", 0.002),
    ("South", 0.002),
    ("Italy", 0.002),
    ("Dominican-Republic", 0.002),
    ("Vietnam", 0.002),
    ("Guatemala", 0.002),
    ("Japan", 0.002),
    ("Poland", 0.002),
    ("Columbia", 0.002),
    ("Taiwan", 0.001),
    ("Haiti", 0.001),
    ("Iran", 0.001),
    ("Portugal", 0.001),
    ("Nicaragua", 0.001),
    ("Peru", 0.001),
    ("Greece", 0.001),
    ("France", 0.001),
    ("Ecuador", 0.001),
    ("Ireland", 0.001),
    ("Hong", 0.001),
    ("Cambodia", 0.001),
    ("Trinadad&Tobago", 0.001),
    ("Thailand", 0.001),
    ("Laos", 0.001),
    ("Yugoslavia", 0.001),
    ("Outlying-US(Guam-USVI-etc)", 0.001),
    ("Hungary", 0.001),
    ("Honduras", 0.001),
    ("Scotland", 0.001),
    ("Holand-Netherlands", 0.001),
];

fn pick<'a>(rng: &mut ChaCha8Rng, weighted: &'a [(&'a str, f64)]) -> &'a str {
    let total: f64 = weighted.iter().map(|(_, w)| w).sum();
    let mut x = rng.gen_range(0.0..total);
    for (value, w) in weighted {
        if x < *w {
            return value;
        }
        x -= w;
    }
    weighted.last().unwrap().0
}

/// Census-shaped corpus with the standard fourteen feature columns and a
/// binary income label correlated with education, marital status, capital
/// gain, hours and age band. Fully determined by the seed.
pub fn synthetic_adult(n: usize, seed: u64) -> Table {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let names = [
        "age",
        "workclass",
        "fnlwgt",
        "education",
        "education-num",
        "marital-status",
        "occupation",
        "relationship",
        "race",
        "sex",
        "capital-gain",
        "capital-loss",
        "hours-per-week",
        "native-country",
        "income",
    ];
    let schema: Vec<AttributeSchema> = names
        .iter()
        .map(|&n| {
            if n == "income" {
                AttributeSchema::sensitive(n)
            } else {
                AttributeSchema::insensitive(n)
            }
        })
        .collect();

    let mut rows = Vec::with_capacity(n);
    for _ in 0..n {
        let age = 17 + ((rng.gen_range(0..=36) + rng.gen_range(0..=37)) as i64);
        let workclass = pick(&mut rng, WORKCLASSES);
        let fnlwgt = rng.gen_range(12285..=1484705u32);
        let edu_roll = rng.gen_range(0.0..1.0);
        let mut acc = 0.0;
        let mut education = EDUCATION[0];
        for e in EDUCATION {
            acc += e.2;
            if edu_roll < acc {
                education = *e;
                break;
            }
        }
        let marital = pick(&mut rng, MARITAL);
        let occupation = pick(&mut rng, OCCUPATIONS);
        let relationship = pick(&mut rng, RELATIONSHIPS);
        let race = pick(&mut rng, RACES);
        let sex = if rng.gen_bool(0.67) { "Male" } else { "Female" };
        let capital_gain = if rng.gen_bool(0.92) {
            0
        } else {
            rng.gen_range(1000..=99999u32)
        };
        let capital_loss = if rng.gen_bool(0.95) {
            0
        } else {
            rng.gen_range(500..=4000u32)
        };
        let hours = (rng.gen_range(20..=50) + rng.gen_range(0..=49)).min(99);
        let country = pick(&mut rng, COUNTRIES);

        let mut score = -1.6f64;
        if education.1 >= 13 {
            score += 1.2;
        }
        if marital == "Married-civ-spouse" {
            score += 1.0;
        }
        if capital_gain > 5000 {
            score += 1.4;
        }
        if hours > 44 {
            score += 0.5;
        }
        if (35..=55).contains(&age) {
            score += 0.4;
        }
        if occupation == "Exec-managerial" || occupation == "Prof-specialty" {
            score += 0.5;
        }
        if sex == "Male" {
            score += 0.2;
        }
        let p = 1.0 / (1.0 + (-score).exp());
        let income = if rng.gen_bool(p) { ">50K" } else { "<=50K" };

        rows.push(vec![
            age.to_string(),
            workclass.to_string(),
            fnlwgt.to_string(),
            education.0.to_string(),
            education.1.to_string(),
            marital.to_string(),
            occupation.to_string(),
            relationship.to_string(),
            race.to_string(),
            sex.to_string(),
            capital_gain.to_string(),
            capital_loss.to_string(),
            hours.to_string(),
            country.to_string(),
            income.to_string(),
        ]);
    }
    Table::new(schema, rows).expect("generated rows are rectangular")
}
