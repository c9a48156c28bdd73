//! Shared fixtures for unit tests: the 20-row demo table and its hierarchies.

use std::collections::BTreeMap;
use std::path::Path;

use crate::hierarchy::{GeneralizationHierarchy, IntervalBin, QuasiIdentifier};
use crate::model::{load_table, AttributeSchema, Table};

pub(crate) fn demo_table() -> Table {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures/table1.csv");
    let schema = vec![
        AttributeSchema::insensitive("ZIP"),
        AttributeSchema::insensitive("Age"),
        AttributeSchema::insensitive("Gender"),
        AttributeSchema::sensitive("Condition"),
    ];
    load_table(path, schema).expect("demo fixture loads")
}

pub(crate) fn demo_age_hierarchy() -> GeneralizationHierarchy {
    GeneralizationHierarchy::interval(vec![
        vec![
            IntervalBin { lo: 21, hi: 30, label: "21-30".into() },
            IntervalBin { lo: 31, hi: 40, label: "31-40".into() },
            IntervalBin { lo: 41, hi: 50, label: "41-50".into() },
            IntervalBin { lo: 51, hi: 60, label: "51-60".into() },
        ],
        vec![
            IntervalBin { lo: 21, hi: 30, label: "young".into() },
            IntervalBin { lo: 31, hi: 50, label: "mid age".into() },
            IntervalBin { lo: 51, hi: 60, label: "older".into() },
        ],
    ])
}

pub(crate) fn demo_gender_hierarchy() -> GeneralizationHierarchy {
    GeneralizationHierarchy::category(vec![BTreeMap::from([
        ("Male".to_string(), "person".to_string()),
        ("Female".to_string(), "person".to_string()),
    ])])
}

pub(crate) fn demo_zip_hierarchy() -> GeneralizationHierarchy {
    GeneralizationHierarchy::mask('*', 4)
}

/// Quasi-identifiers in declaration order: Age, Gender, ZIP.
pub(crate) fn demo_qis(table: &Table) -> Vec<QuasiIdentifier> {
    vec![
        QuasiIdentifier {
            name: "Age".into(),
            column: table.column_index("Age").unwrap(),
            hierarchy: demo_age_hierarchy(),
        },
        QuasiIdentifier {
            name: "Gender".into(),
            column: table.column_index("Gender").unwrap(),
            hierarchy: demo_gender_hierarchy(),
        },
        QuasiIdentifier {
            name: "ZIP".into(),
            column: table.column_index("ZIP").unwrap(),
            hierarchy: demo_zip_hierarchy(),
        },
    ]
}
