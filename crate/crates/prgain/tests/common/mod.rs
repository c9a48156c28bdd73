//! Shared helpers for the integration and acceptance suites.

#![allow(dead_code)]

pub mod gen;
pub mod oracle;

use std::path::PathBuf;

use prgain::{load_table, AttributeSchema, Table};

pub fn fixture_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(name)
}

pub fn binary_path() -> &'static str {
    env!("CARGO_BIN_EXE_prgain")
}

/// Loads the 20-row demo fixture with untyped columns.
pub fn demo_table() -> Table {
    let schema = vec![
        AttributeSchema::insensitive("ZIP"),
        AttributeSchema::insensitive("Age"),
        AttributeSchema::insensitive("Gender"),
        AttributeSchema::sensitive("Condition"),
    ];
    load_table(fixture_path("table1.csv"), schema).expect("demo fixture loads")
}
