//! Tabular data model: attribute roles, schemas, and CSV ingestion/emission.
//!
//! Every cell is kept as a string; numeric interpretation happens only inside
//! interval hierarchies. Rows carry an implicit 0-based tuple id (their
//! position in the loaded file) which all traces and reports refer to.

use std::fs::File;
use std::io;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::hierarchy::GeneralizationHierarchy;

/// Tuple ids are positions in the loaded file, 0-based.
pub type TupleId = usize;

#[derive(Debug, thiserror::Error)]
pub enum ModelError {
    #[error("cannot open {path}: {source}")]
    Open {
        path: String,
        source: io::Error,
    },
    #[error("csv error in {path}: {source}")]
    Csv {
        path: String,
        source: csv::Error,
    },
    #[error("header mismatch in {path}: expected columns {expected:?}, found {found:?}")]
    HeaderMismatch {
        path: String,
        expected: Vec<String>,
        found: Vec<String>,
    },
    #[error("row {row} has {found} cells, expected {expected}")]
    RaggedRow {
        row: usize,
        found: usize,
        expected: usize,
    },
    #[error("schema error: {0}")]
    Schema(String),
    #[error("write to {path} failed: {source}")]
    Write {
        path: String,
        source: io::Error,
    },
}

/// Privacy role of one attribute.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AttributeRole {
    /// Directly identifying; removed before release.
    Identifier,
    /// Re-identifying in combination; generalized by the anonymizer.
    QuasiIdentifier,
    /// The value to protect; never modified.
    Sensitive,
    /// Neither identifying nor protected; carried through unchanged.
    Insensitive,
}

/// One column: a name, its role, and (for quasi-identifiers) its hierarchy.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AttributeSchema {
    pub name: String,
    pub role: AttributeRole,
    pub hierarchy: Option<GeneralizationHierarchy>,
}

impl AttributeSchema {
    /// A hierarchy must be present exactly when the role is quasi-identifier.
    pub fn new(
        name: impl Into<String>,
        role: AttributeRole,
        hierarchy: Option<GeneralizationHierarchy>,
    ) -> Result<Self, ModelError> {
        let name = name.into();
        match (role, &hierarchy) {
            (AttributeRole::QuasiIdentifier, None) => Err(ModelError::Schema(format!(
                "quasi-identifier '{name}' has no hierarchy"
            ))),
            (AttributeRole::QuasiIdentifier, Some(_)) => Ok(Self {
                name,
                role,
                hierarchy,
            }),
            (_, Some(_)) => Err(ModelError::Schema(format!(
                "attribute '{name}' is not a quasi-identifier but carries a hierarchy"
            ))),
            (_, None) => Ok(Self {
                name,
                role,
                hierarchy,
            }),
        }
    }

    pub fn identifier(name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            role: AttributeRole::Identifier,
            hierarchy: None,
        }
    }

    pub fn quasi_identifier(name: impl Into<String>, hierarchy: GeneralizationHierarchy) -> Self {
        Self {
            name: name.into(),
            role: AttributeRole::QuasiIdentifier,
            hierarchy: Some(hierarchy),
        }
    }

    pub fn sensitive(name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            role: AttributeRole::Sensitive,
            hierarchy: None,
        }
    }

    pub fn insensitive(name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            role: AttributeRole::Insensitive,
            hierarchy: None,
        }
    }
}

/// An in-memory table. Immutable after construction; rows keep the order of
/// the source file so tuple ids stay stable.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table {
    pub schema: Vec<AttributeSchema>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(schema: Vec<AttributeSchema>, rows: Vec<Vec<String>>) -> Result<Self, ModelError> {
        for (i, row) in rows.iter().enumerate() {
            if row.len() != schema.len() {
                return Err(ModelError::RaggedRow {
                    row: i + 1,
                    found: row.len(),
                    expected: schema.len(),
                });
            }
        }
        Ok(Self { schema, rows })
    }

    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn n_cols(&self) -> usize {
        self.schema.len()
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.schema.iter().position(|a| a.name == name)
    }

    pub fn header(&self) -> Vec<String> {
        self.schema.iter().map(|a| a.name.clone()).collect()
    }

    pub fn row(&self, id: TupleId) -> &[String] {
        &self.rows[id]
    }

    /// Distinct values of one column, in first-appearance order.
    pub fn distinct_values(&self, col: usize) -> Vec<String> {
        let mut seen = std::collections::HashSet::new();
        let mut out = Vec::new();
        for row in &self.rows {
            if seen.insert(row[col].as_str()) {
                out.push(row[col].clone());
            }
        }
        out
    }
}

/// Loads a headered CSV against a known schema. Header names are matched by
/// name, order-insensitively; cells come back trimmed, untyped strings.
pub fn load_table(csv_path: impl AsRef<Path>, schema: Vec<AttributeSchema>) -> Result<Table, ModelError> {
    let path = csv_path.as_ref();
    let path_str = path.display().to_string();
    let file = File::open(path).map_err(|source| ModelError::Open {
        path: path_str.clone(),
        source,
    })?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_reader(file);

    let headers: Vec<String> = reader
        .headers()
        .map_err(|source| ModelError::Csv {
            path: path_str.clone(),
            source,
        })?
        .iter()
        .map(|h| h.trim().to_string())
        .collect();

    let expected: Vec<String> = schema.iter().map(|a| a.name.clone()).collect();
    let mut col_of_attr = Vec::with_capacity(schema.len());
    for name in &expected {
        match headers.iter().position(|h| h == name) {
            Some(idx) => col_of_attr.push(idx),
            None => {
                return Err(ModelError::HeaderMismatch {
                    path: path_str,
                    expected,
                    found: headers,
                })
            }
        }
    }
    if headers.len() != schema.len() {
        return Err(ModelError::HeaderMismatch {
            path: path_str,
            expected,
            found: headers,
        });
    }

    let mut rows = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(|source| ModelError::Csv {
            path: path_str.clone(),
            source,
        })?;
        if record.len() != headers.len() {
            return Err(ModelError::RaggedRow {
                row: i + 1,
                found: record.len(),
                expected: headers.len(),
            });
        }
        let row: Vec<String> = col_of_attr
            .iter()
            .map(|&c| record.get(c).unwrap_or("").trim().to_string())
            .collect();
        rows.push(row);
    }

    Ok(Table { schema, rows })
}

/// Reads just the header row of a CSV file.
pub fn read_header(csv_path: impl AsRef<Path>) -> Result<Vec<String>, ModelError> {
    let path = csv_path.as_ref();
    let path_str = path.display().to_string();
    let file = File::open(path).map_err(|source| ModelError::Open {
        path: path_str.clone(),
        source,
    })?;
    let mut reader = csv::ReaderBuilder::new().has_headers(true).from_reader(file);
    let headers = reader
        .headers()
        .map_err(|source| ModelError::Csv {
            path: path_str,
            source,
        })?
        .iter()
        .map(|h| h.trim().to_string())
        .collect();
    Ok(headers)
}

/// Drops every identifier-role column; surviving cells are untouched and row
/// order (hence tuple ids) is preserved.
pub fn drop_identifiers(table: &Table) -> Table {
    let keep: Vec<usize> = table
        .schema
        .iter()
        .enumerate()
        .filter(|(_, a)| a.role != AttributeRole::Identifier)
        .map(|(i, _)| i)
        .collect();
    let schema = keep.iter().map(|&i| table.schema[i].clone()).collect();
    let rows = table
        .rows
        .iter()
        .map(|row| keep.iter().map(|&i| row[i].clone()).collect())
        .collect();
    Table { schema, rows }
}

/// Writes a table as RFC-4180-style CSV (comma delimiter, double-quote
/// quoting, header row, UTF-8, \n terminator).
pub fn write_table(table: &Table, csv_path: impl AsRef<Path>) -> Result<(), ModelError> {
    let path = csv_path.as_ref();
    let path_str = path.display().to_string();
    let file = File::create(path).map_err(|source| ModelError::Write {
        path: path_str.clone(),
        source,
    })?;
    let mut writer = csv::WriterBuilder::new().from_writer(file);
    let wrap = |source: csv::Error| ModelError::Csv {
        path: path_str.clone(),
        source,
    };
    writer.write_record(table.header()).map_err(wrap)?;
    for row in &table.rows {
        writer.write_record(row).map_err(wrap)?;
    }
    writer.flush().map_err(|source| ModelError::Write {
        path: path_str.clone(),
        source,
    })?;
    Ok(())
}
