//! Run configuration: which columns are quasi-identifiers (and their
//! hierarchies), which are sensitive or identifying, plus the search knobs.
//!
//! The JSON schema, with `residual_policy`, `max_branches` and `class_attr`
//! optional:
//!
//! ```json
//! {
//!   "k": 3,
//!   "quasi_identifiers": [
//!     { "name": "Age", "hierarchy": { "kind": "interval", "levels": [[{"lo":21,"hi":30,"label":"21-30"}]] } },
//!     { "name": "Gender", "hierarchy": { "kind": "category", "levels": [{"Male":"person"}] } },
//!     { "name": "ZIP", "hierarchy": { "kind": "mask", "mask_char": "*", "max_level": 4 } }
//!   ],
//!   "sensitive": ["Condition"],
//!   "identifiers": [],
//!   "residual_policy": "drop"
//! }
//! ```

use std::collections::{BTreeMap, HashSet};
use std::path::Path;

use serde_json::Value;

use crate::anonymizer::ResidualPolicy;
use crate::hierarchy::{
    validate_hierarchy, GeneralizationHierarchy, IntervalBin, QuasiIdentifier,
};
use crate::model::{AttributeRole, AttributeSchema, Table};

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("config is not valid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("config error at {pointer}: {message}")]
    Invalid { pointer: String, message: String },
    #[error("column '{0}' named in the config is missing from the input header")]
    MissingColumn(String),
}

fn invalid(pointer: impl Into<String>, message: impl Into<String>) -> ConfigError {
    ConfigError::Invalid {
        pointer: pointer.into(),
        message: message.into(),
    }
}

#[derive(Debug, Clone)]
pub struct QiSpec {
    pub name: String,
    pub hierarchy: GeneralizationHierarchy,
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub k: usize,
    pub quasi_identifiers: Vec<QiSpec>,
    pub sensitive: Vec<String>,
    pub identifiers: Vec<String>,
    pub residual_policy: ResidualPolicy,
    pub max_branches: usize,
    pub class_attr: Option<String>,
}

pub fn parse_config(json_path: impl AsRef<Path>) -> Result<RunConfig, ConfigError> {
    let path = json_path.as_ref();
    let raw = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_config_str(&raw)
}

pub fn parse_config_str(raw: &str) -> Result<RunConfig, ConfigError> {
    let root: Value = serde_json::from_str(raw)?;
    let obj = root
        .as_object()
        .ok_or_else(|| invalid("/", "expected a JSON object"))?;

    const KNOWN: [&str; 7] = [
        "k",
        "quasi_identifiers",
        "sensitive",
        "identifiers",
        "residual_policy",
        "max_branches",
        "class_attr",
    ];
    for key in obj.keys() {
        if !KNOWN.contains(&key.as_str()) {
            return Err(invalid(format!("/{key}"), "unknown key"));
        }
    }

    let k = require_u64(obj.get("k"), "/k")? as usize;
    if k < 2 {
        return Err(invalid("/k", format!("k must be at least 2, got {k}")));
    }

    let qi_value = obj
        .get("quasi_identifiers")
        .ok_or_else(|| invalid("/quasi_identifiers", "missing required key"))?;
    let qi_array = qi_value
        .as_array()
        .ok_or_else(|| invalid("/quasi_identifiers", "expected an array"))?;
    let mut quasi_identifiers = Vec::with_capacity(qi_array.len());
    for (i, entry) in qi_array.iter().enumerate() {
        let pointer = format!("/quasi_identifiers/{i}");
        let entry = entry
            .as_object()
            .ok_or_else(|| invalid(&pointer, "expected an object"))?;
        let name = require_str(entry.get("name"), &format!("{pointer}/name"))?;
        let hierarchy = parse_hierarchy(
            entry
                .get("hierarchy")
                .ok_or_else(|| invalid(format!("{pointer}/hierarchy"), "missing required key"))?,
            &format!("{pointer}/hierarchy"),
        )?;
        let report = validate_hierarchy(&hierarchy, &[]);
        if !report.passed() {
            return Err(invalid(
                format!("{pointer}/hierarchy"),
                report.violations.join("; "),
            ));
        }
        quasi_identifiers.push(QiSpec { name, hierarchy });
    }

    let sensitive = string_list(obj.get("sensitive"), "/sensitive", true)?;
    let identifiers = string_list(obj.get("identifiers"), "/identifiers", false)?;

    let residual_policy = match obj.get("residual_policy") {
        None => ResidualPolicy::Drop,
        Some(v) => {
            let s = v
                .as_str()
                .ok_or_else(|| invalid("/residual_policy", "expected a string"))?;
            s.parse()
                .map_err(|e: String| invalid("/residual_policy", e))?
        }
    };

    let max_branches = match obj.get("max_branches") {
        None => 64,
        Some(v) => {
            let n = require_u64(Some(v), "/max_branches")? as usize;
            if n == 0 {
                return Err(invalid("/max_branches", "must be at least 1"));
            }
            n
        }
    };

    let class_attr = match obj.get("class_attr") {
        None | Some(Value::Null) => None,
        Some(v) => Some(
            v.as_str()
                .ok_or_else(|| invalid("/class_attr", "expected a string"))?
                .to_string(),
        ),
    };

    let config = RunConfig {
        k,
        quasi_identifiers,
        sensitive,
        identifiers,
        residual_policy,
        max_branches,
        class_attr,
    };
    config.check_disjoint()?;
    Ok(config)
}

fn require_u64(value: Option<&Value>, pointer: &str) -> Result<u64, ConfigError> {
    value
        .ok_or_else(|| invalid(pointer, "missing required key"))?
        .as_u64()
        .ok_or_else(|| invalid(pointer, "expected a non-negative integer"))
}

fn require_str(value: Option<&Value>, pointer: &str) -> Result<String, ConfigError> {
    Ok(value
        .ok_or_else(|| invalid(pointer, "missing required key"))?
        .as_str()
        .ok_or_else(|| invalid(pointer, "expected a string"))?
        .to_string())
}

fn string_list(
    value: Option<&Value>,
    pointer: &str,
    required: bool,
) -> Result<Vec<String>, ConfigError> {
    match value {
        None if required => Err(invalid(pointer, "missing required key")),
        None => Ok(Vec::new()),
        Some(v) => {
            let arr = v
                .as_array()
                .ok_or_else(|| invalid(pointer, "expected an array of strings"))?;
            arr.iter()
                .enumerate()
                .map(|(i, s)| {
                    s.as_str()
                        .map(str::to_string)
                        .ok_or_else(|| invalid(format!("{pointer}/{i}"), "expected a string"))
                })
                .collect()
        }
    }
}

fn parse_hierarchy(value: &Value, pointer: &str) -> Result<GeneralizationHierarchy, ConfigError> {
    let obj = value
        .as_object()
        .ok_or_else(|| invalid(pointer, "expected an object"))?;
    let kind = require_str(obj.get("kind"), &format!("{pointer}/kind"))?;
    match kind.as_str() {
        "interval" => {
            let levels_value = obj
                .get("levels")
                .ok_or_else(|| invalid(format!("{pointer}/levels"), "missing required key"))?;
            let levels_arr = levels_value
                .as_array()
                .ok_or_else(|| invalid(format!("{pointer}/levels"), "expected an array"))?;
            let mut levels = Vec::with_capacity(levels_arr.len());
            for (li, level) in levels_arr.iter().enumerate() {
                let lp = format!("{pointer}/levels/{li}");
                let bins_arr = level
                    .as_array()
                    .ok_or_else(|| invalid(&lp, "expected an array of bins"))?;
                let mut bins = Vec::with_capacity(bins_arr.len());
                for (bi, bin) in bins_arr.iter().enumerate() {
                    let bp = format!("{lp}/{bi}");
                    let bin = bin
                        .as_object()
                        .ok_or_else(|| invalid(&bp, "expected a bin object"))?;
                    let lo = bin
                        .get("lo")
                        .and_then(Value::as_i64)
                        .ok_or_else(|| invalid(format!("{bp}/lo"), "expected an integer"))?;
                    let hi = bin
                        .get("hi")
                        .and_then(Value::as_i64)
                        .ok_or_else(|| invalid(format!("{bp}/hi"), "expected an integer"))?;
                    let label = require_str(bin.get("label"), &format!("{bp}/label"))?;
                    bins.push(IntervalBin { lo, hi, label });
                }
                levels.push(bins);
            }
            Ok(GeneralizationHierarchy::interval(levels))
        }
        "category" => {
            let levels_value = obj
                .get("levels")
                .ok_or_else(|| invalid(format!("{pointer}/levels"), "missing required key"))?;
            let levels_arr = levels_value
                .as_array()
                .ok_or_else(|| invalid(format!("{pointer}/levels"), "expected an array"))?;
            let mut levels = Vec::with_capacity(levels_arr.len());
            for (li, level) in levels_arr.iter().enumerate() {
                let lp = format!("{pointer}/levels/{li}");
                let map = level
                    .as_object()
                    .ok_or_else(|| invalid(&lp, "expected an object mapping values"))?;
                let mut out = BTreeMap::new();
                for (from, to) in map {
                    let to = to
                        .as_str()
                        .ok_or_else(|| invalid(format!("{lp}/{from}"), "expected a string"))?;
                    out.insert(from.clone(), to.to_string());
                }
                levels.push(out);
            }
            Ok(GeneralizationHierarchy::category(levels))
        }
        "mask" => {
            let mask_char = match obj.get("mask_char") {
                None => '*',
                Some(v) => {
                    let s = v.as_str().ok_or_else(|| {
                        invalid(format!("{pointer}/mask_char"), "expected a string")
                    })?;
                    let mut chars = s.chars();
                    match (chars.next(), chars.next()) {
                        (Some(c), None) => c,
                        _ => {
                            return Err(invalid(
                                format!("{pointer}/mask_char"),
                                "expected a single character",
                            ))
                        }
                    }
                }
            };
            let max_level =
                require_u64(obj.get("max_level"), &format!("{pointer}/max_level"))? as usize;
            if max_level == 0 {
                return Err(invalid(format!("{pointer}/max_level"), "must be at least 1"));
            }
            Ok(GeneralizationHierarchy::mask(mask_char, max_level))
        }
        other => Err(invalid(
            format!("{pointer}/kind"),
            format!("unknown hierarchy kind '{other}' (expected interval, category or mask)"),
        )),
    }
}

impl RunConfig {
    /// Number of quasi-identifiers (the paper-facing q).
    pub fn q(&self) -> usize {
        self.quasi_identifiers.len()
    }

    fn check_disjoint(&self) -> Result<(), ConfigError> {
        let mut seen: HashSet<&str> = HashSet::new();
        let all = self
            .quasi_identifiers
            .iter()
            .map(|q| q.name.as_str())
            .chain(self.sensitive.iter().map(String::as_str))
            .chain(self.identifiers.iter().map(String::as_str));
        for name in all {
            if !seen.insert(name) {
                return Err(invalid(
                    "/",
                    format!("attribute '{name}' appears in more than one role"),
                ));
            }
        }
        Ok(())
    }

    /// Builds the per-column schema for a CSV header, assigning roles from
    /// the config; columns the config does not mention are insensitive.
    /// Fails if any configured column is absent from the header.
    pub fn schema_for(&self, header: &[String]) -> Result<Vec<AttributeSchema>, ConfigError> {
        for qi in &self.quasi_identifiers {
            if !header.contains(&qi.name) {
                return Err(ConfigError::MissingColumn(qi.name.clone()));
            }
        }
        for name in self.sensitive.iter().chain(&self.identifiers) {
            if !header.contains(name) {
                return Err(ConfigError::MissingColumn(name.clone()));
            }
        }
        Ok(header
            .iter()
            .map(|name| {
                if let Some(qi) = self.quasi_identifiers.iter().find(|q| &q.name == name) {
                    AttributeSchema {
                        name: name.clone(),
                        role: AttributeRole::QuasiIdentifier,
                        hierarchy: Some(qi.hierarchy.clone()),
                    }
                } else if self.sensitive.contains(name) {
                    AttributeSchema::sensitive(name.clone())
                } else if self.identifiers.contains(name) {
                    AttributeSchema::identifier(name.clone())
                } else {
                    AttributeSchema::insensitive(name.clone())
                }
            })
            .collect())
    }

    /// Binds the quasi-identifiers to their column positions in `table`, in
    /// config declaration order.
    pub fn qis_for(&self, table: &Table) -> Result<Vec<QuasiIdentifier>, ConfigError> {
        self.quasi_identifiers
            .iter()
            .map(|qi| {
                let column = table
                    .column_index(&qi.name)
                    .ok_or_else(|| ConfigError::MissingColumn(qi.name.clone()))?;
                Ok(QuasiIdentifier {
                    name: qi.name.clone(),
                    column,
                    hierarchy: qi.hierarchy.clone(),
                })
            })
            .collect()
    }
}
