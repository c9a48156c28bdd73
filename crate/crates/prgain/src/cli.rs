//! Command-line surface: `anonymize`, `verify`, and `evaluate`.
//!
//! Exit codes: 0 success, 1 invalid input or config, 2 anonymization
//! impossible (fewer rows than k), 3 verification failed, 4 I/O failure on
//! output.

use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use crate::anonymizer::{
    anonymize, build_output_table, verify_k_anonymity, AnonymizeError, ResidualPolicy,
    SearchOptions,
};
use crate::classifier::{bin_interval_columns, utility_report};
use crate::config::parse_config;
use crate::metrics::summarize;
use crate::model::{drop_identifiers, load_table, read_header, write_table, AttributeSchema, Table};
use crate::report::RunReport;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_IMPOSSIBLE: i32 = 2;
pub const EXIT_NOT_ANONYMOUS: i32 = 3;
pub const EXIT_IO: i32 = 4;

#[derive(Parser)]
#[command(
    name = "prgain",
    version,
    about = "Privacy-gain driven k-anonymization for CSV microdata"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand)]
pub enum Command {
    /// Generalize quasi-identifiers until every released row is k-anonymous.
    Anonymize(AnonymizeArgs),
    /// Check that a CSV release is k-anonymous on the configured columns.
    Verify(VerifyArgs),
    /// Compare Naive Bayes accuracy on an original/anonymized table pair.
    Evaluate(EvaluateArgs),
}

#[derive(Args)]
pub struct AnonymizeArgs {
    /// Input CSV (first row is the header).
    #[arg(long)]
    pub input: PathBuf,
    /// Run configuration JSON.
    #[arg(long)]
    pub config: PathBuf,
    /// Output CSV for the anonymized release.
    #[arg(long)]
    pub output: PathBuf,
    /// Output JSON report (metrics plus iteration trace).
    #[arg(long)]
    pub report: PathBuf,
    /// Override the configured k.
    #[arg(long)]
    pub k: Option<usize>,
    /// Override the residual policy: drop, keep or suppress.
    #[arg(long)]
    pub residual: Option<String>,
    /// Override the branch cap (0 means unlimited).
    #[arg(long)]
    pub max_branches: Option<usize>,
    /// Trace detail: winner (default) or all.
    #[arg(long)]
    pub trace: Option<String>,
}

#[derive(Args)]
pub struct VerifyArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// Run configuration JSON (used for the quasi-identifier names).
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long)]
    pub k: usize,
}

#[derive(Args)]
pub struct EvaluateArgs {
    #[arg(long)]
    pub original: PathBuf,
    #[arg(long)]
    pub anonymized: PathBuf,
    /// Class attribute to predict; must exist in both files.
    #[arg(long)]
    pub class_attr: String,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// Train fraction; 1.0 trains and tests on the full table.
    #[arg(long, default_value_t = 0.7)]
    pub split: f64,
    /// Optional run configuration; when given, interval quasi-identifier
    /// columns are binned to their level-1 labels in both tables first.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Optional path for the JSON comparison record (also printed).
    #[arg(long)]
    pub report: Option<PathBuf>,
}

pub fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            use clap::error::ErrorKind;
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_INVALID,
            };
            let _ = err.print();
            return code;
        }
    };
    match cli.command {
        Command::Anonymize(args) => cmd_anonymize(&args),
        Command::Verify(args) => cmd_verify(&args),
        Command::Evaluate(args) => cmd_evaluate(&args),
    }
}

fn fail(code: i32, message: impl std::fmt::Display) -> i32 {
    eprintln!("error: {message}");
    code
}

pub fn cmd_anonymize(args: &AnonymizeArgs) -> i32 {
    let config = match parse_config(&args.config) {
        Ok(c) => c,
        Err(e) => return fail(EXIT_INVALID, e),
    };
    let header = match read_header(&args.input) {
        Ok(h) => h,
        Err(e) => return fail(EXIT_INVALID, e),
    };
    let schema = match config.schema_for(&header) {
        Ok(s) => s,
        Err(e) => return fail(EXIT_INVALID, e),
    };
    let table = match load_table(&args.input, schema) {
        Ok(t) => t,
        Err(e) => return fail(EXIT_INVALID, e),
    };
    let working = drop_identifiers(&table);
    let qis = match config.qis_for(&working) {
        Ok(q) => q,
        Err(e) => return fail(EXIT_INVALID, e),
    };

    let k = args.k.unwrap_or(config.k);
    let residual_policy = match &args.residual {
        None => config.residual_policy,
        Some(raw) => match raw.parse::<ResidualPolicy>() {
            Ok(p) => p,
            Err(e) => return fail(EXIT_INVALID, e),
        },
    };
    let keep_all_branches = match args.trace.as_deref() {
        None | Some("winner") => false,
        Some("all") => true,
        Some(other) => return fail(EXIT_INVALID, format!("unknown trace mode '{other}'")),
    };
    let max_branches = match args.max_branches {
        None => config.max_branches,
        Some(0) => usize::MAX,
        Some(n) => n,
    };
    let options = SearchOptions {
        max_branches,
        residual_policy,
        keep_all_branches,
    };

    let started = Instant::now();
    let result = match anonymize(&working, &qis, k, &options) {
        Ok(r) => r,
        Err(AnonymizeError::NotPossible { rows, k }) => {
            return fail(
                EXIT_IMPOSSIBLE,
                format!("anonymization is not possible: {rows} rows with k = {k}"),
            )
        }
        Err(e) => return fail(EXIT_INVALID, e),
    };
    let elapsed = started.elapsed();

    let output = match build_output_table(&working, &result, &qis, residual_policy) {
        Ok(t) => t,
        Err(e) => return fail(EXIT_INVALID, e),
    };
    if let Err(e) = write_table(&output, &args.output) {
        return fail(EXIT_IO, e);
    }

    let metrics = summarize(&result, &qis, residual_policy, elapsed);
    let report = RunReport::new(&result, &metrics, qis.len(), residual_policy.to_string());
    if let Err(e) = std::fs::write(&args.report, report.to_json_pretty()) {
        return fail(EXIT_IO, format!("cannot write {}: {e}", args.report.display()));
    }

    println!(
        "anonymized {} of {} tuples (prgain {:.4}), {} residual ({}), {} iterations",
        result.anonymized_count(),
        result.total,
        result.final_prgain,
        result.residual_ids.len(),
        residual_policy,
        result.trace.len(),
    );
    EXIT_OK
}

pub fn cmd_verify(args: &VerifyArgs) -> i32 {
    let config = match parse_config(&args.config) {
        Ok(c) => c,
        Err(e) => return fail(EXIT_INVALID, e),
    };
    let header = match read_header(&args.input) {
        Ok(h) => h,
        Err(e) => return fail(EXIT_INVALID, e),
    };
    // The release may or may not still contain identifier columns; only the
    // quasi-identifiers are needed here.
    let schema: Vec<AttributeSchema> = header
        .iter()
        .map(|name| AttributeSchema::insensitive(name.clone()))
        .collect();
    let table = match load_table(&args.input, schema) {
        Ok(t) => t,
        Err(e) => return fail(EXIT_INVALID, e),
    };
    let mut qi_columns = Vec::new();
    for qi in &config.quasi_identifiers {
        match table.column_index(&qi.name) {
            Some(c) => qi_columns.push(c),
            None => {
                return fail(
                    EXIT_INVALID,
                    format!("column '{}' named in the config is missing from the input header", qi.name),
                )
            }
        }
    }

    let report = verify_k_anonymity(&table, &qi_columns, args.k);
    if report.passed {
        println!("k-anonymity holds for k = {}", args.k);
        EXIT_OK
    } else {
        println!(
            "k-anonymity FAILS for k = {}: {} offending classes",
            args.k,
            report.violations.len()
        );
        for v in &report.violations {
            println!("  class ({}) has size {}", v.key.join(", "), v.size);
        }
        EXIT_NOT_ANONYMOUS
    }
}

fn load_untyped(path: &PathBuf) -> Result<Table, crate::model::ModelError> {
    let header = read_header(path)?;
    let schema = header
        .iter()
        .map(|name| AttributeSchema::insensitive(name.clone()))
        .collect();
    load_table(path, schema)
}

pub fn cmd_evaluate(args: &EvaluateArgs) -> i32 {
    let original = match load_untyped(&args.original) {
        Ok(t) => t,
        Err(e) => return fail(EXIT_INVALID, e),
    };
    let anonymized = match load_untyped(&args.anonymized) {
        Ok(t) => t,
        Err(e) => return fail(EXIT_INVALID, e),
    };

    let (original, anonymized) = match &args.config {
        None => (original, anonymized),
        Some(config_path) => {
            let config = match parse_config(config_path) {
                Ok(c) => c,
                Err(e) => return fail(EXIT_INVALID, e),
            };
            let orig_qis = match config.qis_for(&original) {
                Ok(q) => q,
                Err(e) => return fail(EXIT_INVALID, e),
            };
            let anon_qis = match config.qis_for(&anonymized) {
                Ok(q) => q,
                Err(e) => return fail(EXIT_INVALID, e),
            };
            (
                bin_interval_columns(&original, &orig_qis),
                bin_interval_columns(&anonymized, &anon_qis),
            )
        }
    };

    let record = match utility_report(&original, &anonymized, &args.class_attr, args.seed, args.split)
    {
        Ok(r) => r,
        Err(e) => return fail(EXIT_INVALID, e),
    };

    let mut json = serde_json::to_string_pretty(&record).expect("record serializes");
    json.push('\n');
    print!("{json}");
    if let Some(path) = &args.report {
        if let Err(e) = std::fs::write(path, &json) {
            return fail(EXIT_IO, format!("cannot write {}: {e}", path.display()));
        }
    }
    EXIT_OK
}
