//! Datasets, delimited-file ingestion, standardization, splitting and the
//! synthetic generators used by the experiments.

mod dataset;
mod io;
mod split;
mod standardize;
mod synth;

pub use dataset::{Column, ColumnKind, Dataset};
pub use io::{load_delimited, write_delimited, SchemaHint};
pub use split::{permutation, split};
pub use standardize::{standardize, Standardization};
pub use synth::{synth_generate, Link, SynthEdge, SynthSpec};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DataError {
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
    #[error("malformed delimited input at line {line}: {message}")]
    Malformed { line: u64, message: String },
    #[error("line {line} has {found} fields, header has {expected}")]
    Ragged { line: u64, expected: usize, found: usize },
    #[error("missing value at line {line}, column '{column}'")]
    MissingValue { line: u64, column: String },
    #[error("cannot parse '{cell}' at line {line}, column '{column}'")]
    Unparseable { line: u64, column: String, cell: String },
    #[error("no data rows")]
    Empty,
    #[error("column '{column}' is constant on the fitting rows")]
    ConstantColumn { column: String },
    #[error("column '{column}' has {levels} levels, more than its arity {arity}")]
    ArityExceeded { column: String, levels: usize, arity: usize },
    #[error("unknown column '{0}'")]
    UnknownColumn(String),
    #[error("duplicate column name '{0}'")]
    DuplicateColumn(String),
    #[error("invalid schema hint '{0}' (expected 'continuous' or 'discrete:<arity>')")]
    InvalidHint(String),
    #[error("invalid dataset: {0}")]
    Invalid(String),
    #[error("invalid generator spec: {0}")]
    InvalidSpec(String),
    #[error("generator edges contain a cycle")]
    CyclicSpec,
    #[error("test_count {test_count} must lie strictly between 0 and {rows}")]
    TestCountOutOfRange { test_count: usize, rows: usize },
}
