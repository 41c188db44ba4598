//! Dataset ingestion, discretization, encoding and the predicate index.

mod bitset;
mod discretize;
mod encode;
mod index;
mod table;

pub use bitset::Bitset;
pub use discretize::{Discretizer, EqualWidth};
pub use encode::{Dataset, Encoder};
pub use index::PredicateIndex;
pub use table::{
    load_dataset, load_dataset_path, load_rows_for, load_rows_for_path, FeatureKind, FeatureSpec, LabeledRows,
    LoadConfig, RawTable, Schema,
};

use thiserror::Error;

/// Dense per-feature value id.
pub type ValueId = u32;

/// Index into [`Schema::classes`].
pub type ClassId = usize;

/// Value id assigned to test-time categorical values never seen in training.
/// It matches no training row, so every predicate carrying it has zero coverage.
pub const UNSEEN: ValueId = ValueId::MAX;

pub const DEFAULT_BINS: usize = 5;
pub const DEFAULT_MISSING: &str = "?";

#[derive(Debug, Error)]
pub enum DataError {
    #[error("target column not found: {0:?}")]
    TargetNotFound(String),
    #[error("column {0:?} not found")]
    MissingColumn(String),
    #[error("line {line}: expected {expected} fields, found {found}")]
    Ragged { line: u64, expected: usize, found: usize },
    #[error("empty dataset")]
    Empty,
    #[error("numeric feature {0:?} has no non-missing training values")]
    NoNumericValues(String),
    #[error("invalid schema: {0}")]
    Schema(String),
    #[error("{0}")]
    Csv(#[from] csv::Error),
    #[error("{0}")]
    Io(#[from] std::io::Error),
}

impl DataError {
    /// 1-based line number in the source text, when the error carries one.
    pub fn line(&self) -> Option<u64> {
        match self {
            DataError::Ragged { line, .. } => Some(*line),
            DataError::Csv(e) => e.position().map(|p| p.line()),
            _ => None,
        }
    }
}
