//! Repeated k-fold cross-validation, rule statistics and rule-set comparison.

mod cv;
mod rules;

pub use cv::{
    assign_folds, fit_fold, per_run_csv, run_cv, CvConfig, EvalReport, FoldModel, Prediction, RuleCount, DEFAULT_FOLDS,
    DEFAULT_REPEATS,
};
pub use rules::{
    compare_rule_sets, histogram_csv, histogram_json, parse_rule_file, rule_frequency_histogram, HistogramEntry,
    NamedPredicate, NamedRule, RuleComparison, Vocabulary,
};

use thiserror::Error;

use crate::data::DataError;
use crate::search::SearchError;

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("folds must be at least 2, got {0}")]
    TooFewFolds(usize),
    #[error("repeats must be at least 1")]
    ZeroRepeats,
    #[error("class {class:?} has {count} rows, fewer than the {folds} folds")]
    ClassTooSmall { class: String, count: usize, folds: usize },
    #[error("{rows} rows cannot fill {folds} folds")]
    TooFewRows { rows: usize, folds: usize },
    #[error("unknown {kind} {token:?}")]
    Vocabulary { kind: &'static str, token: String },
    #[error("rule repeats feature {0:?}")]
    DuplicateFeature(String),
    #[error("rule file: {0}")]
    RuleFile(#[from] serde_json::Error),
    #[error(transparent)]
    Data(#[from] DataError),
    #[error(transparent)]
    Search(#[from] SearchError),
}
