//! Predicates, itemsets, rules and their scores.

mod render;
mod rule;
mod score;

pub use render::{render_itemset, render_rule, PredicateRecord, RuleRecord};
pub use rule::{matches, Itemset, Predicate, Rule};
pub use score::{
    best_label_for, con, count_coverage, min_con_bound, score, ub, upper_bound, Counts, ScoreParams, ScoredCandidate,
};

use thiserror::Error;

use crate::ClassId;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RuleError {
    #[error("an itemset needs at least one predicate")]
    EmptyItemset,
    #[error("more than one predicate on feature {0}")]
    DuplicateFeature(usize),
    #[error("itemset covers no training row; its score is undefined")]
    ZeroCoverage,
    #[error("class {0} has no training rows")]
    ZeroClassCount(ClassId),
    #[error("alpha must lie in [0, 1], got {0}")]
    AlphaOutOfRange(f64),
    #[error("sub-itemset missing from the previous level")]
    MissingSubRule,
}
