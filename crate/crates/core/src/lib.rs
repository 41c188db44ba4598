//! Personalized interpretable classification.
//!
//! No global model is trained. For every test sample the training data is
//! searched level by level for the shortest conjunctive rule that the sample
//! satisfies and that scores best under a precision/recall trade-off. The
//! rule's label is the prediction and the rule itself is the explanation.
//!
//! The crate is split into:
//!
//! - [`data`]: delimited-text ingestion, equal-width discretization, value
//!   encoding and the bitset predicate index.
//! - [`rulecore`]: predicates, itemsets, rules and every scoring quantity
//!   (precision, recall, the combined score, per-class support and the two
//!   pruning bounds).
//! - [`search`]: the naive greedy level-wise search, the pruned search, an
//!   exhaustive oracle and the prediction wrapper.
//! - [`eval`]: repeated stratified k-fold cross-validation, rule statistics
//!   and common-versus-personalized rule comparison.

pub mod data;
pub mod eval;
pub mod rulecore;
pub mod search;

pub use data::{ClassId, ValueId, UNSEEN};
