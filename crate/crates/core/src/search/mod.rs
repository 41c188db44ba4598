//! Per-sample rule search.
//!
//! Three engines find the rule for one encoded test sample:
//!
//! - [`run_naive`] scores every length-`k` itemset of the sample's predicates,
//!   level by level, and stops as soon as a level fails to strictly improve.
//! - [`run_pic`] follows the same level loop but only joins surviving
//!   candidates and drops those whose bounds cannot beat the incumbent.
//! - [`run_oracle`] enumerates every subset by brute force and simulates the
//!   same stopping rule. It exists to check the other two.
//!
//! All three return the same rule on every input. [`predict`] wraps them and
//! falls back to the training majority class when nothing matches.

mod explain;
mod greedy;
mod oracle;

pub use explain::Explanation;
pub use greedy::{
    enumerate_level, generate_candidates, run_naive, run_pic, run_pic_traced, seed_level_one, PicTrace, PruneKind,
    Pruned,
};
pub use oracle::{run_oracle, OracleReport, OracleRule, ORACLE_MAX_FEATURES};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::data::{Dataset, PredicateIndex};
use crate::rulecore::{ScoreParams, ScoredCandidate};
use crate::{ClassId, ValueId};

pub const DEFAULT_MAX_LENGTH: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Engine {
    Naive,
    #[default]
    Pic,
    Oracle,
}

#[derive(Debug, Error, PartialEq)]
pub enum SearchError {
    #[error("max_length must be at least 1")]
    ZeroMaxLength,
    #[error("exhaustive search supports at most {max} features, got {got}")]
    TooManyFeatures { got: usize, max: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SearchParams {
    pub score: ScoreParams,
    pub max_length: usize,
    pub engine: Engine,
}

impl SearchParams {
    pub fn new(score: ScoreParams, max_length: usize, engine: Engine) -> Result<Self, SearchError> {
        if max_length == 0 {
            return Err(SearchError::ZeroMaxLength);
        }
        Ok(Self { score, max_length, engine })
    }

    pub fn with_alpha(alpha: f64) -> Result<Self, crate::rulecore::RuleError> {
        Ok(Self { score: ScoreParams::new(alpha)?, max_length: DEFAULT_MAX_LENGTH, engine: Engine::Pic })
    }
}

/// Work done by one search.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counters {
    /// Itemsets emitted by candidate generation.
    pub generated: u64,
    /// Itemsets whose coverage was counted.
    pub scored: u64,
    /// Counted itemsets that matched no training row.
    pub zero_coverage: u64,
    pub pruned_by_ub: u64,
    pub pruned_by_con: u64,
    pub pruned_by_subrule: u64,
}

impl std::ops::AddAssign for Counters {
    fn add_assign(&mut self, o: Self) {
        self.generated += o.generated;
        self.scored += o.scored;
        self.zero_coverage += o.zero_coverage;
        self.pruned_by_ub += o.pruned_by_ub;
        self.pruned_by_con += o.pruned_by_con;
        self.pruned_by_subrule += o.pruned_by_subrule;
    }
}

/// State of the level loop after finishing level `k`.
#[derive(Debug, Clone, PartialEq)]
pub struct LevelState {
    pub k: usize,
    /// Surviving candidates of length `k`, sorted by itemset.
    pub candidates: Vec<ScoredCandidate>,
    pub best_of_level: Option<ScoredCandidate>,
    pub best_global: Option<ScoredCandidate>,
    pub counters: Counters,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Fallback {
    None,
    MajorityClass,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchResult {
    pub rule: Option<ScoredCandidate>,
    pub predicted_label: ClassId,
    /// Last level whose candidates were generated.
    pub stopped_at_level: usize,
    pub fallback: Fallback,
    pub counters: Counters,
}

impl SearchResult {
    fn from_rule(rule: Option<ScoredCandidate>, stopped_at_level: usize, counters: Counters, ds: &Dataset) -> Self {
        match rule {
            Some(r) => Self {
                predicted_label: r.rule.label,
                rule: Some(r),
                stopped_at_level,
                fallback: Fallback::None,
                counters,
            },
            None => Self {
                rule: None,
                predicted_label: ds.majority_class(),
                stopped_at_level,
                fallback: Fallback::MajorityClass,
                counters,
            },
        }
    }
}

/// Classify `x` with the configured engine. When no predicate of `x` covers a
/// training row the training majority class is predicted instead.
pub fn predict(
    x: &[ValueId],
    ds: &Dataset,
    index: &PredicateIndex,
    params: &SearchParams,
) -> Result<SearchResult, SearchError> {
    match params.engine {
        Engine::Pic => Ok(run_pic(x, ds, index, params)),
        Engine::Naive => Ok(run_naive(x, ds, index, params)),
        Engine::Oracle => {
            let report = run_oracle(x, ds, params.score, params.max_length)?;
            Ok(report.into_search_result(ds))
        }
    }
}
