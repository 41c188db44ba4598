use serde::Serialize;

use super::{Counters, SearchError, SearchResult};
use crate::data::Dataset;
use crate::rulecore::{score, Counts, Itemset, Rule, ScoreParams};
use crate::{ClassId, ValueId};

/// Largest feature count the exhaustive search accepts (`2^20 - 1` subsets).
pub const ORACLE_MAX_FEATURES: usize = 20;

/// Best rule of one subset size, found by brute force.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleRule {
    /// Feature indices of the itemset, increasing.
    pub features: Vec<usize>,
    pub label: ClassId,
    pub coverage: u32,
    pub per_class: Vec<u32>,
    pub a_score: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleReport {
    pub sample: Vec<ValueId>,
    pub alpha: f64,
    /// `level_best[k - 1]` is the best rule of length `k`, for every `k` up to
    /// the number of features.
    pub level_best: Vec<Option<OracleRule>>,
    /// What the greedy stopping rule returns under the length cap.
    pub greedy: Option<OracleRule>,
    /// Last level the greedy simulation looked at.
    pub greedy_stop: usize,
    /// Best rule of any length.
    pub exhaustive_best: Option<OracleRule>,
    pub evaluated: u64,
    pub zero_coverage: u64,
}

/// Score every non-empty subset of the predicates of `x` by scanning the
/// training rows directly, then replay the greedy stopping rule on the
/// per-level bests.
pub fn run_oracle(
    x: &[ValueId],
    ds: &Dataset,
    params: ScoreParams,
    max_length: usize,
) -> Result<OracleReport, SearchError> {
    let m = x.len();
    if m > ORACLE_MAX_FEATURES {
        return Err(SearchError::TooManyFeatures { got: m, max: ORACLE_MAX_FEATURES });
    }
    let alpha = params.alpha();
    let class_sizes: Vec<u32> = {
        let mut sizes = vec![0u32; ds.n_classes()];
        for &y in ds.labels() {
            sizes[y] += 1;
        }
        sizes
    };
    // bit j of agree[i] is set when row i has the sample's value on feature j
    let agree: Vec<u32> = ds
        .rows()
        .iter()
        .map(|row| row.iter().zip(x).enumerate().filter(|(_, (a, b))| a == b).fold(0u32, |acc, (j, _)| acc | (1 << j)))
        .collect();

    let mut level_best: Vec<Option<OracleRule>> = vec![None; m];
    let mut evaluated = 0;
    let mut zero_coverage = 0;
    for mask in 1u32..(1u32 << m) {
        evaluated += 1;
        let mut per_class = vec![0u32; ds.n_classes()];
        for (i, &a) in agree.iter().enumerate() {
            if mask & !a == 0 {
                per_class[ds.labels()[i]] += 1;
            }
        }
        let coverage: u32 = per_class.iter().sum();
        if coverage == 0 {
            zero_coverage += 1;
            continue;
        }
        let mut label = None;
        let mut label_score = f64::NEG_INFINITY;
        for c in 0..per_class.len() {
            if class_sizes[c] == 0 {
                continue;
            }
            let pos = per_class[c];
            let a = alpha * (pos as f64 / coverage as f64) + (1.0 - alpha) * (pos as f64 / class_sizes[c] as f64);
            let wins = match label {
                None => true,
                Some(l) => a > label_score || (a == label_score && pos > per_class[l]),
            };
            if wins {
                label = Some(c);
                label_score = a;
            }
        }
        let features: Vec<usize> = (0..m).filter(|&j| mask & (1 << j) != 0).collect();
        let slot = &mut level_best[features.len() - 1];
        let better = match slot {
            None => true,
            Some(b) => label_score > b.a_score || (label_score == b.a_score && features < b.features),
        };
        if better {
            *slot = Some(OracleRule {
                features,
                label: label.expect("covered subset has a populated class"),
                coverage,
                per_class,
                a_score: label_score,
            });
        }
    }

    let mut greedy: Option<OracleRule> = None;
    let mut greedy_stop = 0;
    for k in 1..=m.min(max_length) {
        greedy_stop = k;
        match &level_best[k - 1] {
            Some(b) if greedy.as_ref().is_none_or(|g| b.a_score > g.a_score) => greedy = Some(b.clone()),
            _ => break,
        }
    }
    let exhaustive_best = level_best
        .iter()
        .flatten()
        .fold(None::<&OracleRule>, |acc, r| match acc {
            Some(a) if a.a_score >= r.a_score => Some(a),
            _ => Some(r),
        })
        .cloned();

    Ok(OracleReport {
        sample: x.to_vec(),
        alpha,
        level_best,
        greedy,
        greedy_stop: greedy_stop.max(1),
        exhaustive_best,
        evaluated,
        zero_coverage,
    })
}

impl OracleReport {
    pub(super) fn into_search_result(self, ds: &Dataset) -> SearchResult {
        let counters = Counters {
            generated: self.evaluated,
            scored: self.evaluated,
            zero_coverage: self.zero_coverage,
            ..Counters::default()
        };
        let rule = self.greedy.map(|g| {
            let itemset = Itemset::from_sample(&self.sample, &g.features);
            let counts = Counts::from_per_class(g.per_class);
            let params = ScoreParams::new(self.alpha).expect("alpha was validated");
            score(Rule::new(itemset, g.label), &counts, ds.class_counts(), params).expect("covered rule scores")
        });
        SearchResult::from_rule(rule, self.greedy_stop, counters, ds)
    }
}
