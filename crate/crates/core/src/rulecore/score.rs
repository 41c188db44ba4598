use serde::{Deserialize, Serialize};

use super::{Itemset, Rule, RuleError};
use crate::data::PredicateIndex;
use crate::ClassId;

/// Weight of precision against recall in the rule score.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScoreParams {
    alpha: f64,
}

impl ScoreParams {
    pub fn new(alpha: f64) -> Result<Self, RuleError> {
        if (0.0..=1.0).contains(&alpha) {
            Ok(Self { alpha })
        } else {
            Err(RuleError::AlphaOutOfRange(alpha))
        }
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }
}

/// How many training rows satisfy an itemset, in total and per class.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Counts {
    pub coverage: u32,
    pub per_class: Vec<u32>,
}

impl Counts {
    pub fn from_per_class(per_class: Vec<u32>) -> Self {
        Self { coverage: per_class.iter().sum(), per_class }
    }
}

pub fn count_coverage(itemset: &Itemset, index: &PredicateIndex) -> Counts {
    Counts::from_per_class(index.count_conjunction(&itemset.pairs()))
}

/// A rule with every quantity the search needs, computed once.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoredCandidate {
    pub rule: Rule,
    pub coverage: u32,
    pub positive: u32,
    /// Fraction of each class's training rows that satisfy the itemset.
    pub per_class_support: Vec<f64>,
    pub precision: f64,
    pub recall: f64,
    pub a_score: f64,
    /// Upper bound on the score of the rule and of every super-rule.
    pub con: f64,
}

impl ScoredCandidate {
    pub fn length(&self) -> usize {
        self.rule.length()
    }
}

#[inline]
pub(crate) fn combine(alpha: f64, precision: f64, recall: f64) -> f64 {
    alpha * precision + (1.0 - alpha) * recall
}

fn per_class_support(per_class: &[u32], class_counts: &[usize]) -> Vec<f64> {
    per_class.iter().zip(class_counts).map(|(&p, &n)| if n == 0 { 0.0 } else { p as f64 / n as f64 }).collect()
}

/// `alpha + (1 - alpha) * max_c support(s, c)`.
pub fn con(per_class_support: &[f64], params: ScoreParams) -> f64 {
    let max = per_class_support.iter().copied().fold(0.0, f64::max);
    params.alpha + (1.0 - params.alpha) * max
}

/// Score `rule` from its counts. Zero coverage is rejected: the score is 0/0.
pub fn score(
    rule: Rule,
    counts: &Counts,
    class_counts: &[usize],
    params: ScoreParams,
) -> Result<ScoredCandidate, RuleError> {
    if counts.coverage == 0 {
        return Err(RuleError::ZeroCoverage);
    }
    let y = rule.label;
    if class_counts[y] == 0 {
        return Err(RuleError::ZeroClassCount(y));
    }
    let positive = counts.per_class[y];
    let precision = positive as f64 / counts.coverage as f64;
    let recall = positive as f64 / class_counts[y] as f64;
    let support = per_class_support(&counts.per_class, class_counts);
    let con = con(&support, params);
    Ok(ScoredCandidate {
        rule,
        coverage: counts.coverage,
        positive,
        per_class_support: support,
        precision,
        recall,
        a_score: combine(params.alpha, precision, recall),
        con,
    })
}

/// Label the itemset with the class of highest score. Ties go to the larger
/// positive count, then to the smaller class id.
pub fn best_label_for(
    itemset: &Itemset,
    counts: &Counts,
    class_counts: &[usize],
    params: ScoreParams,
) -> Result<ScoredCandidate, RuleError> {
    if counts.coverage == 0 {
        return Err(RuleError::ZeroCoverage);
    }
    let mut best: Option<(ClassId, f64, u32)> = None;
    for (c, (&pos, &n)) in counts.per_class.iter().zip(class_counts).enumerate() {
        if n == 0 {
            continue;
        }
        let a = combine(params.alpha, pos as f64 / counts.coverage as f64, pos as f64 / n as f64);
        let better = match best {
            None => true,
            Some((_, ba, bp)) => a > ba || (a == ba && pos > bp),
        };
        if better {
            best = Some((c, a, pos));
        }
    }
    // coverage > 0 implies some class has rows
    let (label, _, _) = best.expect("covered itemset has a populated class");
    score(Rule::new(itemset.clone(), label), counts, class_counts, params)
}

/// `alpha + (1 - alpha) * max_c min_{s'} support(s', c)` over the per-class
/// supports of the immediate sub-itemsets.
pub fn upper_bound(sub_supports: &[&[f64]], params: ScoreParams) -> f64 {
    assert!(!sub_supports.is_empty());
    let n_classes = sub_supports[0].len();
    let max_min =
        (0..n_classes).map(|c| sub_supports.iter().map(|s| s[c]).fold(f64::INFINITY, f64::min)).fold(0.0, f64::max);
    params.alpha + (1.0 - params.alpha) * max_min
}

/// Minimum of `con` over the sub-rules. Sound but never tighter than
/// [`upper_bound`]; kept as a diagnostic.
pub fn min_con_bound(sub_cons: &[f64]) -> f64 {
    sub_cons.iter().copied().fold(f64::INFINITY, f64::min)
}

fn sub_candidates<'a>(itemset: &Itemset, level: &'a [ScoredCandidate]) -> Result<Vec<&'a ScoredCandidate>, RuleError> {
    (0..itemset.len())
        .map(|i| {
            let sub = itemset.without(i);
            level
                .binary_search_by(|c| c.rule.itemset.cmp(&sub))
                .map(|k| &level[k])
                .map_err(|_| RuleError::MissingSubRule)
        })
        .collect()
}

/// Pre-scan bound on the best score of `itemset`, from the cached supports
/// of its sub-itemsets in `level` (sorted by itemset, one length shorter).
pub fn ub(itemset: &Itemset, level: &[ScoredCandidate], params: ScoreParams) -> Result<f64, RuleError> {
    let subs = sub_candidates(itemset, level)?;
    let supports: Vec<&[f64]> = subs.iter().map(|c| c.per_class_support.as_slice()).collect();
    Ok(upper_bound(&supports, params))
}

impl ScoredCandidate {
    /// The looser min-of-con bound for `itemset` over `level`.
    pub fn min_con_for(itemset: &Itemset, level: &[ScoredCandidate]) -> Result<f64, RuleError> {
        let subs = sub_candidates(itemset, level)?;
        Ok(min_con_bound(&subs.iter().map(|c| c.con).collect::<Vec<_>>()))
    }
}
