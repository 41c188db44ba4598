use itertools::Itertools;

use super::{Counters, LevelState, SearchParams, SearchResult};
use crate::data::{Dataset, PredicateIndex};
use crate::rulecore::{best_label_for, count_coverage, ub, Itemset, ScoreParams, ScoredCandidate};
use crate::ValueId;

fn score_itemset(
    itemset: &Itemset,
    ds: &Dataset,
    index: &PredicateIndex,
    params: ScoreParams,
    counters: &mut Counters,
) -> Option<ScoredCandidate> {
    counters.scored += 1;
    let counts = count_coverage(itemset, index);
    if counts.coverage == 0 {
        counters.zero_coverage += 1;
        return None;
    }
    Some(best_label_for(itemset, &counts, ds.class_counts(), params).expect("covered itemset scores"))
}

/// Index of the first candidate with the highest score.
fn first_best(level: &[ScoredCandidate]) -> Option<usize> {
    let mut best: Option<usize> = None;
    for (i, c) in level.iter().enumerate() {
        if best.is_none_or(|b| c.a_score > level[b].a_score) {
            best = Some(i);
        }
    }
    best
}

/// Score the `M` single-predicate itemsets of `x`. Predicates that cover no
/// training row are dropped.
pub fn seed_level_one(x: &[ValueId], ds: &Dataset, index: &PredicateIndex, params: ScoreParams) -> LevelState {
    let mut counters = Counters::default();
    let mut candidates = Vec::with_capacity(x.len());
    for j in 0..x.len() {
        counters.generated += 1;
        let itemset = Itemset::from_sample(x, &[j]);
        if let Some(c) = score_itemset(&itemset, ds, index, params, &mut counters) {
            candidates.push(c);
        }
    }
    let best = first_best(&candidates).map(|b| candidates[b].clone());
    LevelState { k: 1, candidates, best_of_level: best.clone(), best_global: best, counters }
}

/// Join pairs of `r_k` sharing their first `k - 1` predicates, then keep the
/// joins whose every length-`k` sub-itemset is in `r_k`. Returns the kept
/// itemsets in lexicographic order and the number rejected by the check.
fn join(r_k: &[ScoredCandidate]) -> (Vec<Itemset>, u64) {
    debug_assert!(r_k.windows(2).all(|w| w[0].rule.itemset < w[1].rule.itemset));
    let mut out = Vec::new();
    let mut rejected = 0;
    let contains = |s: &Itemset| r_k.binary_search_by(|c| c.rule.itemset.cmp(s)).is_ok();
    for (i, a) in r_k.iter().enumerate() {
        let a = a.rule.itemset.predicates();
        let (prefix, a_last) = a.split_at(a.len() - 1);
        for b in &r_k[i + 1..] {
            let b = b.rule.itemset.predicates();
            if &b[..b.len() - 1] != prefix {
                break;
            }
            let b_last = b[b.len() - 1];
            if b_last.feature == a_last[0].feature {
                // same feature, different value: not from one sample
                continue;
            }
            let cand = Itemset::new(a.iter().copied().chain([b_last]).collect()).expect("distinct features");
            // dropping either of the last two predicates gives a or b
            if (0..prefix.len()).all(|p| contains(&cand.without(p))) {
                out.push(cand);
            } else {
                rejected += 1;
            }
        }
    }
    (out, rejected)
}

/// Candidate itemsets of length `k + 1` built from the surviving level `r_k`
/// (sorted by itemset). Every returned itemset has all of its length-`k`
/// sub-itemsets in `r_k`.
pub fn generate_candidates(r_k: &[ScoredCandidate], k: usize) -> Vec<Itemset> {
    debug_assert!(r_k.iter().all(|c| c.length() == k));
    join(r_k).0
}

/// Why a candidate left the search.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PruneKind {
    /// Its bound from cached sub-itemset supports did not beat the incumbent.
    Ub,
    /// Its own `con` did not beat the incumbent; no super-rule is generated.
    Con,
}

/// A pruning decision and the incumbent score it was made against.
#[derive(Debug, Clone, PartialEq)]
pub struct Pruned {
    pub itemset: Itemset,
    pub kind: PruneKind,
    pub bound: f64,
    pub incumbent: f64,
}

/// Everything the pruned search looked at, for inspection and tests.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct PicTrace {
    /// Scored candidates per level, before `con` pruning.
    pub levels: Vec<Vec<ScoredCandidate>>,
    /// Bound of every generated candidate from level 2 on.
    pub ub: Vec<(Itemset, f64)>,
    pub pruned: Vec<Pruned>,
}

/// Level-wise search with sub-itemset, `ub` and `con` pruning.
pub fn run_pic(x: &[ValueId], ds: &Dataset, index: &PredicateIndex, params: &SearchParams) -> SearchResult {
    run_pic_traced(x, ds, index, params).0
}

pub fn run_pic_traced(
    x: &[ValueId],
    ds: &Dataset,
    index: &PredicateIndex,
    params: &SearchParams,
) -> (SearchResult, PicTrace) {
    let score_params = params.score;
    let mut trace = PicTrace::default();
    let LevelState { mut candidates, best_of_level, best_global, mut counters, .. } =
        seed_level_one(x, ds, index, score_params);
    trace.levels.push(candidates.clone());
    let Some(mut best) = best_global else {
        return (SearchResult::from_rule(None, 1, counters, ds), trace);
    };
    let mut prev_level_score = best_of_level.map_or(f64::NEG_INFINITY, |c| c.a_score);
    prune_by_con(&mut candidates, best.a_score, &mut counters, &mut trace);

    let mut k = 1;
    while k < params.max_length {
        let (next, rejected) = join(&candidates);
        counters.generated += next.len() as u64 + rejected;
        counters.pruned_by_subrule += rejected;
        if next.is_empty() {
            break;
        }
        k += 1;

        let mut level = Vec::new();
        for itemset in next {
            let bound = ub(&itemset, &candidates, score_params).expect("sub-itemsets checked by join");
            trace.ub.push((itemset.clone(), bound));
            if bound <= best.a_score {
                counters.pruned_by_ub += 1;
                trace.pruned.push(Pruned { itemset, kind: PruneKind::Ub, bound, incumbent: best.a_score });
                continue;
            }
            let Some(c) = score_itemset(&itemset, ds, index, score_params, &mut counters) else {
                continue;
            };
            if c.a_score > best.a_score {
                best = c.clone();
            }
            level.push(c);
        }
        trace.levels.push(level.clone());

        let level_score = first_best(&level).map_or(f64::NEG_INFINITY, |b| level[b].a_score);
        if level_score <= prev_level_score {
            // `best` was only replaced on strict improvement, so it is still
            // the previous level's winner
            break;
        }
        prev_level_score = level_score;
        prune_by_con(&mut level, best.a_score, &mut counters, &mut trace);
        candidates = level;
    }
    (SearchResult::from_rule(Some(best), k, counters, ds), trace)
}

fn prune_by_con(level: &mut Vec<ScoredCandidate>, incumbent: f64, counters: &mut Counters, trace: &mut PicTrace) {
    level.retain(|c| {
        if c.con <= incumbent {
            counters.pruned_by_con += 1;
            trace.pruned.push(Pruned {
                itemset: c.rule.itemset.clone(),
                kind: PruneKind::Con,
                bound: c.con,
                incumbent,
            });
            false
        } else {
            true
        }
    });
}

/// Every length-`k` itemset over the predicates of `x` in lexicographic
/// order, with its best-labeled rule or `None` when it covers no row.
pub fn enumerate_level(
    x: &[ValueId],
    ds: &Dataset,
    index: &PredicateIndex,
    params: ScoreParams,
    k: usize,
) -> Vec<(Itemset, Option<ScoredCandidate>)> {
    let mut counters = Counters::default();
    (0..x.len())
        .combinations(k)
        .map(|features| {
            let s = Itemset::from_sample(x, &features);
            let c = score_itemset(&s, ds, index, params, &mut counters);
            (s, c)
        })
        .collect()
}

/// Level-wise search scoring every itemset of each level, no pruning.
pub fn run_naive(x: &[ValueId], ds: &Dataset, index: &PredicateIndex, params: &SearchParams) -> SearchResult {
    let state = seed_level_one(x, ds, index, params.score);
    let mut counters = state.counters;
    let Some(mut best) = state.best_global else {
        return SearchResult::from_rule(None, 1, counters, ds);
    };
    let mut k = 1;
    while k < params.max_length.min(x.len()) {
        k += 1;
        let mut level = Vec::new();
        for features in (0..x.len()).combinations(k) {
            counters.generated += 1;
            let s = Itemset::from_sample(x, &features);
            if let Some(c) = score_itemset(&s, ds, index, params.score, &mut counters) {
                level.push(c);
            }
        }
        match first_best(&level) {
            Some(b) if level[b].a_score > best.a_score => best = level.swap_remove(b),
            _ => break,
        }
    }
    SearchResult::from_rule(Some(best), k, counters, ds)
}
