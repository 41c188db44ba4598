mod common;

use common::{best_score, instance, is_subset, subsets, Instance};
use pic_core::rulecore::ScoreParams;
use pic_core::search::{run_naive, run_oracle, run_pic, run_pic_traced, Engine, Fallback, PruneKind, SearchParams};
use proptest::prelude::*;

const EPS: f64 = 1e-12;

fn params(inst: &Instance) -> SearchParams {
    SearchParams::new(ScoreParams::new(inst.alpha).unwrap(), inst.max_length, Engine::Pic).unwrap()
}

fn check_equivalence(inst: &Instance) -> Result<(), TestCaseError> {
    let p = params(inst);
    let pic = run_pic(&inst.x, &inst.ds, &inst.index, &p);
    let naive = run_naive(&inst.x, &inst.ds, &inst.index, &p);
    let oracle = run_oracle(&inst.x, &inst.ds, p.score, p.max_length).unwrap();

    prop_assert_eq!(&pic.rule, &naive.rule, "seed {}", inst.seed);
    prop_assert_eq!(pic.predicted_label, naive.predicted_label);
    match (&pic.rule, &oracle.greedy) {
        (None, None) => {
            prop_assert_eq!(pic.fallback, Fallback::MajorityClass);
            prop_assert_eq!(pic.predicted_label, inst.ds.majority_class());
        }
        (Some(r), Some(g)) => {
            prop_assert_eq!(r.a_score, g.a_score, "seed {}", inst.seed);
            prop_assert_eq!(r.rule.itemset.features().collect::<Vec<_>>(), g.features.clone(), "seed {}", inst.seed);
            prop_assert_eq!(r.rule.label, g.label);
            prop_assert!(r.rule.itemset.matches(&inst.x));
            prop_assert!(r.length() <= inst.max_length);
        }
        _ => prop_assert!(false, "seed {}: pic {:?} vs oracle {:?}", inst.seed, pic.rule, oracle.greedy),
    }
    prop_assert!(pic.counters.scored <= naive.counters.scored);

    // greedy stops at the first level that fails to improve
    let stop = oracle.greedy_stop;
    let levels: Vec<f64> =
        oracle.level_best[..stop].iter().map(|b| b.as_ref().map_or(f64::NEG_INFINITY, |b| b.a_score)).collect();
    for w in levels.windows(2).take(stop.saturating_sub(2)) {
        prop_assert!(w[0] < w[1]);
    }

    prop_assert_eq!(run_pic(&inst.x, &inst.ds, &inst.index, &p), pic);
    Ok(())
}

fn check_pruning_soundness(inst: &Instance) -> Result<(), TestCaseError> {
    let p = params(inst);
    let (result, trace) = run_pic_traced(&inst.x, &inst.ds, &inst.index, &p);
    let returned = result.rule.as_ref().map_or(f64::NEG_INFINITY, |r| r.a_score);
    let all = subsets(inst.x.len());
    for pruned in &trace.pruned {
        let feats: Vec<usize> = pruned.itemset.features().collect();
        prop_assert!(pruned.incumbent <= returned + EPS);
        let affected: Vec<&Vec<usize>> = match pruned.kind {
            PruneKind::Ub => vec![&feats],
            PruneKind::Con => all.iter().filter(|s| s.len() > feats.len() && is_subset(&feats, s)).collect(),
        };
        for s in affected {
            if let Some(a) = best_score(&inst.ds, &inst.x, s, inst.alpha) {
                prop_assert!(
                    a <= pruned.incumbent + EPS,
                    "seed {}: {:?} pruned by {:?} at {} but {:?} scores {}",
                    inst.seed,
                    feats,
                    pruned.kind,
                    pruned.incumbent,
                    s,
                    a
                );
            }
        }
    }
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn engines_agree(seed in any::<u64>()) {
        check_equivalence(&instance(seed))?;
    }

    #[test]
    fn pruned_candidates_cannot_win(seed in any::<u64>()) {
        check_pruning_soundness(&instance(seed))?;
    }
}

#[test]
fn engines_agree_on_fixed_seeds() {
    let mut seen = pic_core::search::Counters::default();
    for seed in 0..250 {
        let inst = instance(seed);
        check_equivalence(&inst).unwrap();
        check_pruning_soundness(&inst).unwrap();
        seen += run_pic(&inst.x, &inst.ds, &inst.index, &params(&inst)).counters;
    }
    // every pruning rule fires somewhere in the sample
    assert!(seen.pruned_by_ub > 0 && seen.pruned_by_con > 0 && seen.pruned_by_subrule > 0, "{seen:?}");
}

/// Greedy stops when a level fails to improve, even if a longer rule would.
#[test]
fn oracle_exposes_greedy_early_stop() {
    let found = (0..20_000u64).find_map(|seed| {
        let inst = instance(seed);
        let p = params(&inst);
        if p.max_length < inst.x.len() {
            return None;
        }
        let o = run_oracle(&inst.x, &inst.ds, p.score, p.max_length).unwrap();
        let (g, best) = (o.greedy.as_ref()?, o.exhaustive_best.as_ref()?);
        (best.a_score > g.a_score + EPS && best.features.len() > o.greedy_stop).then_some((
            inst,
            g.a_score,
            best.a_score,
        ))
    });
    let (inst, greedy, best) = found.expect("some seed shows an early stop");
    let r = run_pic(&inst.x, &inst.ds, &inst.index, &params(&inst));
    assert_eq!(r.rule.unwrap().a_score, greedy);
    assert!(best > greedy);
}
