#![allow(dead_code)]

use pic_core::data::{Dataset, FeatureKind, FeatureSpec, PredicateIndex, Schema};
use pic_core::{ClassId, ValueId, UNSEEN};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const ALPHAS: [f64; 3] = [0.5, 0.7, 0.9];

/// A small random training set with one test sample.
pub struct Instance {
    pub seed: u64,
    pub ds: Dataset,
    pub index: PredicateIndex,
    pub x: Vec<ValueId>,
    pub alpha: f64,
    pub max_length: usize,
}

/// Up to 60 rows, 8 features and 3 classes. Half the instances get labels
/// driven by a couple of features so that longer rules pay off.
pub fn instance(seed: u64) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(1..=60);
    let m = rng.gen_range(1..=8);
    let c = rng.gen_range(1..=3);
    let n_values: Vec<usize> = (0..m).map(|_| rng.gen_range(1..=4)).collect();
    let rows: Vec<Vec<ValueId>> =
        (0..n).map(|_| n_values.iter().map(|&k| rng.gen_range(0..k) as ValueId).collect()).collect();
    let structured = rng.gen_bool(0.5);
    let noise = rng.gen_range(0.0..0.3);
    let labels: Vec<ClassId> = rows
        .iter()
        .map(|r| {
            if structured && !rng.gen_bool(noise) {
                let key = r.iter().take(3).map(|&v| v as usize).sum::<usize>();
                key % c
            } else {
                rng.gen_range(0..c)
            }
        })
        .collect();
    let x: Vec<ValueId> =
        n_values.iter().map(|&k| if rng.gen_bool(0.05) { UNSEEN } else { rng.gen_range(0..k) as ValueId }).collect();
    let alpha = ALPHAS[rng.gen_range(0..ALPHAS.len())];
    let max_length = if rng.gen_bool(0.2) { rng.gen_range(1..=m) } else { 100 };

    let features =
        (0..m).map(|j| FeatureSpec { name: format!("f{j}"), kind: FeatureKind::Categorical, bins: 5 }).collect();
    let classes = (0..c).map(|k| format!("c{k}")).collect();
    let schema = Schema::new(features, classes, "y").unwrap();
    let ds = Dataset::new(schema, rows, labels, n_values).unwrap();
    let index = PredicateIndex::build(&ds);
    Instance { seed, ds, index, x, alpha, max_length }
}

/// Per-class counts of rows agreeing with `x` on every feature in `features`,
/// by direct scan.
pub fn scan_counts(ds: &Dataset, x: &[ValueId], features: &[usize]) -> Vec<u32> {
    let mut counts = vec![0u32; ds.n_classes()];
    for (row, &y) in ds.rows().iter().zip(ds.labels()) {
        if features.iter().all(|&j| row[j] == x[j]) {
            counts[y] += 1;
        }
    }
    counts
}

/// Best score over labels of the itemset `features` of `x`, from first
/// principles; `None` when no row is covered.
pub fn best_score(ds: &Dataset, x: &[ValueId], features: &[usize], alpha: f64) -> Option<f64> {
    let counts = scan_counts(ds, x, features);
    let cov: u32 = counts.iter().sum();
    if cov == 0 {
        return None;
    }
    counts
        .iter()
        .zip(ds.class_counts())
        .filter(|(_, &n)| n > 0)
        .map(|(&p, &n)| alpha * p as f64 / cov as f64 + (1.0 - alpha) * p as f64 / n as f64)
        .reduce(f64::max)
}

/// Every non-empty subset of `0..m`, as sorted feature lists.
pub fn subsets(m: usize) -> Vec<Vec<usize>> {
    (1u32..(1 << m)).map(|mask| (0..m).filter(|&j| mask & (1 << j) != 0).collect()).collect()
}

pub fn is_subset(a: &[usize], b: &[usize]) -> bool {
    a.iter().all(|j| b.contains(j))
}
