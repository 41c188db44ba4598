use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{EvalError, NamedRule};
use crate::data::{Dataset, Encoder, PredicateIndex, RawTable};
use crate::search::{predict, Engine, SearchParams};
use crate::ClassId;

pub const DEFAULT_FOLDS: usize = 5;
pub const DEFAULT_REPEATS: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CvConfig {
    pub folds: usize,
    pub repeats: usize,
    pub seed: u64,
    pub stratified: bool,
    pub search: SearchParams,
}

impl CvConfig {
    pub fn new(search: SearchParams) -> Self {
        Self { folds: DEFAULT_FOLDS, repeats: DEFAULT_REPEATS, seed: 0, stratified: true, search }
    }

    /// Check the config against the table it will run on.
    pub fn validate(&self, table: &RawTable) -> Result<(), EvalError> {
        if self.folds < 2 {
            return Err(EvalError::TooFewFolds(self.folds));
        }
        if self.repeats == 0 {
            return Err(EvalError::ZeroRepeats);
        }
        if self.stratified {
            for (c, &count) in table.class_counts().iter().enumerate() {
                if count < self.folds {
                    return Err(EvalError::ClassTooSmall {
                        class: table.schema.classes()[c].clone(),
                        count,
                        folds: self.folds,
                    });
                }
            }
        } else if table.len() < self.folds {
            return Err(EvalError::TooFewRows { rows: table.len(), folds: self.folds });
        }
        Ok(())
    }
}

/// Fold of every row for one repeat. Rows are shuffled with a generator
/// seeded from `(seed, repeat)` and dealt round-robin; when stratified, each
/// class is shuffled and dealt in turn so every fold gets its share of it.
pub fn assign_folds(
    labels: &[ClassId],
    n_classes: usize,
    folds: usize,
    stratified: bool,
    seed: u64,
    repeat: usize,
) -> Vec<usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(repeat as u64);
    let groups: Vec<Vec<usize>> = if stratified {
        let mut g = vec![Vec::new(); n_classes];
        for (i, &y) in labels.iter().enumerate() {
            g[y].push(i);
        }
        g
    } else {
        vec![(0..labels.len()).collect()]
    };
    let mut fold_of = vec![0; labels.len()];
    let mut next = 0;
    for mut group in groups {
        group.shuffle(&mut rng);
        for i in group {
            fold_of[i] = next;
            next = (next + 1) % folds;
        }
    }
    fold_of
}

/// Everything fitted on one fold's training rows.
pub struct FoldModel {
    pub encoder: Encoder,
    pub dataset: Dataset,
    pub index: PredicateIndex,
}

/// Fit bin edges, dictionaries and the index on the rows in `train` only.
pub fn fit_fold(table: &RawTable, train: &[usize]) -> Result<FoldModel, EvalError> {
    let train_table = table.select(train);
    let encoder = Encoder::fit(&train_table)?;
    let dataset = encoder.encode_table(&train_table);
    let index = PredicateIndex::build(&dataset);
    Ok(FoldModel { encoder, dataset, index })
}

/// One held-out prediction.
#[derive(Debug, Clone, PartialEq)]
pub struct Prediction {
    pub repeat: usize,
    pub fold: usize,
    pub row: usize,
    pub actual: ClassId,
    pub predicted: ClassId,
    pub rule: Option<NamedRule>,
}

/// A distinct returned rule and how many predictions it made.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RuleCount {
    pub rule_text: String,
    #[serde(flatten)]
    pub rule: NamedRule,
    pub length: usize,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub n_rows: usize,
    pub folds: usize,
    pub repeats: usize,
    pub seed: u64,
    pub stratified: bool,
    pub alpha: f64,
    pub max_length: usize,
    pub engine: Engine,
    pub n_predictions: usize,
    pub accuracy_mean: f64,
    pub accuracy_std: f64,
    pub accuracy_per_run: Vec<f64>,
    /// Mean length over every returned rule, `None` when all were fallbacks.
    pub avg_rule_length: Option<f64>,
    /// Distinct rules pooled over all runs.
    pub n_distinct_rules: usize,
    pub distinct_rules_per_run: Vec<usize>,
    pub mean_distinct_rules_per_run: f64,
    pub fallback_rate: f64,
    /// Distinct rules, most frequent first.
    pub rules: Vec<RuleCount>,
    /// Seconds spent, only when the caller asks for it; leaving it out keeps
    /// reports from identical runs byte-identical.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wall_time: Option<f64>,
    #[serde(skip)]
    pub predictions: Vec<Prediction>,
}

/// Repeated (stratified) k-fold cross-validation. Folds run in parallel on
/// the current rayon pool; results are reduced in (repeat, fold, row) order.
pub fn run_cv(table: &RawTable, config: &CvConfig) -> Result<EvalReport, EvalError> {
    config.validate(table)?;
    let n_classes = table.schema.n_classes();
    let mut jobs = Vec::with_capacity(config.repeats * config.folds);
    for repeat in 0..config.repeats {
        let fold_of = assign_folds(&table.labels, n_classes, config.folds, config.stratified, config.seed, repeat);
        for fold in 0..config.folds {
            let (test, train): (Vec<usize>, Vec<usize>) = (0..table.len()).partition(|&i| fold_of[i] == fold);
            jobs.push((repeat, fold, train, test));
        }
    }

    let per_fold: Vec<Vec<Prediction>> = jobs
        .par_iter()
        .map(|(repeat, fold, train, test)| -> Result<Vec<Prediction>, EvalError> {
            let model = fit_fold(table, train)?;
            test.par_iter()
                .map(|&row| {
                    let x = model.encoder.encode_row(&table.rows[row]);
                    let r = predict(&x, &model.dataset, &model.index, &config.search)?;
                    Ok(Prediction {
                        repeat: *repeat,
                        fold: *fold,
                        row,
                        actual: table.labels[row],
                        predicted: r.predicted_label,
                        rule: r.rule.as_ref().map(|c| NamedRule::from_rule(&c.rule, &model.encoder)),
                    })
                })
                .collect()
        })
        .collect::<Result<_, _>>()?;
    let predictions: Vec<Prediction> = per_fold.into_iter().flatten().collect();
    Ok(summarize(table.len(), config, predictions))
}

fn summarize(n_rows: usize, config: &CvConfig, predictions: Vec<Prediction>) -> EvalReport {
    let mut correct = vec![0usize; config.repeats];
    let mut total = vec![0usize; config.repeats];
    let mut per_run_rules = vec![BTreeSet::new(); config.repeats];
    let mut counts: BTreeMap<&NamedRule, usize> = BTreeMap::new();
    let mut length_sum = 0usize;
    let mut fallbacks = 0usize;
    for p in &predictions {
        total[p.repeat] += 1;
        correct[p.repeat] += usize::from(p.actual == p.predicted);
        match &p.rule {
            Some(r) => {
                *counts.entry(r).or_default() += 1;
                per_run_rules[p.repeat].insert(r);
                length_sum += r.predicates.len();
            }
            None => fallbacks += 1,
        }
    }
    let accuracy_per_run: Vec<f64> =
        correct.iter().zip(&total).map(|(&c, &t)| if t == 0 { 0.0 } else { c as f64 / t as f64 }).collect();
    let runs = config.repeats as f64;
    let accuracy_mean = accuracy_per_run.iter().sum::<f64>() / runs;
    let accuracy_std = (accuracy_per_run.iter().map(|a| (a - accuracy_mean).powi(2)).sum::<f64>() / runs).sqrt();
    let n = predictions.len();
    let with_rule = n - fallbacks;

    let mut rules: Vec<RuleCount> = counts
        .into_iter()
        .map(|(r, count)| RuleCount { rule_text: r.text(), length: r.predicates.len(), rule: r.clone(), count })
        .collect();
    rules.sort_by(|a, b| b.count.cmp(&a.count).then_with(|| a.rule_text.cmp(&b.rule_text)));
    let distinct_rules_per_run: Vec<usize> = per_run_rules.iter().map(BTreeSet::len).collect();

    EvalReport {
        n_rows,
        folds: config.folds,
        repeats: config.repeats,
        seed: config.seed,
        stratified: config.stratified,
        alpha: config.search.score.alpha(),
        max_length: config.search.max_length,
        engine: config.search.engine,
        n_predictions: n,
        accuracy_mean,
        accuracy_std,
        accuracy_per_run,
        avg_rule_length: (with_rule > 0).then(|| length_sum as f64 / with_rule as f64),
        n_distinct_rules: rules.len(),
        mean_distinct_rules_per_run: distinct_rules_per_run.iter().sum::<usize>() as f64 / runs,
        distinct_rules_per_run,
        fallback_rate: if n == 0 { 0.0 } else { fallbacks as f64 / n as f64 },
        rules,
        wall_time: None,
        predictions,
    }
}

/// `run,accuracy` with one line per repeat.
pub fn per_run_csv(report: &EvalReport) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["run", "accuracy"]).expect("in-memory write");
    for (i, a) in report.accuracy_per_run.iter().enumerate() {
        w.write_record([i.to_string(), a.to_string()]).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 input")
}

impl EvalReport {
    pub fn fallback_count(&self) -> usize {
        self.predictions.iter().filter(|p| p.rule.is_none()).count()
    }
}
