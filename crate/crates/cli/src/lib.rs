//! Command-line front end: `predict`, `crossval`, `oracle-check` and
//! `rules-compare`.
//!
//! Exit codes: 0 success, 1 the engines disagree, 2 input or output
//! problems, 3 invalid configuration.

use std::fmt;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;

use pic_core::data::{
    load_dataset_path, load_rows_for_path, DataError, Encoder, FeatureKind, LoadConfig, PredicateIndex, RawTable,
};
use pic_core::eval::{
    compare_rule_sets, fit_fold, histogram_csv, histogram_json, parse_rule_file, per_run_csv, rule_frequency_histogram,
    run_cv, CvConfig, EvalError, Vocabulary,
};
use pic_core::rulecore::ScoreParams;
use pic_core::search::{
    predict, run_naive, run_oracle, run_pic, Engine, Explanation, SearchError, SearchParams, ORACLE_MAX_FEATURES,
};

#[derive(Debug, Parser)]
#[command(name = "pic", version, about = "Per-sample interpretable rule classification")]
pub struct Cli {
    /// Worker threads; 0 uses one per core.
    #[arg(long, global = true, default_value_t = 0, env = "PIC_THREADS")]
    pub threads: usize,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Classify every row of a test file and explain each prediction.
    Predict(PredictArgs),
    /// Repeated k-fold cross-validation.
    Crossval(CrossvalArgs),
    /// Check that the pruned, naive and exhaustive searches agree.
    OracleCheck(OracleArgs),
    /// Split our rules into ones shared with another rule set and the rest.
    RulesCompare(CompareArgs),
}

#[derive(Debug, Clone, Args)]
pub struct DataArgs {
    /// Name of the class column.
    #[arg(long, env = "PIC_TARGET")]
    pub target: String,
    #[arg(long, default_value_t = ',', env = "PIC_DELIMITER")]
    pub delimiter: char,
    /// Token marking a missing value.
    #[arg(long, default_value = "?", env = "PIC_MISSING")]
    pub missing: String,
    /// Equal-width bins for numeric features.
    #[arg(long, default_value_t = 5, env = "PIC_BINS")]
    pub bins: usize,
    /// Per-feature bin count, `name=g`; repeatable.
    #[arg(long = "bin", value_name = "NAME=G")]
    pub bin: Vec<String>,
    /// Force a feature kind, `name=categorical|numeric`; repeatable.
    #[arg(long = "kind", value_name = "NAME=KIND")]
    pub kind: Vec<String>,
}

#[derive(Debug, Clone, Args)]
pub struct SearchArgs {
    /// Weight of precision against recall in the rule score.
    #[arg(long, default_value_t = 0.9, env = "PIC_ALPHA")]
    pub alpha: f64,
    /// Longest rule considered.
    #[arg(long, default_value_t = 100, env = "PIC_MAX_LENGTH")]
    pub max_length: usize,
    #[arg(long, value_enum, default_value_t = EngineArg::Pic, env = "PIC_ENGINE")]
    pub engine: EngineArg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EngineArg {
    Pic,
    Naive,
    Oracle,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Args)]
pub struct PredictArgs {
    #[arg(long)]
    pub train: PathBuf,
    #[arg(long)]
    pub test: PathBuf,
    #[command(flatten)]
    pub data: DataArgs,
    #[command(flatten)]
    pub search: SearchArgs,
    /// Write records here instead of stdout.
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Load and validate everything, then stop before searching.
    #[arg(long)]
    pub dry_run: bool,
}

#[derive(Debug, Clone, Args)]
pub struct CrossvalArgs {
    #[arg(long = "data", value_name = "PATH")]
    pub data_file: PathBuf,
    #[command(flatten)]
    pub data: DataArgs,
    #[command(flatten)]
    pub search: SearchArgs,
    #[arg(long, default_value_t = 5, env = "PIC_FOLDS")]
    pub folds: usize,
    #[arg(long, default_value_t = 5, env = "PIC_REPEATS")]
    pub repeats: usize,
    #[arg(long, default_value_t = 0, env = "PIC_SEED")]
    pub seed: u64,
    /// Deal folds without regard to class.
    #[arg(long)]
    pub no_stratify: bool,
    /// Full report as JSON.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Per-run accuracies as CSV.
    #[arg(long)]
    pub runs_csv: Option<PathBuf>,
    /// Rule frequencies as CSV (`rule_text,count`).
    #[arg(long)]
    pub histogram: Option<PathBuf>,
    /// Rule frequencies as a JSON array.
    #[arg(long)]
    pub histogram_json: Option<PathBuf>,
    /// Record wall-clock time in the report.
    #[arg(long)]
    pub timing: bool,
}

#[derive(Debug, Clone, Args)]
pub struct OracleArgs {
    #[arg(long = "data", value_name = "PATH")]
    pub data_file: PathBuf,
    /// Check these rows against the whole data file; without it every data
    /// row is checked against the others.
    #[arg(long)]
    pub test: Option<PathBuf>,
    #[command(flatten)]
    pub data: DataArgs,
    #[command(flatten)]
    pub search: SearchArgs,
    /// Per-row results as JSON.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct CompareArgs {
    /// Our rules: a crossval report or a rule array.
    #[arg(long)]
    pub ours: PathBuf,
    /// The other rule set, same formats.
    #[arg(long)]
    pub theirs: PathBuf,
    /// Dataset both rule sets refer to.
    #[arg(long = "data", value_name = "PATH")]
    pub data_file: PathBuf,
    #[command(flatten)]
    pub data: DataArgs,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug)]
pub enum CliError {
    /// Unreadable or malformed input, or unwritable output.
    Input { path: PathBuf, message: String },
    /// Inconsistent flags or parameters.
    Config(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Input { .. } => 2,
            CliError::Config(_) => 3,
        }
    }

    fn input(path: &Path, message: impl fmt::Display) -> Self {
        CliError::Input { path: path.to_path_buf(), message: message.to_string() }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Input { path, message } => write!(f, "{}: {message}", path.display()),
            CliError::Config(m) => write!(f, "{m}"),
        }
    }
}

impl std::error::Error for CliError {}

fn data_error(path: &Path, e: DataError) -> CliError {
    match e {
        DataError::Schema(m) => CliError::Config(format!("{}: {m}", path.display())),
        DataError::TargetNotFound(_) => CliError::Config(format!("{}: {e}", path.display())),
        e => match e.line() {
            Some(line) if !e.to_string().contains("line") => CliError::input(path, format!("line {line}: {e}")),
            _ => CliError::input(path, e),
        },
    }
}

/// Whether a command found what it was asked to verify.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Ok,
    Disagreement,
}

impl Status {
    pub fn exit_code(self) -> u8 {
        match self {
            Status::Ok => 0,
            Status::Disagreement => 1,
        }
    }
}

impl DataArgs {
    fn load_config(&self) -> Result<LoadConfig, CliError> {
        if !self.delimiter.is_ascii() {
            return Err(CliError::Config(format!("delimiter must be one ASCII character, got {:?}", self.delimiter)));
        }
        if self.bins < 2 {
            return Err(CliError::Config(format!("--bins must be at least 2, got {}", self.bins)));
        }
        let mut config = LoadConfig::new(self.target.clone());
        config.delimiter = self.delimiter as u8;
        config.missing = self.missing.clone();
        config.default_bins = self.bins;
        for spec in &self.bin {
            let (name, g) = split_pair(spec, "--bin")?;
            let g: usize =
                g.parse().map_err(|_| CliError::Config(format!("--bin {spec}: bin count is not an integer")))?;
            if g < 2 {
                return Err(CliError::Config(format!("--bin {spec}: need at least 2 bins")));
            }
            config.bins.insert(name.to_string(), g);
        }
        for spec in &self.kind {
            let (name, kind) = split_pair(spec, "--kind")?;
            let kind = match kind {
                "categorical" => FeatureKind::Categorical,
                "numeric" => FeatureKind::Numeric,
                _ => return Err(CliError::Config(format!("--kind {spec}: expected categorical or numeric"))),
            };
            config.kinds.insert(name.to_string(), kind);
        }
        Ok(config)
    }

    fn load(&self, path: &Path) -> Result<RawTable, CliError> {
        let config = self.load_config()?;
        let table = load_dataset_path(path, &config).map_err(|e| data_error(path, e))?;
        for name in config.bins.keys().chain(config.kinds.keys()) {
            if table.schema.feature_index(name).is_none() {
                return Err(CliError::Config(format!("no feature named {name:?} in {}", path.display())));
            }
        }
        Ok(table)
    }
}

fn split_pair<'a>(spec: &'a str, flag: &str) -> Result<(&'a str, &'a str), CliError> {
    spec.split_once('=')
        .filter(|(k, v)| !k.is_empty() && !v.is_empty())
        .ok_or_else(|| CliError::Config(format!("{flag} {spec}: expected NAME=VALUE")))
}

impl SearchArgs {
    fn params(&self) -> Result<SearchParams, CliError> {
        let score = ScoreParams::new(self.alpha).map_err(|e| CliError::Config(e.to_string()))?;
        let engine = match self.engine {
            EngineArg::Pic => Engine::Pic,
            EngineArg::Naive => Engine::Naive,
            EngineArg::Oracle => Engine::Oracle,
        };
        SearchParams::new(score, self.max_length, engine).map_err(|e| CliError::Config(e.to_string()))
    }
}

fn thread_pool(threads: usize) -> Result<rayon::ThreadPool, CliError> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| CliError::Config(format!("thread pool: {e}")))
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    fs::write(path, contents).map_err(|e| CliError::input(path, e))
}

fn emit(output: Option<&Path>, contents: &str, out: &mut dyn Write) -> Result<(), CliError> {
    match output {
        Some(path) => write_file(path, contents),
        None => out.write_all(contents.as_bytes()).map_err(|e| CliError::input(Path::new("<stdout>"), e)),
    }
}

fn to_json<T: Serialize + ?Sized>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("plain data serializes");
    s.push('\n');
    s
}

fn say(out: &mut dyn Write, line: impl fmt::Display) -> Result<(), CliError> {
    writeln!(out, "{line}").map_err(|e| CliError::input(Path::new("<stdout>"), e))
}

/// Run a parsed command, writing human-readable output to `out`.
pub fn run(cli: &Cli, out: &mut dyn Write) -> Result<Status, CliError> {
    let pool = thread_pool(cli.threads)?;
    match &cli.command {
        Command::Predict(a) => cmd_predict(a, &pool, out),
        Command::Crossval(a) => cmd_crossval(a, &pool, out),
        Command::OracleCheck(a) => cmd_oracle_check(a, &pool, out),
        Command::RulesCompare(a) => cmd_rules_compare(a, out),
    }
}

fn predictions_csv(records: &[Explanation]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "row",
        "predicted_label",
        "actual_label",
        "rule_text",
        "length",
        "a_score",
        "precision",
        "recall",
        "stopped_at_level",
        "fallback",
        "generated",
        "scored",
        "pruned_by_ub",
        "pruned_by_con",
        "pruned_by_subrule",
    ])
    .expect("in-memory write");
    let opt = |v: Option<f64>| v.map(|v| v.to_string()).unwrap_or_default();
    for e in records {
        let c = e.counters;
        w.write_record([
            e.row.to_string(),
            e.predicted_label.clone(),
            e.actual_label.clone().unwrap_or_default(),
            e.rule_text.clone().unwrap_or_default(),
            e.rule.as_ref().map(|r| r.length.to_string()).unwrap_or_default(),
            opt(e.a_score),
            opt(e.precision),
            opt(e.recall),
            e.stopped_at_level.to_string(),
            serde_json::to_value(e.fallback).expect("enum").as_str().unwrap_or_default().to_string(),
            c.generated.to_string(),
            c.scored.to_string(),
            c.pruned_by_ub.to_string(),
            c.pruned_by_con.to_string(),
            c.pruned_by_subrule.to_string(),
        ])
        .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 input")
}

fn cmd_predict(a: &PredictArgs, pool: &rayon::ThreadPool, out: &mut dyn Write) -> Result<Status, CliError> {
    let params = a.search.params()?;
    let train = a.data.load(&a.train)?;
    let test =
        load_rows_for_path(&a.test, &train.schema, a.data.delimiter as u8).map_err(|e| data_error(&a.test, e))?;
    let encoder = Encoder::fit(&train).map_err(|e| data_error(&a.train, e))?;
    let ds = encoder.encode_table(&train);
    if params.engine == Engine::Oracle && ds.n_features() > ORACLE_MAX_FEATURES {
        return Err(CliError::input(
            &a.train,
            SearchError::TooManyFeatures { got: ds.n_features(), max: ORACLE_MAX_FEATURES },
        ));
    }
    if a.dry_run {
        say(
            out,
            format_args!(
                "dry run: {} training rows, {} features, {} classes, {} test rows; alpha {}, max length {}",
                ds.n_rows(),
                ds.n_features(),
                ds.n_classes(),
                test.rows.len(),
                params.score.alpha(),
                params.max_length
            ),
        )?;
        for (j, f) in train.schema.features().iter().enumerate() {
            let kind = match f.kind {
                FeatureKind::Categorical => "categorical".to_string(),
                FeatureKind::Numeric => format!("numeric, {} bins", f.bins),
            };
            say(out, format_args!("  {} ({kind}, {} values)", f.name, encoder.n_values(j)))?;
        }
        return Ok(Status::Ok);
    }
    let index = PredicateIndex::build(&ds);
    let classes = train.schema.classes();
    let records: Vec<Explanation> = pool.install(|| {
        test.rows
            .par_iter()
            .zip(test.labels.par_iter())
            .enumerate()
            .map(|(i, (row, label))| {
                let x = encoder.encode_row(row);
                let r = predict(&x, &ds, &index, &params).expect("feature count checked above");
                Explanation::new(i, &r, &encoder, label.map(|y| classes[y].clone()))
            })
            .collect()
    });
    let text = match a.format {
        Format::Json => to_json(&records),
        Format::Csv => predictions_csv(&records),
    };
    emit(a.output.as_deref(), &text, out)?;
    Ok(Status::Ok)
}

fn eval_error(path: &Path, e: EvalError) -> CliError {
    match e {
        EvalError::Data(d) => data_error(path, d),
        EvalError::Search(s) => CliError::input(path, s),
        EvalError::RuleFile(_) | EvalError::Vocabulary { .. } | EvalError::DuplicateFeature(_) => {
            CliError::input(path, e)
        }
        e => CliError::Config(e.to_string()),
    }
}

fn cmd_crossval(a: &CrossvalArgs, pool: &rayon::ThreadPool, out: &mut dyn Write) -> Result<Status, CliError> {
    let config = CvConfig {
        folds: a.folds,
        repeats: a.repeats,
        seed: a.seed,
        stratified: !a.no_stratify,
        search: a.search.params()?,
    };
    let table = a.data.load(&a.data_file)?;
    config.validate(&table).map_err(|e| eval_error(&a.data_file, e))?;
    if config.search.engine == Engine::Oracle && table.schema.n_features() > ORACLE_MAX_FEATURES {
        return Err(CliError::input(
            &a.data_file,
            SearchError::TooManyFeatures { got: table.schema.n_features(), max: ORACLE_MAX_FEATURES },
        ));
    }
    let start = Instant::now();
    let mut report = pool.install(|| run_cv(&table, &config)).map_err(|e| eval_error(&a.data_file, e))?;
    if a.timing {
        report.wall_time = Some(start.elapsed().as_secs_f64());
    }

    say(out, format_args!("accuracy_mean {:.4}", report.accuracy_mean))?;
    say(out, format_args!("accuracy_std {:.4}", report.accuracy_std))?;
    match report.avg_rule_length {
        Some(l) => say(out, format_args!("avg_rule_length {l:.4}"))?,
        None => say(out, "avg_rule_length -")?,
    }
    say(out, format_args!("distinct_rules {}", report.n_distinct_rules))?;
    say(out, format_args!("mean_distinct_rules_per_run {:.2}", report.mean_distinct_rules_per_run))?;
    say(out, format_args!("fallback_rate {:.4}", report.fallback_rate))?;
    if let Some(t) = report.wall_time {
        say(out, format_args!("wall_time {t:.3}"))?;
    }

    if let Some(p) = &a.output {
        write_file(p, &to_json(&report))?;
    }
    if let Some(p) = &a.runs_csv {
        write_file(p, &per_run_csv(&report))?;
    }
    let hist = rule_frequency_histogram(&report);
    if let Some(p) = &a.histogram {
        write_file(p, &histogram_csv(&hist))?;
    }
    if let Some(p) = &a.histogram_json {
        let mut s = histogram_json(&hist);
        s.push('\n');
        write_file(p, &s)?;
    }
    Ok(Status::Ok)
}

#[derive(Debug, Serialize)]
struct OracleRow {
    row: usize,
    pic: Option<f64>,
    naive: Option<f64>,
    oracle: Option<f64>,
    pic_rule: Option<String>,
    naive_rule: Option<String>,
    oracle_rule: Option<String>,
    agree: bool,
}

fn cmd_oracle_check(a: &OracleArgs, pool: &rayon::ThreadPool, out: &mut dyn Write) -> Result<Status, CliError> {
    let params = a.search.params()?;
    let table = a.data.load(&a.data_file)?;
    let m = table.schema.n_features();
    if m > ORACLE_MAX_FEATURES {
        return Err(CliError::input(&a.data_file, SearchError::TooManyFeatures { got: m, max: ORACLE_MAX_FEATURES }));
    }

    let check = |row: usize, x: &[u32], encoder: &Encoder, ds: &pic_core::data::Dataset, index: &PredicateIndex| {
        let pic = run_pic(x, ds, index, &params);
        let naive = run_naive(x, ds, index, &params);
        let oracle = run_oracle(x, ds, params.score, params.max_length).expect("feature count checked above");
        let text = |f: &Option<pic_core::rulecore::ScoredCandidate>| {
            f.as_ref().map(|c| pic_core::rulecore::render_rule(&c.rule, encoder))
        };
        let oracle_text = oracle.greedy.as_ref().map(|g| {
            let s = pic_core::rulecore::Itemset::from_sample(x, &g.features);
            pic_core::rulecore::render_rule(&pic_core::rulecore::Rule::new(s, g.label), encoder)
        });
        let pic_rule = text(&pic.rule);
        let naive_rule = text(&naive.rule);
        let score = |r: &pic_core::search::SearchResult| r.rule.as_ref().map(|c| c.a_score);
        let oracle_score = oracle.greedy.as_ref().map(|g| g.a_score);
        let agree = score(&pic) == score(&naive)
            && score(&pic) == oracle_score
            && pic_rule == naive_rule
            && pic_rule == oracle_text;
        OracleRow {
            row,
            pic: score(&pic),
            naive: score(&naive),
            oracle: oracle_score,
            pic_rule,
            naive_rule,
            oracle_rule: oracle_text,
            agree,
        }
    };

    let rows: Vec<OracleRow> = match &a.test {
        Some(test_path) => {
            let test = load_rows_for_path(test_path, &table.schema, a.data.delimiter as u8)
                .map_err(|e| data_error(test_path, e))?;
            let encoder = Encoder::fit(&table).map_err(|e| data_error(&a.data_file, e))?;
            let ds = encoder.encode_table(&table);
            let index = PredicateIndex::build(&ds);
            pool.install(|| {
                test.rows
                    .par_iter()
                    .enumerate()
                    .map(|(i, r)| check(i, &encoder.encode_row(r), &encoder, &ds, &index))
                    .collect()
            })
        }
        None => {
            if table.len() < 2 {
                return Err(CliError::Config("leave-one-out needs at least 2 rows".into()));
            }
            pool.install(|| {
                (0..table.len())
                    .into_par_iter()
                    .map(|i| -> Result<OracleRow, CliError> {
                        let train: Vec<usize> = (0..table.len()).filter(|&k| k != i).collect();
                        let model = fit_fold(&table, &train).map_err(|e| eval_error(&a.data_file, e))?;
                        let x = model.encoder.encode_row(&table.rows[i]);
                        Ok(check(i, &x, &model.encoder, &model.dataset, &model.index))
                    })
                    .collect::<Result<_, _>>()
            })?
        }
    };

    let bad: Vec<&OracleRow> = rows.iter().filter(|r| !r.agree).collect();
    for r in &bad {
        say(
            out,
            format_args!(
                "row {}: pic {:?} {:?} | naive {:?} {:?} | oracle {:?} {:?}",
                r.row, r.pic, r.pic_rule, r.naive, r.naive_rule, r.oracle, r.oracle_rule
            ),
        )?;
    }
    say(out, format_args!("checked {} rows, {} disagreements", rows.len(), bad.len()))?;
    if let Some(p) = &a.output {
        write_file(p, &to_json(&rows))?;
    }
    Ok(if bad.is_empty() { Status::Ok } else { Status::Disagreement })
}

fn cmd_rules_compare(a: &CompareArgs, out: &mut dyn Write) -> Result<Status, CliError> {
    let table = a.data.load(&a.data_file)?;
    let vocab = Vocabulary::from_table(&table);
    let read = |path: &Path| -> Result<_, CliError> {
        let text = fs::read_to_string(path).map_err(|e| CliError::input(path, e))?;
        let rules = parse_rule_file(&text).map_err(|e| eval_error(path, e))?;
        vocab.check(&rules).map_err(|e| eval_error(path, e))?;
        Ok(rules)
    };
    let ours = read(&a.ours)?;
    let theirs = read(&a.theirs)?;
    let cmp = compare_rule_sets(&ours, &theirs);
    say(out, format_args!("common {}", cmp.common.len()))?;
    for r in &cmp.common {
        say(out, format_args!("  {}", r.text()))?;
    }
    say(out, format_args!("personalized {}", cmp.personalized.len()))?;
    for r in &cmp.personalized {
        say(out, format_args!("  {}", r.text()))?;
    }
    if let Some(p) = &a.output {
        write_file(p, &to_json(&cmp))?;
    }
    Ok(Status::Ok)
}
