use std::collections::{HashMap, HashSet};
use std::fs::File;
use std::io::Read;
use std::path::Path;

use indexmap::IndexSet;
use serde::{Deserialize, Serialize};

use super::{ClassId, DataError, DEFAULT_BINS, DEFAULT_MISSING};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FeatureKind {
    Categorical,
    Numeric,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeatureSpec {
    pub name: String,
    pub kind: FeatureKind,
    /// Equal-width bin count; only meaningful for numeric features.
    pub bins: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Schema {
    features: Vec<FeatureSpec>,
    classes: Vec<String>,
    target: String,
}

impl Schema {
    pub fn new(features: Vec<FeatureSpec>, classes: Vec<String>, target: impl Into<String>) -> Result<Self, DataError> {
        let mut seen = HashSet::new();
        for f in &features {
            if !seen.insert(f.name.as_str()) {
                return Err(DataError::Schema(format!("duplicate feature name {:?}", f.name)));
            }
            if f.kind == FeatureKind::Numeric && f.bins < 2 {
                return Err(DataError::Schema(format!(
                    "numeric feature {:?} needs at least 2 bins, got {}",
                    f.name, f.bins
                )));
            }
        }
        if classes.is_empty() {
            return Err(DataError::Schema("class list is empty".into()));
        }
        let distinct: HashSet<_> = classes.iter().collect();
        if distinct.len() != classes.len() {
            return Err(DataError::Schema("duplicate class label".into()));
        }
        Ok(Self { features, classes, target: target.into() })
    }

    pub fn features(&self) -> &[FeatureSpec] {
        &self.features
    }

    pub fn feature(&self, j: usize) -> &FeatureSpec {
        &self.features[j]
    }

    pub fn n_features(&self) -> usize {
        self.features.len()
    }

    pub fn classes(&self) -> &[String] {
        &self.classes
    }

    pub fn n_classes(&self) -> usize {
        self.classes.len()
    }

    pub fn target(&self) -> &str {
        &self.target
    }

    pub fn feature_index(&self, name: &str) -> Option<usize> {
        self.features.iter().position(|f| f.name == name)
    }

    pub fn class_id(&self, label: &str) -> Option<ClassId> {
        self.classes.iter().position(|c| c == label)
    }
}

/// How to read a delimited dataset.
#[derive(Debug, Clone)]
pub struct LoadConfig {
    pub target: String,
    pub delimiter: u8,
    pub missing: String,
    pub default_bins: usize,
    /// Per-feature bin overrides, keyed by column name.
    pub bins: HashMap<String, usize>,
    /// Explicit kind overrides, keyed by column name.
    pub kinds: HashMap<String, FeatureKind>,
}

impl LoadConfig {
    pub fn new(target: impl Into<String>) -> Self {
        Self {
            target: target.into(),
            delimiter: b',',
            missing: DEFAULT_MISSING.to_string(),
            default_bins: DEFAULT_BINS,
            bins: HashMap::new(),
            kinds: HashMap::new(),
        }
    }
}

/// Parsed rows with their original cell text, before any encoding.
#[derive(Debug, Clone, PartialEq)]
pub struct RawTable {
    pub schema: Schema,
    /// `rows[i][j]` is the trimmed text of feature `j` in row `i`.
    pub rows: Vec<Vec<String>>,
    pub labels: Vec<ClassId>,
    pub missing: String,
}

impl RawTable {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Sub-table with the given rows, in the given order.
    pub fn select(&self, indices: &[usize]) -> RawTable {
        RawTable {
            schema: self.schema.clone(),
            rows: indices.iter().map(|&i| self.rows[i].clone()).collect(),
            labels: indices.iter().map(|&i| self.labels[i]).collect(),
            missing: self.missing.clone(),
        }
    }

    pub fn class_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.schema.n_classes()];
        for &y in &self.labels {
            counts[y] += 1;
        }
        counts
    }
}

/// Rows read against an existing schema, e.g. a held-out test file.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledRows {
    pub rows: Vec<Vec<String>>,
    /// `None` when the file has no target column or the label is not a known class.
    pub labels: Vec<Option<ClassId>>,
    /// 1-based source line of each row.
    pub lines: Vec<u64>,
}

fn reader<R: Read>(source: R, delimiter: u8) -> csv::Reader<R> {
    csv::ReaderBuilder::new()
        .delimiter(delimiter)
        .has_headers(true)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(source)
}

fn read_records<R: Read>(rdr: &mut csv::Reader<R>, width: usize) -> Result<Vec<(u64, Vec<String>)>, DataError> {
    let mut out = Vec::new();
    for record in rdr.records() {
        let record = record?;
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        if record.len() == 1 && record[0].is_empty() {
            continue;
        }
        if record.len() != width {
            return Err(DataError::Ragged { line, expected: width, found: record.len() });
        }
        out.push((line, record.iter().map(str::to_string).collect()));
    }
    Ok(out)
}

/// Parse a delimited training file and infer its schema.
///
/// A column is numeric iff every non-missing value parses as a number,
/// unless overridden in `config.kinds`. Class labels are ordered by first
/// appearance.
pub fn load_dataset<R: Read>(source: R, config: &LoadConfig) -> Result<RawTable, DataError> {
    let mut rdr = reader(source, config.delimiter);
    let header: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
    let target_col = header
        .iter()
        .position(|h| *h == config.target)
        .ok_or_else(|| DataError::TargetNotFound(config.target.clone()))?;
    let records = read_records(&mut rdr, header.len())?;
    if records.is_empty() {
        return Err(DataError::Empty);
    }

    let feature_cols: Vec<usize> = (0..header.len()).filter(|&c| c != target_col).collect();
    let mut classes: IndexSet<String> = IndexSet::new();
    let mut labels = Vec::with_capacity(records.len());
    let mut rows = Vec::with_capacity(records.len());
    for (_, rec) in &records {
        let (id, _) = classes.insert_full(rec[target_col].clone());
        labels.push(id);
        rows.push(feature_cols.iter().map(|&c| rec[c].clone()).collect::<Vec<_>>());
    }

    let features = feature_cols
        .iter()
        .enumerate()
        .map(|(j, &c)| {
            let name = header[c].clone();
            let kind = config.kinds.get(&name).copied().unwrap_or_else(|| {
                let mut any = false;
                let all_numeric = rows.iter().map(|r: &Vec<String>| &r[j]).all(|v| {
                    if *v == config.missing {
                        return true;
                    }
                    any = true;
                    v.parse::<f64>().is_ok_and(f64::is_finite)
                });
                if any && all_numeric {
                    FeatureKind::Numeric
                } else {
                    FeatureKind::Categorical
                }
            });
            let bins = config.bins.get(&name).copied().unwrap_or(config.default_bins);
            FeatureSpec { name, kind, bins }
        })
        .collect();

    let schema = Schema::new(features, classes.into_iter().collect(), config.target.clone())?;
    Ok(RawTable { schema, rows, labels, missing: config.missing.clone() })
}

pub fn load_dataset_path(path: impl AsRef<Path>, config: &LoadConfig) -> Result<RawTable, DataError> {
    load_dataset(File::open(path)?, config)
}

/// Read rows whose columns are matched to `schema` by header name. The
/// target column is optional; unknown labels (e.g. `?`) become `None`.
pub fn load_rows_for<R: Read>(source: R, schema: &Schema, delimiter: u8) -> Result<LabeledRows, DataError> {
    let mut rdr = reader(source, delimiter);
    let header: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
    if header.iter().all(String::is_empty) {
        return Ok(LabeledRows { rows: Vec::new(), labels: Vec::new(), lines: Vec::new() });
    }
    let cols = schema
        .features()
        .iter()
        .map(|f| header.iter().position(|h| *h == f.name).ok_or_else(|| DataError::MissingColumn(f.name.clone())))
        .collect::<Result<Vec<_>, _>>()?;
    let target_col = header.iter().position(|h| h == schema.target());
    let records = read_records(&mut rdr, header.len())?;

    let mut out = LabeledRows {
        rows: Vec::with_capacity(records.len()),
        labels: Vec::with_capacity(records.len()),
        lines: Vec::with_capacity(records.len()),
    };
    for (line, rec) in records {
        out.rows.push(cols.iter().map(|&c| rec[c].clone()).collect());
        out.labels.push(target_col.and_then(|t| schema.class_id(&rec[t])));
        out.lines.push(line);
    }
    Ok(out)
}

pub fn load_rows_for_path(path: impl AsRef<Path>, schema: &Schema, delimiter: u8) -> Result<LabeledRows, DataError> {
    load_rows_for(File::open(path)?, schema, delimiter)
}
