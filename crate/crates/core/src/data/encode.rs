use indexmap::IndexMap;

use super::{ClassId, DataError, Discretizer, EqualWidth, FeatureKind, RawTable, Schema, ValueId, UNSEEN};

#[derive(Debug, Clone, PartialEq)]
enum Codec {
    /// Value text to id, in first-appearance order over the training rows.
    /// The missing token is an ordinary entry when it occurs.
    Categorical(IndexMap<String, ValueId>),
    /// Ids `0..bins` are bins; id `bins` is the missing token.
    Numeric(EqualWidth),
}

/// Per-feature value dictionaries and bin edges, fitted on training rows.
#[derive(Debug, Clone, PartialEq)]
pub struct Encoder {
    schema: Schema,
    codecs: Vec<Codec>,
    missing: String,
}

impl Encoder {
    /// Fit the discretizer and the categorical dictionaries on `train`.
    pub fn fit(train: &RawTable) -> Result<Self, DataError> {
        let discretizer = Discretizer::fit(train)?;
        Ok(Self::with_discretizer(train, &discretizer))
    }

    pub fn with_discretizer(train: &RawTable, discretizer: &Discretizer) -> Self {
        assert_eq!(discretizer.n_features(), train.schema.n_features());
        let codecs = train
            .schema
            .features()
            .iter()
            .enumerate()
            .map(|(j, spec)| match spec.kind {
                FeatureKind::Numeric => {
                    Codec::Numeric(*discretizer.feature(j).expect("discretizer fitted on a different schema"))
                }
                FeatureKind::Categorical => {
                    let mut dict = IndexMap::new();
                    for row in &train.rows {
                        let next = dict.len() as ValueId;
                        dict.entry(row[j].clone()).or_insert(next);
                    }
                    Codec::Categorical(dict)
                }
            })
            .collect();
        Self { schema: train.schema.clone(), codecs, missing: train.missing.clone() }
    }

    pub fn schema(&self) -> &Schema {
        &self.schema
    }

    pub fn missing_token(&self) -> &str {
        &self.missing
    }

    /// Number of value ids for feature `j`, excluding [`UNSEEN`].
    pub fn n_values(&self, j: usize) -> usize {
        match &self.codecs[j] {
            Codec::Categorical(dict) => dict.len(),
            Codec::Numeric(b) => b.bins() + 1,
        }
    }

    pub fn encode_value(&self, j: usize, text: &str) -> ValueId {
        match &self.codecs[j] {
            Codec::Categorical(dict) => dict.get(text).copied().unwrap_or(UNSEEN),
            Codec::Numeric(b) => {
                if text == self.missing {
                    b.bins() as ValueId
                } else {
                    match text.parse::<f64>() {
                        Ok(x) => b.bin(x),
                        Err(_) => UNSEEN,
                    }
                }
            }
        }
    }

    pub fn encode_row(&self, row: &[String]) -> Vec<ValueId> {
        assert_eq!(row.len(), self.codecs.len());
        row.iter().enumerate().map(|(j, v)| self.encode_value(j, v)).collect()
    }

    /// Encode a labeled table. Rows of `table` may contain unseen values if it
    /// is not the table the encoder was fitted on.
    pub fn encode_table(&self, table: &RawTable) -> Dataset {
        let rows = table.rows.iter().map(|r| self.encode_row(r)).collect();
        let n_values = (0..self.codecs.len()).map(|j| self.n_values(j)).collect();
        Dataset::new(self.schema.clone(), rows, table.labels.clone(), n_values)
            .expect("encoder output satisfies dataset invariants")
    }

    /// Human-readable value text: the raw value for categorical features,
    /// `bin<i>` for numeric bins.
    pub fn value_label(&self, j: usize, v: ValueId) -> String {
        if v == UNSEEN {
            return "<unseen>".to_string();
        }
        match &self.codecs[j] {
            Codec::Categorical(dict) => {
                dict.get_index(v as usize).map(|(k, _)| k.clone()).unwrap_or_else(|| "<unseen>".to_string())
            }
            Codec::Numeric(b) if v as usize == b.bins() => self.missing.clone(),
            Codec::Numeric(_) => format!("bin{v}"),
        }
    }

    /// Inverse of [`Encoder::value_label`].
    pub fn value_id(&self, j: usize, label: &str) -> Option<ValueId> {
        match &self.codecs[j] {
            Codec::Categorical(dict) => dict.get(label).copied(),
            Codec::Numeric(b) => {
                if label == self.missing {
                    return Some(b.bins() as ValueId);
                }
                let i: usize = label.strip_prefix("bin")?.parse().ok()?;
                (i < b.bins()).then_some(i as ValueId)
            }
        }
    }

    /// `[lower, upper)` of a numeric bin, `None` for categorical values.
    pub fn value_interval(&self, j: usize, v: ValueId) -> Option<(f64, f64)> {
        match &self.codecs[j] {
            Codec::Numeric(b) if (v as usize) < b.bins() => Some(b.interval(v)),
            _ => None,
        }
    }
}

/// Encoded training matrix with class labels.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub schema: Schema,
    rows: Vec<Vec<ValueId>>,
    labels: Vec<ClassId>,
    class_counts: Vec<usize>,
    n_values: Vec<usize>,
}

impl Dataset {
    pub fn new(
        schema: Schema,
        rows: Vec<Vec<ValueId>>,
        labels: Vec<ClassId>,
        n_values: Vec<usize>,
    ) -> Result<Self, DataError> {
        let m = schema.n_features();
        let c = schema.n_classes();
        if rows.len() != labels.len() {
            return Err(DataError::Schema(format!("{} rows but {} labels", rows.len(), labels.len())));
        }
        if n_values.len() != m {
            return Err(DataError::Schema("value dictionary count differs from feature count".into()));
        }
        for (i, row) in rows.iter().enumerate() {
            if row.len() != m {
                return Err(DataError::Schema(format!("row {i} has {} values, expected {m}", row.len())));
            }
            if let Some(j) = (0..m).find(|&j| row[j] as usize >= n_values[j]) {
                return Err(DataError::Schema(format!("row {i}: value id out of range for feature {j}")));
            }
        }
        let mut class_counts = vec![0; c];
        for &y in &labels {
            if y >= c {
                return Err(DataError::Schema(format!("label {y} out of range")));
            }
            class_counts[y] += 1;
        }
        Ok(Self { schema, rows, labels, class_counts, n_values })
    }

    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn n_features(&self) -> usize {
        self.n_values.len()
    }

    pub fn n_classes(&self) -> usize {
        self.class_counts.len()
    }

    pub fn rows(&self) -> &[Vec<ValueId>] {
        &self.rows
    }

    pub fn row(&self, i: usize) -> &[ValueId] {
        &self.rows[i]
    }

    pub fn labels(&self) -> &[ClassId] {
        &self.labels
    }

    pub fn class_counts(&self) -> &[usize] {
        &self.class_counts
    }

    pub fn n_values(&self, j: usize) -> usize {
        self.n_values[j]
    }

    /// Most frequent training class; ties go to the smaller class id.
    pub fn majority_class(&self) -> ClassId {
        let mut best = 0;
        for (c, &n) in self.class_counts.iter().enumerate() {
            if n > self.class_counts[best] {
                best = c;
            }
        }
        best
    }
}
