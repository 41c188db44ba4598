use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use super::{EvalError, EvalReport};
use crate::data::{Encoder, FeatureKind, RawTable};
use crate::rulecore::Rule;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct NamedPredicate {
    pub feature: String,
    pub value: String,
}

/// A rule spelled with feature, value and class names, so rules from
/// different folds (or other tools) can be compared.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct NamedRule {
    pub predicates: Vec<NamedPredicate>,
    pub label: String,
}

impl NamedRule {
    pub fn from_rule(rule: &Rule, encoder: &Encoder) -> Self {
        Self {
            predicates: rule
                .itemset
                .predicates()
                .iter()
                .map(|p| NamedPredicate {
                    feature: encoder.schema().feature(p.feature).name.clone(),
                    value: encoder.value_label(p.feature, p.value),
                })
                .collect(),
            label: encoder.schema().classes()[rule.label].clone(),
        }
    }

    /// Same layout as [`crate::rulecore::render_rule`].
    pub fn text(&self) -> String {
        let lhs: Vec<String> = self.predicates.iter().map(|p| format!("{{{}={}}}", p.feature, p.value)).collect();
        format!("{} -> {}", lhs.join(" "), self.label)
    }

    /// Itemset inclusion with equal labels.
    pub fn is_subsumed_by(&self, other: &NamedRule) -> bool {
        self.label == other.label && self.predicates.iter().all(|p| other.predicates.contains(p))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HistogramEntry {
    pub rule: String,
    pub count: usize,
}

/// Returned rules with their counts, most frequent first.
pub fn rule_frequency_histogram(report: &EvalReport) -> Vec<HistogramEntry> {
    report.rules.iter().map(|r| HistogramEntry { rule: r.rule_text.clone(), count: r.count }).collect()
}

/// `rule_text,count` CSV.
pub fn histogram_csv(hist: &[HistogramEntry]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["rule_text", "count"]).expect("in-memory write");
    for e in hist {
        w.write_record([e.rule.as_str(), &e.count.to_string()]).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 input")
}

pub fn histogram_json(hist: &[HistogramEntry]) -> String {
    serde_json::to_string_pretty(hist).expect("plain data serializes")
}

#[derive(Deserialize)]
#[serde(untagged)]
enum RuleFile {
    List(Vec<NamedRule>),
    Report { rules: Vec<NamedRule> },
}

/// Rules from a JSON array of `{predicates: [{feature, value}], label}`, or
/// from the `rules` field of a cross-validation report.
pub fn parse_rule_file(text: &str) -> Result<Vec<NamedRule>, EvalError> {
    let rules = match serde_json::from_str(text)? {
        RuleFile::List(r) | RuleFile::Report { rules: r } => r,
    };
    for r in &rules {
        let mut seen = HashSet::new();
        for p in &r.predicates {
            if !seen.insert(&p.feature) {
                return Err(EvalError::DuplicateFeature(p.feature.clone()));
            }
        }
    }
    Ok(rules)
}

/// Names a rule may use on a given dataset: feature names, the values seen
/// for categorical features, `bin0..bin{g-1}` for numeric ones, the missing
/// token, and the class labels.
#[derive(Debug, Clone)]
pub struct Vocabulary {
    features: Vec<(String, HashSet<String>)>,
    classes: HashSet<String>,
}

impl Vocabulary {
    pub fn from_table(table: &RawTable) -> Self {
        let features = table
            .schema
            .features()
            .iter()
            .enumerate()
            .map(|(j, spec)| {
                let mut values: HashSet<String> = match spec.kind {
                    FeatureKind::Categorical => table.rows.iter().map(|r| r[j].clone()).collect(),
                    FeatureKind::Numeric => (0..spec.bins).map(|b| format!("bin{b}")).collect(),
                };
                values.insert(table.missing.clone());
                (spec.name.clone(), values)
            })
            .collect();
        Self { features, classes: table.schema.classes().iter().cloned().collect() }
    }

    /// First unknown name in `rules`, as an error.
    pub fn check(&self, rules: &[NamedRule]) -> Result<(), EvalError> {
        for r in rules {
            if !self.classes.contains(&r.label) {
                return Err(EvalError::Vocabulary { kind: "label", token: r.label.clone() });
            }
            for p in &r.predicates {
                let Some((_, values)) = self.features.iter().find(|(name, _)| *name == p.feature) else {
                    return Err(EvalError::Vocabulary { kind: "feature", token: p.feature.clone() });
                };
                if !values.contains(&p.value) {
                    return Err(EvalError::Vocabulary { kind: "value", token: format!("{}={}", p.feature, p.value) });
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RuleComparison {
    /// Our rules contained in some rule of theirs with the same label.
    pub common: Vec<NamedRule>,
    pub personalized: Vec<NamedRule>,
}

pub fn compare_rule_sets(ours: &[NamedRule], theirs: &[NamedRule]) -> RuleComparison {
    let mut out = RuleComparison::default();
    for r in ours {
        if theirs.iter().any(|t| r.is_subsumed_by(t)) {
            out.common.push(r.clone());
        } else {
            out.personalized.push(r.clone());
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{load_dataset, LoadConfig};

    fn rule(preds: &[(&str, &str)], label: &str) -> NamedRule {
        NamedRule {
            predicates: preds.iter().map(|&(f, v)| NamedPredicate { feature: f.into(), value: v.into() }).collect(),
            label: label.into(),
        }
    }

    #[test]
    fn identical_rule_is_common() {
        let c = compare_rule_sets(&[rule(&[("odor", "p")], "1")], &[rule(&[("odor", "p")], "1")]);
        assert_eq!(c.common.len(), 1);
        assert!(c.personalized.is_empty());
    }

    #[test]
    fn label_mismatch_is_personalized() {
        let c = compare_rule_sets(&[rule(&[("a", "1")], "0")], &[rule(&[("a", "1")], "1")]);
        assert!(c.common.is_empty());
        assert_eq!(c.personalized.len(), 1);
    }

    #[test]
    fn subset_direction() {
        let ours = rule(&[("a", "1")], "0");
        let theirs = rule(&[("a", "1"), ("b", "2")], "0");
        assert_eq!(
            compare_rule_sets(std::slice::from_ref(&ours), std::slice::from_ref(&theirs)).common,
            vec![ours.clone()]
        );
        // the longer rule is not contained in the shorter one
        assert_eq!(compare_rule_sets(std::slice::from_ref(&theirs), &[ours]).personalized, vec![theirs]);
    }

    #[test]
    fn rule_file_forms() {
        let list = r#"[{"predicates":[{"feature":"odor","value":"p"}],"label":"1"}]"#;
        assert_eq!(parse_rule_file(list).unwrap(), vec![rule(&[("odor", "p")], "1")]);
        let report = r#"{"accuracy_mean":1.0,"rules":[{"rule_text":"{odor=p} -> 1","predicates":[{"feature":"odor","value":"p"}],"label":"1","length":1,"count":3}]}"#;
        assert_eq!(parse_rule_file(report).unwrap(), vec![rule(&[("odor", "p")], "1")]);
        let dup = r#"[{"predicates":[{"feature":"a","value":"1"},{"feature":"a","value":"2"}],"label":"1"}]"#;
        assert!(matches!(parse_rule_file(dup), Err(EvalError::DuplicateFeature(_))));
        assert!(matches!(parse_rule_file("{"), Err(EvalError::RuleFile(_))));
    }

    #[test]
    fn vocabulary_names_the_unknown_token() {
        let t = load_dataset("y,f,x\n0,a,1.5\n1,b,?\n1,a,3\n".as_bytes(), &LoadConfig::new("y")).unwrap();
        let v = Vocabulary::from_table(&t);
        assert!(v.check(&[rule(&[("f", "a"), ("x", "bin4")], "1")]).is_ok());
        assert!(v.check(&[rule(&[("x", "?")], "0")]).is_ok());
        let err = v.check(&[rule(&[("g", "a")], "1")]).unwrap_err();
        assert_eq!(err.to_string(), "unknown feature \"g\"");
        let err = v.check(&[rule(&[("f", "c")], "1")]).unwrap_err();
        assert_eq!(err.to_string(), "unknown value \"f=c\"");
        let err = v.check(&[rule(&[("f", "a")], "7")]).unwrap_err();
        assert_eq!(err.to_string(), "unknown label \"7\"");
        assert!(v.check(&[rule(&[("x", "bin5")], "1")]).is_err());
    }

    #[test]
    fn histogram_outputs() {
        let hist = vec![
            HistogramEntry { rule: "{a=1} -> 0".into(), count: 5 },
            HistogramEntry { rule: "{a=2} {b=x,y} -> 1".into(), count: 2 },
        ];
        assert_eq!(histogram_csv(&hist), "rule_text,count\n{a=1} -> 0,5\n\"{a=2} {b=x,y} -> 1\",2\n");
        let back: Vec<HistogramEntry> = serde_json::from_str(&histogram_json(&hist)).unwrap();
        assert_eq!(back, hist);
    }
}
