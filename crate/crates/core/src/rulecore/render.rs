use serde::{Deserialize, Serialize};

use super::{Itemset, Rule, ScoredCandidate};
use crate::data::Encoder;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredicateRecord {
    pub feature: String,
    pub value: String,
    /// `[lower, upper)` of a numeric bin.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub interval: Option<[f64; 2]>,
}

/// Structured form of a scored rule, with names instead of ids.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RuleRecord {
    pub predicates: Vec<PredicateRecord>,
    pub label: String,
    pub precision: f64,
    pub recall: f64,
    pub a_score: f64,
    pub coverage: u32,
    pub positive: u32,
    pub length: usize,
}

impl RuleRecord {
    pub fn new(candidate: &ScoredCandidate, encoder: &Encoder) -> Self {
        let predicates = candidate
            .rule
            .itemset
            .predicates()
            .iter()
            .map(|p| PredicateRecord {
                feature: encoder.schema().feature(p.feature).name.clone(),
                value: encoder.value_label(p.feature, p.value),
                interval: encoder.value_interval(p.feature, p.value).map(|(lo, hi)| [lo, hi]),
            })
            .collect();
        Self {
            predicates,
            label: encoder.schema().classes()[candidate.rule.label].clone(),
            precision: candidate.precision,
            recall: candidate.recall,
            a_score: candidate.a_score,
            coverage: candidate.coverage,
            positive: candidate.positive,
            length: candidate.length(),
        }
    }
}

/// `{feat=value} {feat=value}`
pub fn render_itemset(itemset: &Itemset, encoder: &Encoder) -> String {
    itemset
        .predicates()
        .iter()
        .map(|p| {
            format!("{{{}={}}}", encoder.schema().feature(p.feature).name, encoder.value_label(p.feature, p.value))
        })
        .collect::<Vec<_>>()
        .join(" ")
}

/// `{feat=value} {feat=value} -> label`
pub fn render_rule(rule: &Rule, encoder: &Encoder) -> String {
    format!("{} -> {}", render_itemset(&rule.itemset, encoder), encoder.schema().classes()[rule.label])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::PredicateIndex;
    use crate::data::{load_dataset, LoadConfig};
    use crate::rulecore::{best_label_for, count_coverage, Predicate, ScoreParams};

    #[test]
    fn renders_worked_example_rule() {
        let src = "Class,f1,f2,f3,f4\n1,a1,b1,c1,d1\n1,a1,b2,c1,d2\n1,a2,b3,c2,d1\n\
                   2,a1,b2,c2,d1\n2,a2,b3,c1,d2\n2,a3,b1,c2,d1\n2,a1,b2,c2,d2\n";
        let t = load_dataset(src.as_bytes(), &LoadConfig::new("Class")).unwrap();
        let enc = Encoder::fit(&t).unwrap();
        let ds = enc.encode_table(&t);
        let idx = PredicateIndex::build(&ds);
        let s = Itemset::new(vec![Predicate::new(2, enc.value_id(2, "c2").unwrap())]).unwrap();
        let c =
            best_label_for(&s, &count_coverage(&s, &idx), ds.class_counts(), ScoreParams::new(0.5).unwrap()).unwrap();
        assert_eq!(render_rule(&c.rule, &enc), "{f3=c2} -> 2");
        let rec = RuleRecord::new(&c, &enc);
        assert_eq!(rec.label, "2");
        assert_eq!(rec.length, 1);
        assert_eq!((rec.coverage, rec.positive), (4, 3));
        assert_eq!(rec.predicates[0].feature, "f3");
        assert!(rec.predicates[0].interval.is_none());
    }
}
