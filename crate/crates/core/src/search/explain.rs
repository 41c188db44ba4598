use serde::{Deserialize, Serialize};

use super::{Counters, Fallback, SearchResult};
use crate::data::Encoder;
use crate::rulecore::{render_rule, RuleRecord};

/// Per-sample output: the prediction and the rule behind it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Explanation {
    /// 0-based position of the sample in its input.
    pub row: usize,
    pub predicted_label: String,
    /// The sample's own label, when the input carried one.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub actual_label: Option<String>,
    pub rule_text: Option<String>,
    pub rule: Option<RuleRecord>,
    pub a_score: Option<f64>,
    pub precision: Option<f64>,
    pub recall: Option<f64>,
    pub stopped_at_level: usize,
    pub fallback: Fallback,
    pub counters: Counters,
}

impl Explanation {
    pub fn new(row: usize, result: &SearchResult, encoder: &Encoder, actual_label: Option<String>) -> Self {
        let classes = encoder.schema().classes();
        let r = result.rule.as_ref();
        Self {
            row,
            predicted_label: classes[result.predicted_label].clone(),
            actual_label,
            rule_text: r.map(|c| render_rule(&c.rule, encoder)),
            rule: r.map(|c| RuleRecord::new(c, encoder)),
            a_score: r.map(|c| c.a_score),
            precision: r.map(|c| c.precision),
            recall: r.map(|c| c.recall),
            stopped_at_level: result.stopped_at_level,
            fallback: result.fallback,
            counters: result.counters,
        }
    }
}
