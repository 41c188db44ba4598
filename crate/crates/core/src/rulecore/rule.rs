use serde::{Deserialize, Serialize};

use super::RuleError;
use crate::{ClassId, ValueId};

/// The test `f_feature = value`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Predicate {
    pub feature: usize,
    pub value: ValueId,
}

impl Predicate {
    pub fn new(feature: usize, value: ValueId) -> Self {
        Self { feature, value }
    }
}

/// Conjunction of predicates in canonical form: non-empty, at most one
/// predicate per feature, sorted by feature index.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Itemset(Vec<Predicate>);

impl Itemset {
    pub fn new(mut predicates: Vec<Predicate>) -> Result<Self, RuleError> {
        if predicates.is_empty() {
            return Err(RuleError::EmptyItemset);
        }
        predicates.sort();
        if let Some(w) = predicates.windows(2).find(|w| w[0].feature == w[1].feature) {
            return Err(RuleError::DuplicateFeature(w[0].feature));
        }
        Ok(Self(predicates))
    }

    /// Itemset of the sample's own values on `features` (strictly increasing).
    pub fn from_sample(sample: &[ValueId], features: &[usize]) -> Self {
        debug_assert!(!features.is_empty());
        debug_assert!(features.windows(2).all(|w| w[0] < w[1]));
        Self(features.iter().map(|&j| Predicate::new(j, sample[j])).collect())
    }

    pub fn predicates(&self) -> &[Predicate] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn features(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().map(|p| p.feature)
    }

    pub fn pairs(&self) -> Vec<(usize, ValueId)> {
        self.0.iter().map(|p| (p.feature, p.value)).collect()
    }

    pub fn matches(&self, x: &[ValueId]) -> bool {
        self.0.iter().all(|p| x.get(p.feature) == Some(&p.value))
    }

    pub fn is_subset_of(&self, other: &Itemset) -> bool {
        self.0.iter().all(|p| other.0.binary_search(p).is_ok())
    }

    /// The sub-itemset with the `i`-th predicate removed. Panics on length 1.
    pub fn without(&self, i: usize) -> Itemset {
        assert!(self.0.len() > 1, "no non-empty sub-itemset of a singleton");
        let mut preds = self.0.clone();
        preds.remove(i);
        Itemset(preds)
    }

    /// `self` extended with `p`, whose feature must exceed every present one.
    pub fn extended(&self, p: Predicate) -> Itemset {
        debug_assert!(self.0.last().is_none_or(|q| q.feature < p.feature));
        let mut preds = Vec::with_capacity(self.0.len() + 1);
        preds.extend_from_slice(&self.0);
        preds.push(p);
        Itemset(preds)
    }
}

/// `true` iff every predicate of `itemset` holds in `x`.
pub fn matches(itemset: &Itemset, x: &[ValueId]) -> bool {
    itemset.matches(x)
}

/// An itemset paired with a class label.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Rule {
    pub itemset: Itemset,
    pub label: ClassId,
}

impl Rule {
    pub fn new(itemset: Itemset, label: ClassId) -> Self {
        Self { itemset, label }
    }

    pub fn length(&self) -> usize {
        self.itemset.len()
    }
}
