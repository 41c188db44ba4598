use super::{Bitset, ClassId, Dataset, ValueId};

/// Vertical layout of a [`Dataset`]: for every predicate `f_j = v` a coverage
/// bitset over training rows, split by class.
#[derive(Debug, Clone)]
pub struct PredicateIndex {
    n_rows: usize,
    n_classes: usize,
    /// First slot of feature `j`; slot `offsets[j] + v` is predicate `(j, v)`.
    offsets: Vec<usize>,
    coverage: Vec<Bitset>,
    /// `per_class[slot * n_classes + c]`.
    per_class: Vec<Bitset>,
    class_masks: Vec<Bitset>,
}

impl PredicateIndex {
    pub fn build(ds: &Dataset) -> Self {
        let n = ds.n_rows();
        let c = ds.n_classes();
        let mut offsets = Vec::with_capacity(ds.n_features() + 1);
        let mut total = 0;
        for j in 0..ds.n_features() {
            offsets.push(total);
            total += ds.n_values(j);
        }
        offsets.push(total);

        let mut coverage = vec![Bitset::new(n); total];
        let mut per_class = vec![Bitset::new(n); total * c];
        let mut class_masks = vec![Bitset::new(n); c];
        for (i, (row, &y)) in ds.rows().iter().zip(ds.labels()).enumerate() {
            class_masks[y].insert(i);
            for (j, &v) in row.iter().enumerate() {
                let slot = offsets[j] + v as usize;
                coverage[slot].insert(i);
                per_class[slot * c + y].insert(i);
            }
        }
        Self { n_rows: n, n_classes: c, offsets, coverage, per_class, class_masks }
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_classes(&self) -> usize {
        self.n_classes
    }

    pub fn n_features(&self) -> usize {
        self.offsets.len() - 1
    }

    fn slot(&self, feature: usize, value: ValueId) -> Option<usize> {
        let lo = self.offsets[feature];
        let hi = self.offsets[feature + 1];
        let slot = lo.checked_add(value as usize)?;
        (slot < hi).then_some(slot)
    }

    /// Rows with `x_j = v`; `None` for ids the index has never seen.
    pub fn coverage(&self, feature: usize, value: ValueId) -> Option<&Bitset> {
        self.slot(feature, value).map(|s| &self.coverage[s])
    }

    /// Rows with `x_j = v` and label `class`.
    pub fn class_bits(&self, feature: usize, value: ValueId, class: ClassId) -> Option<&Bitset> {
        self.slot(feature, value).map(|s| &self.per_class[s * self.n_classes + class])
    }

    pub fn class_mask(&self, class: ClassId) -> &Bitset {
        &self.class_masks[class]
    }

    /// Per-class counts of rows satisfying every `(feature, value)` pair.
    /// An unknown value id yields all zeros.
    pub fn count_conjunction(&self, predicates: &[(usize, ValueId)]) -> Vec<u32> {
        let mut counts = vec![0u32; self.n_classes];
        let Some(slots) = predicates.iter().map(|&(j, v)| self.slot(j, v)).collect::<Option<Vec<_>>>() else {
            return counts;
        };
        match slots.as_slice() {
            [] => {
                for (c, mask) in self.class_masks.iter().enumerate() {
                    counts[c] = mask.count_ones() as u32;
                }
            }
            [s] => {
                for (c, count) in counts.iter_mut().enumerate() {
                    *count = self.per_class[s * self.n_classes + c].count_ones() as u32;
                }
            }
            _ => {
                let n_words = self.coverage[slots[0]].words().len();
                for w in 0..n_words {
                    let mut word = !0u64;
                    for &s in &slots {
                        word &= self.coverage[s].words()[w];
                        if word == 0 {
                            break;
                        }
                    }
                    if word == 0 {
                        continue;
                    }
                    for (c, count) in counts.iter_mut().enumerate() {
                        *count += (word & self.class_masks[c].words()[w]).count_ones();
                    }
                }
            }
        }
        counts
    }
}
