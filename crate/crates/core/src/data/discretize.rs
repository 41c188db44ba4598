use serde::{Deserialize, Serialize};

use super::{DataError, FeatureKind, RawTable};

/// Equal-width binning of one numeric feature over `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EqualWidth {
    lo: f64,
    hi: f64,
    bins: usize,
}

impl EqualWidth {
    /// Fit on the finite values yielded by `values`; `None` when there are none.
    pub fn fit(values: impl IntoIterator<Item = f64>, bins: usize) -> Option<Self> {
        assert!(bins >= 2, "equal-width binning needs at least 2 bins");
        let mut range: Option<(f64, f64)> = None;
        for x in values.into_iter().filter(|x| x.is_finite()) {
            range = Some(match range {
                None => (x, x),
                Some((lo, hi)) => (lo.min(x), hi.max(x)),
            });
        }
        range.map(|(lo, hi)| Self { lo, hi, bins })
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn bins(&self) -> usize {
        self.bins
    }

    pub fn width(&self) -> f64 {
        (self.hi - self.lo) / self.bins as f64
    }

    /// Bin id in `0..bins`. Total: out-of-range values clamp to the edge bins,
    /// `hi` lands in the last bin and a degenerate range maps everything to 0.
    pub fn bin(&self, x: f64) -> u32 {
        let last = self.bins - 1;
        if self.hi <= self.lo || x.is_nan() {
            return 0;
        }
        let pos = ((x - self.lo) / self.width()).floor();
        if pos <= 0.0 {
            0
        } else if pos >= last as f64 {
            last as u32
        } else {
            pos as u32
        }
    }

    /// Half-open interval `[lower, upper)` covered by `bin`, ignoring clamping.
    pub fn interval(&self, bin: u32) -> (f64, f64) {
        let w = self.width();
        (self.lo + bin as f64 * w, self.lo + (bin as f64 + 1.0) * w)
    }
}

/// Per-feature equal-width binning, fitted on training rows only.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Discretizer {
    per_feature: Vec<Option<EqualWidth>>,
}

impl Discretizer {
    /// Fit one [`EqualWidth`] per numeric feature of `train`.
    pub fn fit(train: &RawTable) -> Result<Self, DataError> {
        let per_feature = train
            .schema
            .features()
            .iter()
            .enumerate()
            .map(|(j, spec)| match spec.kind {
                FeatureKind::Categorical => Ok(None),
                FeatureKind::Numeric => {
                    let values =
                        train.rows.iter().filter(|r| r[j] != train.missing).filter_map(|r| r[j].parse::<f64>().ok());
                    EqualWidth::fit(values, spec.bins)
                        .map(Some)
                        .ok_or_else(|| DataError::NoNumericValues(spec.name.clone()))
                }
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self { per_feature })
    }

    pub fn feature(&self, j: usize) -> Option<&EqualWidth> {
        self.per_feature[j].as_ref()
    }

    pub fn n_features(&self) -> usize {
        self.per_feature.len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{load_dataset, LoadConfig};
    use proptest::prelude::*;

    /// Bin by scanning explicit edges `lo + i * w`, last bin closed on the right.
    fn bin_by_edges(b: &EqualWidth, x: f64) -> u32 {
        if b.hi() <= b.lo() {
            return 0;
        }
        let edges: Vec<f64> = (0..=b.bins()).map(|i| b.lo() + i as f64 * b.width()).collect();
        if x < edges[0] {
            return 0;
        }
        for i in 0..b.bins() {
            if x >= edges[i] && x < edges[i + 1] {
                return i as u32;
            }
        }
        (b.bins() - 1) as u32
    }

    #[test]
    fn unit_width_bins() {
        let b = EqualWidth::fit([0.0, 1.0, 2.0, 3.0, 4.0], 5).unwrap();
        let got: Vec<u32> = [0.0, 1.0, 2.0, 3.0, 4.0].iter().map(|&x| b.bin(x)).collect();
        assert_eq!(got, vec![0, 1, 2, 3, 4]);
    }

    #[test]
    fn constant_feature_degenerates_to_bin_zero() {
        let b = EqualWidth::fit([7.0, 7.0, 7.0], 5).unwrap();
        assert_eq!(b.bin(7.0), 0);
        assert_eq!(b.bin(100.0), 0);
        assert_eq!(b.bin(-3.0), 0);
    }

    #[test]
    fn max_value_clamps_into_last_bin() {
        let b = EqualWidth::fit([0.0, 10.0], 5).unwrap();
        assert_eq!(bin_by_edges(&b, 10.0), 4);
        assert_eq!(b.bin(10.0), 4);
        assert_eq!(b.bin(11.0), 4);
        assert_eq!(b.bin(-1.0), 0);
        assert_eq!(b.bin(1.999), 0);
        assert_eq!(b.bin(2.0), 1);
    }

    #[test]
    fn fit_ignores_non_finite_and_requires_a_value() {
        assert!(EqualWidth::fit([f64::NAN], 3).is_none());
        let b = EqualWidth::fit([f64::NAN, 1.0, 2.0], 3).unwrap();
        assert_eq!((b.lo(), b.hi()), (1.0, 2.0));
    }

    #[test]
    fn numeric_feature_without_values_is_an_error() {
        let mut cfg = LoadConfig::new("y");
        cfg.kinds.insert("a".into(), crate::data::FeatureKind::Numeric);
        let t = load_dataset("a,y\n?,p\n?,q\n".as_bytes(), &cfg).unwrap();
        assert!(matches!(Discretizer::fit(&t), Err(DataError::NoNumericValues(_))));
    }

    #[test]
    fn edges_come_from_training_rows_only() {
        let t = load_dataset("a,y\n0,p\n10,q\n5,p\n100,q\n".as_bytes(), &LoadConfig::new("y")).unwrap();
        let train = t.select(&[0, 1, 2]);
        let d1 = Discretizer::fit(&train).unwrap();
        let mut mutated = t.clone();
        mutated.rows[3][0] = "-5000".into();
        let d2 = Discretizer::fit(&mutated.select(&[0, 1, 2])).unwrap();
        assert_eq!(d1, d2);
        assert_eq!(d1.feature(0).unwrap().hi(), 10.0);
    }

    proptest! {
        #[test]
        fn bin_is_total(
            values in prop::collection::vec(-1e6f64..1e6, 1..40),
            bins in 2usize..12,
            x in prop::num::f64::ANY,
        ) {
            let b = EqualWidth::fit(values, bins).unwrap();
            prop_assert!((b.bin(x) as usize) < bins);
        }

        #[test]
        fn bin_matches_edge_enumeration(
            values in prop::collection::vec(-1e3f64..1e3, 2..40),
            bins in 2usize..12,
            x in -2e3f64..2e3,
        ) {
            let b = EqualWidth::fit(values, bins).unwrap();
            // Floating-point edges can disagree with the division by one ulp;
            // only compare away from the edges.
            let w = b.width();
            let near_edge = w > 0.0 && {
                let t = (x - b.lo()) / w;
                (t - t.round()).abs() < 1e-9
            };
            prop_assume!(!near_edge);
            prop_assert_eq!(b.bin(x), bin_by_edges(&b, x));
        }
    }
}
