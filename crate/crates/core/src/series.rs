//! Series container, empirical distribution machinery, and data preparation.
//!
//! A [`Series`] is a time-indexed sequence of real observations with a
//! per-index missing flag. Preparation follows the pipeline: aggregate raw
//! values to block maxima, fill missing entries by linear interpolation, and
//! center. [`EmpiricalDistribution`] provides the left-continuous generalized
//! inverse `F^{-}(q) = inf{y : F(y) >= q}` and ECDF evaluation used for all
//! quantile thresholds in the crate.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Optional sampling metadata: origin timestamp and step, both in seconds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesMeta {
    /// Epoch seconds of the first observation.
    pub origin_epoch_s: i64,
    /// Spacing between consecutive observations in seconds.
    pub step_s: i64,
}

/// A time-indexed sequence of real observations with a missing-value mask.
///
/// Invariants: `values` and `mask` have equal length; present entries are
/// finite. Missing entries carry an arbitrary payload and must never be read
/// without consulting the mask.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Series {
    values: Vec<f64>,
    mask: Vec<bool>,
    meta: Option<SeriesMeta>,
}

impl Series {
    /// Builds a series from values and mask; `mask[i]` is true when entry `i`
    /// is present.
    pub fn new(values: Vec<f64>, mask: Vec<bool>, meta: Option<SeriesMeta>) -> Result<Self> {
        if values.len() != mask.len() {
            return Err(Error::data(format!(
                "values ({}) and mask ({}) lengths differ",
                values.len(),
                mask.len()
            )));
        }
        for (i, (v, &present)) in values.iter().zip(&mask).enumerate() {
            if present && !v.is_finite() {
                return Err(Error::data(format!("non-finite value {v} at index {i}")));
            }
        }
        Ok(Series { values, mask, meta })
    }

    /// Builds a fully present series.
    pub fn from_values(values: Vec<f64>) -> Result<Self> {
        let mask = vec![true; values.len()];
        Series::new(values, mask, None)
    }

    /// Number of entries, present or missing.
    pub fn len(&self) -> usize {
        self.values.len()
    }

    /// True when the series has no entries.
    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Raw value storage; entries where [`Series::mask`] is false are
    /// meaningless.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Per-index presence flags.
    pub fn mask(&self) -> &[bool] {
        &self.mask
    }

    /// Sampling metadata, when known.
    pub fn meta(&self) -> Option<SeriesMeta> {
        self.meta
    }

    /// Replaces the metadata.
    pub fn with_meta(mut self, meta: Option<SeriesMeta>) -> Self {
        self.meta = meta;
        self
    }

    /// Number of missing entries.
    pub fn missing_count(&self) -> usize {
        self.mask.iter().filter(|&&p| !p).count()
    }

    /// Returns the values when every entry is present, else a data error.
    pub fn complete_values(&self) -> Result<&[f64]> {
        match self.mask.iter().position(|&p| !p) {
            None => Ok(&self.values),
            Some(i) => Err(Error::data(format!("missing value at index {i}"))),
        }
    }

    /// Maximum over each length-`block_len` block of present values.
    ///
    /// Output length is `ceil(len / block_len)`; blocks start at index 0 and
    /// the final block may be partial. A block with no present values yields a
    /// missing output entry. Block metadata scales the step by `block_len`.
    pub fn aggregate_block_max(&self, block_len: usize) -> Result<Series> {
        if block_len == 0 {
            return Err(Error::domain("block_len must be at least 1"));
        }
        let mut values = Vec::with_capacity(self.len().div_ceil(block_len));
        let mut mask = Vec::with_capacity(values.capacity());
        for block in self.values.chunks(block_len).zip(self.mask.chunks(block_len)) {
            let (vs, ms) = block;
            let mut best: Option<f64> = None;
            for (v, &present) in vs.iter().zip(ms) {
                if present {
                    best = Some(best.map_or(*v, |b: f64| b.max(*v)));
                }
            }
            match best {
                Some(v) => {
                    values.push(v);
                    mask.push(true);
                }
                None => {
                    values.push(f64::NAN);
                    mask.push(false);
                }
            }
        }
        let meta = self.meta.map(|m| SeriesMeta {
            origin_epoch_s: m.origin_epoch_s,
            step_s: m.step_s * block_len as i64,
        });
        Series::new(values, mask, meta)
    }

    /// Fills missing entries by linear interpolation between the flanking
    /// present values; boundary runs are filled with the nearest present
    /// value. Errors when the series is entirely missing.
    pub fn interpolate_missing(&self) -> Result<Series> {
        let first = self.mask.iter().position(|&p| p);
        let Some(first) = first else {
            return Err(Error::data("cannot interpolate an all-missing series"));
        };
        let last = self.mask.iter().rposition(|&p| p).expect("has a present entry");
        let mut values = self.values.clone();
        for v in values.iter_mut().take(first) {
            *v = self.values[first];
        }
        for v in values.iter_mut().skip(last + 1) {
            *v = self.values[last];
        }
        let mut i = first;
        while i <= last {
            if self.mask[i] {
                i += 1;
                continue;
            }
            let run_start = i;
            while !self.mask[i] {
                i += 1;
            }
            let (lo, hi) = (run_start - 1, i);
            let (a, b) = (self.values[lo], self.values[hi]);
            let span = (hi - lo) as f64;
            for (k, v) in values.iter_mut().enumerate().take(hi).skip(run_start) {
                let t = (k - lo) as f64 / span;
                *v = a + t * (b - a);
            }
        }
        Series::new(values, vec![true; self.len()], self.meta)
    }

    /// Subtracts the mean from a fully present series; returns the centered
    /// series and the subtracted mean, for mapping thresholds back to raw
    /// units.
    pub fn center(&self) -> Result<(Series, f64)> {
        let values = self.complete_values()?;
        if values.is_empty() {
            return Err(Error::data("cannot center an empty series"));
        }
        let mean = values.iter().sum::<f64>() / values.len() as f64;
        let centered: Vec<f64> = values.iter().map(|v| v - mean).collect();
        Ok((Series::new(centered, self.mask.clone(), self.meta)?, mean))
    }
}

/// Sorted sample values supporting ECDF evaluation and the left-continuous
/// generalized inverse.
///
/// Invariants: the stored values are nondecreasing and the count is at least
/// one. Ranks are computed on the sorted multiset including duplicates.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalDistribution {
    sorted_values: Vec<f64>,
}

impl EmpiricalDistribution {
    /// Builds the distribution from an unsorted sample.
    pub fn from_sample(sample: &[f64]) -> Result<Self> {
        if sample.is_empty() {
            return Err(Error::data("empirical distribution needs at least one value"));
        }
        for (i, v) in sample.iter().enumerate() {
            if !v.is_finite() {
                return Err(Error::data(format!("non-finite value {v} at index {i}")));
            }
        }
        let mut sorted_values = sample.to_vec();
        sorted_values.sort_unstable_by(f64::total_cmp);
        Ok(EmpiricalDistribution { sorted_values })
    }

    /// Sample size.
    pub fn n(&self) -> usize {
        self.sorted_values.len()
    }

    /// The sorted sample.
    pub fn sorted_values(&self) -> &[f64] {
        &self.sorted_values
    }

    /// Left-continuous generalized inverse of the ECDF:
    /// the smallest stored value `y` whose rank fraction reaches `q`.
    ///
    /// Requires `0 < q <= 1`. The rank index `ceil(q*n)` is computed with a
    /// `1e-9` downward slack so that `q` values that are exact rank fractions
    /// survive the round trip through floating point.
    pub fn generalized_inverse(&self, q: f64) -> Result<f64> {
        if !(q > 0.0 && q <= 1.0) {
            return Err(Error::domain(format!("quantile level {q} outside (0, 1]")));
        }
        let n = self.n();
        let rank = (q * n as f64 - 1e-9).ceil().max(1.0) as usize;
        Ok(self.sorted_values[rank.min(n) - 1])
    }

    /// ECDF value: the fraction of stored values less than or equal to `x`.
    pub fn ecdf(&self, x: f64) -> f64 {
        let count = self.sorted_values.partition_point(|v| *v <= x);
        count as f64 / self.n() as f64
    }

    /// Fraction of stored values strictly greater than `x`.
    pub fn exceedance_fraction(&self, x: f64) -> f64 {
        1.0 - self.ecdf(x)
    }
}
