//! Compensated accumulators.
//!
//! Long horizons (up to 2^24 terms) must not wash out gaps of order 1e-3,
//! so every average in the crate goes through one of these.

use std::ops::AddAssign;

/// Neumaier's variant of Kahan summation.
#[derive(Debug, Clone, Copy, Default)]
pub struct KahanSum {
    sum: f64,
    comp: f64,
}

impl KahanSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

impl AddAssign<f64> for KahanSum {
    fn add_assign(&mut self, rhs: f64) {
        self.add(rhs);
    }
}

impl FromIterator<f64> for KahanSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = KahanSum::new();
        for x in iter {
            acc.add(x);
        }
        acc
    }
}

/// Running mean anchored at the first sample.
///
/// Deviations from the anchor are summed with compensation, so a run of
/// identical samples reproduces that sample bit for bit.
#[derive(Debug, Clone, Copy, Default)]
pub struct CenteredMean {
    anchor: Option<f64>,
    deviations: KahanSum,
    count: u64,
}

impl CenteredMean {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, x: f64) {
        let anchor = *self.anchor.get_or_insert(x);
        self.deviations.add(x - anchor);
        self.count += 1;
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    /// Mean of the samples pushed so far, `None` before the first sample.
    pub fn mean(&self) -> Option<f64> {
        let anchor = self.anchor?;
        Some(anchor + self.deviations.value() / self.count as f64)
    }
}

/// Weighted mean `Σ w_i x_i` for weights summing to one, anchored at the
/// first sample. Exact when every sample is the same value.
#[derive(Debug, Clone, Copy, Default)]
pub struct WeightedMean {
    anchor: Option<f64>,
    deviations: KahanSum,
}

impl WeightedMean {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, weight: f64, x: f64) {
        let anchor = *self.anchor.get_or_insert(x);
        self.deviations.add(weight * (x - anchor));
    }

    pub fn mean(&self) -> Option<f64> {
        Some(self.anchor? + self.deviations.value())
    }
}
