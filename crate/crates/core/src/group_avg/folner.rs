use std::collections::BTreeMap;

use serde::Serialize;

use crate::summation::WeightedMean;
use crate::systems::{z2_action_apply, TorusPointExact};

/// The box `F_n = [−n, n]² ⊂ Z²`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct FolnerBox {
    pub n: u32,
}

impl FolnerBox {
    pub fn new(n: u32) -> Self {
        Self { n }
    }

    pub fn cardinality(&self) -> u64 {
        let side = 2 * self.n as u64 + 1;
        side * side
    }

    pub fn contains(&self, (m, k): (i64, i64)) -> bool {
        let n = self.n as i64;
        m.abs() <= n && k.abs() <= n
    }

    pub fn elements(&self) -> impl Iterator<Item = (i64, i64)> {
        let n = self.n as i64;
        (-n..=n).flat_map(move |m| (-n..=n).map(move |k| (m, k)))
    }
}

/// `|F_n|^{−1} Σ_{g ∈ F_n} φ(g · p)`.
///
/// Orbit points are tallied first, so the sum runs over distinct points with
/// weights `count / |F_n|`; at a fixed point the result is exactly `φ(p)`.
pub fn folner_average<F>(p: TorusPointExact, observable: F, n: u32) -> f64
where
    F: Fn(TorusPointExact) -> f64,
{
    let fbox = FolnerBox::new(n);
    let mut counts: BTreeMap<TorusPointExact, u64> = BTreeMap::new();
    for (m, k) in fbox.elements() {
        *counts.entry(z2_action_apply(m, k, p)).or_default() += 1;
    }
    let total = fbox.cardinality() as f64;
    let mut mean = WeightedMean::new();
    for (point, count) in counts {
        mean.push(count as f64 / total, observable(point));
    }
    mean.mean().expect("box is nonempty")
}
