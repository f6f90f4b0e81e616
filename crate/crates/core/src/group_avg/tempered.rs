use std::collections::BTreeMap;

use serde::Serialize;

use super::folner::FolnerBox;
use crate::error::{Error, Result};
use crate::fmt::ser_f64;

/// Finite subset of `Z²` stored row by row as sorted, disjoint, closed
/// `x`-intervals.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RowSet {
    rows: BTreeMap<i64, Vec<(i64, i64)>>,
}

fn merge(mut intervals: Vec<(i64, i64)>) -> Vec<(i64, i64)> {
    intervals.sort_unstable();
    let mut out: Vec<(i64, i64)> = Vec::with_capacity(intervals.len());
    for (lo, hi) in intervals {
        match out.last_mut() {
            Some(last) if lo <= last.1 + 1 => last.1 = last.1.max(hi),
            _ => out.push((lo, hi)),
        }
    }
    out
}

impl RowSet {
    pub fn from_points(points: impl IntoIterator<Item = (i64, i64)>) -> Self {
        let mut raw: BTreeMap<i64, Vec<(i64, i64)>> = BTreeMap::new();
        for (x, y) in points {
            raw.entry(y).or_default().push((x, x));
        }
        Self::from_raw(raw)
    }

    fn from_raw(raw: BTreeMap<i64, Vec<(i64, i64)>>) -> Self {
        Self {
            rows: raw.into_iter().map(|(y, v)| (y, merge(v))).collect(),
        }
    }

    pub fn count(&self) -> u64 {
        self.rows
            .values()
            .flatten()
            .map(|(lo, hi)| (hi - lo + 1) as u64)
            .sum()
    }

    pub fn contains(&self, (x, y): (i64, i64)) -> bool {
        self.rows
            .get(&y)
            .is_some_and(|v| v.iter().any(|&(lo, hi)| lo <= x && x <= hi))
    }

    /// `{−g : g ∈ self}`.
    pub fn inverse(&self) -> Self {
        let raw = self
            .rows
            .iter()
            .map(|(&y, v)| (-y, v.iter().map(|&(lo, hi)| (-hi, -lo)).collect()))
            .collect();
        Self::from_raw(raw)
    }

    /// `{g + h : g ∈ self, h ∈ other}`.
    pub fn sumset(&self, other: &Self) -> Self {
        let mut raw: BTreeMap<i64, Vec<(i64, i64)>> = BTreeMap::new();
        self.sumset_into(other, &mut raw);
        Self::from_raw(raw)
    }

    fn sumset_into(&self, other: &Self, raw: &mut BTreeMap<i64, Vec<(i64, i64)>>) {
        for (&y1, v1) in &self.rows {
            for (&y2, v2) in &other.rows {
                let row = raw.entry(y1 + y2).or_default();
                for &(a, b) in v1 {
                    for &(c, d) in v2 {
                        row.push((a + c, b + d));
                    }
                }
            }
        }
    }
}

impl From<FolnerBox> for RowSet {
    fn from(b: FolnerBox) -> Self {
        let n = b.n as i64;
        Self {
            rows: (-n..=n).map(|y| (y, vec![(-n, n)])).collect(),
        }
    }
}

/// Outcome of checking `|∪_{k<n} F_k^{−1} F_n| ≤ C |F_n|` for `1 ≤ n ≤ up_to`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TemperedCheck {
    #[serde(rename = "C", serialize_with = "ser_f64")]
    pub c: f64,
    pub verified_up_to: u32,
    pub holds: bool,
    /// Smallest constant that works for every checked `n`.
    #[serde(serialize_with = "ser_f64")]
    pub minimal_c: f64,
}

/// Counts the past-overlap unions of the family exactly. `verified_up_to`
/// is the last `n` before the first failure, or `up_to` when none fails.
pub fn tempered_check<F>(boxes: F, up_to: u32, c: f64) -> Result<TemperedCheck>
where
    F: Fn(u32) -> RowSet,
{
    if up_to == 0 {
        return Err(Error::InvalidArgument(
            "tempered check needs up_to >= 1".into(),
        ));
    }
    let family: Vec<RowSet> = (0..=up_to).map(&boxes).collect();
    let inverses: Vec<RowSet> = family.iter().map(RowSet::inverse).collect();
    let mut minimal_c: f64 = 0.0;
    let mut verified_up_to = 0;
    let mut holds = true;
    for n in 1..=up_to as usize {
        let mut raw = BTreeMap::new();
        for inv in &inverses[..n] {
            inv.sumset_into(&family[n], &mut raw);
        }
        let union = RowSet::from_raw(raw).count();
        let size = family[n].count();
        minimal_c = minimal_c.max(union as f64 / size as f64);
        if holds && union as f64 <= c * size as f64 {
            verified_up_to = n as u32;
        } else {
            holds = false;
        }
    }
    Ok(TemperedCheck {
        c,
        verified_up_to,
        holds,
        minimal_c,
    })
}
