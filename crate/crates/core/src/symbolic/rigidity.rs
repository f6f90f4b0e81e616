//! Periodic averages and the periodic-orbit rigidity test.
//!
//! On a transitive shift either the averages of `φ` over all periodic
//! orbits share one value `c_φ`, or two periodic orbits with different
//! averages witness sensitivity. The test below decides between the two on
//! all primitive cycles up to a period bound.

use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use super::{format_word, Symbol, TransitionMatrix, Word};
use crate::error::{Error, Result};
use crate::fmt::ser_f64;
use crate::summation::CenteredMean;

type WindowFn = Arc<dyn Fn(&[Symbol]) -> f64 + Send + Sync>;

/// Observable depending on coordinates `0..width`.
#[derive(Clone)]
pub struct WindowObservable {
    width: usize,
    label: String,
    f: WindowFn,
}

impl fmt::Debug for WindowObservable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("WindowObservable")
            .field("width", &self.width)
            .field("label", &self.label)
            .finish()
    }
}

impl WindowObservable {
    pub fn new<F>(width: usize, label: impl Into<String>, f: F) -> Self
    where
        F: Fn(&[Symbol]) -> f64 + Send + Sync + 'static,
    {
        Self {
            width: width.max(1),
            label: label.into(),
            f: Arc::new(f),
        }
    }

    pub fn constant(c: f64) -> Self {
        Self::new(1, format!("constant({c})"), move |_| c)
    }

    /// `x ↦ x_0` read as a number.
    pub fn first_symbol() -> Self {
        Self::new(1, "first_symbol", |w| w[0] as f64)
    }

    pub fn indicator(symbol: Symbol) -> Self {
        Self::new(1, format!("indicator({symbol})"), move |w| {
            (w[0] == symbol) as u8 as f64
        })
    }

    /// Symbol `s` at coordinate 0 maps to `values[s]`.
    pub fn symbol_values(values: Vec<f64>) -> Self {
        Self::new(1, "symbol_values", move |w| {
            values.get(w[0] as usize).copied().unwrap_or(0.0)
        })
    }

    /// Lookup table over windows of `width` symbols of an alphabet of
    /// `alphabet_size`, indexed in base `alphabet_size` with coordinate 0
    /// most significant.
    pub fn table(width: usize, alphabet_size: usize, values: Vec<f64>) -> Result<Self> {
        let expected = alphabet_size
            .checked_pow(width as u32)
            .unwrap_or(usize::MAX);
        if width == 0 || values.len() != expected {
            return Err(Error::InvalidArgument(format!(
                "window table needs {expected} entries, got {}",
                values.len()
            )));
        }
        Ok(Self::new(
            width,
            format!("table(width={width})"),
            move |w| {
                let idx = w
                    .iter()
                    .fold(0usize, |acc, &s| acc * alphabet_size + s as usize);
                values[idx]
            },
        ))
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn eval(&self, window: &[Symbol]) -> f64 {
        (self.f)(window)
    }

    /// Affine image `x ↦ scale · φ(x) + shift`.
    pub fn affine(&self, scale: f64, shift: f64) -> Self {
        let inner = self.f.clone();
        Self::new(
            self.width,
            format!("{scale}*{}+{shift}", self.label),
            move |w| scale * inner(w) + shift,
        )
    }
}

/// Exact average of `φ` over the shifts of the periodic point `cycle^∞`.
pub fn periodic_average(
    cycle: &[Symbol],
    observable: &WindowObservable,
    sft: &TransitionMatrix,
) -> Result<f64> {
    if !sft.admits_cycle(cycle) {
        return Err(Error::BadCycle(format_word(cycle, sft.size())));
    }
    Ok(cycle_average(cycle, observable))
}

fn cycle_average(cycle: &[Symbol], observable: &WindowObservable) -> f64 {
    let p = cycle.len();
    let mut window = vec![0; observable.width()];
    let mut mean = CenteredMean::new();
    for j in 0..p {
        for (k, slot) in window.iter_mut().enumerate() {
            *slot = cycle[(j + k) % p];
        }
        mean.push(observable.eval(&window));
    }
    mean.mean().expect("nonempty cycle")
}

fn is_least_rotation(w: &[Symbol]) -> bool {
    (1..w.len()).all(|r| {
        let rotated = w[r..].iter().chain(&w[..r]);
        w.iter().cmp(rotated) != std::cmp::Ordering::Greater
    })
}

fn is_primitive(w: &[Symbol]) -> bool {
    let p = w.len();
    (1..p)
        .filter(|d| p.is_multiple_of(*d))
        .all(|d| (d..p).any(|i| w[i] != w[i - d]))
}

/// Every primitive admissible cycle of length `≤ max_period`, each given by
/// its least rotation, ordered by length and then lexicographically.
pub fn primitive_cycles(sft: &TransitionMatrix, max_period: usize) -> Vec<Word> {
    let mut out = Vec::new();
    for p in 1..=max_period {
        let mut stack: Vec<Word> = (0..sft.size()).rev().map(|s| vec![s as Symbol]).collect();
        while let Some(w) = stack.pop() {
            if w.len() == p {
                if sft.allows(w[p - 1], w[0]) && is_least_rotation(&w) && is_primitive(&w) {
                    out.push(w);
                }
                continue;
            }
            let last = *w.last().unwrap();
            // a least rotation never has a symbol below its first one
            let succ: Vec<Symbol> = sft.successors(last).filter(|&s| s >= w[0]).collect();
            for s in succ.into_iter().rev() {
                let mut next = w.clone();
                next.push(s);
                stack.push(next);
            }
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PeriodicWitness {
    pub cycle: String,
    #[serde(serialize_with = "ser_f64")]
    pub average: f64,
    #[serde(skip)]
    pub word: Word,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "verdict", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum RigidityVerdict {
    Rigid {
        #[serde(serialize_with = "ser_f64")]
        c_phi: f64,
    },
    NonRigid {
        low: PeriodicWitness,
        high: PeriodicWitness,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RigidityResult {
    #[serde(flatten)]
    pub verdict: RigidityVerdict,
    #[serde(serialize_with = "ser_f64")]
    pub tolerance: f64,
    pub cycles_tested: usize,
    pub max_period: usize,
}

impl RigidityResult {
    pub fn is_rigid(&self) -> bool {
        matches!(self.verdict, RigidityVerdict::Rigid { .. })
    }

    /// Spread `max − min` of the periodic averages (zero when rigid is exact).
    pub fn witness_gap(&self) -> f64 {
        match &self.verdict {
            RigidityVerdict::Rigid { .. } => 0.0,
            RigidityVerdict::NonRigid { low, high } => high.average - low.average,
        }
    }
}

/// RIGID(c) when all periodic averages up to `max_period` lie within a band
/// of width `tol` (c is their mean), otherwise NON_RIGID with the first
/// cycle attaining the minimum and the first attaining the maximum.
pub fn rigidity_test(
    sft: &TransitionMatrix,
    observable: &WindowObservable,
    max_period: usize,
    tol: f64,
) -> Result<RigidityResult> {
    if max_period == 0 {
        return Err(Error::InvalidArgument(
            "max_period must be at least 1".into(),
        ));
    }
    let cycles = primitive_cycles(sft, max_period);
    if cycles.is_empty() {
        return Err(Error::NoCycles(max_period));
    }
    let averages: Vec<f64> = cycles
        .iter()
        .map(|c| cycle_average(c, observable))
        .collect();
    let (mut lo, mut hi) = (0, 0);
    for (i, &a) in averages.iter().enumerate() {
        if a < averages[lo] {
            lo = i;
        }
        if a > averages[hi] {
            hi = i;
        }
    }
    let witness = |i: usize| PeriodicWitness {
        cycle: format_word(&cycles[i], sft.size()),
        average: averages[i],
        word: cycles[i].clone(),
    };
    let verdict = if averages[hi] - averages[lo] <= tol {
        let mut mean = CenteredMean::new();
        averages.iter().for_each(|&a| mean.push(a));
        RigidityVerdict::Rigid {
            c_phi: mean.mean().expect("nonempty"),
        }
    } else {
        RigidityVerdict::NonRigid {
            low: witness(lo),
            high: witness(hi),
        }
    };
    Ok(RigidityResult {
        verdict,
        tolerance: tol,
        cycles_tested: cycles.len(),
        max_period,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    // Oracle: brute-force every word of each length, keep admissible
    // primitive necklaces by canonical least rotation.
    fn necklaces_brute(sft: &TransitionMatrix, max_period: usize) -> Vec<Word> {
        let mut out = Vec::new();
        let n = sft.size();
        for p in 1..=max_period {
            let mut found: Vec<Word> = Vec::new();
            for code in 0..n.pow(p as u32) {
                let mut w = vec![0; p];
                let mut c = code;
                for slot in w.iter_mut().rev() {
                    *slot = (c % n) as Symbol;
                    c /= n;
                }
                if !sft.admits_cycle(&w) {
                    continue;
                }
                let rotations: Vec<Word> = (0..p).map(|r| [&w[r..], &w[..r]].concat()).collect();
                if rotations.iter().skip(1).any(|r| *r == w) {
                    continue;
                }
                let least = rotations.into_iter().min().unwrap();
                if !found.contains(&least) {
                    found.push(least);
                }
            }
            found.sort();
            out.extend(found);
        }
        out
    }

    #[test]
    fn cycle_enumeration_matches_brute_force() {
        let g = TransitionMatrix::golden_mean();
        assert_eq!(primitive_cycles(&g, 4), necklaces_brute(&g, 4));
        let expected: Vec<Word> = vec![vec![0], vec![0, 1], vec![0, 0, 1], vec![0, 0, 0, 1]];
        assert_eq!(primitive_cycles(&g, 4), expected);
        let m = TransitionMatrix::new(vec![vec![0, 1, 1], vec![1, 1, 0], vec![1, 0, 1]]).unwrap();
        assert_eq!(primitive_cycles(&m, 6), necklaces_brute(&m, 6));
        let f3 = TransitionMatrix::full_shift(3);
        assert_eq!(primitive_cycles(&f3, 5), necklaces_brute(&f3, 5));
    }

    #[test]
    fn periodic_average_examples() {
        let f2 = TransitionMatrix::full_shift(2);
        let phi = WindowObservable::first_symbol();
        assert_eq!(periodic_average(&[0], &phi, &f2).unwrap(), 0.0);
        assert_eq!(periodic_average(&[0, 1], &phi, &f2).unwrap(), 0.5);
        let g = TransitionMatrix::golden_mean();
        assert_eq!(
            periodic_average(&[1, 1], &phi, &g).unwrap_err().code(),
            "BAD_CYCLE"
        );
        assert_eq!(
            periodic_average(&[1], &phi, &g).unwrap_err().code(),
            "BAD_CYCLE"
        );
        for c in primitive_cycles(&g, 4) {
            let ones = c.iter().filter(|&&s| s == 1).count() as f64;
            assert_eq!(
                periodic_average(&c, &phi, &g).unwrap(),
                ones / c.len() as f64
            );
        }
    }

    #[test]
    fn depth_two_window_average() {
        let phi = WindowObservable::table(2, 2, vec![0.0, 1.0, 2.0, 3.0]).unwrap();
        // windows of (011)^∞: 01, 11, 10 → 1, 3, 2
        let f2 = TransitionMatrix::full_shift(2);
        assert_eq!(periodic_average(&[0, 1, 1], &phi, &f2).unwrap(), 2.0);
        assert!(WindowObservable::table(2, 2, vec![0.0; 3]).is_err());
    }

    #[test]
    fn constant_is_rigid() {
        let r = rigidity_test(
            &TransitionMatrix::golden_mean(),
            &WindowObservable::constant(3.0),
            6,
            1e-9,
        )
        .unwrap();
        assert_eq!(r.verdict, RigidityVerdict::Rigid { c_phi: 3.0 });
    }

    #[test]
    fn full_shift_first_symbol_is_not_rigid() {
        let r = rigidity_test(
            &TransitionMatrix::full_shift(2),
            &WindowObservable::first_symbol(),
            3,
            1e-9,
        )
        .unwrap();
        match r.verdict {
            RigidityVerdict::NonRigid { low, high } => {
                assert_eq!((low.cycle.as_str(), low.average), ("0", 0.0));
                assert_eq!((high.cycle.as_str(), high.average), ("1", 1.0));
            }
            v => panic!("unexpected {v:?}"),
        }
    }

    #[test]
    fn golden_mean_extremal_pair_matches_enumeration() {
        let g = TransitionMatrix::golden_mean();
        let phi = WindowObservable::first_symbol();
        let r = rigidity_test(&g, &phi, 4, 1e-9).unwrap();
        let cycles = necklaces_brute(&g, 4);
        let avgs: Vec<f64> = cycles
            .iter()
            .map(|c| periodic_average(c, &phi, &g).unwrap())
            .collect();
        let max = avgs.iter().cloned().fold(f64::MIN, f64::max);
        let min = avgs.iter().cloned().fold(f64::MAX, f64::min);
        match r.verdict {
            RigidityVerdict::NonRigid { low, high } => {
                assert_eq!((low.average, high.average), (min, max));
                assert_eq!((low.cycle.as_str(), high.cycle.as_str()), ("0", "01"));
            }
            v => panic!("unexpected {v:?}"),
        }
        assert_eq!(r.cycles_tested, 4);
    }

    #[test]
    fn no_cycles_error() {
        // Only 2-cycles exist here.
        let swap = TransitionMatrix::new(vec![vec![0, 1], vec![1, 0]]).unwrap();
        assert_eq!(
            rigidity_test(&swap, &WindowObservable::first_symbol(), 1, 1e-9)
                .unwrap_err()
                .code(),
            "NO_CYCLES"
        );
    }

    #[test]
    fn verdict_serialization() {
        let r = rigidity_test(
            &TransitionMatrix::full_shift(2),
            &WindowObservable::first_symbol(),
            2,
            1e-9,
        )
        .unwrap();
        let v = serde_json::to_value(&r).unwrap();
        assert_eq!(v["verdict"], "NON_RIGID");
        assert_eq!(v["high"]["cycle"], "1");
    }
}
