//! Partial averages and the finite-horizon oscillation quantities built on
//! them.
//!
//! Asymptotic objects are replaced by declared finite surrogates:
//!
//! * `liminf`/`limsup` become the min/max over a tail window holding the
//!   last `ceil(tail_fraction * H)` averages;
//! * the accumulation set of the average sequence becomes the single-linkage
//!   clusters of that tail at a user radius;
//! * the weak* topology on empirical measures becomes total variation on a
//!   shared grid.
//!
//! A positive tail gap is an *indication* of irregularity at horizon `H`,
//! never a proof of it.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::fmt::{ser_f64, ser_f64_seq};
use crate::summation::CenteredMean;

/// Default tail window used when estimating `liminf`/`limsup`.
pub const DEFAULT_TAIL_FRACTION: f64 = 0.25;

/// Observable values `φ_1(y), …, φ_H(y)` along one orbit, with the sup bound
/// admitted for them.
#[derive(Debug, Clone, PartialEq)]
pub struct ObservableSeq {
    values: Vec<f64>,
    bound: f64,
}

impl ObservableSeq {
    pub fn new(values: Vec<f64>, bound: f64) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::DomainEmpty("observable sequence"));
        }
        if let Some(i) = values.iter().position(|v| !(v.abs() <= bound)) {
            return Err(Error::InvalidArgument(format!(
                "value {} at index {i} exceeds bound {bound}",
                values[i]
            )));
        }
        Ok(Self { values, bound })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn bound(&self) -> f64 {
        self.bound
    }

    pub fn horizon(&self) -> usize {
        self.values.len()
    }

    pub fn partial_averages(&self) -> Vec<f64> {
        birkhoff_averages_from(self.values.iter().copied(), self.values.len())
    }
}

/// Birkhoff partial averages: entry `n-1` is `(1/n) Σ_{j<n} orbit_values[j]`.
pub fn birkhoff_partial_averages(orbit_values: &[f64], horizon: usize) -> Result<Vec<f64>> {
    if orbit_values.is_empty() || horizon == 0 {
        return Err(Error::DomainEmpty("orbit values"));
    }
    if horizon > orbit_values.len() {
        return Err(Error::InvalidArgument(format!(
            "horizon {horizon} exceeds {} available values",
            orbit_values.len()
        )));
    }
    Ok(birkhoff_averages_from(
        orbit_values.iter().copied(),
        horizon,
    ))
}

/// Streaming form of [`birkhoff_partial_averages`]; stops after `horizon`
/// values or when the iterator runs dry.
pub fn birkhoff_averages_from<I>(values: I, horizon: usize) -> Vec<f64>
where
    I: IntoIterator<Item = f64>,
{
    let mut out = Vec::with_capacity(horizon);
    let mut acc = CenteredMean::new();
    for v in values.into_iter().take(horizon) {
        acc.push(v);
        out.push(acc.mean().expect("nonempty"));
    }
    out
}

/// A group of tail averages at mutual single-linkage distance `≤ tol`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Cluster {
    #[serde(serialize_with = "ser_f64")]
    pub center: f64,
    pub weight: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OscillationReport {
    pub horizon: usize,
    #[serde(serialize_with = "ser_f64_seq")]
    pub partial_averages: Vec<f64>,
    #[serde(serialize_with = "ser_f64")]
    pub liminf_est: f64,
    #[serde(serialize_with = "ser_f64")]
    pub limsup_est: f64,
    #[serde(serialize_with = "ser_f64")]
    pub gap: f64,
    #[serde(serialize_with = "ser_f64")]
    pub tail_fraction: f64,
    pub clusters: Vec<Cluster>,
}

impl OscillationReport {
    /// Number of averages in the tail window.
    pub fn tail_len(&self) -> usize {
        tail_len(self.horizon, self.tail_fraction)
    }

    pub fn tail(&self) -> &[f64] {
        &self.partial_averages[self.horizon - self.tail_len()..]
    }

    /// Finite-horizon irregularity indication: the tail gap exceeds
    /// `threshold`.
    pub fn indicates_irregularity(&self, threshold: f64) -> bool {
        self.gap > threshold
    }

    /// Applies `x ↦ scale * x + shift` to every stored value.
    pub fn affine(&self, scale: f64, shift: f64) -> OscillationReport {
        let f = |x: f64| scale * x + shift;
        let (lo, hi) = if scale >= 0.0 {
            (f(self.liminf_est), f(self.limsup_est))
        } else {
            (f(self.limsup_est), f(self.liminf_est))
        };
        let mut clusters: Vec<Cluster> = self
            .clusters
            .iter()
            .map(|c| Cluster {
                center: f(c.center),
                weight: c.weight,
            })
            .collect();
        clusters.sort_by(|a, b| a.center.total_cmp(&b.center));
        OscillationReport {
            horizon: self.horizon,
            partial_averages: self.partial_averages.iter().map(|&x| f(x)).collect(),
            liminf_est: lo,
            limsup_est: hi,
            gap: hi - lo,
            tail_fraction: self.tail_fraction,
            clusters,
        }
    }
}

fn tail_len(horizon: usize, tail_fraction: f64) -> usize {
    ((tail_fraction * horizon as f64).ceil() as usize).clamp(0, horizon)
}

/// Single-linkage clusters of a set of reals at radius `tol`, in increasing
/// center order.
pub fn single_linkage(values: &[f64], tol: f64) -> Vec<Cluster> {
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut clusters = Vec::new();
    let mut start = 0;
    for i in 1..=sorted.len() {
        if i == sorted.len() || sorted[i] - sorted[i - 1] > tol {
            let members = &sorted[start..i];
            let mut mean = CenteredMean::new();
            members.iter().for_each(|&x| mean.push(x));
            let center = mean
                .mean()
                .expect("nonempty cluster")
                .clamp(members[0], members[members.len() - 1]);
            clusters.push(Cluster {
                center,
                weight: members.len(),
            });
            start = i;
        }
    }
    clusters
}

/// Summarizes a sequence of averages over its tail window.
pub fn oscillation_report(
    averages: &[f64],
    tail_fraction: f64,
    cluster_tol: f64,
) -> Result<OscillationReport> {
    if !(tail_fraction > 0.0 && tail_fraction <= 1.0) {
        return Err(Error::InvalidArgument(format!(
            "tail_fraction {tail_fraction} not in (0, 1]"
        )));
    }
    if !(cluster_tol > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "cluster_tol {cluster_tol} must be positive"
        )));
    }
    let horizon = averages.len();
    let len = tail_len(horizon, tail_fraction);
    if len == 0 {
        return Err(Error::DomainEmpty("tail window"));
    }
    let tail = &averages[horizon - len..];
    let (lo, hi) = tail
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| {
            (lo.min(x), hi.max(x))
        });
    Ok(OscillationReport {
        horizon,
        partial_averages: averages.to_vec(),
        liminf_est: lo,
        limsup_est: hi,
        gap: hi - lo,
        tail_fraction,
        clusters: single_linkage(tail, cluster_tol),
    })
}

/// Outcome of testing whether the averages are `eta`-Cauchy from index `N`
/// on (indices are 1-based, as `avg(n)` is the mean of the first `n` values).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LambdaProbe {
    #[serde(rename = "N")]
    pub start: usize,
    #[serde(serialize_with = "ser_f64")]
    pub eta: f64,
    pub violated: bool,
    pub violation_pair: Option<(usize, usize)>,
}

/// Precomputed suffix extrema that answer [`lambda_probe`] for many window
/// starts at once.
#[derive(Debug, Clone)]
pub struct LambdaScanner<'a> {
    averages: &'a [f64],
    eta: f64,
    // next_witness[i]: smallest 0-based index j >= i having some later k with
    // |avg[j] - avg[k]| > eta; usize::MAX if none.
    next_witness: Vec<usize>,
}

impl<'a> LambdaScanner<'a> {
    pub fn new(averages: &'a [f64], eta: f64) -> Result<Self> {
        if averages.is_empty() {
            return Err(Error::DomainEmpty("averages"));
        }
        if !(eta > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "eta {eta} must be positive"
            )));
        }
        let h = averages.len();
        let mut next_witness = vec![usize::MAX; h + 1];
        let (mut sup, mut inf) = (f64::NEG_INFINITY, f64::INFINITY);
        for j in (0..h).rev() {
            let a = averages[j];
            let witness = sup - a > eta || a - inf > eta;
            next_witness[j] = if witness { j } else { next_witness[j + 1] };
            sup = sup.max(a);
            inf = inf.min(a);
        }
        Ok(Self {
            averages,
            eta,
            next_witness,
        })
    }

    pub fn horizon(&self) -> usize {
        self.averages.len()
    }

    pub fn probe(&self, start: usize) -> Result<LambdaProbe> {
        let h = self.averages.len();
        if start == 0 || start > h {
            return Err(Error::BadWindow { start, horizon: h });
        }
        let j = self.next_witness[start - 1];
        let violation_pair = (j != usize::MAX).then(|| {
            let a = self.averages[j];
            let k = (j + 1..h)
                .find(|&k| (self.averages[k] - a).abs() > self.eta)
                .expect("witness index has a partner");
            (j + 1, k + 1)
        });
        Ok(LambdaProbe {
            start,
            eta: self.eta,
            violated: violation_pair.is_some(),
            violation_pair,
        })
    }
}

/// Scans all pairs `N ≤ n < m ≤ H` for `|avg(n) − avg(m)| > eta` and reports
/// the lexicographically first one.
pub fn lambda_probe(averages: &[f64], start: usize, eta: f64) -> Result<LambdaProbe> {
    if start > averages.len() {
        return Err(Error::BadWindow {
            start,
            horizon: averages.len(),
        });
    }
    LambdaScanner::new(averages, eta)?.probe(start)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Membership {
    InLevelSet,
    InHatLevelSet,
    Outside,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LevelSetClassification {
    #[serde(serialize_with = "ser_f64")]
    pub alpha: f64,
    #[serde(serialize_with = "ser_f64")]
    pub beta: f64,
    pub membership: Membership,
    #[serde(serialize_with = "ser_f64")]
    pub tolerance: f64,
}

/// Places a report in the level set `{liminf = α, limsup = β}` or its hat
/// variant `{liminf ≤ α, limsup ≥ β}`, both up to `tol`.
pub fn classify_level_set(
    report: &OscillationReport,
    alpha: f64,
    beta: f64,
    tol: f64,
) -> Result<LevelSetClassification> {
    if alpha > beta {
        return Err(Error::BadInterval { alpha, beta });
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "tolerance {tol} must be positive"
        )));
    }
    let (lo, hi) = (report.liminf_est, report.limsup_est);
    let membership = if (lo - alpha).abs() <= tol && (hi - beta).abs() <= tol {
        Membership::InLevelSet
    } else if lo <= alpha + tol && hi >= beta - tol {
        Membership::InHatLevelSet
    } else {
        Membership::Outside
    };
    Ok(LevelSetClassification {
        alpha,
        beta,
        membership,
        tolerance: tol,
    })
}

/// Axis-aligned grid over a closed box. Cells are half-open except the last
/// one along each axis, which also takes the upper face.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Binning {
    #[serde(serialize_with = "ser_f64_seq")]
    pub lower: Vec<f64>,
    #[serde(serialize_with = "ser_f64_seq")]
    pub upper: Vec<f64>,
    pub cells: Vec<usize>,
}

impl Binning {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>, cells: Vec<usize>) -> Result<Self> {
        if lower.is_empty() || lower.len() != upper.len() || lower.len() != cells.len() {
            return Err(Error::InvalidArgument("binning dimensions disagree".into()));
        }
        if lower.iter().zip(&upper).any(|(l, u)| !(l < u)) || cells.contains(&0) {
            return Err(Error::InvalidArgument("binning box is degenerate".into()));
        }
        Ok(Self {
            lower,
            upper,
            cells,
        })
    }

    /// One-dimensional grid of `cells` equal bins over `[lo, hi]`.
    pub fn interval(lo: f64, hi: f64, cells: usize) -> Result<Self> {
        Self::new(vec![lo], vec![hi], vec![cells])
    }

    /// Cube `[lo, hi]^dim` cut into cells of side at most `resolution`.
    pub fn cube(lo: f64, hi: f64, dim: usize, resolution: f64) -> Result<Self> {
        if !(resolution > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "resolution {resolution} must be positive"
            )));
        }
        let per_axis = (((hi - lo) / resolution) - 1e-9).ceil().max(1.0) as usize;
        Self::new(vec![lo; dim], vec![hi; dim], vec![per_axis; dim])
    }

    pub fn dim(&self) -> usize {
        self.cells.len()
    }

    pub fn total_cells(&self) -> usize {
        self.cells.iter().product()
    }

    /// Row-major index of the cell holding `point`, `None` outside the box.
    pub fn locate(&self, point: &[f64]) -> Option<usize> {
        if point.len() != self.dim() {
            return None;
        }
        let mut index = 0;
        for (axis, &x) in point.iter().enumerate() {
            let (lo, hi, n) = (self.lower[axis], self.upper[axis], self.cells[axis]);
            if !(x >= lo && x <= hi) {
                return None;
            }
            let cell = (((x - lo) / (hi - lo)) * n as f64).floor() as usize;
            index = index * n + cell.min(n - 1);
        }
        Some(index)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EmpiricalMeasure {
    pub bins: usize,
    #[serde(serialize_with = "ser_f64_seq")]
    pub weights: Vec<f64>,
    pub support_box: Binning,
}

impl EmpiricalMeasure {
    /// Total-variation distance `½ Σ |p_b − q_b|`.
    pub fn tv_distance(&self, other: &EmpiricalMeasure) -> Result<f64> {
        if self.support_box != other.support_box {
            return Err(Error::BinMismatch { index: 1 });
        }
        Ok(0.5
            * self
                .weights
                .iter()
                .zip(&other.weights)
                .map(|(p, q)| (p - q).abs())
                .sum::<f64>())
    }
}

/// Histogram of an orbit segment on `binning`, normalized to total mass one.
pub fn empirical_measure<P: AsRef<[f64]>>(
    orbit_points: &[P],
    binning: &Binning,
) -> Result<EmpiricalMeasure> {
    if orbit_points.is_empty() {
        return Err(Error::DomainEmpty("orbit"));
    }
    let mut counts = vec![0u64; binning.total_cells()];
    for (index, p) in orbit_points.iter().enumerate() {
        let cell = binning
            .locate(p.as_ref())
            .ok_or(Error::OutOfBox { index })?;
        counts[cell] += 1;
    }
    let total = orbit_points.len() as f64;
    Ok(EmpiricalMeasure {
        bins: counts.len(),
        weights: counts.iter().map(|&c| c as f64 / total).collect(),
        support_box: binning.clone(),
    })
}

/// Groups snapshots by single linkage under total variation at radius `tol`
/// and returns the earliest snapshot of each group, in order of first
/// appearance. Two or more groups is the finite-resolution signature of a
/// non-singleton set of limit measures.
pub fn vt_cluster_report(
    snapshots: &[EmpiricalMeasure],
    tol: f64,
) -> Result<Vec<EmpiricalMeasure>> {
    let first = snapshots.first().ok_or(Error::DomainEmpty("snapshots"))?;
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "tolerance {tol} must be positive"
        )));
    }
    if let Some(index) = snapshots
        .iter()
        .position(|s| s.support_box != first.support_box)
    {
        return Err(Error::BinMismatch { index });
    }
    let n = snapshots.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn root(parent: &mut [usize], mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    for i in 0..n {
        for j in i + 1..n {
            if snapshots[i].tv_distance(&snapshots[j])? <= tol {
                let (ri, rj) = (root(&mut parent, i), root(&mut parent, j));
                // keep the smaller index as root so representatives come first
                let (lo, hi) = (ri.min(rj), ri.max(rj));
                parent[hi] = lo;
            }
        }
    }
    Ok((0..n)
        .filter(|&i| root(&mut parent, i) == i)
        .map(|i| snapshots[i].clone())
        .collect())
}

/// Bounds on `ℓ* = inf liminf` and `L* = sup limsup` over transitive
/// points, from a sample of orbits.
///
/// The sample is a subset of the points the true quantities range over, so
/// the estimates err inward: `lstar_est ≥ ℓ*` and `Lstar_est ≤ L*`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TransitiveBoundsEstimate {
    #[serde(serialize_with = "ser_f64")]
    pub lstar_est: f64,
    #[serde(rename = "Lstar_est", serialize_with = "ser_f64")]
    pub upper_lstar_est: f64,
    pub sample_orbits: usize,
}

pub fn transitive_bounds_estimate(
    reports: &[OscillationReport],
) -> Result<TransitiveBoundsEstimate> {
    if reports.is_empty() {
        return Err(Error::DomainEmpty("reports"));
    }
    let lstar = reports
        .iter()
        .map(|r| r.liminf_est)
        .fold(f64::INFINITY, f64::min);
    let upper = reports
        .iter()
        .map(|r| r.limsup_est)
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(TransitiveBoundsEstimate {
        lstar_est: lstar,
        upper_lstar_est: upper,
        sample_orbits: reports.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn alternating(h: usize) -> Vec<f64> {
        (1..=h)
            .map(|n| if n % 2 == 0 { 1.0 } else { -1.0 })
            .collect()
    }

    #[test]
    fn constant_sequence_averages() {
        let avgs = birkhoff_partial_averages(&[0.7; 5], 5).unwrap();
        assert_eq!(avgs, vec![0.7; 5]);
    }

    #[test]
    fn empty_orbit_is_rejected() {
        assert_eq!(
            birkhoff_partial_averages(&[], 1).unwrap_err().code(),
            "DOMAIN_EMPTY"
        );
        assert!(birkhoff_partial_averages(&[1.0], 2).is_err());
    }

    #[test]
    fn observable_seq_enforces_bound() {
        assert!(ObservableSeq::new(vec![0.5, -2.0], 1.0).is_err());
        assert!(ObservableSeq::new(vec![], 1.0).is_err());
        let seq = ObservableSeq::new(vec![1.0, 0.0], 1.0).unwrap();
        assert_eq!(seq.partial_averages(), vec![1.0, 0.5]);
        assert_eq!(seq.horizon(), 2);
    }

    #[test]
    fn alternating_report_has_two_clusters() {
        let r = oscillation_report(&alternating(100), 0.5, 0.1).unwrap();
        assert_eq!(r.clusters.len(), 2);
        assert_eq!(r.clusters[0].center, -1.0);
        assert_eq!(r.clusters[1].center, 1.0);
        assert_eq!(r.gap, 2.0);
        assert_eq!(r.clusters.iter().map(|c| c.weight).sum::<usize>(), 50);
    }

    #[test]
    fn convergent_report_has_one_cluster() {
        let avgs: Vec<f64> = (1..=10_000).map(|n| 1.0 / n as f64).collect();
        let r = oscillation_report(&avgs, 0.1, 0.1).unwrap();
        assert_eq!(r.clusters.len(), 1);
        assert!(r.clusters[0].center < 2e-4);
        assert!(r.gap < 2e-5);
    }

    #[test]
    fn report_rejects_bad_parameters() {
        assert_eq!(
            oscillation_report(&[], 0.5, 0.1).unwrap_err().code(),
            "DOMAIN_EMPTY"
        );
        assert!(oscillation_report(&[1.0], 0.0, 0.1).is_err());
        assert!(oscillation_report(&[1.0], 1.5, 0.1).is_err());
        assert!(oscillation_report(&[1.0], 0.5, 0.0).is_err());
    }

    #[test]
    fn lambda_probe_examples() {
        let p = lambda_probe(&[0.3; 20], 1, 0.5).unwrap();
        assert!(!p.violated);
        assert_eq!(p.violation_pair, None);

        let p = lambda_probe(&alternating(10), 3, 1.0).unwrap();
        assert!(p.violated);
        assert_eq!(p.violation_pair, Some((3, 4)));

        assert_eq!(
            lambda_probe(&[0.0; 4], 5, 0.1).unwrap_err().code(),
            "BAD_WINDOW"
        );
    }

    #[test]
    fn lambda_pair_is_lexicographically_first() {
        // avg: 0, 0, 0.05, 1, 0.5 ; from N=1 the first n with a far partner is 1 -> m=4
        let avgs = [0.0, 0.0, 0.05, 1.0, 0.5];
        let p = lambda_probe(&avgs, 1, 0.4).unwrap();
        assert_eq!(p.violation_pair, Some((1, 4)));
        let p = lambda_probe(&avgs, 4, 0.4).unwrap();
        assert_eq!(p.violation_pair, Some((4, 5)));
        let p = lambda_probe(&avgs, 5, 0.4).unwrap();
        assert!(!p.violated);
    }

    fn report_with(lo: f64, hi: f64) -> OscillationReport {
        oscillation_report(&[lo, hi], 1.0, 1e-3).unwrap()
    }

    #[test]
    fn level_set_examples() {
        let c = 0.4;
        let conv = report_with(c, c);
        let r = classify_level_set(&conv, c, c, 1e-6).unwrap();
        assert_eq!(r.membership, Membership::InLevelSet);
        let r = classify_level_set(&conv, c - 1.0, c + 1.0, 1e-6).unwrap();
        assert_eq!(r.membership, Membership::Outside);
        let wide = report_with(0.0, 1.0);
        let r = classify_level_set(&wide, 0.3, 0.6, 0.01).unwrap();
        assert_eq!(r.membership, Membership::InHatLevelSet);
        assert_eq!(
            classify_level_set(&wide, 0.7, 0.6, 0.01)
                .unwrap_err()
                .code(),
            "BAD_INTERVAL"
        );
    }

    #[test]
    fn empirical_measure_examples() {
        let bins = Binning::interval(0.0, 1.0, 2).unwrap();
        let dirac = empirical_measure(&[[0.2]; 9], &bins).unwrap();
        assert_eq!(dirac.weights, vec![1.0, 0.0]);
        let alt: Vec<[f64; 1]> = (0..10)
            .map(|i| [if i % 2 == 0 { 0.0 } else { 0.5 }])
            .collect();
        let m = empirical_measure(&alt, &bins).unwrap();
        assert_eq!(m.weights, vec![0.5, 0.5]);
        assert_eq!(
            empirical_measure(&[[1.5]], &bins).unwrap_err().code(),
            "OUT_OF_BOX"
        );
        assert_eq!(
            empirical_measure::<[f64; 1]>(&[], &bins)
                .unwrap_err()
                .code(),
            "DOMAIN_EMPTY"
        );
    }

    #[test]
    fn upper_face_belongs_to_last_cell() {
        let bins = Binning::interval(0.0, 1.0, 4).unwrap();
        assert_eq!(bins.locate(&[1.0]), Some(3));
        assert_eq!(bins.locate(&[0.0]), Some(0));
        assert_eq!(bins.locate(&[-1e-300]), None);
        let grid = Binning::cube(0.0, 1.0, 2, 0.25).unwrap();
        assert_eq!(grid.cells, vec![4, 4]);
        assert_eq!(grid.locate(&[0.3, 0.9]), Some(4 + 3));
    }

    #[test]
    fn vt_clusters() {
        let bins = Binning::interval(0.0, 1.0, 2).unwrap();
        let a = empirical_measure(&[[0.1]], &bins).unwrap();
        let b = empirical_measure(&[[0.9]], &bins).unwrap();
        assert_eq!(
            vt_cluster_report(&[a.clone(), a.clone(), a.clone()], 0.1)
                .unwrap()
                .len(),
            1
        );
        let reps = vt_cluster_report(&[a.clone(), b.clone(), a.clone(), b.clone()], 0.1).unwrap();
        assert_eq!(reps, vec![a.clone(), b]);
        let other = empirical_measure(&[[0.1]], &Binning::interval(0.0, 1.0, 3).unwrap()).unwrap();
        assert_eq!(
            vt_cluster_report(&[a, other], 0.1).unwrap_err().code(),
            "BIN_MISMATCH"
        );
    }

    #[test]
    fn transitive_bounds_examples() {
        let e = transitive_bounds_estimate(&[report_with(0.2, 0.9)]).unwrap();
        assert_eq!((e.lstar_est, e.upper_lstar_est), (0.2, 0.9));
        let e =
            transitive_bounds_estimate(&[report_with(0.2, 0.9), report_with(0.1, 0.8)]).unwrap();
        assert_eq!(
            (e.lstar_est, e.upper_lstar_est, e.sample_orbits),
            (0.1, 0.9, 2)
        );
        assert!(transitive_bounds_estimate(&[]).is_err());
    }

    #[test]
    fn report_json_field_names() {
        let r = oscillation_report(&[0.0, 1.0], 1.0, 0.5).unwrap();
        let v: serde_json::Value = serde_json::to_value(&r).unwrap();
        for key in [
            "horizon",
            "partial_averages",
            "liminf_est",
            "limsup_est",
            "gap",
            "tail_fraction",
            "clusters",
        ] {
            assert!(v.get(key).is_some(), "{key}");
        }
        let p = serde_json::to_value(lambda_probe(&[0.0, 1.0], 1, 0.5).unwrap()).unwrap();
        assert_eq!(p["N"], 1);
        assert_eq!(p["violation_pair"], serde_json::json!([1, 2]));
    }

    proptest! {
        #[test]
        fn averages_telescope_and_stay_bounded(values in prop::collection::vec(-5.0f64..5.0, 1..400)) {
            let avgs = birkhoff_partial_averages(&values, values.len()).unwrap();
            prop_assert!((avgs[0] - values[0]).abs() < 1e-12);
            for n in 2..=values.len() {
                let lhs = n as f64 * avgs[n - 1] - (n - 1) as f64 * avgs[n - 2];
                prop_assert!((lhs - values[n - 1]).abs() < 1e-9);
            }
            prop_assert!(avgs.iter().all(|a| a.abs() <= 5.0));
        }

        #[test]
        fn report_invariants(values in prop::collection::vec(-1.0f64..1.0, 1..300),
                             frac in 0.01f64..=1.0, tol in 1e-4f64..0.5) {
            let r = oscillation_report(&values, frac, tol).unwrap();
            let tail = r.tail();
            let lo = tail.iter().cloned().fold(f64::INFINITY, f64::min);
            let hi = tail.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            prop_assert!(r.liminf_est <= r.limsup_est);
            prop_assert_eq!(r.gap, hi - lo);
            prop_assert_eq!(r.clusters.iter().map(|c| c.weight).sum::<usize>(), tail.len());
            for c in &r.clusters {
                prop_assert!(c.center >= lo && c.center <= hi);
            }
            prop_assert!(r.clusters.windows(2).all(|w| w[0].center < w[1].center));
        }

        #[test]
        fn lambda_monotone_in_eta(values in prop::collection::vec(-1.0f64..1.0, 1..200),
                                  eta1 in 0.001f64..1.0, eta2 in 0.001f64..1.0, start in 1usize..200) {
            let start = start.min(values.len());
            let (small, large) = if eta1 < eta2 { (eta1, eta2) } else { (eta2, eta1) };
            let hi = lambda_probe(&values, start, large).unwrap();
            let lo = lambda_probe(&values, start, small).unwrap();
            if hi.violated { prop_assert!(lo.violated); }
            let window = &values[start - 1..];
            let spread = window.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
                - window.iter().cloned().fold(f64::INFINITY, f64::min);
            prop_assert_eq!(lo.violated, spread > small);
            if let Some((n, m)) = lo.violation_pair {
                prop_assert!(n >= start && m > n);
                prop_assert!((values[n - 1] - values[m - 1]).abs() > small);
            }
        }

        #[test]
        fn level_set_implies_hat(lo in -2.0f64..2.0, width in 0.0f64..2.0,
                                 alpha in -2.0f64..2.0, w2 in 0.0f64..2.0, tol in 1e-6f64..0.5) {
            let report = report_with(lo, lo + width);
            let c = classify_level_set(&report, alpha, alpha + w2, tol).unwrap();
            let hat = report.liminf_est <= alpha + tol && report.limsup_est >= alpha + w2 - tol;
            if c.membership == Membership::InLevelSet { prop_assert!(hat); }
            if c.membership == Membership::InHatLevelSet { prop_assert!(hat); }
        }

        #[test]
        fn empirical_weights_sum_to_one(points in prop::collection::vec((0.0f64..=1.0, 0.0f64..=1.0), 1..500),
                                        nx in 1usize..9, ny in 1usize..9) {
            let bins = Binning::new(vec![0.0, 0.0], vec![1.0, 1.0], vec![nx, ny]).unwrap();
            let pts: Vec<[f64; 2]> = points.iter().map(|&(x, y)| [x, y]).collect();
            let m = empirical_measure(&pts, &bins).unwrap();
            prop_assert!((m.weights.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            prop_assert!(m.weights.iter().all(|&w| w >= 0.0));
        }
    }
}
