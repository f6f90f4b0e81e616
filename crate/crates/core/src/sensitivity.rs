//! Empirical sensitivity of averages on finite sample nets, the orbit
//! density proxy, and the rigid/sensitive dichotomy on shifts of finite
//! type.

use serde::{Deserialize, Serialize};

use crate::avg::{
    birkhoff_partial_averages, oscillation_report, single_linkage, Binning, Cluster,
    OscillationReport,
};
use crate::error::{Error, Result};
use crate::fmt::ser_f64;
use crate::symbolic::{
    connector, format_word, rigidity_test, Cylinder, RigidityResult, RigidityVerdict,
    SymbolicPoint, TransitionMatrix, WindowObservable, Word,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Provenance {
    Grid,
    OrbitSegment,
    PreimageTree,
    User,
}

/// Finite stand-in for a dense set, with its claimed covering radius.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SampleNet<P> {
    pub points: Vec<P>,
    #[serde(serialize_with = "ser_f64")]
    pub mesh: f64,
    pub provenance: Provenance,
}

impl<P> SampleNet<P> {
    pub fn new(points: Vec<P>, mesh: f64, provenance: Provenance) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::DomainEmpty("sample net"));
        }
        if !(mesh > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "mesh {mesh} must be positive"
            )));
        }
        Ok(Self {
            points,
            mesh,
            provenance,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Pairing {
    /// Every `a ∈ A` against every `b ∈ B`.
    AllPairs,
    /// `A[i]` against `B[i]`; pass the same net twice to pair each point
    /// with itself.
    Diagonal,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SensitivityWitness<P> {
    pub a_index: usize,
    pub b_index: usize,
    pub a_point: P,
    pub b_point: P,
    #[serde(serialize_with = "ser_f64")]
    pub r_a: f64,
    #[serde(serialize_with = "ser_f64")]
    pub r_b: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SensitivityVerdict<P> {
    pub sensitive: bool,
    #[serde(serialize_with = "ser_f64")]
    pub epsilon_est: f64,
    pub witness: Option<SensitivityWitness<P>>,
    pub horizon: usize,
    #[serde(serialize_with = "ser_f64")]
    pub cluster_tol: f64,
    #[serde(serialize_with = "ser_f64")]
    pub mesh_a: f64,
    #[serde(serialize_with = "ser_f64")]
    pub mesh_b: f64,
    pub pairs_tested: usize,
}

// Largest |r − s| over cluster centers, with the attaining pair.
fn widest(ca: &[Cluster], cb: &[Cluster]) -> (f64, f64, f64) {
    let mut best = (f64::NEG_INFINITY, 0.0, 0.0);
    for r in ca {
        for s in cb {
            let d = (r.center - s.center).abs();
            if d > best.0 {
                best = (d, r.center, s.center);
            }
        }
    }
    best
}

/// `ε̂ = min over pairs (a, b) of max |r − s|` with `r, s` tail cluster
/// centers of the traces of `a` and `b`, clustered at `cluster_tol`.
/// Sensitive when `ε̂ > 2·cluster_tol`; the witness is the minimizing pair.
pub fn sensitivity_test<P, F>(
    net_a: &SampleNet<P>,
    net_b: &SampleNet<P>,
    mut trace: F,
    pairing: Pairing,
    cluster_tol: f64,
) -> Result<SensitivityVerdict<P>>
where
    P: Clone,
    F: FnMut(&P) -> Result<OscillationReport>,
{
    if !(cluster_tol > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "cluster_tol {cluster_tol} must be positive"
        )));
    }
    if pairing == Pairing::Diagonal && net_a.points.len() != net_b.points.len() {
        return Err(Error::InvalidArgument(
            "diagonal pairing needs nets of equal size".into(),
        ));
    }
    let mut shape: Option<(usize, f64)> = None;
    let mut clusters_of = |points: &[P]| -> Result<Vec<Vec<Cluster>>> {
        points
            .iter()
            .map(|p| {
                let report = trace(p)?;
                let this = (report.horizon, report.tail_fraction);
                match shape {
                    None => shape = Some(this),
                    Some(s) if s != this => {
                        return Err(Error::TraceMismatch(format!(
                            "trace with horizon {} and tail fraction {} differs from horizon {} and tail fraction {}",
                            this.0, this.1, s.0, s.1
                        )))
                    }
                    _ => {}
                }
                Ok(single_linkage(report.tail(), cluster_tol))
            })
            .collect()
    };
    let ca = clusters_of(&net_a.points)?;
    let cb = clusters_of(&net_b.points)?;
    let horizon = shape.map(|s| s.0).unwrap_or(0);

    let pairs: Box<dyn Iterator<Item = (usize, usize)>> = match pairing {
        Pairing::AllPairs => {
            Box::new((0..ca.len()).flat_map(|i| (0..cb.len()).map(move |j| (i, j))))
        }
        Pairing::Diagonal => Box::new((0..ca.len()).map(|i| (i, i))),
    };
    let mut best: Option<(f64, usize, usize, f64, f64)> = None;
    let mut pairs_tested = 0;
    for (i, j) in pairs {
        pairs_tested += 1;
        let (d, r, s) = widest(&ca[i], &cb[j]);
        if best.is_none_or(|b| d < b.0) {
            best = Some((d, i, j, r, s));
        }
    }
    let (eps, i, j, r_a, r_b) = best.expect("nets are nonempty");
    let sensitive = eps > 2.0 * cluster_tol;
    let witness = sensitive.then(|| SensitivityWitness {
        a_index: i,
        b_index: j,
        a_point: net_a.points[i].clone(),
        b_point: net_b.points[j].clone(),
        r_a,
        r_b,
    });
    Ok(SensitivityVerdict {
        sensitive,
        epsilon_est: eps,
        witness,
        horizon,
        cluster_tol,
        mesh_a: net_a.mesh,
        mesh_b: net_b.mesh,
        pairs_tested,
    })
}

/// Visited fraction of a grid; a finite-resolution proxy for a dense orbit
/// that can fail but never certify density.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OrbitDensityDiagnostic {
    #[serde(serialize_with = "ser_f64")]
    pub covered_fraction: f64,
    #[serde(serialize_with = "ser_f64")]
    pub resolution: f64,
    pub orbit_length: usize,
    pub cells_visited: usize,
    pub cells_total: usize,
}

impl OrbitDensityDiagnostic {
    /// `"diagnostic-passed"` when at least `threshold` of the cells are hit.
    pub fn status(&self, threshold: f64) -> &'static str {
        if self.covered_fraction >= threshold {
            "diagnostic-passed"
        } else {
            "diagnostic-failed"
        }
    }
}

/// Cuts `[lower, upper]^d` into cells of side at most `resolution` and
/// counts the cells the orbit visits.
pub fn orbit_density<P: AsRef<[f64]>>(
    orbit: &[P],
    lower: f64,
    upper: f64,
    resolution: f64,
) -> Result<OrbitDensityDiagnostic> {
    let first = orbit.first().ok_or(Error::DomainEmpty("orbit"))?;
    let binning = Binning::cube(lower, upper, first.as_ref().len(), resolution)?;
    let mut visited = vec![false; binning.total_cells()];
    for (index, p) in orbit.iter().enumerate() {
        let cell = binning
            .locate(p.as_ref())
            .ok_or(Error::OutOfBox { index })?;
        visited[cell] = true;
    }
    let cells_visited = visited.iter().filter(|&&v| v).count();
    Ok(OrbitDensityDiagnostic {
        covered_fraction: cells_visited as f64 / visited.len() as f64,
        resolution,
        orbit_length: orbit.len(),
        cells_visited,
        cells_total: visited.len(),
    })
}

/// Parameters of the stable-set nets used by [`dichotomy_report`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DichotomyConfig {
    pub max_period: usize,
    pub horizon: usize,
    #[serde(serialize_with = "ser_f64")]
    pub tol: f64,
    /// Depth of the cylinder words that start each net point.
    pub net_depth: usize,
    #[serde(serialize_with = "ser_f64")]
    pub tail_fraction: f64,
}

impl DichotomyConfig {
    pub fn new(max_period: usize, horizon: usize) -> Self {
        Self {
            max_period,
            horizon,
            tol: 1e-9,
            net_depth: 3,
            tail_fraction: 0.25,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "outcome", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum DichotomyOutcome {
    RigidNoIrregularityIndicated {
        #[serde(serialize_with = "ser_f64")]
        c_phi: f64,
    },
    Sensitive {
        low_cycle: String,
        high_cycle: String,
        sensitivity: Box<SensitivityVerdict<String>>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DichotomyReport {
    #[serde(flatten)]
    pub outcome: DichotomyOutcome,
    pub rigidity: RigidityResult,
    pub config: DichotomyConfig,
    /// The shift is checked to be mixing exactly; no sampled orbit is
    /// claimed to be transitive.
    pub transitivity: &'static str,
}

impl DichotomyReport {
    pub fn is_sensitive(&self) -> bool {
        matches!(self.outcome, DichotomyOutcome::Sensitive { .. })
    }
}

/// Points `w c c c …` for every admissible word `w` of the given depth,
/// joined to the cycle `c` by the shortest connector.
pub fn stable_set_net(
    sft: &TransitionMatrix,
    cycle: &Word,
    depth: usize,
) -> Result<Vec<(String, SymbolicPoint)>> {
    let mut net = Vec::new();
    for cyl in Cylinder::all_of_depth(sft, depth) {
        let word = cyl.word();
        let last = *word.last().expect("depth >= 1");
        let bridge = connector(sft, last, cycle[0]).ok_or(Error::NotMixing)?;
        let prefix: Word = word.iter().chain(bridge.iter()).copied().collect();
        let label = format!(
            "{}({})",
            format_word(&prefix, sft.size()),
            format_word(cycle, sft.size())
        );
        net.push((
            label,
            SymbolicPoint::with_periodic_tail(prefix, cycle.clone())?,
        ));
    }
    Ok(net)
}

/// Rigidity on periodic orbits, confirmed on the other branch by a
/// sensitivity test between the stable sets of the two extreme cycles.
pub fn dichotomy_report(
    sft: &TransitionMatrix,
    observable: &WindowObservable,
    config: DichotomyConfig,
) -> Result<DichotomyReport> {
    if !sft.is_mixing() {
        return Err(Error::NotMixing);
    }
    if config.net_depth == 0 {
        return Err(Error::InvalidArgument(
            "net_depth must be at least 1".into(),
        ));
    }
    let rigidity = rigidity_test(sft, observable, config.max_period, config.tol)?;
    let outcome = match &rigidity.verdict {
        RigidityVerdict::Rigid { c_phi } => {
            DichotomyOutcome::RigidNoIrregularityIndicated { c_phi: *c_phi }
        }
        RigidityVerdict::NonRigid { low, high } => {
            let cluster_tol = config.tol / 2.0;
            let net = |cycle: &Word| -> Result<(SampleNet<String>, Vec<SymbolicPoint>)> {
                let (labels, points): (Vec<_>, Vec<_>) =
                    stable_set_net(sft, cycle, config.net_depth)?
                        .into_iter()
                        .unzip();
                let mesh = 0.5f64.powi(config.net_depth as i32);
                Ok((
                    SampleNet::new(labels, mesh, Provenance::PreimageTree)?,
                    points,
                ))
            };
            let (net_a, points_a) = net(&low.word)?;
            let (net_b, points_b) = net(&high.word)?;
            let lookup = |label: &String| -> &SymbolicPoint {
                let i = net_a.points.iter().position(|l| l == label);
                match i {
                    Some(i) => &points_a[i],
                    None => {
                        &points_b[net_b
                            .points
                            .iter()
                            .position(|l| l == label)
                            .expect("label from a net")]
                    }
                }
            };
            let sensitivity = sensitivity_test(
                &net_a,
                &net_b,
                |label| {
                    let x = lookup(label);
                    let values = x.observable_values(
                        observable.width(),
                        |w| observable.eval(w),
                        config.horizon,
                    );
                    let averages = birkhoff_partial_averages(&values, config.horizon)?;
                    oscillation_report(&averages, config.tail_fraction, cluster_tol)
                },
                Pairing::AllPairs,
                cluster_tol,
            )?;
            if !sensitivity.sensitive {
                return Err(Error::TraceMismatch(format!(
                    "periodic averages differ by {} but stable-set traces at horizon {} only separate by {}",
                    rigidity.witness_gap(),
                    config.horizon,
                    sensitivity.epsilon_est
                )));
            }
            DichotomyOutcome::Sensitive {
                low_cycle: low.cycle.clone(),
                high_cycle: high.cycle.clone(),
                sensitivity: Box::new(sensitivity),
            }
        }
    };
    Ok(DichotomyReport {
        outcome,
        rigidity,
        config,
        transitivity: "diagnostic-passed",
    })
}
