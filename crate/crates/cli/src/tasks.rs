//! One runner per task. Each returns the `result` object of report.json,
//! the rows of averages.csv and a one-line summary.

use std::collections::HashMap;

use historic_core::avg::{
    birkhoff_partial_averages, classify_level_set, oscillation_report, Cluster, LambdaProbe,
    LambdaScanner, LevelSetClassification, OscillationReport,
};
use historic_core::fmt::{g17, ser_f64, ser_opt_f64};
use historic_core::group_avg::{
    cesaro_spherical, folner_average, preorbit_construct, psi_bound_sweep, spherical_average,
    PreOrbitWitness, PsiBoundRow, TrigPolynomial,
};
use historic_core::sensitivity::{
    dichotomy_report, orbit_density, sensitivity_test, stable_set_net, DichotomyConfig,
    DichotomyReport, OrbitDensityDiagnostic, Provenance, SampleNet, SensitivityVerdict,
};
use historic_core::symbolic::{
    build_oscillating_point, cylinder_irregular_witness, format_word, markov_truncation,
    periodic_average, primitive_cycles, shortest_cycle_through, Alphabet, BlockPattern,
    BlockSchedule, Cylinder, SymbolicPoint, TransitionMatrix, WindowObservable,
};
use historic_core::systems::{kan_scan, toral_apply, KanBoxRow, KanScanConfig, ToralMatrix};
use historic_core::{CenteredMean, CirclePointRational, Error, Result, TorusPointExact};
use serde::Serialize;

use crate::config::{
    BlockParams, CesaroParams, CylinderParams, DenseOrbitParams, DichotomyParams, KanParams,
    LambdaParams, ObservableSpec, PsiParams, ScenarioConfig, SensitivityParams, SystemSpec,
    TaskParams,
};

/// Rows of averages.csv, header first.
pub type Table = Vec<Vec<String>>;

pub struct TaskOutput<T> {
    pub result: T,
    pub table: Table,
    pub summary: String,
}

/// Target number of rows when a long average series is decimated.
const CSV_ROWS: usize = 4096;

fn row<I: IntoIterator<Item = S>, S: Into<String>>(cells: I) -> Vec<String> {
    cells.into_iter().map(Into::into).collect()
}

fn averages_table(averages: &[f64]) -> Table {
    let stride = averages.len().div_ceil(CSV_ROWS).max(1);
    let mut table = vec![row(["n", "average"])];
    for (i, &a) in averages.iter().enumerate() {
        let n = i + 1;
        if n == 1 || n % stride == 0 || n == averages.len() {
            table.push(vec![n.to_string(), g17(a)]);
        }
    }
    table
}

/// Report fields of an oscillation summary without the full series.
#[derive(Debug, Clone, Serialize)]
pub struct OscillationSummary {
    pub horizon: usize,
    #[serde(serialize_with = "ser_f64")]
    pub liminf_est: f64,
    #[serde(serialize_with = "ser_f64")]
    pub limsup_est: f64,
    #[serde(serialize_with = "ser_f64")]
    pub gap: f64,
    #[serde(serialize_with = "ser_f64")]
    pub tail_fraction: f64,
    pub tail_len: usize,
    pub clusters: Vec<Cluster>,
}

impl From<&OscillationReport> for OscillationSummary {
    fn from(r: &OscillationReport) -> Self {
        Self {
            horizon: r.horizon,
            liminf_est: r.liminf_est,
            limsup_est: r.limsup_est,
            gap: r.gap,
            tail_fraction: r.tail_fraction,
            tail_len: r.tail_len(),
            clusters: r.clusters.clone(),
        }
    }
}

fn horizon(cfg: &ScenarioConfig) -> Result<usize> {
    usize::try_from(cfg.horizon)
        .map_err(|_| Error::InvalidArgument(format!("horizon {} too large", cfg.horizon)))
}

fn renewal_rule(i: usize, j: usize) -> bool {
    i == 0 || j + 1 == i
}

/// The shift space and, for truncations, the original state labels.
pub fn shift_space(system: &SystemSpec) -> Result<(TransitionMatrix, Option<Vec<usize>>)> {
    match system {
        SystemSpec::Shift { alphabet } => {
            Alphabet::new(*alphabet)?;
            Ok((TransitionMatrix::full_shift(*alphabet), None))
        }
        SystemSpec::Sft {
            matrix: Some(m), ..
        } => Ok((TransitionMatrix::new(m.clone())?, None)),
        SystemSpec::Sft {
            renewal_level: Some(level),
            ..
        } => {
            let t = markov_truncation(renewal_rule, *level)?;
            Ok((t.matrix, Some(t.states)))
        }
        _ => Err(Error::InvalidArgument("system is not a shift space".into())),
    }
}

pub fn symbolic_observable(
    spec: &ObservableSpec,
    alphabet_size: usize,
) -> Result<WindowObservable> {
    match spec {
        ObservableSpec::FirstSymbol => Ok(WindowObservable::first_symbol()),
        ObservableSpec::Constant { value } => Ok(WindowObservable::constant(*value)),
        ObservableSpec::Indicator {
            symbol: Some(s), ..
        } => Ok(WindowObservable::indicator(*s)),
        ObservableSpec::Window { width, values } => {
            WindowObservable::table(*width, alphabet_size, values.clone())
        }
        _ => Err(Error::InvalidArgument(
            "observable does not apply to shift spaces".into(),
        )),
    }
}

fn observable_spec(cfg: &ScenarioConfig) -> Result<&ObservableSpec> {
    cfg.observable
        .as_ref()
        .ok_or_else(|| Error::InvalidArgument("task needs an observable".into()))
}

fn trig_of(spec: &ObservableSpec) -> Result<TrigPolynomial> {
    match spec {
        ObservableSpec::Trig { constant, terms } => Ok(TrigPolynomial {
            constant: *constant,
            terms: terms.clone(),
        }),
        ObservableSpec::Constant { value } => Ok(TrigPolynomial {
            constant: *value,
            terms: vec![],
        }),
        _ => Err(Error::InvalidArgument(
            "observable must be a trigonometric polynomial or a constant".into(),
        )),
    }
}

fn is_full_shift(sft: &TransitionMatrix) -> bool {
    sft.rows().iter().all(|r| r.iter().all(|&e| e == 1))
}

fn pattern_for(sft: &TransitionMatrix) -> Result<BlockPattern> {
    if is_full_shift(sft) {
        Ok(BlockPattern::symbols(0, 1))
    } else {
        BlockPattern::default_for(sft)
    }
}

// Expected accumulation interval of the block point under `obs`, from the
// averages of the low and high blocks.
fn block_limits(
    sft: &TransitionMatrix,
    obs: &WindowObservable,
    law: historic_core::symbolic::GrowthLaw,
) -> Result<(f64, f64, Option<BlockSchedule>)> {
    let pattern = pattern_for(sft)?;
    let alpha = periodic_average(&pattern.low, obs, sft)?;
    let beta = periodic_average(&pattern.high, obs, sft)?;
    // the limit pair is symmetric under swapping the two blocks
    let schedule = BlockSchedule::new(alpha.min(beta), alpha.max(beta), law).ok();
    Ok((alpha, beta, schedule))
}

fn block_point(
    sft: &TransitionMatrix,
    law: historic_core::symbolic::GrowthLaw,
) -> Result<SymbolicPoint> {
    let schedule = BlockSchedule::new(0.0, 1.0, law)?;
    if is_full_shift(sft) {
        build_oscillating_point(&schedule, &Alphabet::new(sft.size())?)
    } else {
        cylinder_irregular_witness(&Cylinder::new(vec![], sft.clone())?, &schedule)
    }
}

fn averages_along(
    point: &SymbolicPoint,
    obs: &WindowObservable,
    horizon: usize,
) -> Result<Vec<f64>> {
    let values = point.observable_values(obs.width(), |w| obs.eval(w), horizon);
    birkhoff_partial_averages(&values, horizon)
}

#[derive(Serialize)]
pub struct BlockResult {
    pub oscillation: OscillationSummary,
    #[serde(serialize_with = "ser_f64")]
    pub low_block_value: f64,
    #[serde(serialize_with = "ser_f64")]
    pub high_block_value: f64,
    pub expected_limits: Option<Limits>,
    pub level_set: Option<LevelSetClassification>,
}

#[derive(Serialize)]
pub struct Limits {
    #[serde(serialize_with = "ser_f64")]
    pub low: f64,
    #[serde(serialize_with = "ser_f64")]
    pub high: f64,
}

pub fn block_oscillation(cfg: &ScenarioConfig, p: &BlockParams) -> Result<TaskOutput<BlockResult>> {
    let h = horizon(cfg)?;
    let (sft, _) = shift_space(&cfg.system)?;
    let obs = symbolic_observable(observable_spec(cfg)?, sft.size())?;
    let point = block_point(&sft, p.law)?;
    let averages = averages_along(&point, &obs, h)?;
    let report = oscillation_report(
        &averages,
        cfg.tolerances.tail_fraction,
        cfg.tolerances.cluster_tol,
    )?;
    let (alpha, beta, schedule) = block_limits(&sft, &obs, p.law)?;
    let expected = schedule.map(|s| s.expected_limits());
    let level_set = match expected {
        Some((lo, hi)) => Some(classify_level_set(
            &report,
            lo,
            hi,
            cfg.tolerances.level_tol,
        )?),
        None => None,
    };
    let summary = format!(
        "liminf {} limsup {} gap {} over the last {} of {} averages",
        g17(report.liminf_est),
        g17(report.limsup_est),
        g17(report.gap),
        report.tail_len(),
        h
    );
    Ok(TaskOutput {
        table: averages_table(&averages),
        result: BlockResult {
            oscillation: (&report).into(),
            low_block_value: alpha,
            high_block_value: beta,
            expected_limits: expected.map(|(low, high)| Limits { low, high }),
            level_set,
        },
        summary,
    })
}

#[derive(Serialize)]
pub struct CylinderRow {
    pub cylinder: String,
    pub in_cylinder: bool,
    #[serde(serialize_with = "ser_f64")]
    pub liminf_est: f64,
    #[serde(serialize_with = "ser_f64")]
    pub limsup_est: f64,
    #[serde(serialize_with = "ser_f64")]
    pub gap: f64,
    pub passed: bool,
}

#[derive(Serialize)]
pub struct CylinderResult {
    pub depth: usize,
    pub cylinders: usize,
    pub passed: usize,
    pub all_passed: bool,
    #[serde(serialize_with = "ser_f64")]
    pub threshold: f64,
    #[serde(serialize_with = "ser_f64")]
    pub min_gap: f64,
    pub rows: Vec<CylinderRow>,
}

pub fn cylinder_certificate(
    cfg: &ScenarioConfig,
    p: &CylinderParams,
) -> Result<TaskOutput<CylinderResult>> {
    let h = horizon(cfg)?;
    let (sft, _) = shift_space(&cfg.system)?;
    let obs = symbolic_observable(observable_spec(cfg)?, sft.size())?;
    let (alpha, beta, schedule) = block_limits(&sft, &obs, p.law)?;
    let (lo, hi) = schedule
        .map(|s| s.expected_limits())
        .unwrap_or((alpha, beta));
    let threshold = p.min_gap_fraction * (hi - lo);
    let schedule = BlockSchedule::new(0.0, 1.0, p.law)?;
    let mut rows = Vec::new();
    for cyl in Cylinder::all_of_depth(&sft, p.depth) {
        let point = cylinder_irregular_witness(&cyl, &schedule)?;
        let in_cylinder = point.take_word(p.depth) == cyl.word();
        let averages = averages_along(&point, &obs, h)?;
        let r = oscillation_report(
            &averages,
            cfg.tolerances.tail_fraction,
            cfg.tolerances.cluster_tol,
        )?;
        rows.push(CylinderRow {
            cylinder: format_word(cyl.word(), sft.size()),
            in_cylinder,
            liminf_est: r.liminf_est,
            limsup_est: r.limsup_est,
            gap: r.gap,
            passed: in_cylinder && r.gap >= threshold,
        });
    }
    let passed = rows.iter().filter(|r| r.passed).count();
    let min_gap = rows.iter().map(|r| r.gap).fold(f64::INFINITY, f64::min);
    let mut table = vec![row([
        "cylinder",
        "in_cylinder",
        "liminf",
        "limsup",
        "gap",
        "passed",
    ])];
    for r in &rows {
        table.push(vec![
            r.cylinder.clone(),
            r.in_cylinder.to_string(),
            g17(r.liminf_est),
            g17(r.limsup_est),
            g17(r.gap),
            r.passed.to_string(),
        ]);
    }
    let summary = format!(
        "{passed} of {} depth-{} cylinders certified, smallest gap {}",
        rows.len(),
        p.depth,
        g17(min_gap)
    );
    Ok(TaskOutput {
        result: CylinderResult {
            depth: p.depth,
            cylinders: rows.len(),
            passed,
            all_passed: passed == rows.len(),
            threshold,
            min_gap,
            rows,
        },
        table,
        summary,
    })
}

#[derive(Serialize)]
pub struct SensitivityResult {
    pub net_a_size: usize,
    pub net_b_size: usize,
    pub verdict: SensitivityVerdict<String>,
}

fn stable_set(
    sft: &TransitionMatrix,
    depth: usize,
    tail: u8,
) -> Result<Vec<(String, SymbolicPoint)>> {
    let cycle = shortest_cycle_through(sft, tail)
        .ok_or_else(|| Error::BadCycle(format!("no cycle through {tail}")))?;
    stable_set_net(sft, &cycle, depth)
}

pub fn sensitivity(
    cfg: &ScenarioConfig,
    p: &SensitivityParams,
) -> Result<TaskOutput<SensitivityResult>> {
    let h = horizon(cfg)?;
    let (sft, _) = shift_space(&cfg.system)?;
    let obs = symbolic_observable(observable_spec(cfg)?, sft.size())?;
    let a = stable_set(&sft, p.net_depth, p.tail_a)?;
    let b = stable_set(&sft, p.net_depth, p.tail_b)?;
    let mesh = 0.5f64.powi(p.net_depth as i32);
    let points: HashMap<String, SymbolicPoint> = a.iter().chain(&b).cloned().collect();
    let net = |v: &[(String, SymbolicPoint)]| {
        SampleNet::new(
            v.iter().map(|x| x.0.clone()).collect(),
            mesh,
            Provenance::PreimageTree,
        )
    };
    let (net_a, net_b) = (net(&a)?, net(&b)?);
    let mut traced: Vec<(String, f64, f64, f64)> = Vec::new();
    let verdict = sensitivity_test(
        &net_a,
        &net_b,
        |label: &String| {
            let averages = averages_along(&points[label], &obs, h)?;
            let r = oscillation_report(
                &averages,
                cfg.tolerances.tail_fraction,
                cfg.tolerances.cluster_tol,
            )?;
            traced.push((label.clone(), r.liminf_est, r.limsup_est, r.gap));
            Ok(r)
        },
        p.pairing,
        cfg.tolerances.cluster_tol,
    )?;
    let mut table = vec![row(["net", "point", "liminf", "limsup", "gap"])];
    for (i, (label, lo, hi, gap)) in traced.iter().enumerate() {
        let net = if i < net_a.points.len() { "A" } else { "B" };
        table.push(vec![
            net.into(),
            label.clone(),
            g17(*lo),
            g17(*hi),
            g17(*gap),
        ]);
    }
    let summary = format!(
        "{} with epsilon_est {} over {} pairs",
        if verdict.sensitive {
            "sensitive"
        } else {
            "not sensitive"
        },
        g17(verdict.epsilon_est),
        verdict.pairs_tested
    );
    Ok(TaskOutput {
        result: SensitivityResult {
            net_a_size: net_a.points.len(),
            net_b_size: net_b.points.len(),
            verdict,
        },
        table,
        summary,
    })
}

#[derive(Serialize)]
pub struct DichotomyResult {
    pub matrix: Vec<Vec<u8>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub truncation_states: Option<Vec<usize>>,
    pub mixing_exponent: Option<usize>,
    pub report: DichotomyReport,
}

pub fn dichotomy(cfg: &ScenarioConfig, p: &DichotomyParams) -> Result<TaskOutput<DichotomyResult>> {
    let h = horizon(cfg)?;
    let (sft, states) = shift_space(&cfg.system)?;
    let obs = symbolic_observable(observable_spec(cfg)?, sft.size())?;
    let config = DichotomyConfig {
        max_period: p.max_period,
        horizon: h,
        tol: p.tol,
        net_depth: p.net_depth,
        tail_fraction: cfg.tolerances.tail_fraction,
    };
    let report = dichotomy_report(&sft, &obs, config)?;
    let mut table = vec![row(["cycle", "period", "average"])];
    for cycle in primitive_cycles(&sft, p.max_period) {
        let avg = periodic_average(&cycle, &obs, &sft)?;
        table.push(vec![
            format_word(&cycle, sft.size()),
            cycle.len().to_string(),
            g17(avg),
        ]);
    }
    let summary = if report.is_sensitive() {
        format!(
            "SENSITIVE: periodic averages spread by {}",
            g17(report.rigidity.witness_gap())
        )
    } else {
        "RIGID_NO_IRREGULARITY_INDICATED".to_string()
    };
    Ok(TaskOutput {
        result: DichotomyResult {
            matrix: sft.rows(),
            truncation_states: states,
            mixing_exponent: sft.mixing_exponent(),
            report,
        },
        table,
        summary,
    })
}

#[derive(Serialize)]
pub struct DenseOrbitResult {
    pub density: OrbitDensityDiagnostic,
    pub cells_meeting_space: usize,
    pub transitivity: &'static str,
    pub oscillation: OscillationSummary,
    pub irregularity_indicated: bool,
}

pub fn dense_orbit(
    cfg: &ScenarioConfig,
    p: &DenseOrbitParams,
) -> Result<TaskOutput<DenseOrbitResult>> {
    let h = horizon(cfg)?;
    let phi = trig_of(observable_spec(cfg)?)?;
    // orbit of 1 is 1, 1/2, 1/3, …
    let orbit: Vec<[f64; 1]> = (1..=h).map(|n| [1.0 / n as f64]).collect();
    let density = orbit_density(&orbit, 0.0, 1.0, p.resolution)?;
    let cells = historic_core::avg::Binning::cube(0.0, 1.0, 1, p.resolution)?;
    let mut meets = vec![false; cells.total_cells()];
    meets[cells.locate(&[0.0]).expect("0 is in the box")] = true;
    let mut n = 1usize;
    loop {
        let x = 1.0 / n as f64;
        meets[cells.locate(&[x]).expect("1/n is in the box")] = true;
        if x < p.resolution {
            break;
        }
        n += 1;
    }
    let cells_meeting_space = meets.iter().filter(|&&m| m).count();
    let values: Vec<f64> = orbit.iter().map(|x| phi.eval_f64(x)).collect();
    let averages = birkhoff_partial_averages(&values, h)?;
    let report = oscillation_report(
        &averages,
        cfg.tolerances.tail_fraction,
        cfg.tolerances.cluster_tol,
    )?;
    let transitivity = if density.cells_visited == cells_meeting_space {
        "diagnostic-passed"
    } else {
        "diagnostic-failed"
    };
    let irregularity_indicated = report.indicates_irregularity(cfg.tolerances.level_tol);
    let summary = format!(
        "orbit visits {} of {} cells meeting the space ({transitivity}); tail gap {}",
        density.cells_visited,
        cells_meeting_space,
        g17(report.gap)
    );
    Ok(TaskOutput {
        table: averages_table(&averages),
        result: DenseOrbitResult {
            density,
            cells_meeting_space,
            transitivity,
            oscillation: (&report).into(),
            irregularity_indicated,
        },
        summary,
    })
}

#[derive(Serialize)]
pub struct KanSeedResult {
    pub seed: u64,
    pub samples: usize,
    #[serde(rename = "n_B0")]
    pub n_b0: usize,
    #[serde(rename = "n_B1")]
    pub n_b1: usize,
    pub n_undecided: usize,
    #[serde(serialize_with = "ser_f64")]
    pub decided_fraction: f64,
    pub every_box_has_both: bool,
    pub rows: Vec<KanBoxRow>,
}

#[derive(Serialize)]
pub struct KanResult {
    pub max_iter: usize,
    pub seeds: Vec<KanSeedResult>,
}

pub fn kan(cfg: &ScenarioConfig, p: &KanParams) -> Result<TaskOutput<KanResult>> {
    let max_iter = horizon(cfg)?;
    let mut seeds = Vec::new();
    let mut table = vec![row([
        "seed",
        "box_i",
        "box_j",
        "n_B0",
        "n_B1",
        "n_undecided",
    ])];
    for &seed in &cfg.seeds {
        let scan = KanScanConfig {
            grid: p.grid,
            samples_per_box: p.samples_per_box,
            max_iter,
            low: p.low,
            high: p.high,
            seed,
        };
        let rows = kan_scan(&scan)?;
        for r in &rows {
            table.push(vec![
                seed.to_string(),
                r.box_i.to_string(),
                r.box_j.to_string(),
                r.n_b0.to_string(),
                r.n_b1.to_string(),
                r.n_undecided.to_string(),
            ]);
        }
        let n_b0 = rows.iter().map(|r| r.n_b0).sum();
        let n_b1 = rows.iter().map(|r| r.n_b1).sum();
        let n_undecided = rows.iter().map(|r| r.n_undecided).sum();
        let samples = p.grid * p.grid * p.samples_per_box;
        seeds.push(KanSeedResult {
            seed,
            samples,
            n_b0,
            n_b1,
            n_undecided,
            decided_fraction: (n_b0 + n_b1) as f64 / samples as f64,
            every_box_has_both: rows.iter().all(|r| r.n_b0 > 0 && r.n_b1 > 0),
            rows,
        });
    }
    let summary = seeds
        .iter()
        .map(|s| {
            format!(
                "seed {}: B0 {} B1 {} undecided {}, every box mixed: {}",
                s.seed, s.n_b0, s.n_b1, s.n_undecided, s.every_box_has_both
            )
        })
        .collect::<Vec<_>>()
        .join("; ");
    Ok(TaskOutput {
        result: KanResult { max_iter, seeds },
        table,
        summary,
    })
}

#[derive(Serialize)]
pub struct FolnerValue {
    pub n: u64,
    #[serde(serialize_with = "ser_f64")]
    pub value: f64,
}

#[derive(Serialize)]
pub struct FolnerResult {
    pub point: TorusPointExact,
    pub fixed_point: bool,
    #[serde(serialize_with = "ser_f64")]
    pub phi_at_point: f64,
    /// At a common fixed point, whether every average equals `φ(p)` exactly.
    pub exact_at_fixed_point: Option<bool>,
    pub values: Vec<FolnerValue>,
}

pub fn torus_observable(
    spec: &ObservableSpec,
    q: u64,
) -> Result<Box<dyn Fn(TorusPointExact) -> f64>> {
    match spec {
        ObservableSpec::Indicator {
            point: Some([a, b]),
            ..
        } => {
            let target = TorusPointExact::new(q, *a, *b)?;
            Ok(Box::new(move |x| (x == target) as u8 as f64))
        }
        other => {
            let phi = trig_of(other)?;
            Ok(Box::new(move |x| phi.eval_torus(x)))
        }
    }
}

pub fn folner(cfg: &ScenarioConfig) -> Result<TaskOutput<FolnerResult>> {
    let SystemSpec::ToralZ2 { q, point } = &cfg.system else {
        return Err(Error::InvalidArgument(
            "folner averages need a toral_z2 system".into(),
        ));
    };
    let max_n = u32::try_from(cfg.horizon)
        .map_err(|_| Error::InvalidArgument("horizon too large".into()))?;
    let p = TorusPointExact::new(*q, point[0], point[1])?;
    let phi = torus_observable(observable_spec(cfg)?, *q)?;
    let fixed = toral_apply(&ToralMatrix::A1, p) == p && toral_apply(&ToralMatrix::A2, p) == p;
    let phi_p = phi(p);
    let values: Vec<FolnerValue> = (0..=max_n)
        .map(|n| FolnerValue {
            n: n as u64,
            value: folner_average(p, &phi, n),
        })
        .collect();
    let exact = fixed.then(|| values.iter().all(|v| v.value == phi_p));
    let mut table = vec![row(["scheme", "point", "n", "value"])];
    for v in &values {
        table.push(vec![
            "folner".into(),
            p.to_string(),
            v.n.to_string(),
            g17(v.value),
        ]);
    }
    let last = values.last().map(|v| v.value).unwrap_or(phi_p);
    let summary = format!(
        "Folner average at {p} for n = {max_n}: {} (phi(p) = {}){}",
        g17(last),
        g17(phi_p),
        match exact {
            Some(true) => ", exact at the fixed point",
            Some(false) => ", NOT exact at the fixed point",
            None => "",
        }
    );
    Ok(TaskOutput {
        result: FolnerResult {
            point: p,
            fixed_point: fixed,
            phi_at_point: phi_p,
            exact_at_fixed_point: exact,
            values,
        },
        table,
        summary,
    })
}

#[derive(Serialize)]
pub struct CheckpointValue {
    pub n: u32,
    #[serde(serialize_with = "ser_f64")]
    pub value: f64,
    #[serde(serialize_with = "ser_f64")]
    pub error: f64,
}

#[derive(Serialize)]
pub struct CesaroPoint {
    pub theta: CirclePointRational,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub a: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub b: Option<u32>,
    pub checkpoints: Vec<CheckpointValue>,
    /// Error at the horizon below `0.05·‖φ‖`.
    pub within_tolerance: bool,
    /// Error at the horizon below the error at the first checkpoint.
    pub error_decreased: bool,
}

#[derive(Serialize)]
pub struct CesaroResult {
    pub target: CirclePointRational,
    #[serde(serialize_with = "ser_f64")]
    pub phi_at_target: f64,
    #[serde(serialize_with = "ser_f64")]
    pub sup_norm: f64,
    pub points: Vec<CesaroPoint>,
}

pub fn cesaro(cfg: &ScenarioConfig, p: &CesaroParams) -> Result<TaskOutput<CesaroResult>> {
    let SystemSpec::CircleSemigroup { theta } = &cfg.system else {
        return Err(Error::InvalidArgument(
            "spherical averages need a circle_semigroup system".into(),
        ));
    };
    let n_max = u32::try_from(cfg.horizon)
        .map_err(|_| Error::InvalidArgument("horizon too large".into()))?;
    let theta: CirclePointRational = theta.parse()?;
    let target: CirclePointRational = p.target.parse()?;
    let phi = trig_of(observable_spec(cfg)?)?;
    let eval = |x: CirclePointRational| phi.eval_circle(x);
    let reference = eval(target);
    let sup = phi.sup_bound();

    let mut thetas: Vec<(CirclePointRational, Option<(u32, u32)>)> = vec![(theta, None)];
    if let Some(order) = p.preorbit_order {
        for total in 0..=order {
            for a in (0..=total).rev() {
                let b = total - a;
                let branches = 4u64
                    .saturating_pow(a)
                    .saturating_mul(6u64.saturating_pow(b));
                let w: PreOrbitWitness = preorbit_construct(target, a, b, p.branch % branches)?;
                if !thetas.iter().any(|(t, ab)| *t == w.theta && ab.is_some()) {
                    thetas.push((w.theta, Some((a, b))));
                }
            }
        }
    }
    let mut checkpoints: Vec<u32> = p
        .checkpoints
        .iter()
        .copied()
        .filter(|&n| n >= 1 && n <= n_max)
        .collect();
    checkpoints.push(n_max);
    checkpoints.sort_unstable();
    checkpoints.dedup();

    let mut table = vec![row(["scheme", "theta", "n", "value"])];
    let mut points = Vec::new();
    for (theta, ab) in thetas {
        let mut running = CenteredMean::new();
        for k in 0..n_max {
            let s = spherical_average(theta, eval, k);
            running.push(s);
            table.push(vec![
                "spherical".into(),
                theta.to_string(),
                k.to_string(),
                g17(s),
            ]);
            table.push(vec![
                "cesaro_spherical".into(),
                theta.to_string(),
                (k + 1).to_string(),
                g17(running.mean().expect("pushed")),
            ]);
        }
        let values: Vec<CheckpointValue> = checkpoints
            .iter()
            .map(|&n| {
                let value = cesaro_spherical(theta, eval, n)?;
                Ok(CheckpointValue {
                    n,
                    value,
                    error: (value - reference).abs(),
                })
            })
            .collect::<Result<_>>()?;
        let last = values.last().expect("horizon checkpoint").error;
        points.push(CesaroPoint {
            theta,
            a: ab.map(|x| x.0),
            b: ab.map(|x| x.1),
            within_tolerance: last < 0.05 * sup,
            error_decreased: values.len() < 2
                || last < values[0].error
                || (last == 0.0 && values[0].error == 0.0),
            checkpoints: values,
        });
    }
    let worst = points
        .iter()
        .map(|pt| pt.checkpoints.last().expect("horizon").error)
        .fold(0.0, f64::max);
    let summary = format!(
        "{} starting points, largest error {} at n = {n_max} against 0.05 x sup norm = {}",
        points.len(),
        g17(worst),
        g17(0.05 * sup)
    );
    Ok(TaskOutput {
        result: CesaroResult {
            target,
            phi_at_target: reference,
            sup_norm: sup,
            points,
        },
        table,
        summary,
    })
}

#[derive(Serialize)]
pub struct PsiResult {
    pub witness: PreOrbitWitness,
    #[serde(serialize_with = "ser_opt_f64")]
    pub sup_norm: Option<f64>,
    pub all_hold: bool,
    pub first_failure: Option<u32>,
    #[serde(serialize_with = "ser_f64")]
    pub max_lhs_over_bound: f64,
    pub rows: Vec<PsiBoundRow>,
}

pub fn psi_bound(cfg: &ScenarioConfig, p: &PsiParams) -> Result<TaskOutput<PsiResult>> {
    let SystemSpec::CircleSemigroup { theta } = &cfg.system else {
        return Err(Error::InvalidArgument(
            "the double average needs a circle_semigroup system".into(),
        ));
    };
    let n_max = u32::try_from(cfg.horizon)
        .map_err(|_| Error::InvalidArgument("horizon too large".into()))?;
    let witness = PreOrbitWitness::new(theta.parse()?, p.a, p.b, p.target.parse()?)?;
    let phi = trig_of(observable_spec(cfg)?)?;
    let rows = psi_bound_sweep(
        &witness,
        |x| phi.eval_circle(x),
        p.n_from,
        n_max,
        p.sup_norm,
    )?;
    let all_hold = rows.iter().all(|r| r.holds);
    let first_failure = rows.iter().find(|r| !r.holds).map(|r| r.n);
    let max_ratio = rows
        .iter()
        .filter(|r| r.bound > 0.0)
        .map(|r| r.lhs / r.bound)
        .fold(0.0, f64::max);
    let mut table = vec![row(["n", "lhs", "bound", "holds"])];
    for r in &rows {
        table.push(vec![
            r.n.to_string(),
            g17(r.lhs),
            g17(r.bound),
            r.holds.to_string(),
        ]);
    }
    let summary = format!(
        "bound {} for all {} horizons from n = {} (largest lhs/bound {})",
        if all_hold { "holds" } else { "FAILS" },
        rows.len(),
        p.n_from,
        g17(max_ratio)
    );
    Ok(TaskOutput {
        result: PsiResult {
            witness,
            sup_norm: p.sup_norm,
            all_hold,
            first_failure,
            max_lhs_over_bound: max_ratio,
            rows,
        },
        table,
        summary,
    })
}

#[derive(Serialize)]
pub struct ProbeSeries {
    pub violated_count: usize,
    pub first_unviolated: Option<usize>,
    pub samples: Vec<LambdaProbe>,
}

#[derive(Serialize)]
pub struct LambdaResult {
    #[serde(serialize_with = "ser_f64")]
    pub eta: f64,
    pub max_start: usize,
    pub block_point: ProbeSeries,
    pub fixed_point: ProbeSeries,
}

fn probe_series(
    scanner: &LambdaScanner<'_>,
    max_start: usize,
) -> Result<(ProbeSeries, Vec<LambdaProbe>)> {
    let probes: Vec<LambdaProbe> = (1..=max_start)
        .map(|n| scanner.probe(n))
        .collect::<Result<_>>()?;
    let samples = probes
        .iter()
        .filter(|p| p.start.is_power_of_two() || p.start % 1000 == 0)
        .copied()
        .collect();
    Ok((
        ProbeSeries {
            violated_count: probes.iter().filter(|p| p.violated).count(),
            first_unviolated: probes.iter().find(|p| !p.violated).map(|p| p.start),
            samples,
        },
        probes,
    ))
}

pub fn lambda(cfg: &ScenarioConfig, p: &LambdaParams) -> Result<TaskOutput<LambdaResult>> {
    let h = horizon(cfg)?;
    if p.max_start > h {
        return Err(Error::BadWindow {
            start: p.max_start,
            horizon: h,
        });
    }
    let (sft, _) = shift_space(&cfg.system)?;
    let obs = symbolic_observable(observable_spec(cfg)?, sft.size())?;
    let block = averages_along(&block_point(&sft, p.law)?, &obs, h)?;
    let fixed_cycle = shortest_cycle_through(&sft, 0)
        .ok_or_else(|| Error::BadCycle("no cycle through 0".into()))?;
    let fixed = averages_along(&SymbolicPoint::periodic(fixed_cycle)?, &obs, h)?;
    let (block_series, block_probes) =
        probe_series(&LambdaScanner::new(&block, p.eta)?, p.max_start)?;
    let (fixed_series, fixed_probes) =
        probe_series(&LambdaScanner::new(&fixed, p.eta)?, p.max_start)?;
    let mut table = vec![row([
        "N",
        "block_violated",
        "block_i",
        "block_j",
        "fixed_violated",
    ])];
    for (b, f) in block_probes.iter().zip(&fixed_probes) {
        let (i, j) = b
            .violation_pair
            .map(|(i, j)| (i.to_string(), j.to_string()))
            .unwrap_or_default();
        table.push(vec![
            b.start.to_string(),
            b.violated.to_string(),
            i,
            j,
            f.violated.to_string(),
        ]);
    }
    let summary = format!(
        "block point violated for {} of {} windows, fixed point for {}",
        block_series.violated_count, p.max_start, fixed_series.violated_count
    );
    Ok(TaskOutput {
        result: LambdaResult {
            eta: p.eta,
            max_start: p.max_start,
            block_point: block_series,
            fixed_point: fixed_series,
        },
        table,
        summary,
    })
}

/// Runs the configured task and serializes its result.
pub fn execute(cfg: &ScenarioConfig) -> Result<(String, Table, String)> {
    fn pack<T: Serialize>(
        out: TaskOutput<T>,
        cfg: &ScenarioConfig,
    ) -> Result<(String, Table, String)> {
        let report = crate::run::render_report(cfg, &out.result)?;
        Ok((report, out.table, out.summary))
    }
    match &cfg.params {
        TaskParams::Block(p) => pack(block_oscillation(cfg, p)?, cfg),
        TaskParams::Cylinder(p) => pack(cylinder_certificate(cfg, p)?, cfg),
        TaskParams::Sensitivity(p) => pack(sensitivity(cfg, p)?, cfg),
        TaskParams::Dichotomy(p) => pack(dichotomy(cfg, p)?, cfg),
        TaskParams::DenseOrbit(p) => pack(dense_orbit(cfg, p)?, cfg),
        TaskParams::Kan(p) => pack(kan(cfg, p)?, cfg),
        TaskParams::Folner(_) => pack(folner(cfg)?, cfg),
        TaskParams::Cesaro(p) => pack(cesaro(cfg, p)?, cfg),
        TaskParams::Psi(p) => pack(psi_bound(cfg, p)?, cfg),
        TaskParams::Lambda(p) => pack(lambda(cfg, p)?, cfg),
    }
}
