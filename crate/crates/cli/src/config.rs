//! Scenario configuration: JSON schema, defaults and validation.

use std::fmt;

use historic_core::fmt::{ser_f64, ser_opt_f64};
use historic_core::group_avg::TrigTerm;
use historic_core::sensitivity::Pairing;
use historic_core::symbolic::GrowthLaw;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::presets;

pub const INLINE: &str = "INLINE";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum SystemSpec {
    Shift {
        #[serde(default = "default_alphabet")]
        alphabet: usize,
    },
    Sft {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        matrix: Option<Vec<Vec<u8>>>,
        /// Truncation level of the renewal shift, instead of a matrix.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        renewal_level: Option<usize>,
    },
    Kan,
    ToralZ2 {
        q: u64,
        point: [u64; 2],
    },
    CircleSemigroup {
        theta: String,
    },
    /// `{1/n} ∪ {0}` with `1/n ↦ 1/(n+1)`.
    Harmonic,
}

fn default_alphabet() -> usize {
    2
}

impl SystemSpec {
    fn kind(&self) -> &'static str {
        match self {
            SystemSpec::Shift { .. } => "shift",
            SystemSpec::Sft { .. } => "sft",
            SystemSpec::Kan => "kan",
            SystemSpec::ToralZ2 { .. } => "toral_z2",
            SystemSpec::CircleSemigroup { .. } => "circle_semigroup",
            SystemSpec::Harmonic => "harmonic",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum ObservableSpec {
    FirstSymbol,
    Constant {
        #[serde(serialize_with = "ser_f64")]
        value: f64,
    },
    /// Indicator of a symbol at coordinate 0, or of a torus point given by
    /// numerators over the system's `q`.
    Indicator {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        symbol: Option<u8>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        point: Option<[u64; 2]>,
    },
    /// Lookup table over windows of `width` symbols.
    Window {
        width: usize,
        values: Vec<f64>,
    },
    Trig {
        #[serde(default, serialize_with = "ser_f64")]
        constant: f64,
        terms: Vec<TrigTerm>,
    },
}

impl ObservableSpec {
    fn kind(&self) -> &'static str {
        match self {
            ObservableSpec::FirstSymbol => "first_symbol",
            ObservableSpec::Constant { .. } => "constant",
            ObservableSpec::Indicator { .. } => "indicator",
            ObservableSpec::Window { .. } => "window",
            ObservableSpec::Trig { .. } => "trig",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AverageScheme {
    Birkhoff,
    Folner,
    Spherical,
    CesaroSpherical,
    DoublePsi,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Task {
    BlockOscillation,
    CylinderCertificate,
    Sensitivity,
    Dichotomy,
    DenseOrbit,
    KanScan,
    Folner,
    CesaroSpherical,
    PsiBound,
    LambdaProbe,
}

impl Task {
    fn name(self) -> String {
        serde_json::to_value(self)
            .ok()
            .and_then(|v| v.as_str().map(String::from))
            .unwrap_or_default()
    }

    fn systems(self) -> &'static [&'static str] {
        match self {
            Task::BlockOscillation
            | Task::CylinderCertificate
            | Task::Sensitivity
            | Task::LambdaProbe => &["shift", "sft"],
            Task::Dichotomy => &["shift", "sft"],
            Task::DenseOrbit => &["harmonic"],
            Task::KanScan => &["kan"],
            Task::Folner => &["toral_z2"],
            Task::CesaroSpherical | Task::PsiBound => &["circle_semigroup"],
        }
    }

    fn infer(system: &str, scheme: AverageScheme) -> Option<Task> {
        Some(match (system, scheme) {
            ("shift" | "sft", AverageScheme::Birkhoff) => Task::BlockOscillation,
            ("harmonic", AverageScheme::Birkhoff) => Task::DenseOrbit,
            ("kan", AverageScheme::Birkhoff) => Task::KanScan,
            ("toral_z2", AverageScheme::Folner) => Task::Folner,
            ("circle_semigroup", AverageScheme::Spherical | AverageScheme::CesaroSpherical) => {
                Task::CesaroSpherical
            }
            ("circle_semigroup", AverageScheme::DoublePsi) => Task::PsiBound,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    #[serde(serialize_with = "ser_f64")]
    pub tail_fraction: f64,
    #[serde(serialize_with = "ser_f64")]
    pub cluster_tol: f64,
    #[serde(serialize_with = "ser_f64")]
    pub level_tol: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            tail_fraction: 0.25,
            cluster_tol: 1e-3,
            level_tol: 0.02,
        }
    }
}

fn geometric2() -> GrowthLaw {
    GrowthLaw::Geometric { ratio: 2.0 }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BlockParams {
    pub law: GrowthLaw,
}

impl Default for BlockParams {
    fn default() -> Self {
        Self { law: geometric2() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CylinderParams {
    pub depth: usize,
    pub law: GrowthLaw,
    /// Required gap as a fraction of `β − α`.
    #[serde(serialize_with = "ser_f64")]
    pub min_gap_fraction: f64,
}

impl Default for CylinderParams {
    fn default() -> Self {
        Self {
            depth: 8,
            law: geometric2(),
            min_gap_fraction: 0.3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SensitivityParams {
    pub net_depth: usize,
    pub tail_a: u8,
    pub tail_b: u8,
    pub pairing: Pairing,
}

impl Default for SensitivityParams {
    fn default() -> Self {
        Self {
            net_depth: 6,
            tail_a: 0,
            tail_b: 1,
            pairing: Pairing::AllPairs,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DichotomyParams {
    pub max_period: usize,
    #[serde(serialize_with = "ser_f64")]
    pub tol: f64,
    pub net_depth: usize,
}

impl Default for DichotomyParams {
    fn default() -> Self {
        Self {
            max_period: 6,
            tol: 1e-9,
            net_depth: 3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DenseOrbitParams {
    #[serde(serialize_with = "ser_f64")]
    pub resolution: f64,
}

impl Default for DenseOrbitParams {
    fn default() -> Self {
        Self { resolution: 0.01 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct KanParams {
    pub grid: usize,
    pub samples_per_box: usize,
    #[serde(serialize_with = "ser_f64")]
    pub low: f64,
    #[serde(serialize_with = "ser_f64")]
    pub high: f64,
}

impl Default for KanParams {
    fn default() -> Self {
        Self {
            grid: 8,
            samples_per_box: 200,
            low: 0.01,
            high: 0.99,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FolnerParams {}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CesaroParams {
    /// Reference point `z₀` the averages are compared against.
    pub target: String,
    /// When set, also evaluate every pre-orbit witness with `a + b` up to
    /// this order.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub preorbit_order: Option<u32>,
    pub branch: u64,
    pub checkpoints: Vec<u32>,
}

impl Default for CesaroParams {
    fn default() -> Self {
        Self {
            target: "0/1".into(),
            preorbit_order: None,
            branch: 1,
            checkpoints: vec![],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PsiParams {
    pub target: String,
    pub a: u32,
    pub b: u32,
    pub n_from: u32,
    #[serde(
        serialize_with = "ser_opt_f64",
        skip_serializing_if = "Option::is_none"
    )]
    pub sup_norm: Option<f64>,
}

impl Default for PsiParams {
    fn default() -> Self {
        Self {
            target: "0/1".into(),
            a: 0,
            b: 0,
            n_from: 2,
            sup_norm: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LambdaParams {
    pub law: GrowthLaw,
    #[serde(serialize_with = "ser_f64")]
    pub eta: f64,
    pub max_start: usize,
}

impl Default for LambdaParams {
    fn default() -> Self {
        Self {
            law: geometric2(),
            eta: 0.1,
            max_start: 10_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum TaskParams {
    Block(BlockParams),
    Cylinder(CylinderParams),
    Sensitivity(SensitivityParams),
    Dichotomy(DichotomyParams),
    DenseOrbit(DenseOrbitParams),
    Kan(KanParams),
    Folner(FolnerParams),
    Cesaro(CesaroParams),
    Psi(PsiParams),
    Lambda(LambdaParams),
}

/// A fully populated scenario, defaults applied.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScenarioConfig {
    pub scenario: String,
    pub task: Task,
    pub system: SystemSpec,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub observable: Option<ObservableSpec>,
    pub scheme: AverageScheme,
    pub horizon: u64,
    pub seeds: Vec<u64>,
    pub tolerances: Tolerances,
    pub output_dir: String,
    pub params: TaskParams,
}

/// One problem found in a configuration.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConfigIssue {
    pub code: &'static str,
    /// Dotted path of the offending field; empty for the document itself.
    pub path: String,
    pub message: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub byte_offset: Option<usize>,
}

impl ConfigIssue {
    fn new(code: &'static str, path: impl Into<String>, message: impl Into<String>) -> Self {
        Self {
            code,
            path: path.into(),
            message: message.into(),
            byte_offset: None,
        }
    }

    fn invalid(path: impl Into<String>, message: impl Into<String>) -> Self {
        Self::new("CONFIG_INVALID", path, message)
    }
}

impl fmt::Display for ConfigIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let at = if self.path.is_empty() {
            "<root>"
        } else {
            &self.path
        };
        write!(f, "{} at {}: {}", self.code, at, self.message)?;
        if let Some(offset) = self.byte_offset {
            write!(f, " (byte {offset})")?;
        }
        Ok(())
    }
}

const TOP_LEVEL: [&str; 10] = [
    "scenario",
    "task",
    "system",
    "observable",
    "scheme",
    "horizon",
    "seeds",
    "tolerances",
    "output_dir",
    "params",
];

/// Parses and validates raw JSON text.
pub fn validate_config(raw: &str) -> Result<ScenarioConfig, Vec<ConfigIssue>> {
    validate_value(parse_json(raw)?)
}

pub fn parse_json(raw: &str) -> Result<Value, Vec<ConfigIssue>> {
    serde_json::from_str(raw).map_err(|e| {
        let mut issue = ConfigIssue::new("PARSE_ERROR", "", e.to_string());
        issue.byte_offset = Some(byte_offset(raw, e.line(), e.column()));
        vec![issue]
    })
}

// serde_json reports 1-based lines and columns counted in bytes.
fn byte_offset(raw: &str, line: usize, column: usize) -> usize {
    let line_start: usize = raw
        .split_inclusive('\n')
        .take(line.saturating_sub(1))
        .map(str::len)
        .sum();
    (line_start + column.saturating_sub(1)).min(raw.len())
}

/// Overlays `user` onto `base`, merging the `tolerances` and `params`
/// records key by key.
fn overlay(base: &mut Map<String, Value>, user: Map<String, Value>) {
    for (key, value) in user {
        match (key.as_str(), base.get_mut(&key), value) {
            ("tolerances" | "params", Some(Value::Object(b)), Value::Object(u)) => {
                for (k, v) in u {
                    b.insert(k, v);
                }
            }
            (_, _, value) => {
                base.insert(key, value);
            }
        }
    }
}

fn field<T: DeserializeOwned>(
    obj: &Map<String, Value>,
    key: &str,
    issues: &mut Vec<ConfigIssue>,
) -> Option<T> {
    let value = obj.get(key)?;
    match serde_json::from_value(value.clone()) {
        Ok(v) => Some(v),
        Err(e) => {
            issues.push(ConfigIssue::invalid(key, e.to_string()));
            None
        }
    }
}

/// Validates an already parsed document.
pub fn validate_value(doc: Value) -> Result<ScenarioConfig, Vec<ConfigIssue>> {
    let Value::Object(user) = doc else {
        return Err(vec![ConfigIssue::invalid(
            "",
            "configuration must be a JSON object",
        )]);
    };
    let mut issues = Vec::new();
    for key in user.keys() {
        if !TOP_LEVEL.contains(&key.as_str()) {
            issues.push(ConfigIssue::invalid(key.clone(), "unknown field"));
        }
    }

    let scenario = match user.get("scenario") {
        None => {
            issues.push(ConfigIssue::new(
                "MISSING_FIELD",
                "scenario",
                "required: a preset name or \"INLINE\"",
            ));
            None
        }
        Some(Value::String(s)) => Some(s.clone()),
        Some(_) => {
            issues.push(ConfigIssue::invalid("scenario", "must be a string"));
            None
        }
    };
    let mut obj = Map::new();
    match scenario.as_deref() {
        Some(INLINE) | None => {}
        Some(name) => match presets::preset_value(name) {
            Some(Value::Object(base)) => obj = base,
            _ => issues.push(ConfigIssue::new(
                "UNKNOWN_SCENARIO",
                "scenario",
                format!("no preset named {name:?}"),
            )),
        },
    }
    let inline = obj.is_empty();
    overlay(&mut obj, user);

    if inline {
        let required: &[&str] = match obj
            .get("system")
            .and_then(|s| s.get("type"))
            .and_then(Value::as_str)
        {
            Some("kan") => &["system", "scheme", "horizon"],
            _ => &["system", "observable", "scheme", "horizon"],
        };
        for key in required {
            if !obj.contains_key(*key) {
                issues.push(ConfigIssue::new(
                    "MISSING_FIELD",
                    *key,
                    "required for inline scenarios",
                ));
            }
        }
    }

    let system: Option<SystemSpec> = field(&obj, "system", &mut issues);
    let observable: Option<ObservableSpec> = field(&obj, "observable", &mut issues);
    let scheme: Option<AverageScheme> = field(&obj, "scheme", &mut issues);
    let explicit_task: Option<Task> = field(&obj, "task", &mut issues);
    let horizon: Option<u64> = field(&obj, "horizon", &mut issues);
    let seeds: Vec<u64> = field(&obj, "seeds", &mut issues).unwrap_or_else(|| vec![1]);
    let tolerances: Tolerances = field(&obj, "tolerances", &mut issues).unwrap_or_default();
    let output_dir: Option<String> = field(&obj, "output_dir", &mut issues);

    if horizon == Some(0) {
        issues.push(ConfigIssue::invalid("horizon", "must be at least 1"));
    }
    if seeds.is_empty() {
        issues.push(ConfigIssue::invalid("seeds", "must list at least one seed"));
    }
    for (name, value) in [
        ("tail_fraction", tolerances.tail_fraction),
        ("cluster_tol", tolerances.cluster_tol),
        ("level_tol", tolerances.level_tol),
    ] {
        if !(value > 0.0 && value.is_finite()) {
            issues.push(ConfigIssue::invalid(
                format!("tolerances.{name}"),
                "must be positive",
            ));
        }
    }
    if tolerances.tail_fraction > 1.0 {
        issues.push(ConfigIssue::invalid(
            "tolerances.tail_fraction",
            "must not exceed 1",
        ));
    }

    let task = match (explicit_task, &system, scheme) {
        (Some(t), _, _) => Some(t),
        (None, Some(sys), Some(scheme)) => {
            let t = Task::infer(sys.kind(), scheme);
            if t.is_none() {
                issues.push(ConfigIssue::invalid(
                    "scheme",
                    format!(
                        "scheme {scheme:?} is not available on system {}",
                        sys.kind()
                    ),
                ));
            }
            t
        }
        _ => None,
    };

    if let (Some(task), Some(sys)) = (task, &system) {
        if !task.systems().contains(&sys.kind()) {
            issues.push(ConfigIssue::invalid(
                "system.type",
                format!(
                    "task {} runs on {:?}, not {}",
                    task.name(),
                    task.systems(),
                    sys.kind()
                ),
            ));
        }
        check_system(sys, &mut issues);
        match (&observable, task) {
            (None, Task::KanScan) => {}
            (None, _) => {
                if !inline {
                    issues.push(ConfigIssue::new(
                        "MISSING_FIELD",
                        "observable",
                        "required by this task",
                    ));
                }
            }
            (Some(obs), _) => check_observable(obs, sys, &mut issues),
        }
    }

    let params = task.and_then(|t| parse_params(t, obj.get("params"), &mut issues));

    if !issues.is_empty() {
        return Err(issues);
    }
    let scenario = scenario.expect("no issues implies a scenario");
    let output_dir = output_dir.unwrap_or_else(|| format!("runs/{}", scenario.to_lowercase()));
    Ok(ScenarioConfig {
        scenario,
        task: task.expect("validated"),
        system: system.expect("validated"),
        observable,
        scheme: scheme.expect("validated"),
        horizon: horizon.expect("validated"),
        seeds,
        tolerances,
        output_dir,
        params: params.expect("validated"),
    })
}

fn parse_params(
    task: Task,
    raw: Option<&Value>,
    issues: &mut Vec<ConfigIssue>,
) -> Option<TaskParams> {
    let raw = raw.cloned().unwrap_or(Value::Object(Map::new()));
    fn typed<T: DeserializeOwned>(raw: Value, issues: &mut Vec<ConfigIssue>) -> Option<T> {
        serde_json::from_value(raw)
            .map_err(|e| issues.push(ConfigIssue::invalid("params", e.to_string())))
            .ok()
    }
    let params = match task {
        Task::BlockOscillation => TaskParams::Block(typed(raw, issues)?),
        Task::CylinderCertificate => TaskParams::Cylinder(typed(raw, issues)?),
        Task::Sensitivity => TaskParams::Sensitivity(typed(raw, issues)?),
        Task::Dichotomy => TaskParams::Dichotomy(typed(raw, issues)?),
        Task::DenseOrbit => TaskParams::DenseOrbit(typed(raw, issues)?),
        Task::KanScan => TaskParams::Kan(typed(raw, issues)?),
        Task::Folner => TaskParams::Folner(typed(raw, issues)?),
        Task::CesaroSpherical => TaskParams::Cesaro(typed(raw, issues)?),
        Task::PsiBound => TaskParams::Psi(typed(raw, issues)?),
        Task::LambdaProbe => TaskParams::Lambda(typed(raw, issues)?),
    };
    match &params {
        TaskParams::Cylinder(p) if !(1..=16).contains(&p.depth) => issues.push(
            ConfigIssue::invalid("params.depth", "must be between 1 and 16"),
        ),
        TaskParams::Sensitivity(p) if p.net_depth == 0 => issues.push(ConfigIssue::invalid(
            "params.net_depth",
            "must be at least 1",
        )),
        TaskParams::Dichotomy(p) if p.max_period == 0 => issues.push(ConfigIssue::invalid(
            "params.max_period",
            "must be at least 1",
        )),
        TaskParams::DenseOrbit(p) if !(p.resolution > 0.0) => issues.push(ConfigIssue::invalid(
            "params.resolution",
            "must be positive",
        )),
        TaskParams::Lambda(p) if !(p.eta > 0.0) => {
            issues.push(ConfigIssue::invalid("params.eta", "must be positive"))
        }
        TaskParams::Cesaro(p)
            if p.target
                .parse::<historic_core::CirclePointRational>()
                .is_err() =>
        {
            issues.push(ConfigIssue::invalid(
                "params.target",
                "must be a rational a/q",
            ))
        }
        TaskParams::Psi(p)
            if p.target
                .parse::<historic_core::CirclePointRational>()
                .is_err() =>
        {
            issues.push(ConfigIssue::invalid(
                "params.target",
                "must be a rational a/q",
            ))
        }
        _ => {}
    }
    Some(params)
}

fn check_system(sys: &SystemSpec, issues: &mut Vec<ConfigIssue>) {
    match sys {
        SystemSpec::Shift { alphabet } if !(2..=256).contains(alphabet) => issues.push(
            ConfigIssue::invalid("system.alphabet", "must be between 2 and 256"),
        ),
        SystemSpec::Sft {
            matrix,
            renewal_level,
        } => match (matrix, renewal_level) {
            (Some(_), None) | (None, Some(_)) => {}
            _ => issues.push(ConfigIssue::invalid(
                "system",
                "give exactly one of matrix and renewal_level",
            )),
        },
        SystemSpec::ToralZ2 { q, .. } if *q == 0 => {
            issues.push(ConfigIssue::invalid("system.q", "must be positive"))
        }
        SystemSpec::CircleSemigroup { theta }
            if theta.parse::<historic_core::CirclePointRational>().is_err() =>
        {
            issues.push(ConfigIssue::invalid(
                "system.theta",
                "must be a rational a/q",
            ))
        }
        _ => {}
    }
}

fn check_observable(obs: &ObservableSpec, sys: &SystemSpec, issues: &mut Vec<ConfigIssue>) {
    let symbolic = matches!(sys, SystemSpec::Shift { .. } | SystemSpec::Sft { .. });
    let ok = match obs {
        ObservableSpec::Constant { .. } => true,
        ObservableSpec::FirstSymbol | ObservableSpec::Window { .. } => symbolic,
        ObservableSpec::Indicator { symbol, point } => match sys {
            SystemSpec::ToralZ2 { .. } => point.is_some() && symbol.is_none(),
            _ => symbolic && symbol.is_some() && point.is_none(),
        },
        ObservableSpec::Trig { .. } => !symbolic,
    };
    if !ok {
        issues.push(ConfigIssue::invalid(
            "observable.type",
            format!(
                "observable {} does not apply to system {}",
                obs.kind(),
                sys.kind()
            ),
        ));
    }
    if let ObservableSpec::Window { width, .. } = obs {
        if *width == 0 {
            issues.push(ConfigIssue::invalid(
                "observable.width",
                "must be at least 1",
            ));
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn issues(raw: &str) -> Vec<ConfigIssue> {
        validate_config(raw).unwrap_err()
    }

    #[test]
    fn empty_object_lists_required_fields() {
        let found = issues("{}");
        let paths: Vec<&str> = found.iter().map(|i| i.path.as_str()).collect();
        for key in ["scenario", "system", "observable", "scheme", "horizon"] {
            assert!(paths.contains(&key), "{key} missing from {paths:?}");
        }
        assert!(found.iter().all(|i| i.code == "MISSING_FIELD"));
    }

    #[test]
    fn preset_name_alone_gets_defaults() {
        let cfg = validate_config(r#"{"scenario": "shift-blocks-geometric"}"#).unwrap();
        assert_eq!(cfg.horizon, 1 << 20);
        assert_eq!(cfg.seeds, vec![1]);
        assert_eq!(cfg.task, Task::BlockOscillation);
        assert_eq!(cfg.output_dir, "runs/shift-blocks-geometric");
        assert_eq!(cfg.params, TaskParams::Block(BlockParams::default()));
    }

    #[test]
    fn zero_horizon_is_flagged() {
        let found = issues(r#"{"scenario": "shift-blocks-geometric", "horizon": 0}"#);
        assert_eq!(
            found,
            vec![ConfigIssue::invalid("horizon", "must be at least 1")]
        );
    }

    #[test]
    fn parse_error_reports_byte_offset() {
        let raw = "{\n  \"scenario\": ,\n}";
        let found = issues(raw);
        assert_eq!(found.len(), 1);
        assert_eq!(found[0].code, "PARSE_ERROR");
        assert_eq!(found[0].byte_offset, Some(raw.find(',').unwrap()));
    }

    #[test]
    fn unknown_scenario_and_fields() {
        let found = issues(r#"{"scenario": "nope", "colour": 1}"#);
        let codes: Vec<_> = found.iter().map(|i| (i.code, i.path.as_str())).collect();
        assert!(codes.contains(&("UNKNOWN_SCENARIO", "scenario")));
        assert!(codes.contains(&("CONFIG_INVALID", "colour")));
    }

    #[test]
    fn inline_config_infers_task() {
        let raw = r#"{
            "scenario": "INLINE",
            "system": {"type": "circle_semigroup", "theta": "1/6"},
            "observable": {"type": "trig", "terms": [{"amplitude": 1.0, "frequency": [1], "kind": "cos"}]},
            "scheme": "double_psi",
            "horizon": 50,
            "params": {"b": 1}
        }"#;
        let cfg = validate_config(raw).unwrap();
        assert_eq!(cfg.task, Task::PsiBound);
        assert_eq!(cfg.output_dir, "runs/inline");
        let TaskParams::Psi(p) = cfg.params else {
            panic!()
        };
        assert_eq!((p.a, p.b, p.n_from), (0, 1, 2));
    }

    #[test]
    fn mismatched_parts_are_reported_with_paths() {
        let raw = r#"{
            "scenario": "INLINE",
            "system": {"type": "kan"},
            "scheme": "folner",
            "horizon": 5,
            "tolerances": {"cluster_tol": -1}
        }"#;
        let paths: Vec<String> = issues(raw).into_iter().map(|i| i.path).collect();
        assert!(paths.contains(&"scheme".to_string()));
        assert!(paths.contains(&"tolerances.cluster_tol".to_string()));

        let raw = r#"{"scenario": "psi-bound", "observable": {"type": "first_symbol"}, "params": {"bogus": 1}}"#;
        let paths: Vec<String> = issues(raw).into_iter().map(|i| i.path).collect();
        assert!(paths.contains(&"observable.type".to_string()));
        assert!(paths.contains(&"params".to_string()));
    }

    #[test]
    fn every_preset_validates() {
        for p in presets::list_presets() {
            let cfg = validate_config(&format!(r#"{{"scenario": "{}"}}"#, p.name));
            assert!(cfg.is_ok(), "{}: {:?}", p.name, cfg.err());
        }
    }
}
