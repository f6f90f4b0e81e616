//! Scenario execution and the three output artifacts.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::config::{AverageScheme, ConfigIssue, ScenarioConfig, Task, TaskParams, Tolerances};
use crate::tasks::{self, Table};

pub const VERSION: &str = concat!(env!("CARGO_PKG_NAME"), " ", env!("CARGO_PKG_VERSION"));

pub const AVERAGES_CSV: &str = "averages.csv";
pub const REPORT_JSON: &str = "report.json";
pub const MANIFEST_JSON: &str = "manifest.json";

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("{} configuration issue(s)", .0.len())]
    Config(Vec<ConfigIssue>),
    #[error("{}: {0}", .0.code())]
    Runtime(#[from] historic_core::Error),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
}

impl HarnessError {
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Config(_) => 2,
            HarnessError::Runtime(_) | HarnessError::Io { .. } => 3,
        }
    }
}

#[derive(Serialize)]
struct Report<'a, T: Serialize> {
    scenario: &'a str,
    task: Task,
    scheme: AverageScheme,
    horizon: u64,
    seeds: &'a [u64],
    tolerances: &'a Tolerances,
    params: &'a TaskParams,
    result: &'a T,
}

/// Pretty JSON for report.json. Only inputs that affect the result are
/// echoed, so the text depends on nothing but the config and seeds.
pub fn render_report<T: Serialize>(
    cfg: &ScenarioConfig,
    result: &T,
) -> historic_core::Result<String> {
    let report = Report {
        scenario: &cfg.scenario,
        task: cfg.task,
        scheme: cfg.scheme,
        horizon: cfg.horizon,
        seeds: &cfg.seeds,
        tolerances: &cfg.tolerances,
        params: &cfg.params,
        result,
    };
    let mut text = serde_json::to_string_pretty(&report)
        .map_err(|e| historic_core::Error::InvalidArgument(format!("report serialization: {e}")))?;
    text.push('\n');
    Ok(text)
}

pub fn render_csv(table: &Table) -> String {
    let mut out = String::new();
    for row in table {
        let cells: Vec<String> = row.iter().map(|c| csv_cell(c)).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

fn csv_cell(c: &str) -> String {
    if c.contains([',', '"', '\n']) {
        format!("\"{}\"", c.replace('"', "\"\""))
    } else {
        c.to_string()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, serde::Deserialize)]
pub struct Artifact {
    pub file: String,
    pub sha256: String,
    pub bytes: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub config: ScenarioConfig,
    pub artifacts: Vec<Artifact>,
    pub wall_clock_seconds: f64,
    pub version: &'static str,
}

/// What a run produced, in memory and on disk.
#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub manifest: RunManifest,
    pub summary: String,
    pub dir: PathBuf,
}

fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes)
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

fn write(dir: &Path, name: &str, text: &str) -> Result<Artifact, HarnessError> {
    let path = dir.join(name);
    fs::write(&path, text).map_err(|source| HarnessError::Io { path, source })?;
    Ok(Artifact {
        file: name.to_string(),
        sha256: sha256_hex(text.as_bytes()),
        bytes: text.len() as u64,
    })
}

/// Runs the scenario and writes averages.csv, report.json and manifest.json
/// into `cfg.output_dir`.
pub fn run_scenario(cfg: &ScenarioConfig) -> Result<RunOutcome, HarnessError> {
    let started = Instant::now();
    let (report, table, summary) = tasks::execute(cfg)?;
    let dir = PathBuf::from(&cfg.output_dir);
    fs::create_dir_all(&dir).map_err(|source| HarnessError::Io {
        path: dir.clone(),
        source,
    })?;
    let artifacts = vec![
        write(&dir, AVERAGES_CSV, &render_csv(&table))?,
        write(&dir, REPORT_JSON, &report)?,
    ];
    let manifest = RunManifest {
        config: cfg.clone(),
        artifacts,
        wall_clock_seconds: started.elapsed().as_secs_f64(),
        version: VERSION,
    };
    let mut text = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    text.push('\n');
    write(&dir, MANIFEST_JSON, &text)?;
    Ok(RunOutcome {
        manifest,
        summary,
        dir,
    })
}

/// Files whose size or digest no longer match the manifest in `dir`.
pub fn verify_manifest(dir: &Path) -> Result<Vec<String>, HarnessError> {
    let path = dir.join(MANIFEST_JSON);
    let text = fs::read_to_string(&path).map_err(|source| HarnessError::Io {
        path: path.clone(),
        source,
    })?;
    let value: serde_json::Value = serde_json::from_str(&text).map_err(|e| HarnessError::Io {
        path: path.clone(),
        source: io::Error::new(io::ErrorKind::InvalidData, e),
    })?;
    let artifacts: Vec<Artifact> =
        serde_json::from_value(value["artifacts"].clone()).map_err(|e| HarnessError::Io {
            path,
            source: io::Error::new(io::ErrorKind::InvalidData, e),
        })?;
    let mut bad = Vec::new();
    for a in artifacts {
        match fs::read(dir.join(&a.file)) {
            Ok(bytes) if bytes.len() as u64 == a.bytes && sha256_hex(&bytes) == a.sha256 => {}
            _ => bad.push(a.file),
        }
    }
    Ok(bad)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::validate_value;
    use serde_json::json;

    fn config(preset: &str, extra: serde_json::Value, dir: &Path) -> ScenarioConfig {
        let mut doc = json!({ "scenario": preset, "output_dir": dir.to_str().unwrap() });
        for (k, v) in extra.as_object().unwrap() {
            doc[k] = v.clone();
        }
        validate_value(doc).unwrap()
    }

    #[test]
    fn sha256_known_vector() {
        assert_eq!(
            sha256_hex(b"abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
    }

    #[test]
    fn csv_quotes_only_when_needed() {
        let table = vec![
            vec!["a".into(), "b,c".into()],
            vec!["x\"y".into(), "1".into()],
        ];
        assert_eq!(render_csv(&table), "a,\"b,c\"\n\"x\"\"y\",1\n");
    }

    #[test]
    fn writes_three_artifacts_and_digests_verify() {
        let tmp = tempfile::tempdir().unwrap();
        let cfg = config("folner-z2-fixedpoint", json!({}), tmp.path());
        let out = run_scenario(&cfg).unwrap();
        for f in [AVERAGES_CSV, REPORT_JSON, MANIFEST_JSON] {
            let text = fs::read_to_string(tmp.path().join(f)).unwrap();
            assert!(!text.contains('\r'), "{f}");
        }
        assert_eq!(out.manifest.artifacts.len(), 2);
        assert!(verify_manifest(tmp.path()).unwrap().is_empty());
        let csv = fs::read_to_string(tmp.path().join(AVERAGES_CSV)).unwrap();
        assert_eq!(csv.lines().next().unwrap(), "scheme,point,n,value");
        fs::write(tmp.path().join(AVERAGES_CSV), "tampered\n").unwrap();
        assert_eq!(
            verify_manifest(tmp.path()).unwrap(),
            vec![AVERAGES_CSV.to_string()]
        );
    }

    #[test]
    fn manifest_echoes_defaults() {
        let tmp = tempfile::tempdir().unwrap();
        let cfg = config("folner-z2-fixedpoint", json!({}), tmp.path());
        run_scenario(&cfg).unwrap();
        let m: serde_json::Value =
            serde_json::from_str(&fs::read_to_string(tmp.path().join(MANIFEST_JSON)).unwrap())
                .unwrap();
        assert_eq!(m["config"]["tolerances"]["tail_fraction"], json!(0.25));
        assert_eq!(m["config"]["scheme"], json!("folner"));
        assert_eq!(m["version"], json!(VERSION));
    }

    #[test]
    fn report_is_independent_of_output_dir() {
        let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
        let extra = json!({ "horizon": 3000 });
        run_scenario(&config("psi-bound", extra.clone(), a.path())).unwrap();
        run_scenario(&config("psi-bound", extra, b.path())).unwrap();
        let read = |d: &Path| fs::read(d.join(REPORT_JSON)).unwrap();
        assert_eq!(read(a.path()), read(b.path()));
    }

    #[test]
    fn runtime_errors_map_to_exit_code_3() {
        let tmp = tempfile::tempdir().unwrap();
        // n_from below max(a, b) is refused
        let cfg = config(
            "psi-bound",
            json!({ "params": { "a": 2, "b": 0, "n_from": 1 }, "system": { "type": "circle_semigroup", "theta": "1/16" } }),
            tmp.path(),
        );
        let err = run_scenario(&cfg).unwrap_err();
        assert_eq!(err.exit_code(), 3);
        assert!(err.to_string().starts_with("HORIZON_TOO_SMALL"), "{err}");
    }
}
