//! Argument parsing and the `run`, `list` and `validate` subcommands.

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use crate::config::{parse_json, validate_value, ConfigIssue, ScenarioConfig};
use crate::presets::list_presets;
use crate::run::{run_scenario, HarnessError};

#[derive(Debug, Parser)]
#[command(
    name = "historic",
    version,
    about = "Finite-resolution experiments on historic behavior"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run a scenario and write averages.csv, report.json and manifest.json.
    Run(Source),
    /// List the shipped presets.
    List,
    /// Check a configuration and print it with every default filled in.
    Validate(Source),
}

#[derive(Debug, Args)]
struct Source {
    /// JSON scenario file.
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Preset name; with --config, the file's fields override the preset.
    #[arg(long, value_name = "NAME")]
    preset: Option<String>,
    /// Seed; repeat for several.
    #[arg(long = "seed", value_name = "N")]
    seeds: Vec<u64>,
    /// Override the horizon.
    #[arg(long, value_name = "N")]
    horizon: Option<u64>,
    /// Output directory.
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Suppress the summary.
    #[arg(long)]
    quiet: bool,
}

fn io_issue(message: String) -> Vec<ConfigIssue> {
    vec![ConfigIssue {
        code: "CONFIG_INVALID",
        path: "--config".into(),
        message,
        byte_offset: None,
    }]
}

fn load(src: &Source) -> Result<ScenarioConfig, Vec<ConfigIssue>> {
    let mut doc = match &src.config {
        Some(path) => {
            let raw = std::fs::read_to_string(path)
                .map_err(|e| io_issue(format!("{}: {e}", path.display())))?;
            parse_json(&raw)?
        }
        None => json!({}),
    };
    let Value::Object(obj) = &mut doc else {
        return validate_value(doc);
    };
    if let Some(name) = &src.preset {
        obj.insert("scenario".into(), json!(name));
    }
    if !src.seeds.is_empty() {
        obj.insert("seeds".into(), json!(src.seeds));
    }
    if let Some(h) = src.horizon {
        obj.insert("horizon".into(), json!(h));
    }
    if let Some(out) = &src.out {
        obj.insert("output_dir".into(), json!(out.to_string_lossy()));
    }
    validate_value(doc)
}

fn report_issues(issues: &[ConfigIssue], err: &mut dyn Write) -> i32 {
    for issue in issues {
        let _ = writeln!(err, "error: {issue}");
    }
    2
}

/// Entry point with injectable streams; returns the process exit code.
pub fn main_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 {
                write!(out, "{text}")
            } else {
                write!(err, "{text}")
            };
            return code;
        }
    };
    match cli.command {
        Command::List => {
            let presets = list_presets();
            let width = presets.iter().map(|p| p.name.len()).max().unwrap_or(0);
            for p in presets {
                let _ = writeln!(out, "{:width$}  {}", p.name, p.description);
            }
            0
        }
        Command::Validate(src) => match load(&src) {
            Ok(cfg) => {
                let _ = writeln!(
                    out,
                    "{}",
                    serde_json::to_string_pretty(&cfg).expect("config serializes")
                );
                0
            }
            Err(issues) => report_issues(&issues, err),
        },
        Command::Run(src) => {
            let cfg = match load(&src) {
                Ok(cfg) => cfg,
                Err(issues) => return report_issues(&issues, err),
            };
            match run_scenario(&cfg) {
                Ok(outcome) => {
                    if !src.quiet {
                        let _ = writeln!(out, "{}: {}", cfg.scenario, outcome.summary);
                        let _ = writeln!(out, "wrote {}", outcome.dir.display());
                    }
                    0
                }
                Err(HarnessError::Config(issues)) => report_issues(&issues, err),
                Err(e) => {
                    let _ = writeln!(err, "error: {e}");
                    e.exit_code()
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::fs;

    fn call(args: &[&str]) -> (i32, String, String) {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let code = main_with(
            std::iter::once("historic").chain(args.iter().copied()),
            &mut out,
            &mut err,
        );
        (
            code,
            String::from_utf8(out).unwrap(),
            String::from_utf8(err).unwrap(),
        )
    }

    #[test]
    fn list_is_stable_and_names_the_presets() {
        let (code, out, _) = call(&["list"]);
        assert_eq!(code, 0);
        let names: Vec<&str> = out
            .lines()
            .map(|l| l.split_whitespace().next().unwrap())
            .collect();
        assert_eq!(names[0], "shift-blocks-geometric");
        for n in [
            "folner-z2-fixedpoint",
            "rigidity-goldenmean",
            "kan-intermingled",
            "psi-bound",
        ] {
            assert!(names.contains(&n), "{n}");
        }
        assert_eq!(call(&["list"]).1, out);
    }

    #[test]
    fn validate_echoes_defaults() {
        let (code, out, _) = call(&[
            "validate",
            "--preset",
            "shift-blocks-geometric",
            "--seed",
            "1",
            "--seed",
            "2",
        ]);
        assert_eq!(code, 0);
        let v: Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["seeds"], json!([1, 2]));
        assert_eq!(v["horizon"], json!(1 << 20));
        assert_eq!(v["tolerances"]["cluster_tol"], json!(1e-3));
    }

    #[test]
    fn config_errors_exit_2() {
        let (code, _, err) = call(&["validate", "--preset", "no-such-preset"]);
        assert_eq!(code, 2);
        assert!(err.contains("UNKNOWN_SCENARIO"), "{err}");

        let (code, _, err) = call(&["run", "--preset", "psi-bound", "--horizon", "0"]);
        assert_eq!(code, 2);
        assert!(err.contains("CONFIG_INVALID at horizon"), "{err}");

        let (code, _, err) = call(&["validate"]);
        assert_eq!(code, 2);
        assert!(err.contains("MISSING_FIELD"), "{err}");

        let (code, _, _) = call(&["frobnicate"]);
        assert_eq!(code, 2);
    }

    #[test]
    fn parse_error_reports_byte_offset() {
        let tmp = tempfile::tempdir().unwrap();
        let path = tmp.path().join("bad.json");
        fs::write(&path, "{\n  \"scenario\": ,\n}").unwrap();
        let (code, _, err) = call(&["validate", "--config", path.to_str().unwrap()]);
        assert_eq!(code, 2);
        assert!(
            err.contains("PARSE_ERROR") && err.contains("(byte 16)"),
            "{err}"
        );
    }

    #[test]
    fn run_writes_outputs_and_quiet_suppresses_summary() {
        let tmp = tempfile::tempdir().unwrap();
        let dir = tmp.path().join("out");
        let d = dir.to_str().unwrap();
        let (code, out, err) = call(&["run", "--preset", "folner-z2-fixedpoint", "--out", d]);
        assert_eq!(code, 0, "{err}");
        assert!(out.contains("exact at the fixed point"), "{out}");
        for f in ["averages.csv", "report.json", "manifest.json"] {
            assert!(dir.join(f).is_file(), "{f}");
        }
        let (code, out, _) = call(&[
            "run",
            "--preset",
            "folner-z2-fixedpoint",
            "--out",
            d,
            "--quiet",
        ]);
        assert_eq!(code, 0);
        assert!(out.is_empty());
    }

    #[test]
    fn file_fields_override_the_preset() {
        let tmp = tempfile::tempdir().unwrap();
        let path = tmp.path().join("cfg.json");
        fs::write(
            &path,
            r#"{"scenario": "psi-bound", "params": {"n_from": 5}}"#,
        )
        .unwrap();
        let (code, out, _) = call(&[
            "validate",
            "--config",
            path.to_str().unwrap(),
            "--horizon",
            "50",
        ]);
        assert_eq!(code, 0);
        let v: Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["params"]["n_from"], json!(5));
        assert_eq!(v["params"]["a"], json!(1));
        assert_eq!(v["horizon"], json!(50));
    }

    #[test]
    fn runtime_errors_exit_3() {
        let tmp = tempfile::tempdir().unwrap();
        let path = tmp.path().join("cfg.json");
        fs::write(
            &path,
            r#"{"scenario": "INLINE", "system": {"type": "sft", "matrix": [[1,0],[0,1]]},
                "observable": {"type": "first_symbol"}, "scheme": "birkhoff", "task": "dichotomy", "horizon": 100}"#,
        )
        .unwrap();
        let out_dir = tmp.path().join("o");
        let (code, _, err) = call(&[
            "run",
            "--config",
            path.to_str().unwrap(),
            "--out",
            out_dir.to_str().unwrap(),
        ]);
        assert_eq!(code, 3);
        assert!(err.contains("NOT_MIXING"), "{err}");
    }
}
