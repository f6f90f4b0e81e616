//! Scenario runner for `historic-core`: JSON configurations, named presets,
//! and the `historic` command line.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod config;
pub mod presets;
pub mod run;
pub mod tasks;

pub use cli::main_with;
pub use config::{validate_config, ConfigIssue, ScenarioConfig};
pub use presets::{list_presets, PresetInfo};
pub use run::{run_scenario, verify_manifest, HarnessError, RunManifest, RunOutcome};
