//! Named scenarios shipped with the harness.

use serde::Serialize;
use serde_json::{json, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PresetInfo {
    pub name: &'static str,
    pub description: &'static str,
}

struct Preset {
    info: PresetInfo,
    build: fn() -> Value,
}

fn cos1() -> Value {
    json!({"type": "trig", "terms": [{"amplitude": 1.0, "frequency": [1], "kind": "cos"}]})
}

const PRESETS: &[Preset] = &[
    Preset {
        info: PresetInfo {
            name: "shift-blocks-geometric",
            description: "full 2-shift point with runs of length 2^(i-1); first-symbol averages oscillate over [1/3, 2/3]",
        },
        build: || {
            json!({
                "task": "block_oscillation",
                "system": {"type": "shift", "alphabet": 2},
                "observable": {"type": "first_symbol"},
                "scheme": "birkhoff",
                "horizon": 1 << 20,
                "tolerances": {"tail_fraction": 0.5},
                "params": {"law": {"law": "geometric", "ratio": 2.0}}
            })
        },
    },
    Preset {
        info: PresetInfo {
            name: "shift-blocks-superlinear",
            description: "full 2-shift point with factorial run ends; averages approach the extremes 0 and 1",
        },
        build: || {
            json!({
                "task": "block_oscillation",
                "system": {"type": "shift", "alphabet": 2},
                "observable": {"type": "first_symbol"},
                "scheme": "birkhoff",
                "horizon": 1_000_000,
                "tolerances": {"tail_fraction": 0.5},
                "params": {"law": {"law": "superlinear"}}
            })
        },
    },
    Preset {
        info: PresetInfo {
            name: "cylinder-certificate",
            description: "an oscillating point inside every depth-8 cylinder of the full 2-shift",
        },
        build: || {
            json!({
                "task": "cylinder_certificate",
                "system": {"type": "shift", "alphabet": 2},
                "observable": {"type": "first_symbol"},
                "scheme": "birkhoff",
                "horizon": 1 << 20,
                "tolerances": {"tail_fraction": 0.5},
                "params": {"depth": 8}
            })
        },
    },
    Preset {
        info: PresetInfo {
            name: "full-shift-sensitivity",
            description: "stable sets of the fixed points 0 and 1 of the full 2-shift separate first-symbol averages",
        },
        build: || {
            json!({
                "task": "sensitivity",
                "system": {"type": "shift", "alphabet": 2},
                "observable": {"type": "first_symbol"},
                "scheme": "birkhoff",
                "horizon": 4000,
                "params": {"net_depth": 6}
            })
        },
    },
    Preset {
        info: PresetInfo {
            name: "rigidity-goldenmean",
            description: "periodic-orbit rigidity test and dichotomy on the golden-mean shift, indicator of symbol 1",
        },
        build: || {
            json!({
                "task": "dichotomy",
                "system": {"type": "sft", "matrix": [[1, 1], [1, 0]]},
                "observable": {"type": "indicator", "symbol": 1},
                "scheme": "birkhoff",
                "horizon": 4000,
                "params": {"max_period": 6}
            })
        },
    },
    Preset {
        info: PresetInfo {
            name: "renewal-truncation",
            description: "finite truncation of the renewal shift, then the rigidity dichotomy for the indicator of 0",
        },
        build: || {
            json!({
                "task": "dichotomy",
                "system": {"type": "sft", "renewal_level": 6},
                "observable": {"type": "indicator", "symbol": 0},
                "scheme": "birkhoff",
                "horizon": 4000,
                "params": {"max_period": 8}
            })
        },
    },
    Preset {
        info: PresetInfo {
            name: "dense-orbit",
            description: "the space {1/n} with 0 has a dense orbit yet no irregular points",
        },
        build: || {
            json!({
                "task": "dense_orbit",
                "system": {"type": "harmonic"},
                "observable": cos1(),
                "scheme": "birkhoff",
                "horizon": 100_000,
                "params": {"resolution": 0.01}
            })
        },
    },
    Preset {
        info: PresetInfo {
            name: "kan-intermingled",
            description: "basin labels of Kan's skew product on an 8x8 grid, 200 samples per box",
        },
        build: || {
            json!({
                "task": "kan_scan",
                "system": {"type": "kan"},
                "scheme": "birkhoff",
                "horizon": 100_000,
                "seeds": [7],
                "params": {"grid": 8, "samples_per_box": 200}
            })
        },
    },
    Preset {
        info: PresetInfo {
            name: "folner-z2-fixedpoint",
            description: "Folner box averages of the Z^2 toral action at the common fixed point and at (1,0) mod 5",
        },
        build: || {
            json!({
                "task": "folner",
                "system": {"type": "toral_z2", "q": 5, "point": [0, 0]},
                "observable": {"type": "trig", "constant": 0.25, "terms": [
                    {"amplitude": 1.0, "frequency": [1, 0], "kind": "cos"},
                    {"amplitude": 0.5, "frequency": [1, 2], "kind": "sin"}
                ]},
                "scheme": "folner",
                "horizon": 20
            })
        },
    },
    Preset {
        info: PresetInfo {
            name: "cesaro-spherical",
            description: "Cesaro-spherical averages for the semigroup of z^4 and z^6 on pre-orbits of the fixed point",
        },
        build: || {
            json!({
                "task": "cesaro_spherical",
                "system": {"type": "circle_semigroup", "theta": "1/4"},
                "observable": cos1(),
                "scheme": "cesaro_spherical",
                "horizon": 200,
                "params": {"preorbit_order": 4, "branch": 1, "checkpoints": [20, 200]}
            })
        },
    },
    Preset {
        info: PresetInfo {
            name: "psi-bound",
            description: "double average Psi_n at theta = 1/4 against its remainder bound for n up to 1000",
        },
        build: || {
            json!({
                "task": "psi_bound",
                "system": {"type": "circle_semigroup", "theta": "1/4"},
                "observable": cos1(),
                "scheme": "double_psi",
                "horizon": 1000,
                "params": {"a": 1, "b": 0}
            })
        },
    },
    Preset {
        info: PresetInfo {
            name: "lambda-probe",
            description: "Cauchy-window probes of the geometric block point and of a fixed point",
        },
        build: || {
            json!({
                "task": "lambda_probe",
                "system": {"type": "shift", "alphabet": 2},
                "observable": {"type": "first_symbol"},
                "scheme": "birkhoff",
                "horizon": 1 << 20,
                "params": {"eta": 0.1, "max_start": 10_000}
            })
        },
    },
];

/// Preset names and descriptions, in a fixed order.
pub fn list_presets() -> Vec<PresetInfo> {
    PRESETS.iter().map(|p| p.info).collect()
}

/// The preset's configuration document, including its own name.
pub fn preset_value(name: &str) -> Option<Value> {
    let preset = PRESETS.iter().find(|p| p.info.name == name)?;
    let mut value = (preset.build)();
    value
        .as_object_mut()?
        .insert("scenario".into(), Value::String(name.into()));
    Some(value)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_are_unique_and_ordered() {
        let names: Vec<_> = list_presets().into_iter().map(|p| p.name).collect();
        assert_eq!(names.len(), 12);
        let mut sorted = names.clone();
        sorted.dedup();
        assert_eq!(sorted.len(), names.len());
        assert_eq!(names[0], "shift-blocks-geometric");
        for required in [
            "shift-blocks-geometric",
            "folner-z2-fixedpoint",
            "rigidity-goldenmean",
        ] {
            assert!(names.contains(&required));
        }
        assert_eq!(preset_value("psi-bound").unwrap()["scenario"], "psi-bound");
        assert!(preset_value("missing").is_none());
    }
}
