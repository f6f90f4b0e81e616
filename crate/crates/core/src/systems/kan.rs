//! Kan's skew product on the annulus `S¹ × [0, 1]`:
//!
//! ```text
//! T(x, t) = (3x mod 1, t + t(1 − t)/32 · cos 2πx)
//! ```
//!
//! Both boundary circles are invariant and carry a physical measure; their
//! basins are intermingled. Classification iterates until `t` crosses one
//! of two fixed thresholds.

use rand::RngCore;
use rand::SeedableRng;
use rand_xoshiro::Xoshiro256StarStar;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fmt::ser_f64;

pub const KAN_LOW_THRESHOLD: f64 = 0.01;
pub const KAN_HIGH_THRESHOLD: f64 = 0.99;
pub const KAN_DEFAULT_MAX_ITER: usize = 100_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KanState {
    #[serde(serialize_with = "ser_f64")]
    pub x: f64,
    #[serde(serialize_with = "ser_f64")]
    pub t: f64,
}

impl KanState {
    pub fn new(x: f64, t: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&x) || !(0.0..=1.0).contains(&t) {
            return Err(Error::InvalidArgument(format!(
                "({x}, {t}) is outside [0,1) x [0,1]"
            )));
        }
        Ok(Self { x, t })
    }
}

pub fn kan_step(s: KanState) -> KanState {
    let x = (3.0 * s.x).rem_euclid(1.0);
    let t = s.t + s.t * (1.0 - s.t) / 32.0 * (std::f64::consts::TAU * s.x).cos();
    // rem_euclid can round up to exactly 1.0 for x just below one third
    KanState {
        x: if x >= 1.0 { 0.0 } else { x },
        t,
    }
}

pub fn kan_orbit(s: KanState, steps: usize) -> Vec<KanState> {
    std::iter::successors(Some(s), |&p| Some(kan_step(p)))
        .take(steps)
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Basin {
    B0,
    B1,
    #[serde(rename = "UNDECIDED")]
    Undecided,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct BasinLabel {
    pub basin: Basin,
    pub iterations_used: usize,
}

/// Iterates until `t < low` (B0), `t > high` (B1) or `max_iter` steps have
/// been spent (UNDECIDED). The starting state counts as iteration zero.
pub fn kan_basin_classify(s: KanState, max_iter: usize, (low, high): (f64, f64)) -> BasinLabel {
    let mut state = s;
    for i in 0..=max_iter {
        if state.t < low {
            return BasinLabel {
                basin: Basin::B0,
                iterations_used: i,
            };
        }
        if state.t > high {
            return BasinLabel {
                basin: Basin::B1,
                iterations_used: i,
            };
        }
        if i < max_iter {
            state = kan_step(state);
        }
    }
    BasinLabel {
        basin: Basin::Undecided,
        iterations_used: max_iter,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KanScanConfig {
    pub grid: usize,
    pub samples_per_box: usize,
    pub max_iter: usize,
    #[serde(serialize_with = "ser_f64")]
    pub low: f64,
    #[serde(serialize_with = "ser_f64")]
    pub high: f64,
    pub seed: u64,
}

impl Default for KanScanConfig {
    fn default() -> Self {
        Self {
            grid: 8,
            samples_per_box: 200,
            max_iter: KAN_DEFAULT_MAX_ITER,
            low: KAN_LOW_THRESHOLD,
            high: KAN_HIGH_THRESHOLD,
            seed: 7,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct KanBoxRow {
    pub box_i: usize,
    pub box_j: usize,
    #[serde(rename = "n_B0")]
    pub n_b0: usize,
    #[serde(rename = "n_B1")]
    pub n_b1: usize,
    pub n_undecided: usize,
}

// Uniform double in [0, 1) from the top 53 bits.
fn unit(rng: &mut Xoshiro256StarStar) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Classifies `samples_per_box` uniform samples in every box of a
/// `grid × grid` partition of the annulus (`box_i` along `x`, `box_j` along
/// `t`). Samples are drawn box by box in row-major order from xoshiro256**
/// seeded through SplitMix64, `x` before `t`.
pub fn kan_scan(cfg: &KanScanConfig) -> Result<Vec<KanBoxRow>> {
    if cfg.grid == 0 || cfg.samples_per_box == 0 {
        return Err(Error::InvalidArgument(
            "grid and samples_per_box must be positive".into(),
        ));
    }
    if !(0.0 < cfg.low && cfg.low < cfg.high && cfg.high < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "thresholds ({}, {}) out of order",
            cfg.low, cfg.high
        )));
    }
    let mut rng = Xoshiro256StarStar::seed_from_u64(cfg.seed);
    let g = cfg.grid as f64;
    let mut rows = Vec::with_capacity(cfg.grid * cfg.grid);
    for box_i in 0..cfg.grid {
        for box_j in 0..cfg.grid {
            let mut row = KanBoxRow {
                box_i,
                box_j,
                n_b0: 0,
                n_b1: 0,
                n_undecided: 0,
            };
            for _ in 0..cfg.samples_per_box {
                let x = (box_i as f64 + unit(&mut rng)) / g;
                let t = (box_j as f64 + unit(&mut rng)) / g;
                let s = KanState {
                    x: x.min(1.0 - f64::EPSILON / 2.0),
                    t,
                };
                match kan_basin_classify(s, cfg.max_iter, (cfg.low, cfg.high)).basin {
                    Basin::B0 => row.n_b0 += 1,
                    Basin::B1 => row.n_b1 += 1,
                    Basin::Undecided => row.n_undecided += 1,
                }
            }
            rows.push(row);
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn step_examples() {
        assert_eq!(
            kan_step(KanState { x: 0.0, t: 0.0 }),
            KanState { x: 0.0, t: 0.0 }
        );
        let s = kan_step(KanState { x: 0.25, t: 0.5 });
        assert_eq!(s.x, 0.75);
        assert!((s.t - 0.5).abs() < 1e-17);
        assert_eq!(
            kan_step(KanState { x: 0.0, t: 0.5 }),
            KanState {
                x: 0.0,
                t: 0.5078125
            }
        );
    }

    #[test]
    fn boundary_circles_are_invariant() {
        for i in 0..100 {
            let x = i as f64 / 100.0;
            for t in [0.0, 1.0] {
                let orbit = kan_orbit(KanState { x, t }, 200);
                assert!(orbit.iter().all(|s| s.t == t));
            }
            let interior = kan_orbit(KanState { x, t: 0.3 }, 5000);
            assert!(interior
                .iter()
                .all(|s| s.t > 0.0 && s.t < 1.0 && (0.0..1.0).contains(&s.x)));
        }
    }

    #[test]
    fn boundary_points_classify_immediately() {
        for x in [0.0, 0.3, 0.9] {
            let b0 = kan_basin_classify(KanState { x, t: 0.0 }, 10, (0.01, 0.99));
            assert_eq!(
                b0,
                BasinLabel {
                    basin: Basin::B0,
                    iterations_used: 0
                }
            );
            let b1 = kan_basin_classify(KanState { x, t: 1.0 }, 10, (0.01, 0.99));
            assert_eq!(
                b1,
                BasinLabel {
                    basin: Basin::B1,
                    iterations_used: 0
                }
            );
        }
        let u = kan_basin_classify(KanState { x: 0.1, t: 0.5 }, 3, (0.01, 0.99));
        assert_eq!(u.basin, Basin::Undecided);
    }

    #[test]
    fn scan_is_deterministic() {
        let cfg = KanScanConfig {
            grid: 2,
            samples_per_box: 3,
            max_iter: 2000,
            ..Default::default()
        };
        let a = kan_scan(&cfg).unwrap();
        assert_eq!(a, kan_scan(&cfg).unwrap());
        assert_eq!(a.len(), 4);
        assert!(a.iter().all(|r| r.n_b0 + r.n_b1 + r.n_undecided == 3));
        assert!(kan_scan(&KanScanConfig {
            low: 0.5,
            high: 0.4,
            ..cfg
        })
        .is_err());
    }

    #[test]
    fn state_validation() {
        assert!(KanState::new(1.0, 0.5).is_err());
        assert!(KanState::new(0.5, 1.5).is_err());
        assert!(KanState::new(0.5, 1.0).is_ok());
    }
}
