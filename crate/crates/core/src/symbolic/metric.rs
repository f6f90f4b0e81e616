use serde::Serialize;

use super::SymbolicPoint;
use crate::fmt::ser_f64;

/// Truncated series `Σ_{n=1..depth} |x_n − y_n| / 2^n`, with coordinate
/// `n` read from symbol index `n − 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ShiftMetricValue {
    #[serde(serialize_with = "ser_f64")]
    pub value: f64,
    pub depth: usize,
    /// Bound on the neglected tail, `(size − 1) · 2^{−depth}`.
    #[serde(serialize_with = "ser_f64")]
    pub truncation_error: f64,
}

pub fn shift_metric_sum(x: &SymbolicPoint, y: &SymbolicPoint, depth: usize) -> ShiftMetricValue {
    let mut value = 0.0;
    let mut scale = 1.0;
    for (a, b) in x.iter().zip(y.iter()).take(depth) {
        scale *= 0.5;
        value += (a as f64 - b as f64).abs() * scale;
    }
    let size = x.alphabet_size().max(y.alphabet_size());
    ShiftMetricValue {
        value,
        depth,
        truncation_error: (size - 1) as f64 * 0.5f64.powi(depth as i32),
    }
}

/// `2^{−k}` for the first coordinate `k ≥ 1` where the points differ within
/// `depth`, and `0` if they agree that far.
pub fn mismatch_metric(x: &SymbolicPoint, y: &SymbolicPoint, depth: usize) -> f64 {
    x.iter()
        .zip(y.iter())
        .take(depth)
        .position(|(a, b)| a != b)
        .map_or(0.0, |k| 0.5f64.powi(k as i32 + 1))
}
