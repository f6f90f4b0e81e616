//! One-sided shift spaces over finite alphabets.
//!
//! Points are lazily generated infinite words; observables are functions of
//! a finite window of coordinates. Subshifts of finite type are described by
//! a 0/1 transition matrix, and countable Markov shifts enter only through
//! finite truncations of their adjacency rule.

mod metric;
mod point;
mod rigidity;
mod sft;
mod shadow;

pub use metric::{mismatch_metric, shift_metric_sum, ShiftMetricValue};
pub use point::{
    build_oscillating_point, cylinder_irregular_witness, cylinder_irregular_witness_with,
    BlockPattern, BlockSchedule, Cylinder, GrowthLaw, SymbolicPoint,
};
pub use rigidity::{
    periodic_average, primitive_cycles, rigidity_test, PeriodicWitness, RigidityResult,
    RigidityVerdict, WindowObservable,
};
pub use sft::{markov_truncation, TransitionMatrix, Truncation};
pub use shadow::{connector, sft_specification_shadow, shortest_cycle_through};

use serde::Serialize;

use crate::error::{Error, Result};

pub type Symbol = u8;
pub type Word = Vec<Symbol>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Alphabet {
    pub size: usize,
}

impl Alphabet {
    pub fn new(size: usize) -> Result<Self> {
        if !(2..=256).contains(&size) {
            return Err(Error::BadAlphabet(size));
        }
        Ok(Self { size })
    }

    pub fn binary() -> Self {
        Self { size: 2 }
    }
}

/// Renders a word as digits when the alphabet has at most ten symbols, and
/// as comma-separated indices otherwise.
pub fn format_word(word: &[Symbol], alphabet_size: usize) -> String {
    if alphabet_size <= 10 {
        word.iter().map(|s| char::from(b'0' + s)).collect()
    } else {
        word.iter()
            .map(|s| s.to_string())
            .collect::<Vec<_>>()
            .join(",")
    }
}

/// Inverse of [`format_word`]: a string containing a comma is read as
/// indices, anything else as one digit per symbol.
pub fn parse_word(text: &str) -> Result<Word> {
    let text = text.trim();
    if text.is_empty() {
        return Ok(Vec::new());
    }
    let bad = || Error::InvalidArgument(format!("malformed word {text:?}"));
    if text.contains(',') {
        text.split(',')
            .map(|t| t.trim().parse::<Symbol>().map_err(|_| bad()))
            .collect()
    } else {
        text.chars()
            .map(|c| c.to_digit(10).map(|d| d as Symbol).ok_or_else(bad))
            .collect()
    }
}
