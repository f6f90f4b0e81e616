//! Lazily generated points and the block constructions of oscillating
//! points.

use std::cell::RefCell;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{
    connector, format_word, shortest_cycle_through, Alphabet, Symbol, TransitionMatrix, Word,
};
use crate::error::{Error, Result};
use crate::fmt::ser_f64;

/// Growth law for the run lengths `l_1, l_2, …` of a block schedule.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "law", rename_all = "snake_case")]
pub enum GrowthLaw {
    /// `l_i = round(ratio^{i−1})`, `ratio ≥ 1`.
    Geometric { ratio: f64 },
    /// `l_1 = 1`, `l_{i+1} = i · (l_1 + … + l_i)`.
    Superlinear,
}

/// Alternating runs of a low and a high block, the low block valued `α` and
/// the high block `β` under the schedule's observable.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BlockSchedule {
    #[serde(serialize_with = "ser_f64")]
    pub low_symbol_value: f64,
    #[serde(serialize_with = "ser_f64")]
    pub high_symbol_value: f64,
    pub lengths: GrowthLaw,
}

impl BlockSchedule {
    pub fn new(low: f64, high: f64, lengths: GrowthLaw) -> Result<Self> {
        let s = Self {
            low_symbol_value: low,
            high_symbol_value: high,
            lengths,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn geometric(ratio: f64) -> Result<Self> {
        Self::new(0.0, 1.0, GrowthLaw::Geometric { ratio })
    }

    pub fn superlinear() -> Self {
        Self {
            low_symbol_value: 0.0,
            high_symbol_value: 1.0,
            lengths: GrowthLaw::Superlinear,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let (a, b) = (self.low_symbol_value, self.high_symbol_value);
        if a == b {
            return Err(Error::DegenerateTarget(a));
        }
        if !(a < b) {
            return Err(Error::InvalidArgument(format!(
                "low value {a} must be below high value {b}"
            )));
        }
        if let GrowthLaw::Geometric { ratio } = self.lengths {
            if !(ratio >= 1.0 && ratio.is_finite()) {
                return Err(Error::InvalidArgument(format!(
                    "geometric ratio {ratio} must be >= 1"
                )));
            }
        }
        Ok(())
    }

    /// Run lengths `l_1, l_2, …`, saturating at `u64::MAX`.
    pub fn run_lengths(&self) -> RunLengths {
        RunLengths {
            law: self.lengths,
            index: 0,
            sum: 0,
            power: 1.0,
        }
    }

    /// Limits of `(liminf, limsup)` of the Birkhoff averages of the schedule
    /// observable along a point whose blocks are single symbols.
    pub fn expected_limits(&self) -> (f64, f64) {
        let (a, b) = (self.low_symbol_value, self.high_symbol_value);
        match self.lengths {
            GrowthLaw::Geometric { ratio } => (
                a + (b - a) / (ratio + 1.0),
                a + (b - a) * ratio / (ratio + 1.0),
            ),
            GrowthLaw::Superlinear => (a, b),
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunLengths {
    law: GrowthLaw,
    index: u64,
    sum: u64,
    power: f64,
}

impl Iterator for RunLengths {
    type Item = u64;

    fn next(&mut self) -> Option<u64> {
        let len = match self.law {
            GrowthLaw::Geometric { ratio } => {
                let len = self.power.round();
                self.power *= ratio;
                if len >= u64::MAX as f64 {
                    u64::MAX
                } else {
                    (len as u64).max(1)
                }
            }
            GrowthLaw::Superlinear if self.index == 0 => 1,
            GrowthLaw::Superlinear => self.index.saturating_mul(self.sum),
        };
        self.index += 1;
        self.sum = self.sum.saturating_add(len);
        Some(len)
    }
}

/// The two repeated blocks of an oscillating word and the connectors that
/// make their concatenation admissible. On the full shift the canonical
/// pattern is `low = 0`, `high = 1` with empty connectors.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockPattern {
    pub low: Word,
    pub high: Word,
    pub low_to_high: Word,
    pub high_to_low: Word,
}

impl BlockPattern {
    pub fn symbols(low: Symbol, high: Symbol) -> Self {
        Self {
            low: vec![low],
            high: vec![high],
            low_to_high: vec![],
            high_to_low: vec![],
        }
    }

    /// Pattern on an SFT from two cycle words; connectors are the shortest
    /// lexicographically smallest bridges.
    pub fn for_sft(sft: &TransitionMatrix, low: Word, high: Word) -> Result<Self> {
        for w in [&low, &high] {
            if !sft.admits_cycle(w) {
                return Err(Error::BadCycle(format_word(w, sft.size())));
            }
        }
        let bridge =
            |a: &Word, b: &Word| connector(sft, *a.last().unwrap(), b[0]).ok_or(Error::NotMixing);
        Ok(Self {
            low_to_high: bridge(&low, &high)?,
            high_to_low: bridge(&high, &low)?,
            low,
            high,
        })
    }

    /// Shortest cycles through symbols 0 and 1.
    pub fn default_for(sft: &TransitionMatrix) -> Result<Self> {
        let cycle = |s| {
            shortest_cycle_through(sft, s)
                .ok_or_else(|| Error::BadCycle(format!("no cycle through {s}")))
        };
        Self::for_sft(sft, cycle(0)?, cycle(1)?)
    }
}

#[derive(Debug)]
struct BlockWord {
    pattern: BlockPattern,
    schedule: BlockSchedule,
}

/// Symbol stream of an oscillating block word.
#[derive(Debug, Clone)]
struct BlockIter {
    word: Arc<BlockWord>,
    lengths: RunLengths,
    run: u64,
    reps_left: u64,
    pos: usize,
    in_connector: bool,
}

impl BlockIter {
    fn new(word: Arc<BlockWord>) -> Self {
        let mut lengths = word.schedule.run_lengths();
        let reps_left = lengths.next().expect("infinite");
        Self {
            word,
            lengths,
            run: 0,
            reps_left,
            pos: 0,
            in_connector: false,
        }
    }
}

impl Iterator for BlockIter {
    type Item = Symbol;

    fn next(&mut self) -> Option<Symbol> {
        let p = &self.word.pattern;
        loop {
            if self.in_connector {
                let bridge = if self.run % 2 == 1 {
                    &p.low_to_high
                } else {
                    &p.high_to_low
                };
                if self.pos < bridge.len() {
                    self.pos += 1;
                    return Some(bridge[self.pos - 1]);
                }
                self.in_connector = false;
                self.pos = 0;
                self.reps_left = self.lengths.next().expect("infinite");
            }
            if self.reps_left == 0 {
                self.run += 1;
                self.in_connector = true;
                self.pos = 0;
                continue;
            }
            let block = if self.run.is_multiple_of(2) {
                &p.low
            } else {
                &p.high
            };
            let s = block[self.pos];
            self.pos += 1;
            if self.pos == block.len() {
                self.pos = 0;
                self.reps_left -= 1;
            }
            return Some(s);
        }
    }
}

#[derive(Debug, Clone)]
enum Generator {
    Periodic(Word),
    Blocks(Arc<BlockWord>),
    Eventually { word: Word, tail: Symbol },
}

/// An infinite word: a finite prefix followed by a generated tail.
///
/// Block tails are cached as they are queried, so a point should stay on
/// one thread (it is `Send` but not `Sync`).
#[derive(Debug)]
pub struct SymbolicPoint {
    prefix: Word,
    generator: Generator,
    cache: RefCell<Option<(Word, BlockIter)>>,
}

impl Clone for SymbolicPoint {
    fn clone(&self) -> Self {
        Self {
            prefix: self.prefix.clone(),
            generator: self.generator.clone(),
            cache: RefCell::new(None),
        }
    }
}

impl SymbolicPoint {
    /// The periodic point `word word word …`.
    pub fn periodic(word: Word) -> Result<Self> {
        if word.is_empty() {
            return Err(Error::BadCycle(String::new()));
        }
        Ok(Self::from_parts(Vec::new(), Generator::Periodic(word)))
    }

    /// `word` followed by the constant tail `tail tail …`.
    pub fn eventually(word: Word, tail: Symbol) -> Self {
        Self::from_parts(Vec::new(), Generator::Eventually { word, tail })
    }

    /// `prefix` followed by the periodic repetition of `cycle`.
    pub fn with_periodic_tail(prefix: Word, cycle: Word) -> Result<Self> {
        if cycle.is_empty() {
            return Err(Error::BadCycle(String::new()));
        }
        Ok(Self::from_parts(prefix, Generator::Periodic(cycle)))
    }

    fn from_parts(prefix: Word, generator: Generator) -> Self {
        Self {
            prefix,
            generator,
            cache: RefCell::new(None),
        }
    }

    pub fn prefix(&self) -> &[Symbol] {
        &self.prefix
    }

    /// One more than the largest symbol the point can ever emit (at least 2).
    pub fn alphabet_size(&self) -> usize {
        let words: Vec<&[Symbol]> = match &self.generator {
            Generator::Periodic(w) => vec![w],
            Generator::Eventually { word, tail } => vec![word, std::slice::from_ref(tail)],
            Generator::Blocks(b) => {
                let p = &b.pattern;
                vec![&p.low, &p.high, &p.low_to_high, &p.high_to_low]
            }
        };
        std::iter::once(&self.prefix[..])
            .chain(words)
            .flat_map(|w| w.iter())
            .map(|&s| s as usize + 1)
            .max()
            .unwrap_or(0)
            .max(2)
    }

    /// Symbol at coordinate `i ≥ 0`.
    pub fn symbol(&self, i: usize) -> Symbol {
        if i < self.prefix.len() {
            return self.prefix[i];
        }
        let j = i - self.prefix.len();
        match &self.generator {
            Generator::Periodic(w) => w[j % w.len()],
            Generator::Eventually { word, tail } => word.get(j).copied().unwrap_or(*tail),
            Generator::Blocks(b) => {
                let mut cache = self.cache.borrow_mut();
                let (symbols, iter) =
                    cache.get_or_insert_with(|| (Vec::new(), BlockIter::new(b.clone())));
                while symbols.len() <= j {
                    symbols.push(iter.next().expect("infinite"));
                }
                symbols[j]
            }
        }
    }

    /// Fresh stream over all coordinates, bypassing the cache.
    pub fn iter(&self) -> Box<dyn Iterator<Item = Symbol> + '_> {
        let head = self.prefix.iter().copied();
        match &self.generator {
            Generator::Periodic(w) => Box::new(head.chain(w.iter().copied().cycle())),
            Generator::Eventually { word, tail } => Box::new(
                head.chain(word.iter().copied())
                    .chain(std::iter::repeat(*tail)),
            ),
            Generator::Blocks(b) => Box::new(head.chain(BlockIter::new(b.clone()))),
        }
    }

    pub fn take_word(&self, n: usize) -> Word {
        self.iter().take(n).collect()
    }

    /// `φ(σ^j x)` for `j < horizon`, where `φ` reads a window of `width`
    /// coordinates.
    pub fn observable_values<F>(&self, width: usize, f: F, horizon: usize) -> Vec<f64>
    where
        F: Fn(&[Symbol]) -> f64,
    {
        let width = width.max(1);
        let mut window: std::collections::VecDeque<Symbol> =
            std::collections::VecDeque::with_capacity(width);
        let mut it = self.iter();
        window.extend(it.by_ref().take(width));
        let mut buf = vec![0; width];
        let mut out = Vec::with_capacity(horizon);
        for _ in 0..horizon {
            for (slot, &s) in buf.iter_mut().zip(window.iter()) {
                *slot = s;
            }
            out.push(f(&buf));
            window.pop_front();
            window.push_back(it.next().expect("infinite"));
        }
        out
    }
}

/// Word `w` on an ambient SFT fixing the first `w.len()` coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct Cylinder {
    word: Word,
    sft: TransitionMatrix,
}

impl Cylinder {
    pub fn new(word: Word, sft: TransitionMatrix) -> Result<Self> {
        if !sft.admits(&word) {
            return Err(Error::BadCylinder(format_word(&word, sft.size())));
        }
        Ok(Self { word, sft })
    }

    pub fn full_shift(word: Word, alphabet: &Alphabet) -> Result<Self> {
        Self::new(word, TransitionMatrix::full_shift(alphabet.size))
    }

    pub fn word(&self) -> &[Symbol] {
        &self.word
    }

    pub fn depth(&self) -> usize {
        self.word.len()
    }

    pub fn sft(&self) -> &TransitionMatrix {
        &self.sft
    }

    /// All cylinders of exactly `depth` symbols, in lexicographic order.
    pub fn all_of_depth(sft: &TransitionMatrix, depth: usize) -> Vec<Cylinder> {
        let mut words: Vec<Word> = vec![Vec::new()];
        for _ in 0..depth {
            words = words
                .into_iter()
                .flat_map(|w| {
                    let succ: Vec<Symbol> = match w.last() {
                        None => (0..sft.size() as u16).map(|s| s as Symbol).collect(),
                        Some(&s) => sft.successors(s).collect(),
                    };
                    succ.into_iter().map(move |s| {
                        let mut next = w.clone();
                        next.push(s);
                        next
                    })
                })
                .collect();
        }
        words
            .into_iter()
            .map(|word| Cylinder {
                word,
                sft: sft.clone(),
            })
            .collect()
    }
}

/// Full-shift point made of alternating runs `0^{l_1} 1^{l_2} 0^{l_3} …`.
pub fn build_oscillating_point(
    schedule: &BlockSchedule,
    alphabet: &Alphabet,
) -> Result<SymbolicPoint> {
    if alphabet.size < 2 {
        return Err(Error::BadAlphabet(alphabet.size));
    }
    schedule.validate()?;
    let word = BlockWord {
        pattern: BlockPattern::symbols(0, 1),
        schedule: *schedule,
    };
    Ok(SymbolicPoint::from_parts(
        Vec::new(),
        Generator::Blocks(Arc::new(word)),
    ))
}

/// A point inside `cyl` whose tail is the oscillating block word, joined to
/// the cylinder word by a connector when the ambient shift requires one.
pub fn cylinder_irregular_witness(
    cyl: &Cylinder,
    schedule: &BlockSchedule,
) -> Result<SymbolicPoint> {
    let pattern = if cyl.sft.rows().iter().all(|r| r.iter().all(|&e| e == 1)) {
        BlockPattern::symbols(0, 1)
    } else {
        BlockPattern::default_for(&cyl.sft)?
    };
    cylinder_irregular_witness_with(cyl, schedule, pattern)
}

pub fn cylinder_irregular_witness_with(
    cyl: &Cylinder,
    schedule: &BlockSchedule,
    pattern: BlockPattern,
) -> Result<SymbolicPoint> {
    if !cyl.sft.admits(&cyl.word) {
        return Err(Error::BadCylinder(format_word(&cyl.word, cyl.sft.size())));
    }
    schedule.validate()?;
    let mut prefix = cyl.word.clone();
    if let Some(&last) = prefix.last() {
        let bridge = connector(&cyl.sft, last, pattern.low[0]).ok_or(Error::NotMixing)?;
        prefix.extend(bridge);
    }
    let word = BlockWord {
        pattern,
        schedule: *schedule,
    };
    Ok(SymbolicPoint::from_parts(
        prefix,
        Generator::Blocks(Arc::new(word)),
    ))
}
