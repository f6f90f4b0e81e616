use serde::{Serialize, Serializer};

use super::Symbol;
use crate::error::{Error, Result};

/// Square 0/1 matrix of allowed transitions `i → j`.
///
/// Construction rejects stranded symbols (empty rows or columns) and records
/// the mixing exponent: the least `m` with `A^m` entrywise positive, if any.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransitionMatrix {
    size: usize,
    allowed: Vec<bool>,
    mixing_exponent: Option<usize>,
}

impl Serialize for TransitionMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.rows().serialize(s)
    }
}

impl TransitionMatrix {
    pub fn new(rows: Vec<Vec<u8>>) -> Result<Self> {
        let size = rows.len();
        if size == 0 {
            return Err(Error::InvalidArgument("transition matrix is empty".into()));
        }
        if size > 256 {
            return Err(Error::InvalidArgument(
                "at most 256 symbols are supported".into(),
            ));
        }
        let mut allowed = Vec::with_capacity(size * size);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != size {
                return Err(Error::InvalidArgument(format!(
                    "row {i} has length {}",
                    row.len()
                )));
            }
            for &e in row {
                match e {
                    0 => allowed.push(false),
                    1 => allowed.push(true),
                    _ => {
                        return Err(Error::InvalidArgument(format!(
                            "entry {e} in row {i} is not 0/1"
                        )))
                    }
                }
            }
        }
        for i in 0..size {
            if !(0..size).any(|j| allowed[i * size + j]) {
                return Err(Error::InvalidArgument(format!(
                    "symbol {i} has no successor"
                )));
            }
            if !(0..size).any(|j| allowed[j * size + i]) {
                return Err(Error::InvalidArgument(format!(
                    "symbol {i} has no predecessor"
                )));
            }
        }
        let mixing_exponent = primitive_exponent(size, &allowed);
        Ok(Self {
            size,
            allowed,
            mixing_exponent,
        })
    }

    pub fn full_shift(size: usize) -> Self {
        Self::new(vec![vec![1; size]; size]).expect("full shift is valid")
    }

    /// Binary shift forbidding the word `11`.
    pub fn golden_mean() -> Self {
        Self::new(vec![vec![1, 1], vec![1, 0]]).expect("golden mean shift is valid")
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn allows(&self, from: Symbol, to: Symbol) -> bool {
        let (i, j) = (from as usize, to as usize);
        i < self.size && j < self.size && self.allowed[i * self.size + j]
    }

    pub fn successors(&self, from: Symbol) -> impl Iterator<Item = Symbol> + '_ {
        (0..self.size)
            .filter(move |&j| self.allowed[from as usize * self.size + j])
            .map(|j| j as Symbol)
    }

    pub fn is_mixing(&self) -> bool {
        self.mixing_exponent.is_some()
    }

    pub fn mixing_exponent(&self) -> Option<usize> {
        self.mixing_exponent
    }

    /// Every symbol is in range and every adjacent pair is allowed.
    pub fn admits(&self, word: &[Symbol]) -> bool {
        word.iter().all(|&s| (s as usize) < self.size)
            && word.windows(2).all(|w| self.allows(w[0], w[1]))
    }

    /// Like [`admits`](Self::admits), also requiring the wrap-around pair,
    /// so that the word repeats forever.
    pub fn admits_cycle(&self, word: &[Symbol]) -> bool {
        !word.is_empty() && self.admits(word) && self.allows(word[word.len() - 1], word[0])
    }

    pub fn rows(&self) -> Vec<Vec<u8>> {
        self.allowed
            .chunks(self.size)
            .map(|r| r.iter().map(|&b| b as u8).collect())
            .collect()
    }
}

// Least m with A^m > 0. Wielandt: a primitive n×n matrix reaches positivity
// by m = (n-1)^2 + 1.
fn primitive_exponent(n: usize, a: &[bool]) -> Option<usize> {
    let bound = (n - 1) * (n - 1) + 1;
    let mut power = a.to_vec();
    for m in 1..=bound {
        if power.iter().all(|&b| b) {
            return Some(m);
        }
        let mut next = vec![false; n * n];
        for i in 0..n {
            for k in 0..n {
                if power[i * n + k] {
                    for j in 0..n {
                        next[i * n + j] |= a[k * n + j];
                    }
                }
            }
        }
        power = next;
    }
    None
}

/// Finite truncation of a countable Markov shift.
#[derive(Debug, Clone, PartialEq)]
pub struct Truncation {
    pub matrix: TransitionMatrix,
    /// Original state index of each row of `matrix`.
    pub states: Vec<usize>,
}

/// Restricts a countable adjacency rule to states `0..level` and prunes
/// stranded states until every survivor has in- and out-degree at least one.
pub fn markov_truncation<F>(adjacency_rule: F, level: usize) -> Result<Truncation>
where
    F: Fn(usize, usize) -> bool,
{
    if level < 2 {
        return Err(Error::InvalidArgument(format!(
            "truncation level {level} < 2"
        )));
    }
    let mut alive = vec![true; level];
    loop {
        let mut changed = false;
        for i in 0..level {
            if !alive[i] {
                continue;
            }
            let out = (0..level).any(|j| alive[j] && adjacency_rule(i, j));
            let inc = (0..level).any(|j| alive[j] && adjacency_rule(j, i));
            if !(out && inc) {
                alive[i] = false;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    let states: Vec<usize> = (0..level).filter(|&i| alive[i]).collect();
    if states.is_empty() {
        return Err(Error::EmptyTruncation(level));
    }
    let rows = states
        .iter()
        .map(|&i| states.iter().map(|&j| adjacency_rule(i, j) as u8).collect())
        .collect();
    Ok(Truncation {
        matrix: TransitionMatrix::new(rows)?,
        states,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn golden_mean_is_mixing_with_exponent_two() {
        let g = TransitionMatrix::golden_mean();
        assert_eq!(g.mixing_exponent(), Some(2));
        assert!(g.admits(&[0, 1, 0, 0, 1]));
        assert!(!g.admits(&[0, 1, 1]));
        assert!(g.admits_cycle(&[0, 1]));
        assert!(!g.admits_cycle(&[1]));
    }

    #[test]
    fn periodic_matrix_is_not_mixing() {
        let swap = TransitionMatrix::new(vec![vec![0, 1], vec![1, 0]]).unwrap();
        assert_eq!(swap.mixing_exponent(), None);
        assert_eq!(TransitionMatrix::full_shift(3).mixing_exponent(), Some(1));
    }

    #[test]
    fn stranded_symbols_are_rejected() {
        assert!(TransitionMatrix::new(vec![vec![1, 0], vec![1, 0]]).is_err());
        assert!(TransitionMatrix::new(vec![vec![1, 2], vec![1, 0]]).is_err());
        assert!(TransitionMatrix::new(vec![vec![1, 1]]).is_err());
    }

    #[test]
    fn serializes_as_rows() {
        let json = serde_json::to_string(&TransitionMatrix::golden_mean()).unwrap();
        assert_eq!(json, "[[1,1],[1,0]]");
    }

    #[test]
    fn full_rule_truncates_to_all_ones() {
        let t = markov_truncation(|_, _| true, 3).unwrap();
        assert_eq!(t.matrix.rows(), vec![vec![1; 3]; 3]);
        assert_eq!(t.states, vec![0, 1, 2]);
    }

    #[test]
    fn renewal_rule_truncation() {
        // 0 → anything, i → i-1.
        let renewal = |i: usize, j: usize| i == 0 || j + 1 == i;
        let t = markov_truncation(renewal, 4).unwrap();
        let expected = vec![
            vec![1, 1, 1, 1],
            vec![1, 0, 0, 0],
            vec![0, 1, 0, 0],
            vec![0, 0, 1, 0],
        ];
        assert_eq!(t.matrix.rows(), expected);
        assert!(t.matrix.is_mixing());
    }

    #[test]
    fn escaping_states_are_pruned() {
        // i → i+1 only, plus a loop at 0: every state above 0 eventually strands.
        let rule = |i: usize, j: usize| j == i + 1 || (i == 0 && j == 0);
        let t = markov_truncation(rule, 5).unwrap();
        assert_eq!(t.states, vec![0]);
        assert_eq!(t.matrix.rows(), vec![vec![1]]);
    }

    #[test]
    fn edgeless_rule_is_empty() {
        assert_eq!(
            markov_truncation(|_, _| false, 4).unwrap_err().code(),
            "EMPTY_TRUNCATION"
        );
        assert!(markov_truncation(|_, _| true, 1).is_err());
    }
}
