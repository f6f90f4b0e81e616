//! Specification for mixing subshifts of finite type: any finite list of
//! admissible segments is realized by one admissible word, with short
//! connector words between consecutive segments.

use std::collections::VecDeque;

use super::{Symbol, TransitionMatrix, Word};
use crate::error::{Error, Result};

// Edge distances from every symbol to `target`; usize::MAX if unreachable.
fn distances_to(sft: &TransitionMatrix, target: Symbol) -> Vec<usize> {
    let n = sft.size();
    let mut dist = vec![usize::MAX; n];
    let mut queue = VecDeque::new();
    for s in 0..n as Symbol {
        if sft.allows(s, target) {
            dist[s as usize] = 1;
            queue.push_back(s);
        }
    }
    while let Some(v) = queue.pop_front() {
        for u in 0..n as Symbol {
            if sft.allows(u, v) && dist[u as usize] == usize::MAX {
                dist[u as usize] = dist[v as usize] + 1;
                queue.push_back(u);
            }
        }
    }
    dist
}

/// Shortest word `c` with `from · c · to` admissible; among shortest words,
/// the lexicographically smallest. `None` if `to` is unreachable.
pub fn connector(sft: &TransitionMatrix, from: Symbol, to: Symbol) -> Option<Word> {
    let dist = distances_to(sft, to);
    let mut remaining = *dist.get(from as usize)?;
    if remaining == usize::MAX {
        return None;
    }
    let mut word = Vec::with_capacity(remaining.saturating_sub(1));
    let mut at = from;
    while remaining > 1 {
        at = sft
            .successors(at)
            .find(|&w| dist[w as usize] == remaining - 1)
            .expect("BFS layer has a successor");
        word.push(at);
        remaining -= 1;
    }
    Some(word)
}

/// Shortest cycle word starting with `symbol`, lexicographically smallest
/// among shortest. `None` if `symbol` lies on no cycle.
pub fn shortest_cycle_through(sft: &TransitionMatrix, symbol: Symbol) -> Option<Word> {
    if (symbol as usize) >= sft.size() {
        return None;
    }
    if sft.allows(symbol, symbol) {
        return Some(vec![symbol]);
    }
    let mut best: Option<Word> = None;
    for next in sft.successors(symbol) {
        if let Some(tail) = connector(sft, next, symbol) {
            let mut cycle = vec![symbol, next];
            cycle.extend(tail);
            let better = match &best {
                None => true,
                Some(b) => (cycle.len(), &cycle) < (b.len(), b),
            };
            if better {
                best = Some(cycle);
            }
        }
    }
    best
}

/// Concatenates `segments` in order, joining them with the shortest
/// lexicographically smallest connectors. Connectors never exceed the
/// mixing exponent in length.
pub fn sft_specification_shadow(segments: &[Word], sft: &TransitionMatrix) -> Result<Word> {
    if !sft.is_mixing() {
        return Err(Error::NotMixing);
    }
    if let Some(index) = segments.iter().position(|s| !sft.admits(s)) {
        return Err(Error::BadSegment { index });
    }
    let mut out: Word = Vec::new();
    for seg in segments.iter().filter(|s| !s.is_empty()) {
        if let (Some(&last), Some(&first)) = (out.last(), seg.first()) {
            let bridge = connector(sft, last, first).expect("mixing shifts are strongly connected");
            out.extend(bridge);
        }
        out.extend_from_slice(seg);
    }
    Ok(out)
}
