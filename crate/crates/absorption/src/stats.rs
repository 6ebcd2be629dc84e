//! Per-word statistics shared by every construction. Positions are 1-based in all formulas.

use serde::Serialize;

use crate::word::{Symbol, Word};

/// `Σ i·z_i` over 1-based positions.
pub fn vt_syndrome(z: &Word) -> u64 {
    syn(z.symbols())
}

pub(crate) fn syn(s: &[Symbol]) -> u64 {
    s.iter().enumerate().map(|(i, &v)| (i as u64 + 1) * u64::from(v)).sum()
}

/// Number of index pairs `i < j` with `z_i > z_j`.
pub fn inversions(z: &Word) -> u64 {
    inv(z.symbols(), z.q())
}

pub(crate) fn inv(s: &[Symbol], q: u32) -> u64 {
    // Running histogram of symbols seen so far; each new symbol pairs with every larger one.
    let mut seen = vec![0u64; q as usize];
    let mut total = 0u64;
    for &v in s {
        total += seen[v as usize + 1..].iter().sum::<u64>();
        seen[v as usize] += 1;
    }
    total
}

/// Binary word of length `|z| − 1`: position `i` is 1 when `z_{i+1} ≥ z_i`.
pub fn descent_map(z: &Word) -> Word {
    Word::from_raw(2, descent(z.symbols()))
}

pub(crate) fn descent(s: &[Symbol]) -> Vec<Symbol> {
    s.windows(2).map(|p| Symbol::from(p[1] >= p[0])).collect()
}

/// Binary word marking the positions holding `q − 1`.
pub fn location_sequence(x: &Word) -> Word {
    let top = x.top();
    Word::from_raw(2, x.symbols().iter().map(|&v| Symbol::from(v == top)).collect())
}

/// `N_a` for every symbol `a` of the alphabet.
pub fn symbol_counts(x: &Word) -> Vec<usize> {
    counts(x.symbols(), x.q())
}

pub(crate) fn counts(s: &[Symbol], q: u32) -> Vec<usize> {
    let mut c = vec![0usize; q as usize];
    for &v in s {
        c[v as usize] += 1;
    }
    c
}

/// Number of maximal runs of zeros.
pub fn zero_run_count(x: &Word) -> usize {
    let s = x.symbols();
    (0..s.len()).filter(|&i| s[i] == 0 && (i == 0 || s[i - 1] != 0)).count()
}

/// All statistics of one word at once.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StatVector {
    pub syn: u64,
    pub inv: u64,
    pub counts: Vec<usize>,
    pub r0: usize,
}

impl StatVector {
    pub fn of(x: &Word) -> Self {
        Self {
            syn: vt_syndrome(x),
            inv: inversions(x),
            counts: symbol_counts(x),
            r0: zero_run_count(x),
        }
    }
}
