//! Contractions versus deletions.
//!
//! `Φ` maps `x` to its prefix sums modulo `q` with a leading 0, so that `x_i ⊞ x_{i+1}` in `x`
//! becomes deleting `y_{i+1}` in `Φ(x)`. On words starting with `t` zeros, `t` contractions
//! correspond exactly to `t` deletions.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::channel::{contraction_ball, deletion_ball};
use crate::error::{domain, Result};
use crate::word::{wrap, Symbol, Word};

/// `x ∈ A_q(n, t)`: the first `t` symbols are zero.
pub fn in_a(x: &Word, t: usize) -> bool {
    x.len() >= t && x.symbols()[..t].iter().all(|&s| s == 0)
}

/// `y ∈ B_q(n, t)`: the first `t + 1` symbols are zero.
pub fn in_b(y: &Word, t: usize) -> bool {
    y.len() > t && y.symbols()[..=t].iter().all(|&s| s == 0)
}

/// `y_1 = 0`, `y_i = x_1 ⊞ … ⊞ x_{i−1}`.
pub fn phi(x: &Word, t: usize) -> Result<Word> {
    if !in_a(x, t) {
        return domain(format!("{x} does not start with {t} zeros"));
    }
    Ok(prefix_sums(x))
}

fn prefix_sums(x: &Word) -> Word {
    let q = x.q();
    let mut acc: Symbol = 0;
    let mut out = Vec::with_capacity(x.len() + 1);
    out.push(0);
    for &s in x.symbols() {
        acc = wrap(acc, s, q);
        out.push(acc);
    }
    Word::new(q, out).expect("symbols stay below q")
}

/// `x_i = y_{i+1} − y_i (mod q)`.
pub fn phi_inverse(y: &Word, t: usize) -> Result<Word> {
    if !in_b(y, t) {
        return domain(format!("{y} does not start with {} zeros", t + 1));
    }
    let q = y.q();
    let s = y.symbols();
    let out = s.windows(2).map(|w| ((w[1] as u32 + q - w[0] as u32) % q) as Symbol).collect();
    Word::new(q, out)
}

/// Whether `Φ` carries the `t`-contraction ball of `x` onto the `t`-deletion ball of `Φ(x)`.
pub fn equivalence_check(x: &Word, t: usize) -> Result<bool> {
    let y = phi(x, t)?;
    let image: BTreeSet<Word> = contraction_ball(x, t)?.iter().map(prefix_sums).collect();
    Ok(image == deletion_ball(&y, t)?)
}

/// How one contraction `x_i ⊞ x_{i+1}` changes the symbol counts.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum ContractionCase {
    /// One of the pair is 0, so the result equals deleting that zero.
    ZeroDeletion,
    /// Equal nonzero symbols `a a` become `c = 2a mod q`.
    Doubled { a: Symbol, c: Symbol },
    /// Distinct nonzero symbols `a b` become `c = a ⊞ b`.
    Mixed { a: Symbol, b: Symbol, c: Symbol },
}

impl ContractionCase {
    /// `N_s(x) − N_s(y)` for every symbol whose count changes.
    pub fn count_deltas(&self) -> Vec<(Symbol, i64)> {
        let mut d: Vec<(Symbol, i64)> = match *self {
            ContractionCase::ZeroDeletion => vec![(0, 1)],
            ContractionCase::Doubled { a, c } => vec![(a, 2), (c, -1)],
            ContractionCase::Mixed { a, b, c } => vec![(a, 1), (b, 1), (c, -1)],
        };
        d.sort_unstable();
        d
    }
}

pub fn classify_contraction_case(a: Symbol, b: Symbol, q: u32) -> Result<ContractionCase> {
    if u32::from(a) >= q || u32::from(b) >= q {
        return domain(format!("symbols {a}, {b} outside alphabet of size {q}"));
    }
    let c = wrap(a, b, q);
    Ok(if a == 0 || b == 0 {
        ContractionCase::ZeroDeletion
    } else if a == b {
        ContractionCase::Doubled { a, c }
    } else {
        ContractionCase::Mixed { a, b, c }
    })
}
