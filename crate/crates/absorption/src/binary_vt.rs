//! Binary Varshamov–Tenengolts codes. Over `Σ_2` an absorption never changes a symbol
//! (`0⊕b = b`, `1⊕1 = 1`), so it acts as a single deletion and VT codes correct it.

use serde::{Deserialize, Serialize};

use crate::error::{decode_failure, domain, Result};
use crate::stats::syn;
use crate::word::{Symbol, Word};

/// Parameters of `VT_a(n) = { c ∈ Σ_2^n : Syn(c) ≡ a (mod n+1) }`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct VtParams {
    pub n: usize,
    pub a: usize,
}

impl VtParams {
    pub fn new(n: usize, a: usize) -> Result<Self> {
        if a > n {
            return domain(format!("VT residue {a} must lie in [0, {n}]"));
        }
        Ok(Self { n, a })
    }
}

fn check_binary(w: &Word) -> Result<()> {
    if w.q() != 2 {
        return domain(format!("binary word expected, got alphabet size {}", w.q()));
    }
    Ok(())
}

pub fn vt_membership(c: &Word, p: VtParams) -> Result<bool> {
    check_binary(c)?;
    if c.len() != p.n {
        return domain(format!("word length {} differs from code length {}", c.len(), p.n));
    }
    Ok(syn(c.symbols()) % (p.n as u64 + 1) == p.a as u64)
}

/// Reinserts one bit into `y` so that the result has syndrome `residue` modulo `modulus`.
/// Works for any `modulus ≥ |y| + 2`; the result is verified before returning.
pub(crate) fn vt_reinsert(y: &[Symbol], residue: u64, modulus: u64) -> Result<Vec<Symbol>> {
    let n = y.len() as u64 + 1;
    if modulus < n + 1 {
        return domain(format!("modulus {modulus} too small for length {n}"));
    }
    let weight = y.iter().filter(|&&b| b == 1).count() as u64;
    let deficiency = (residue % modulus + modulus - syn(y) % modulus) % modulus;
    let mut out = Vec::with_capacity(y.len() + 1);
    if deficiency <= weight {
        // A 0 was deleted with `deficiency` ones to its right.
        let mut ones_right = weight;
        let mut placed = false;
        for &b in y {
            if !placed && ones_right == deficiency {
                out.push(0);
                placed = true;
            }
            out.push(b);
            ones_right -= u64::from(b);
        }
        if !placed {
            out.push(0);
        }
    } else {
        // A 1 was deleted with `deficiency − weight − 1` zeros to its left.
        let zeros_left = deficiency - weight - 1;
        let zeros = y.len() as u64 - weight;
        if zeros_left > zeros {
            return decode_failure("syndrome deficiency exceeds available zeros");
        }
        let mut seen = 0u64;
        let mut placed = false;
        for &b in y {
            if !placed && seen == zeros_left {
                out.push(1);
                placed = true;
            }
            out.push(b);
            seen += u64::from(b == 0);
        }
        if !placed {
            out.push(1);
        }
    }
    if syn(&out) % modulus != residue % modulus {
        return decode_failure("reinsertion does not reach the target syndrome");
    }
    Ok(out)
}

/// Classical single-deletion decoder for `VT_a(n)`.
pub fn vt_decode_deletion(y: &Word, p: VtParams) -> Result<Word> {
    check_binary(y)?;
    if y.len() + 1 != p.n {
        return domain(format!("received length {} but code length is {}", y.len(), p.n));
    }
    let out = vt_reinsert(y.symbols(), p.a as u64, p.n as u64 + 1)?;
    Ok(Word::from_raw(2, out))
}

/// A single absorption on a binary word is a single deletion.
pub fn absorption_decode_binary(y: &Word, p: VtParams) -> Result<Word> {
    vt_decode_deletion(y, p)
}

/// Number of check bits for a message of length `m`: the `r` with `r = ⌈log2(m + r + 1)⌉`.
pub fn vt_redundancy(m: usize) -> usize {
    let mut r = 0usize;
    while (1usize << r) < m + r + 1 {
        r += 1;
    }
    r
}

/// Systematic encoder into `VT_0(N)`: check bits live at positions `1, 2, 4, …`.
pub fn vt_systematic_encode(u: &Word) -> Result<Word> {
    check_binary(u)?;
    let m = u.len();
    let r = vt_redundancy(m);
    let n = m + r;
    let mut c = vec![0 as Symbol; n];
    let mut msg = u.symbols().iter();
    for (i, slot) in c.iter_mut().enumerate() {
        if !(i + 1).is_power_of_two() {
            *slot = *msg.next().expect("message fills the non-check positions");
        }
    }
    let modulus = n as u64 + 1;
    let mut deficiency = (modulus - syn(&c) % modulus) % modulus;
    for k in (0..r).rev() {
        let pos = 1u64 << k;
        if deficiency >= pos {
            c[pos as usize - 1] = 1;
            deficiency -= pos;
        }
    }
    debug_assert_eq!(deficiency, 0);
    Ok(Word::from_raw(2, c))
}

/// Inverse of [`vt_systematic_encode`].
pub fn vt_systematic_decode(c: &Word) -> Result<Word> {
    check_binary(c)?;
    let n = c.len();
    let m = (0..=n).find(|&m| m + vt_redundancy(m) == n);
    let Some(_) = m else {
        return domain(format!("{n} is not a systematic VT code length"));
    };
    if !syn(c.symbols()).is_multiple_of(n as u64 + 1) {
        return decode_failure("word is not in VT_0");
    }
    let msg = c
        .symbols()
        .iter()
        .enumerate()
        .filter(|(i, _)| !(i + 1).is_power_of_two())
        .map(|(_, &b)| b)
        .collect();
    Ok(Word::from_raw(2, msg))
}
