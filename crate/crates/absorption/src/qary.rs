//! The basic single-absorption code `C(n; s, t, d)` over `Σ_q`, `q ≥ 3`.
//!
//! A codeword is pinned down by five families of congruences: symbol counts modulo 4,
//! the descent-map syndrome, inversion parity, the VT syndrome modulo `q·n`, and the
//! syndrome of the location sequence modulo `2n − 3`. [`BlockSyndrome`] bundles them so
//! the same decoder also serves blocks of the improved code, where the moduli come from a
//! length `m` that may exceed the block length.

use serde::{Deserialize, Serialize};

use crate::binary_vt::vt_reinsert;
use crate::error::{decode_failure, domain, Error, Result};
use crate::stats::{counts, descent, inv, syn};
use crate::word::{sat, Symbol, Word};

/// Parameters `(s, t1, t2, d1, d2)` of `C(n; s, t, d)`. `s` holds `s_0 … s_{q−2}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BasicParams {
    pub q: u32,
    pub n: usize,
    pub s: Vec<u8>,
    pub t1: usize,
    pub t2: u8,
    pub d1: usize,
    pub d2: usize,
}

impl BasicParams {
    pub fn new(q: u32, n: usize, s: Vec<u8>, t1: usize, t2: u8, d1: usize, d2: usize) -> Result<Self> {
        let p = Self { q, n, s, t1, t2, d1, d2 };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let (q, n) = (self.q, self.n);
        if !(3..=crate::word::MAX_Q).contains(&q) {
            return domain(format!("the basic code needs 3 <= q <= 256, got {q}"));
        }
        if n < 3 {
            return domain(format!("the basic code needs n >= 3, got {n}"));
        }
        if self.s.len() != q as usize - 1 || self.s.iter().any(|&v| v >= 4) {
            return domain("s must hold q-1 residues modulo 4");
        }
        if self.t1 >= n || self.t2 >= 2 || self.d1 >= q as usize * n || self.d2 >= 2 * n - 3 {
            return domain("a residue lies outside its modulus");
        }
        Ok(())
    }

    /// The parameter tuple whose code contains `x`.
    pub fn of_word(x: &Word) -> Result<Self> {
        let b = BlockSyndrome::of(x, x.len())?;
        Ok(Self {
            q: x.q(),
            n: x.len(),
            s: b.counts.clone(),
            t1: b.alpha_syn as usize,
            t2: b.inv_parity,
            d1: b.syn as usize,
            d2: b.loc_syn as usize,
        })
    }

    /// `s_{q−1} = (n − Σ s_a) mod 4`.
    pub fn s_top(&self) -> u8 {
        derived_top_count(&self.s, self.n)
    }

    pub fn syndrome(&self) -> BlockSyndrome {
        BlockSyndrome {
            q: self.q,
            m: self.n,
            counts: self.s.clone(),
            alpha_syn: self.t1 as u64,
            inv_parity: self.t2,
            syn: self.d1 as u64,
            loc_syn: self.d2 as u64,
        }
    }

    /// Number of distinct parameter tuples for `(q, n)`.
    pub fn class_count(q: u32, n: usize) -> u64 {
        4u64.pow(q - 1) * n as u64 * 2 * (q as u64 * n as u64) * (2 * n as u64 - 3)
    }
}

fn derived_top_count(s: &[u8], len: usize) -> u8 {
    let sum: usize = s.iter().map(|&v| v as usize).sum();
    ((len % 4 + 4 * s.len() - sum % 4 + 4) % 4) as u8
}

/// The congruence fingerprint of a word with moduli taken from `m`:
/// `(N_a mod 4)_{a<q−1}`, `Syn(α) mod m`, `Inv mod 2`, `Syn mod q·m`, `Syn(P) mod 2m − 3`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BlockSyndrome {
    pub q: u32,
    pub m: usize,
    pub counts: Vec<u8>,
    pub alpha_syn: u64,
    pub inv_parity: u8,
    pub syn: u64,
    pub loc_syn: u64,
}

impl BlockSyndrome {
    pub fn of(z: &Word, m: usize) -> Result<Self> {
        if m < 3 {
            return domain(format!("syndrome modulus length must be at least 3, got {m}"));
        }
        Ok(Self::of_symbols(z.symbols(), z.q(), m))
    }

    pub(crate) fn of_symbols(z: &[Symbol], q: u32, m: usize) -> Self {
        let m64 = m as u64;
        let top = (q - 1) as Symbol;
        let loc: Vec<Symbol> = z.iter().map(|&v| Symbol::from(v == top)).collect();
        let c = counts(z, q);
        Self {
            q,
            m,
            counts: c[..q as usize - 1].iter().map(|&v| (v % 4) as u8).collect(),
            alpha_syn: syn(&descent(z)) % m64,
            inv_parity: (inv(z, q) % 2) as u8,
            syn: syn(z) % (q as u64 * m64),
            loc_syn: syn(&loc) % (2 * m64 - 3),
        }
    }

    /// The all-zero fingerprint, the identity for [`BlockSyndrome::add`].
    pub fn zero(q: u32, m: usize) -> Self {
        Self { q, m, counts: vec![0; q as usize - 1], alpha_syn: 0, inv_parity: 0, syn: 0, loc_syn: 0 }
    }

    fn moduli(&self) -> (u64, u64, u64) {
        let m = self.m as u64;
        (m, self.q as u64 * m, 2 * m - 3)
    }

    /// Component-wise sum over the residue rings.
    pub fn add(&self, other: &Self) -> Self {
        self.combine(other, false)
    }

    /// Component-wise difference over the residue rings.
    pub fn sub(&self, other: &Self) -> Self {
        self.combine(other, true)
    }

    fn combine(&self, other: &Self, negate: bool) -> Self {
        debug_assert_eq!((self.q, self.m), (other.q, other.m));
        let (ma, ms, ml) = self.moduli();
        let op = |a: u64, b: u64, m: u64| if negate { (a + m - b % m) % m } else { (a + b) % m };
        Self {
            q: self.q,
            m: self.m,
            counts: self
                .counts
                .iter()
                .zip(&other.counts)
                .map(|(&a, &b)| op(a.into(), b.into(), 4) as u8)
                .collect(),
            alpha_syn: op(self.alpha_syn, other.alpha_syn, ma),
            inv_parity: op(self.inv_parity.into(), other.inv_parity.into(), 2) as u8,
            syn: op(self.syn, other.syn, ms),
            loc_syn: op(self.loc_syn, other.loc_syn, ml),
        }
    }
}

/// Which kind of absorption the count residues reveal.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CaseClassification {
    /// One `0` disappeared: the merged pair contained a zero.
    ZeroInvolved,
    /// One copy of the payload symbol disappeared: the pair was `{a, q−1}`, or the final
    /// symbol was dropped.
    MaxInvolved(Symbol),
    /// The pair was `aa` with `0 < a < q−1`.
    DoubledSymbol(Symbol),
    /// The pair was `{a, b}`, `a < b`, both strictly inside the alphabet.
    DistinctPair(Symbol, Symbol),
}

impl CaseClassification {
    /// The symbol whose deletion explains `y`, for the deletion-like rows.
    pub fn deleted_symbol(self) -> Option<Symbol> {
        match self {
            Self::ZeroInvolved => Some(0),
            Self::MaxInvolved(a) => Some(a),
            _ => None,
        }
    }
}

/// Matches `(N_a(y) − s_a) mod 4` against the four table rows.
pub(crate) fn classify_residues(y: &[Symbol], q: u32, s: &[u8], len: usize) -> Result<CaseClassification> {
    let top = derived_top_count(s, len);
    let c = counts(y, q);
    let diff: Vec<u8> = (0..q as usize)
        .map(|a| {
            let sa = if a + 1 == q as usize { top } else { s[a] };
            ((c[a] % 4) as u8 + 4 - sa) % 4
        })
        .collect();
    let with = |r: u8| -> Vec<Symbol> { (0..q as usize).filter(|&a| diff[a] == r).map(|a| a as Symbol).collect() };
    let (ones, twos, threes) = (with(1), with(2), with(3));
    let inconsistent = || Err(Error::Inconsistent(format!("count residues {diff:?} match no absorption case")));
    let inner = |a: Symbol| a > 0 && u32::from(a) < q - 1;
    match (ones.as_slice(), twos.as_slice(), threes.as_slice()) {
        ([], [], [0]) => Ok(CaseClassification::ZeroInvolved),
        ([], [], [a]) => Ok(CaseClassification::MaxInvolved(*a)),
        ([c], [a], []) if inner(*a) && sat(*a, *a, q) == *c => Ok(CaseClassification::DoubledSymbol(*a)),
        ([c], [], [a, b]) if inner(*a) && inner(*b) && sat(*a, *b, q) == *c => {
            Ok(CaseClassification::DistinctPair(*a, *b))
        }
        _ => inconsistent(),
    }
}

/// Table-I classification of a received word of length `n − 1`.
pub fn classify_case(y: &Word, p: &BasicParams) -> Result<CaseClassification> {
    check_received(y, p)?;
    classify_residues(y.symbols(), p.q, &p.s, p.n)
}

fn check_received(y: &Word, p: &BasicParams) -> Result<()> {
    p.validate()?;
    if y.q() != p.q {
        return Err(Error::AlphabetMismatch(y.q(), p.q));
    }
    if y.len() + 1 != p.n {
        return domain(format!("received length {} but code length is {}", y.len(), p.n));
    }
    Ok(())
}

fn check_codeword(x: &Word, p: &BasicParams) -> Result<()> {
    p.validate()?;
    if x.q() != p.q {
        return Err(Error::AlphabetMismatch(x.q(), p.q));
    }
    if x.len() != p.n {
        return domain(format!("word length {} differs from code length {}", x.len(), p.n));
    }
    Ok(())
}

pub fn c1_membership(x: &Word, p: &BasicParams) -> Result<bool> {
    check_codeword(x, p)?;
    let c = counts(x.symbols(), p.q);
    Ok(p.s.iter().zip(&c).all(|(&s, &n)| (n % 4) as u8 == s))
}

pub fn c2_membership(x: &Word, p: &BasicParams) -> Result<bool> {
    let b = BlockSyndrome::of(x, p.n)?;
    Ok(c1_membership(x, p)? && b.alpha_syn == p.t1 as u64 && b.inv_parity == p.t2)
}

/// `Syn(z) ≡ d2 (mod 2n − 3)` for a binary `z` of length `n ≥ 3`.
pub fn c3_membership(z: &Word, d2: usize) -> Result<bool> {
    let n = z.len();
    if z.q() != 2 || n < 3 {
        return domain("C3 needs a binary word of length at least 3");
    }
    Ok(syn(z.symbols()) % (2 * n as u64 - 3) == d2 as u64)
}

pub fn code_membership(x: &Word, p: &BasicParams) -> Result<bool> {
    check_codeword(x, p)?;
    Ok(BlockSyndrome::of(x, p.n)? == p.syndrome())
}

/// Every codeword of `C(n; s, t, d)`, by exhaustive filtering.
pub fn basic_codebook(p: &BasicParams) -> Result<Vec<Word>> {
    p.validate()?;
    let target = p.syndrome();
    Ok(Word::all(p.q, p.n)?
        .filter(|x| BlockSyndrome::of_symbols(x.symbols(), p.q, p.n) == target)
        .collect())
}

/// The partition of `Σ_q^n` into codes `C(n; s, t, d)`, classes listed in order of their
/// lexicographically first word.
pub fn basic_classes(q: u32, n: usize) -> Result<Vec<(BasicParams, Vec<Word>)>> {
    let mut classes: std::collections::HashMap<BlockSyndrome, usize> = Default::default();
    let mut out: Vec<(BasicParams, Vec<Word>)> = Vec::new();
    for x in Word::all(q, n)? {
        let b = BlockSyndrome::of_symbols(x.symbols(), q, n);
        let k = *classes.entry(b).or_insert_with(|| {
            out.push((BasicParams::of_word(&x).expect("valid length"), Vec::new()));
            out.len() - 1
        });
        out[k].1.push(x);
    }
    Ok(out)
}

/// The parameter tuple with the most codewords (ties broken by first occurrence in
/// lexicographic word order), found by one pass over `Σ_q^n`.
pub fn largest_basic_class(q: u32, n: usize) -> Result<(BasicParams, Vec<Word>)> {
    let mut classes: std::collections::HashMap<BlockSyndrome, Vec<Word>> = Default::default();
    let mut order = Vec::new();
    for x in Word::all(q, n)? {
        let b = BlockSyndrome::of_symbols(x.symbols(), q, n);
        let entry = classes.entry(b.clone()).or_default();
        if entry.is_empty() {
            order.push(b);
        }
        entry.push(x);
    }
    let mut best = &order[0];
    for b in &order {
        if classes[b].len() > classes[best].len() {
            best = b;
        }
    }
    let words = classes.remove(best).unwrap_or_default();
    let params = BasicParams::of_word(&words[0])?;
    Ok((params, words))
}

/// Locates the `1` produced by a `00 → 1` error in a binary word of length `n − 1`, given
/// `Syn(z) ≡ d2 (mod 2n − 3)` for the original `z`. Returns its 1-based position.
pub fn locate_00_to_1(z_prime: &Word, d2: usize) -> Result<usize> {
    if z_prime.q() != 2 {
        return domain("location search needs a binary word");
    }
    let n = z_prime.len() + 1;
    if n < 3 || d2 >= 2 * n - 3 {
        return domain(format!("need n >= 3 and d2 < 2n-3, got n={n}, d2={d2}"));
    }
    locate_merge(z_prime.symbols(), d2 as u64, 2 * n as u64 - 3)
}

pub(crate) fn locate_merge(z: &[Symbol], d2: u64, modulus: u64) -> Result<usize> {
    let total = syn(z);
    let mut ones_after: u64 = z.iter().map(|&b| u64::from(b)).sum();
    for (i, &b) in z.iter().enumerate() {
        if b == 1 {
            ones_after -= 1;
            // Replacing the 1 at position i+1 with 00 removes i+1 and shifts later ones by one.
            let value = total - (i as u64 + 1) + ones_after;
            if value % modulus == d2 % modulus {
                return Ok(i + 1);
            }
        }
    }
    decode_failure("no 1 explains the location syndrome")
}

/// Tenengolts-style reinsertion of a known symbol: recovers `x` from `y` given
/// `Syn(α(x)) ≡ t1 (mod |x|)` and the value of the deleted symbol.
pub fn tenengolts_decode_known_symbol(y: &Word, t1: usize, deleted: Symbol) -> Result<Word> {
    let n = y.len() + 1;
    if u32::from(deleted) >= y.q() {
        return domain(format!("symbol {deleted} not in alphabet of size {}", y.q()));
    }
    if t1 >= n {
        return domain(format!("t1 = {t1} must be below {n}"));
    }
    let x = reinsert_known(y.symbols(), t1 as u64, n as u64, deleted)?;
    Ok(Word::from_raw(y.q(), x))
}

pub(crate) fn reinsert_known(y: &[Symbol], t1: u64, modulus: u64, deleted: Symbol) -> Result<Vec<Symbol>> {
    let len = y.len();
    if len == 0 {
        return Ok(vec![deleted]);
    }
    let ay = descent(y);
    let target = vt_reinsert(&ay, t1, modulus)?;
    // prefix_ok[j]: target[..j] == ay[..j]; suffix_ok[k]: target[k+1..] == ay[k..].
    let mut prefix_ok = vec![true; len];
    for j in 1..len {
        prefix_ok[j] = prefix_ok[j - 1] && target[j - 1] == ay[j - 1];
    }
    let mut suffix_ok = vec![true; len + 1];
    for k in (0..len.saturating_sub(1)).rev() {
        suffix_ok[k] = suffix_ok[k + 1] && target[k + 1] == ay[k];
    }
    for k in 0..=len {
        let left = k == 0 || (prefix_ok[k - 1] && target[k - 1] == Symbol::from(deleted >= y[k - 1]));
        let right = k == len || (target[k] == Symbol::from(y[k] >= deleted) && suffix_ok[k]);
        if left && right {
            let mut x = Vec::with_capacity(len + 1);
            x.extend_from_slice(&y[..k]);
            x.push(deleted);
            x.extend_from_slice(&y[k..]);
            return Ok(x);
        }
    }
    decode_failure(format!("no position for symbol {deleted} matches the descent syndrome"))
}

/// Inversion count change bookkeeping for replacing one symbol of `y` by a pair.
struct InversionProbe {
    q: usize,
    before: Vec<u64>,
    after: Vec<u64>,
}

impl InversionProbe {
    fn new(y: &[Symbol], q: u32) -> Self {
        let q = q as usize;
        let mut after = vec![0u64; q];
        for &v in y {
            after[v as usize] += 1;
        }
        Self { q, before: vec![0; q], after }
    }

    /// Moves the cursor past `v`, which must be the next symbol of `y`.
    fn advance_over(&mut self, v: Symbol) {
        self.after[v as usize] -= 1;
        self.before[v as usize] += 1;
    }

    /// Call with the cursor sitting on `v` (already excluded from `after`).
    fn weight(&self, v: Symbol) -> u64 {
        let v = v as usize;
        self.before[v + 1..self.q].iter().sum::<u64>() + self.after[..v].iter().sum::<u64>()
    }

    /// Parity of `Inv` after replacing the cursor symbol `c` by `u v`.
    fn parity_after(&self, base: u64, c: Symbol, u: Symbol, v: Symbol) -> u8 {
        let value = base - self.weight(c) + self.weight(u) + self.weight(v) + u64::from(u > v);
        (value % 2) as u8
    }
}

/// Single-absorption decoder for a block of length `len` whose fingerprint is `target`.
/// `y` has length `len − 1`; requires `target.m ≥ len`.
pub(crate) fn decode_block(y: &[Symbol], len: usize, target: &BlockSyndrome) -> Result<Vec<Symbol>> {
    let q = target.q;
    let m = target.m as u64;
    if y.len() + 1 != len || target.m < len || len < 2 {
        return domain(format!("block of length {len} cannot be decoded with modulus length {}", target.m));
    }
    let case = classify_residues(y, q, &target.counts, len)?;
    let x = match case {
        CaseClassification::ZeroInvolved | CaseClassification::MaxInvolved(_) => {
            let deleted = case.deleted_symbol().expect("deletion row");
            reinsert_known(y, target.alpha_syn, m, deleted)?
        }
        CaseClassification::DoubledSymbol(a) => split_pair(y, q, a, a, target)?,
        CaseClassification::DistinctPair(a, b) => split_pair(y, q, a, b, target)?,
    };
    if BlockSyndrome::of_symbols(&x, q, target.m) != *target {
        return decode_failure("reconstruction does not satisfy every congruence");
    }
    Ok(x)
}

fn replace_with_pair(y: &[Symbol], i: usize, u: Symbol, v: Symbol) -> Vec<Symbol> {
    let mut x = Vec::with_capacity(y.len() + 1);
    x.extend_from_slice(&y[..i]);
    x.push(u);
    x.push(v);
    x.extend_from_slice(&y[i + 1..]);
    x
}

fn split_pair(y: &[Symbol], q: u32, a: Symbol, b: Symbol, target: &BlockSyndrome) -> Result<Vec<Symbol>> {
    let c = sat(a, b, q);
    let base_inv = inv(y, q);
    let order = |probe: &InversionProbe| {
        if a == b || probe.parity_after(base_inv, c, a, b) == target.inv_parity {
            (a, b)
        } else {
            (b, a)
        }
    };
    let mut probe = InversionProbe::new(y, q);
    if u32::from(a) + u32::from(b) < q {
        let modulus = q as u64 * target.m as u64;
        let base_syn = syn(y);
        let mut suffix: u64 = y.iter().map(|&v| u64::from(v)).sum();
        for (i, &v) in y.iter().enumerate() {
            suffix -= u64::from(v);
            probe.after[v as usize] -= 1;
            if v == c {
                let (u, w) = order(&probe);
                let pos = i as u64 + 1;
                // Syn after splitting c at pos into u w: later symbols shift right by one.
                let value = base_syn - pos * u64::from(c) + pos * u64::from(u) + (pos + 1) * u64::from(w) + suffix;
                if value % modulus == target.syn {
                    return Ok(replace_with_pair(y, i, u, w));
                }
            }
            probe.before[v as usize] += 1;
        }
        decode_failure("no occurrence of the merged symbol matches the VT syndrome")
    } else {
        let top = (q - 1) as Symbol;
        let loc: Vec<Symbol> = y.iter().map(|&v| Symbol::from(v == top)).collect();
        let pos = locate_merge(&loc, target.loc_syn, 2 * target.m as u64 - 3)?;
        for &v in &y[..pos - 1] {
            probe.advance_over(v);
        }
        probe.after[y[pos - 1] as usize] -= 1;
        let (u, w) = order(&probe);
        Ok(replace_with_pair(y, pos - 1, u, w))
    }
}

/// Corrects one absorption in a received word of `C(n; s, t, d)`.
pub fn decode_single_absorption(y: &Word, p: &BasicParams) -> Result<Word> {
    check_received(y, p)?;
    let x = decode_block(y.symbols(), p.n, &p.syndrome())?;
    Ok(Word::from_raw(p.q, x))
}
