//! The improved single-absorption code `D(n; r, α, β)`.
//!
//! Codewords lie in `R_{q,n}`. Two marker statistics `f` (moment of the segment lengths) and
//! `g` (segment count mod 3) pin the error to a window of `O(δ²)` positions. Every interval of
//! two staggered families of length-`2L+1` intervals carries a block fingerprint, and the sums
//! of those fingerprints (`ĝ1`, `ĝ2`) let the decoder rebuild the fingerprint of the one
//! interval that holds the window and then correct it with the basic block decoder.

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{decode_failure, domain, Error, Result};
use crate::marker::{
    ceil_log, decode_from_marker_set, encode_to_marker_set, from_digits, segment_lengths, to_digits,
    MarkerParams, MARKER,
};
use crate::qary::{decode_block, BlockSyndrome};
use crate::word::{Symbol, Word};

/// A random word of `R_{q,n}` with segments of at most `δ`, long segments favoured.
pub fn random_member<R: Rng + ?Sized>(rng: &mut R, q: u32, n: usize, delta: usize) -> Result<Word> {
    if n < 4 || delta < 4 || !(2..=crate::word::MAX_Q).contains(&q) {
        return domain(format!("need n >= 4, delta >= 4 and a valid alphabet, got q={q} n={n} delta={delta}"));
    }
    let mut x = Vec::with_capacity(n);
    while x.len() < n {
        let rem = n - x.len();
        let len = if rem <= delta {
            rem
        } else if rng.gen_bool(0.6) {
            rng.gen_range((delta - 3).max(4).min(rem - 4)..=delta.min(rem - 4))
        } else {
            rng.gen_range(4..=delta.min(rem - 4))
        };
        // A marker-free body followed by 0011 has its only marker at the end.
        let start = x.len();
        while x.len() < start + len - 4 {
            x.push(rng.gen_range(0..q) as Symbol);
            if x[start..].ends_with(&MARKER) {
                x.pop();
            }
        }
        x.extend_from_slice(&MARKER);
    }
    Ok(Word::from_raw(q, x))
}

/// Largest window the localizer can return for segment bound `δ`:
/// `max(⌈2δ²/3 + 2δ − 1⌉, ⌈2δ²/5 + δ⌉)`.
pub fn window_bound(delta: usize) -> usize {
    let sq = 2 * delta * delta;
    let shrink = sq.div_ceil(3) + 2 * delta - 1;
    let grow = sq.div_ceil(5) + delta;
    shrink.max(grow)
}

/// `Σ j·|z_j|` over the segments, not reduced.
fn moment(lengths: &[usize]) -> u64 {
    lengths.iter().enumerate().map(|(j, &len)| (j as u64 + 1) * len as u64).sum()
}

fn check_marked(x: &Word) -> Result<()> {
    if !x.ends_with(&MARKER) {
        return domain("word does not end with 0011");
    }
    Ok(())
}

/// `f(x) = Σ j·|z_j| mod 2|x|`.
pub fn marker_moment(x: &Word) -> Result<u64> {
    check_marked(x)?;
    Ok(moment(&segment_lengths(x.symbols())) % (2 * x.len() as u64))
}

/// `g(x) = l_x mod 3`.
pub fn marker_count(x: &Word) -> Result<u8> {
    check_marked(x)?;
    Ok((segment_lengths(x.symbols()).len() % 3) as u8)
}

/// The two interval families, as 1-based inclusive `(start, end)` pairs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Intervals {
    pub first: Vec<(usize, usize)>,
    pub second: Vec<(usize, usize)>,
}

/// Cuts `[1, n]` into length-`2L+1` intervals plus a family shifted by `L`, patching the tail
/// when `2L+1` does not divide `n`.
pub fn intervals(n: usize, l: usize) -> Result<Intervals> {
    if l == 0 {
        return domain("interval half-length must be positive");
    }
    let w = 2 * l + 1;
    if n < w {
        return domain(format!("length {n} is shorter than one interval of {w}"));
    }
    let t = n / w;
    let rest = n - t * w;
    let mut first: Vec<(usize, usize)> = (0..t).map(|i| (1 + i * w, (i + 1) * w)).collect();
    let mut second: Vec<(usize, usize)> = (0..t - 1).map(|i| (1 + i * w + l, (i + 1) * w + l)).collect();
    if rest > 0 && rest <= l {
        second.push(((t - 1) * w + l + 1, n));
    } else if rest > l {
        first.push((t * w + 1, n));
        second.push(((t - 1) * w + l + 1, t * w + l));
    }
    Ok(Intervals { first, second })
}

fn family_syndrome(x: &[Symbol], q: u32, family: &[(usize, usize)], m: usize) -> BlockSyndrome {
    family
        .iter()
        .fold(BlockSyndrome::zero(q, m), |acc, &(a, b)| acc.add(&BlockSyndrome::of_symbols(&x[a - 1..b], q, m)))
}

/// Fingerprint of one block under interval half-length `L`.
pub fn block_syndrome(z: &Word, l: usize) -> Result<BlockSyndrome> {
    if z.len() > 2 * l + 1 {
        return domain(format!("block of length {} exceeds 2L+1 = {}", z.len(), 2 * l + 1));
    }
    BlockSyndrome::of(z, 2 * l + 1)
}

/// `ĝ1(x)`: fingerprints summed over the first family.
pub fn g1_hat(x: &Word, l: usize) -> Result<BlockSyndrome> {
    check_marked(x)?;
    let iv = intervals(x.len(), l)?;
    Ok(family_syndrome(x.symbols(), x.q(), &iv.first, 2 * l + 1))
}

/// `ĝ2(x)`: fingerprints summed over the shifted family.
pub fn g2_hat(x: &Word, l: usize) -> Result<BlockSyndrome> {
    check_marked(x)?;
    let iv = intervals(x.len(), l)?;
    Ok(family_syndrome(x.symbols(), x.q(), &iv.second, 2 * l + 1))
}

/// Parameters `(r1, r2, α, β)` of one class together with `δ` and `L`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ImprovedParams {
    pub q: u32,
    pub n: usize,
    pub delta: usize,
    #[serde(rename = "L")]
    pub l: usize,
    pub r1: u64,
    pub r2: u8,
    pub alpha: BlockSyndrome,
    pub beta: BlockSyndrome,
}

fn check_fingerprint(s: &BlockSyndrome, q: u32, m: usize, name: &str) -> Result<()> {
    let m64 = m as u64;
    let ok = s.q == q
        && s.m == m
        && s.counts.len() == q as usize - 1
        && s.counts.iter().all(|&c| c < 4)
        && s.alpha_syn < m64
        && s.inv_parity < 2
        && s.syn < q as u64 * m64
        && s.loc_syn < 2 * m64 - 3;
    if !ok {
        return domain(format!("{name} is not a reduced fingerprint for q = {q}, 2L+1 = {m}"));
    }
    Ok(())
}

impl ImprovedParams {
    pub fn validate(&self) -> Result<()> {
        if !(3..=crate::word::MAX_Q).contains(&self.q) {
            return domain(format!("improved code needs 3 <= q <= 256, got {}", self.q));
        }
        if self.delta < 5 {
            return domain(format!("delta = {} is below 5", self.delta));
        }
        if self.l < window_bound(self.delta) {
            return domain(format!("L = {} is below the window bound {}", self.l, window_bound(self.delta)));
        }
        if self.n < 2 * self.l + 1 {
            return domain(format!("n = {} is shorter than 2L+1 = {}", self.n, 2 * self.l + 1));
        }
        if self.r1 >= 2 * self.n as u64 || self.r2 >= 3 {
            return domain("r1 must lie in Z_2n and r2 in Z_3");
        }
        check_fingerprint(&self.alpha, self.q, 2 * self.l + 1, "alpha")?;
        check_fingerprint(&self.beta, self.q, 2 * self.l + 1, "beta")
    }

    /// The class containing `x`, which must lie in `R_{q,n}` for this `δ`.
    pub fn of_word(x: &Word, delta: usize, l: usize) -> Result<Self> {
        check_marked(x)?;
        if segment_lengths(x.symbols()).iter().any(|&len| len > delta) {
            return domain(format!("word has a segment longer than delta = {delta}"));
        }
        let lengths = segment_lengths(x.symbols());
        let p = Self {
            q: x.q(),
            n: x.len(),
            delta,
            l,
            r1: moment(&lengths) % (2 * x.len() as u64),
            r2: (lengths.len() % 3) as u8,
            alpha: g1_hat(x, l)?,
            beta: g2_hat(x, l)?,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn modulus_len(&self) -> usize {
        2 * self.l + 1
    }
}

pub fn d1_membership(x: &Word, p: &ImprovedParams) -> Result<bool> {
    p.validate()?;
    if x.q() != p.q {
        return Err(Error::AlphabetMismatch(x.q(), p.q));
    }
    if x.len() != p.n || !x.ends_with(&MARKER) {
        return Ok(false);
    }
    let lengths = segment_lengths(x.symbols());
    Ok(lengths.iter().all(|&len| len <= p.delta)
        && moment(&lengths) % (2 * p.n as u64) == p.r1
        && (lengths.len() % 3) as u8 == p.r2)
}

pub fn d_membership(x: &Word, p: &ImprovedParams) -> Result<bool> {
    if !d1_membership(x, p)? {
        return Ok(false);
    }
    Ok(g1_hat(x, p.l)? == p.alpha && g2_hat(x, p.l)? == p.beta)
}

/// A run of positions `[start, end]` (1-based) that holds the absorption, and the change in
/// segment count `l_y − l_x` that selected the search rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Window {
    pub start: usize,
    pub end: usize,
    pub shift: i8,
}

impl Window {
    pub fn len(&self) -> usize {
        self.end + 1 - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.end < self.start
    }

    pub fn contains(&self, p: usize) -> bool {
        (self.start..=self.end).contains(&p)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum WindowOutcome {
    ErrorFree,
    /// The trailing marker was hit; the codeword is the first `n − 4` symbols plus `0011`.
    MarkerDamaged,
    Located(Window),
}

/// Narrows a single absorption in `y` down to a window of at most `window_bound(δ)` positions.
pub fn locate_window(y: &Word, p: &ImprovedParams) -> Result<WindowOutcome> {
    p.validate()?;
    if y.q() != p.q {
        return Err(Error::AlphabetMismatch(y.q(), p.q));
    }
    let n = p.n;
    if y.len() == n {
        return Ok(WindowOutcome::ErrorFree);
    }
    if y.len() + 1 != n {
        return domain(format!("received length {} is neither n nor n − 1 for n = {n}", y.len()));
    }
    if !y.ends_with(&MARKER) {
        return Ok(WindowOutcome::MarkerDamaged);
    }
    let lens = segment_lengths(y.symbols());
    let ly = lens.len();
    let mut starts = Vec::with_capacity(ly);
    let mut pos = 1;
    for &len in &lens {
        starts.push(pos);
        pos += len;
    }
    // Segment k (1-based) of y spans [starts[k−1], seg_end(k)].
    let seg_end = |k: usize| starts[k - 1] + lens[k - 1] - 1;
    let two_n = 2 * n as u64;
    let diff = (p.r1 + two_n - moment(&lens) % two_n) % two_n;
    let delta = p.delta;
    let clip = |start: usize, end: usize, shift: i8| {
        Window { start, end: end.min(n - 1), shift }
    };
    let window = match ((ly % 3) as u8 + 3 - p.r2) % 3 {
        0 => {
            let i = diff as usize;
            if !(1..=ly).contains(&i) {
                return decode_failure("segment moment points outside the received segments");
            }
            clip(starts[i - 1], seg_end(i), 0)
        }
        2 => {
            // Φ(i') = Σ_{j>i'} |z_j| + i', walked down from l_y.
            let mut tail = 0u64;
            let mut found = None;
            for i in (1..=ly).rev() {
                let phi = tail + i as u64;
                if phi.abs_diff(diff) <= delta as u64 {
                    found = Some(i);
                    break;
                }
                tail += lens[i - 1] as u64;
                debug_assert!(lens[i - 1] >= 4, "each Φ step drops by at least 3");
            }
            let Some(i0) = found else {
                return decode_failure("no segment matches the moment for a lost marker");
            };
            let lo = i0.saturating_sub(2 * delta / 3).max(1);
            clip(starts[lo - 1], seg_end(i0), -1)
        }
        _ => {
            // Representative of f(x) − f(y) in [−n+6, n/4 − 4].
            let a = if 4 * diff as i64 <= n as i64 - 16 { diff as i64 } else { diff as i64 - two_n as i64 };
            if a < 6 - n as i64 {
                return decode_failure("segment moment outside the range for a new marker");
            }
            if ly < 2 {
                return decode_failure("a new marker needs at least two received segments");
            }
            // Φ(i') = −Σ_{j≥i'+2} |z_j| + i', walked down from l_y − 1.
            let mut tail = 0i64;
            let mut found = None;
            for i in (1..ly).rev() {
                let phi = i as i64 - tail;
                if phi.abs_diff(a) <= delta as u64 - 5 {
                    found = Some(i);
                    break;
                }
                tail += lens[i] as i64;
                debug_assert!(lens[i] >= 4, "each Φ step rises by at least 5");
            }
            let Some(i0) = found else {
                return decode_failure("no segment matches the moment for a new marker");
            };
            let lo = i0.saturating_sub(2 * delta / 5).max(1);
            clip(starts[lo - 1], seg_end(i0 + 1), 1)
        }
    };
    Ok(WindowOutcome::Located(window))
}

/// Which interval holds the corrupted pair: `W ⊆ [a, b − 1]`, first family preferred.
fn pick_interval(iv: &Intervals, w: Window) -> Option<(bool, usize)> {
    let fits = |&(a, b): &(usize, usize)| a <= w.start && w.end < b;
    if let Some(k) = iv.first.iter().position(fits) {
        return Some((true, k));
    }
    iv.second.iter().position(fits).map(|k| (false, k))
}

/// Corrects at most one absorption in a received word of `D(n; r, α, β)`.
pub fn decode_improved(y: &Word, p: &ImprovedParams) -> Result<Word> {
    let x = match locate_window(y, p)? {
        WindowOutcome::ErrorFree => y.clone(),
        WindowOutcome::MarkerDamaged => {
            let mut s = y.symbols()[..p.n - 4].to_vec();
            s.extend_from_slice(&MARKER);
            Word::from_raw(p.q, s)
        }
        WindowOutcome::Located(w) => repair_block(y, p, w)?,
    };
    if !d_membership(&x, p)? {
        return decode_failure("no codeword of this class explains the received word");
    }
    Ok(x)
}

fn repair_block(y: &Word, p: &ImprovedParams, w: Window) -> Result<Word> {
    let iv = intervals(p.n, p.l)?;
    let Some((first, k)) = pick_interval(&iv, w) else {
        return decode_failure(format!("window [{}, {}] fits no interval", w.start, w.end));
    };
    let (family, target_sum) = if first { (&iv.first, &p.alpha) } else { (&iv.second, &p.beta) };
    let (a, b) = family[k];
    let ys = y.symbols();
    let m = p.modulus_len();
    // Intervals before the damaged one are read in place, those after it shifted by one.
    let mut others = BlockSyndrome::zero(p.q, m);
    for (j, &(s, e)) in family.iter().enumerate() {
        if j == k {
            continue;
        }
        let block = if e < a { &ys[s - 1..e] } else { &ys[s - 2..e - 1] };
        others = others.add(&BlockSyndrome::of_symbols(block, p.q, m));
    }
    let target = target_sum.sub(&others);
    let block = decode_block(&ys[a - 1..b - 1], b - a + 1, &target)?;
    let mut x = Vec::with_capacity(p.n);
    x.extend_from_slice(&ys[..a - 1]);
    x.extend(block);
    x.extend_from_slice(&ys[b - 1..]);
    Ok(Word::from_raw(p.q, x))
}

/// Systematic single-absorption code: `Enc(x) · 010 · Q(f, g, ĝ1, ĝ2)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct E1Params {
    pub marker: MarkerParams,
    #[serde(rename = "L")]
    pub l: usize,
}

impl E1Params {
    /// Smallest `δ` for the marker encoder and `L = window_bound(δ)`; needs `n + 5 ≥ 2L + 1`.
    pub fn new(q: u32, n: usize) -> Result<Self> {
        let delta = MarkerParams::smallest_delta(q, n)?;
        let p = Self { marker: MarkerParams::new(q, n, delta)?, l: window_bound(delta) };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        self.marker.validate()?;
        if self.l < window_bound(self.marker.delta) {
            return domain(format!("L = {} is below the window bound", self.l));
        }
        if self.encoded_len() < 2 * self.l + 1 {
            return domain(format!(
                "encoded length {} is shorter than 2L+1 = {}; n must be at least {}",
                self.encoded_len(),
                2 * self.l + 1,
                Self::smallest_n(self.marker.q).map_or(0, |v| v)
            ));
        }
        Ok(())
    }

    /// Smallest message length for which the construction is defined.
    pub fn smallest_n(q: u32) -> Result<usize> {
        let mut n = 1usize;
        loop {
            let need = (2 * window_bound(MarkerParams::smallest_delta(q, n)?) + 1).saturating_sub(5);
            if n >= need {
                return Ok(n);
            }
            n = need;
        }
    }

    pub fn encoded_len(&self) -> usize {
        self.marker.n + 5
    }

    fn radices(&self) -> Vec<u64> {
        let (q, m) = (self.marker.q as u64, 2 * self.l as u64 + 1);
        let mut block = vec![4u64; q as usize - 1];
        block.extend([m, 2, q * m, 2 * m - 3]);
        let mut r = vec![2 * self.encoded_len() as u64, 3];
        r.extend(&block);
        r.extend(&block);
        r
    }

    /// Width of the packed syndrome, `⌈log_q` of the syndrome space size`⌉`.
    pub fn packed_len(&self) -> usize {
        mixed_width(&self.radices(), self.marker.q)
    }

    pub fn codeword_len(&self) -> usize {
        self.encoded_len() + 3 + self.packed_len()
    }

    fn improved(&self, r1: u64, r2: u8, alpha: BlockSyndrome, beta: BlockSyndrome) -> ImprovedParams {
        ImprovedParams {
            q: self.marker.q,
            n: self.encoded_len(),
            delta: self.marker.delta,
            l: self.l,
            r1,
            r2,
            alpha,
            beta,
        }
    }
}

fn fingerprint_digits(s: &BlockSyndrome) -> Vec<u64> {
    let mut d: Vec<u64> = s.counts.iter().map(|&c| c.into()).collect();
    d.extend([s.alpha_syn, s.inv_parity.into(), s.syn, s.loc_syn]);
    d
}

fn fingerprint_from(d: &[u64], q: u32, m: usize) -> BlockSyndrome {
    let k = q as usize - 1;
    BlockSyndrome {
        q,
        m,
        counts: d[..k].iter().map(|&c| c as u8).collect(),
        alpha_syn: d[k],
        inv_parity: d[k + 1] as u8,
        syn: d[k + 2],
        loc_syn: d[k + 3],
    }
}

/// Symbols needed for any digit tuple under `radices`.
pub(crate) fn mixed_width(radices: &[u64], q: u32) -> usize {
    let size = radices.iter().fold(BigUint::from(1u32), |acc, &r| acc * r);
    let mut width = 0;
    let mut power = BigUint::from(1u32);
    while power < size {
        power *= q;
        width += 1;
    }
    width
}

/// Fixed-width base-`q` numeral of a mixed-radix digit tuple.
pub(crate) fn pack_mixed(digits: &[u64], radices: &[u64], q: u32) -> Vec<Symbol> {
    debug_assert!(digits.iter().zip(radices).all(|(d, r)| d < r));
    let value = digits.iter().zip(radices).fold(BigUint::zero(), |acc, (&d, &r)| acc * r + d);
    to_digits(value, q, mixed_width(radices, q))
}

pub(crate) fn unpack_mixed(v: &[Symbol], radices: &[u64], q: u32) -> Result<Vec<u64>> {
    let mut value = from_digits(v, q);
    let mut digits = vec![0u64; radices.len()];
    for (slot, &r) in digits.iter_mut().zip(radices).rev() {
        *slot = (&value % r).to_u64().expect("digit below radix");
        value /= r;
    }
    if !value.is_zero() {
        return decode_failure("packed syndrome out of range");
    }
    Ok(digits)
}

/// Mixed-radix packing `Q` of the class parameters into `packed_len()` symbols.
pub fn pack_syndromes(p: &ImprovedParams, e1: &E1Params) -> Word {
    let mut digits = vec![p.r1, p.r2.into()];
    digits.extend(fingerprint_digits(&p.alpha));
    digits.extend(fingerprint_digits(&p.beta));
    Word::from_raw(p.q, pack_mixed(&digits, &e1.radices(), p.q))
}

/// Inverse of [`pack_syndromes`].
pub fn unpack_syndromes(v: &[Symbol], e1: &E1Params) -> Result<ImprovedParams> {
    let radices = e1.radices();
    if v.len() != e1.packed_len() {
        return decode_failure(format!("packed syndrome has length {} instead of {}", v.len(), e1.packed_len()));
    }
    let digits = unpack_mixed(v, &radices, e1.marker.q)?;
    let (q, m) = (e1.marker.q, 2 * e1.l + 1);
    let half = (radices.len() - 2) / 2;
    let alpha = fingerprint_from(&digits[2..2 + half], q, m);
    let beta = fingerprint_from(&digits[2 + half..], q, m);
    Ok(e1.improved(digits[0], digits[1] as u8, alpha, beta))
}

/// Where a received `head · 010 · tail` took its absorption, for a head ending in a nonzero
/// symbol. `true` means the head lost a symbol and the tail starts one place early.
pub(crate) fn head_damaged(s: &[Symbol], head_len: usize, total: usize) -> Result<bool> {
    if s.len() == total {
        return Ok(false);
    }
    if s.len() + 1 != total {
        return decode_failure(format!("received length {} is neither {total} nor {}", s.len(), total - 1));
    }
    // A 0 right after the head means the separator start survived; a nonzero last head symbol
    // means the merge happened at or after the separator.
    Ok(s[head_len] != 0 && s[head_len - 1] == 0)
}

pub fn e1_encode(x: &Word, e1: &E1Params) -> Result<Word> {
    e1.validate()?;
    let c = encode_to_marker_set(x, &e1.marker)?;
    let p = ImprovedParams::of_word(&c, e1.marker.delta, e1.l)?;
    let mut out = c.into_symbols();
    out.extend([0, 1, 0]);
    out.extend(pack_syndromes(&p, e1).into_symbols());
    Ok(Word::from_raw(e1.marker.q, out))
}

/// Recovers the message from a codeword hit by at most one absorption.
pub fn e1_decode(y: &Word, e1: &E1Params) -> Result<Word> {
    e1.validate()?;
    if y.q() != e1.marker.q {
        return Err(Error::AlphabetMismatch(y.q(), e1.marker.q));
    }
    let (n5, total) = (e1.encoded_len(), e1.codeword_len());
    let s = y.symbols();
    let enc = if head_damaged(s, n5, total)? {
        let p = unpack_syndromes(&s[n5 + 2..], e1)?;
        decode_improved(&Word::from_raw(e1.marker.q, s[..n5 - 1].to_vec()), &p)?
    } else {
        Word::from_raw(e1.marker.q, s[..n5].to_vec())
    };
    decode_from_marker_set(&enc, &e1.marker)
}

/// Redundancy of the systematic code beyond the message length.
pub fn e1_redundancy(e1: &E1Params) -> usize {
    e1.codeword_len() - e1.marker.n
}

/// Leading term `log_q n` of the redundancy, rounded up.
pub fn e1_leading_term(e1: &E1Params) -> usize {
    ceil_log(e1.marker.q, e1.marker.n)
}
