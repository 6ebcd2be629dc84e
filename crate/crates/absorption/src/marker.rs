//! Marker-constrained words. A word is split after every occurrence of the marker `0011`;
//! the set `R_{q,n}` holds the words that end with the marker and whose segments are all at
//! most `δ` long. The encoder below maps arbitrary words into `R_{q,n+5}` by cutting long
//! marker-free stretches, compressing them, and parking them at the front of the word.

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{decode_failure, domain, Error, Result};
use crate::word::{Symbol, Word};

pub const MARKER: [Symbol; 4] = [0, 0, 1, 1];

/// Smallest `k` with `q^k ≥ n`.
pub fn ceil_log(q: u32, n: usize) -> usize {
    let mut k = 0;
    let mut power: u128 = 1;
    while power < n as u128 {
        power *= q as u128;
        k += 1;
    }
    k
}

/// Lengths for the marker encoder over messages of length `n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MarkerParams {
    pub q: u32,
    pub n: usize,
    pub delta: usize,
}

impl MarkerParams {
    pub fn new(q: u32, n: usize, delta: usize) -> Result<Self> {
        let p = Self { q, n, delta };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let (q, delta) = (self.q, self.delta);
        if !(3..=crate::word::MAX_Q).contains(&q) {
            return domain(format!("marker coding needs 3 <= q <= 256, got {q}"));
        }
        if self.n == 0 {
            return domain("message length must be positive");
        }
        if delta < 8 || delta % 4 != 0 {
            return domain(format!("delta = {delta} must be a multiple of 4 and at least 8"));
        }
        if delta < self.pos_len() + 9 {
            return domain(format!("delta = {delta} leaves no room for the compressed block"));
        }
        let chunks = (delta - 4) / 4;
        let lhs = BigUint::from(q.pow(4) - 1).pow(chunks as u32);
        let rhs = BigUint::from(q).pow(self.compressed_len() as u32);
        if lhs > rhs {
            return domain(format!(
                "delta = {delta} is too small: (q^4-1)^{chunks} exceeds q^{}",
                self.compressed_len()
            ));
        }
        Ok(())
    }

    /// Width of the position numeral, `⌈log_q n⌉`.
    pub fn pos_len(&self) -> usize {
        ceil_log(self.q, self.n)
    }

    pub fn compressed_len(&self) -> usize {
        self.delta - self.pos_len() - 9
    }

    /// Length of a cut stretch and of the block replacing it.
    pub fn block_len(&self) -> usize {
        self.delta - 4
    }

    /// The smallest valid `δ` (a multiple of 4) for this `(q, n)`.
    pub fn smallest_delta(q: u32, n: usize) -> Result<usize> {
        // Start a little below the real-valued root of the counting inequality.
        let (a, b) = (((q as f64).powi(4) - 1.0).ln() / 4.0, (q as f64).ln());
        let root = ((ceil_log(q, n) + 9) as f64 * b - 4.0 * a) / (b - a);
        let mut delta = ((root as usize).saturating_sub(64) / 4 * 4).max(8);
        loop {
            let p = Self { q, n, delta };
            match p.validate() {
                Ok(()) => return Ok(delta),
                Err(Error::Domain(_)) if delta < 1 << 24 => delta += 4,
                Err(e) => return Err(e),
            }
        }
    }
}

/// Smallest multiples of 4 with `(q⁴/(q⁴−1))^{c1/4−1} ≥ q/(q−1)` and `(q⁴/(q⁴−1))^{c2/4} ≥ q`.
/// These make a uniformly random word land in `R_{q,n}` with probability at least `1/q`.
pub fn density_constants(q: u32) -> (usize, usize) {
    let big = |v: u64| BigUint::from(v);
    let (top, bottom) = (big(q as u64).pow(4), big(q as u64).pow(4) - 1u32);
    let mut k = 1u32;
    // top^(k−1)·(q−1) ≥ q·bottom^(k−1)
    while top.pow(k - 1) * (q - 1) < bottom.pow(k - 1) * q {
        k += 1;
    }
    let c1 = 4 * k as usize;
    let mut k = 1u32;
    while top.pow(k) < bottom.pow(k) * q {
        k += 1;
    }
    (c1, 4 * k as usize)
}

/// Smallest multiples of 4 with `(c1−4)·log_q(e)/(4q⁴) ≥ 5` and `c2·log_q(e)/(4q⁴) ≥ 1`, the
/// assumptions under which the encoder's compressed block always fits.
pub fn encoder_constants(q: u32) -> (usize, usize) {
    let scale = 4.0 * (q as f64).powi(4) * (q as f64).ln();
    let round4 = |v: f64| (v / 4.0).ceil() as usize * 4;
    (round4(5.0 * scale + 4.0), round4(scale))
}

/// `δ = c1 + c2·⌈log_q n⌉` with the encoder constants.
pub fn encoder_delta(q: u32, n: usize) -> usize {
    let (c1, c2) = encoder_constants(q);
    c1 + c2 * ceil_log(q, n)
}

/// Split of a marker-terminated word into its segments.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Segmentation {
    pub segments: Vec<Word>,
}

impl Segmentation {
    pub fn count(&self) -> usize {
        self.segments.len()
    }

    pub fn lengths(&self) -> Vec<usize> {
        self.segments.iter().map(Word::len).collect()
    }
}

/// Lengths of the complete segments of `s`; symbols after the last marker are ignored.
pub(crate) fn segment_lengths(s: &[Symbol]) -> Vec<usize> {
    let mut out = Vec::new();
    let mut start = 0;
    let mut i = 3;
    while i < s.len() {
        if s[i - 3..=i] == MARKER {
            out.push(i + 1 - start);
            start = i + 1;
            i += 4;
        } else {
            i += 1;
        }
    }
    out
}

pub fn segment(x: &Word) -> Result<Segmentation> {
    if !x.ends_with(&MARKER) {
        return domain("word does not end with 0011");
    }
    let mut pos = 1;
    let segments = segment_lengths(x.symbols())
        .into_iter()
        .map(|len| {
            let seg = x.range(pos, pos + len - 1);
            pos += len;
            seg
        })
        .collect();
    Ok(Segmentation { segments })
}

pub fn r_membership(x: &Word, delta: usize) -> bool {
    x.ends_with(&MARKER) && segment_lengths(x.symbols()).iter().all(|&l| l <= delta)
}

/// Next matcher state after reading `a` with `k` marker symbols already matched.
fn marker_step(k: usize, a: Symbol) -> usize {
    let mut probe: Vec<Symbol> = MARKER[..k].to_vec();
    probe.push(a);
    (0..=probe.len().min(4)).rev().find(|&len| probe[probe.len() - len..] == MARKER[..len]).unwrap_or(0)
}

/// Exact `|R_{q,n}|` by dynamic programming over (matched marker prefix, current segment length).
pub fn count_r_set(n: usize, q: u32, delta: usize) -> BigUint {
    let width = delta + 1;
    let mut table = vec![BigUint::zero(); 4 * width];
    table[0] = BigUint::one();
    let steps: Vec<Vec<usize>> = (0..4).map(|k| (0..q).map(|a| marker_step(k, a as Symbol)).collect()).collect();
    for _ in 0..n {
        let mut next = vec![BigUint::zero(); 4 * width];
        for k in 0..4 {
            for len in 0..width {
                let ways = &table[k * width + len];
                if ways.is_zero() || len + 1 > delta {
                    continue;
                }
                for &k2 in &steps[k] {
                    let slot = if k2 == 4 { 0 } else { k2 * width + len + 1 };
                    next[slot] += ways;
                }
            }
        }
        table = next;
    }
    if n == 0 {
        return BigUint::zero();
    }
    table[0].clone()
}

fn check_q(w: &Word, p: &MarkerParams) -> Result<()> {
    if w.q() != p.q {
        return Err(Error::AlphabetMismatch(w.q(), p.q));
    }
    Ok(())
}

fn contains_marker(s: &[Symbol]) -> bool {
    s.windows(4).any(|w| w == MARKER)
}

/// Value of the marker as a base-`q` numeral; chunk values above it shift down by one.
fn marker_value(q: u32) -> u32 {
    q + 1
}

/// Injective map from marker-free words of length `δ − 4` to `Σ_q^{compressedLen}`.
pub fn compress_block(s: &Word, p: &MarkerParams) -> Result<Word> {
    check_q(s, p)?;
    if s.len() != p.block_len() {
        return domain(format!("block has length {} instead of {}", s.len(), p.block_len()));
    }
    if contains_marker(s.symbols()) {
        return domain("block contains 0011");
    }
    Ok(Word::from_raw(p.q, compress(s.symbols(), p.q, p.compressed_len())))
}

/// The compressor at an explicit output width, for surrogate sizes below any valid `δ`.
/// Fails when `(q⁴−1)^{|s|/4}` does not fit in `width` digits.
pub fn compress_to_width(s: &Word, width: usize) -> Result<Word> {
    let q = s.q();
    if !s.len().is_multiple_of(4) || contains_marker(s.symbols()) {
        return domain("block must be marker-free with length divisible by 4");
    }
    if BigUint::from(q.pow(4) - 1).pow(s.len() as u32 / 4) > BigUint::from(q).pow(width as u32) {
        return domain(format!("{width} digits cannot hold every block of length {}", s.len()));
    }
    Ok(Word::from_raw(q, compress(s.symbols(), q, width)))
}

/// Inverse of [`compress_to_width`].
pub fn decompress_from_width(v: &Word, block_len: usize) -> Result<Word> {
    if !block_len.is_multiple_of(4) {
        return domain("block length must be divisible by 4");
    }
    Ok(Word::from_raw(v.q(), decompress(v.symbols(), v.q(), block_len)?))
}

pub(crate) fn compress(s: &[Symbol], q: u32, width: usize) -> Vec<Symbol> {
    let radix = q.pow(4) - 1;
    let skip = marker_value(q);
    let mut value = BigUint::zero();
    for chunk in s.chunks(4) {
        let v = chunk.iter().fold(0u32, |acc, &d| acc * q + u32::from(d));
        let digit = if v > skip { v - 1 } else { v };
        value = value * radix + digit;
    }
    to_digits(value, q, width)
}

/// Fixed-width base-`q` expansion, most significant digit first.
pub(crate) fn to_digits(value: BigUint, q: u32, width: usize) -> Vec<Symbol> {
    let mut digits = value.to_radix_be(q);
    debug_assert!(digits.len() <= width || value.is_zero());
    if value.is_zero() {
        digits.clear();
    }
    let mut out = vec![0; width - digits.len()];
    out.append(&mut digits);
    out
}

pub(crate) fn from_digits(s: &[Symbol], q: u32) -> BigUint {
    s.iter().fold(BigUint::zero(), |acc, &d| acc * q + u32::from(d))
}

pub fn decompress_block(v: &Word, p: &MarkerParams) -> Result<Word> {
    check_q(v, p)?;
    if v.len() != p.compressed_len() {
        return domain(format!("compressed block has length {} instead of {}", v.len(), p.compressed_len()));
    }
    Ok(Word::from_raw(p.q, decompress(v.symbols(), p.q, p.block_len())?))
}

pub(crate) fn decompress(v: &[Symbol], q: u32, block_len: usize) -> Result<Vec<Symbol>> {
    let radix = q.pow(4) - 1;
    let skip = marker_value(q);
    let chunks = block_len / 4;
    let mut value = from_digits(v, q);
    let mut out = vec![0 as Symbol; block_len];
    for k in (0..chunks).rev() {
        let digit = (&value % radix).to_u32().expect("digit below radix");
        value /= radix;
        let v = if digit >= skip { digit + 1 } else { digit };
        let mut rest = v;
        for slot in out[4 * k..4 * k + 4].iter_mut().rev() {
            *slot = (rest % q) as Symbol;
            rest /= q;
        }
    }
    if !value.is_zero() {
        return decode_failure("compressed block is not in the image of the compressor");
    }
    Ok(out)
}

/// Fixed-width base-`q` numeral of `i − 2` for `i ∈ [2, n + 1]`.
pub fn position_code(i: usize, p: &MarkerParams) -> Result<Word> {
    if !(2..=p.n + 1).contains(&i) {
        return domain(format!("position {i} outside [2, {}]", p.n + 1));
    }
    Ok(Word::from_raw(p.q, to_digits(BigUint::from(i - 2), p.q, p.pos_len())))
}

pub fn position_decode(w: &Word, p: &MarkerParams) -> Result<usize> {
    check_q(w, p)?;
    if w.len() != p.pos_len() {
        return domain(format!("position numeral has length {} instead of {}", w.len(), p.pos_len()));
    }
    position_value(w.symbols(), p)
}

fn position_value(s: &[Symbol], p: &MarkerParams) -> Result<usize> {
    let value = from_digits(s, p.q).to_usize().filter(|&v| v + 2 <= p.n + 1);
    match value {
        Some(v) => Ok(v + 2),
        None => decode_failure("position numeral out of range"),
    }
}

/// Maps any `x ∈ Σ_q^n` into `R_{q,n+5}`.
pub fn encode_to_marker_set(x: &Word, p: &MarkerParams) -> Result<Word> {
    p.validate()?;
    check_q(x, p)?;
    if x.len() != p.n {
        return domain(format!("message has length {} instead of {}", x.len(), p.n));
    }
    let (n, delta, q) = (p.n, p.delta, p.q);
    // 1-based access helpers over `c`.
    let mut c: Vec<Symbol> = Vec::with_capacity(n + 5);
    c.push(1);
    c.extend_from_slice(x.symbols());
    c.extend_from_slice(&MARKER);
    let mut i = n + 5;
    let mut d = 1usize;
    let mut rounds = 0usize;
    let is_marker_end = |c: &[Symbol], j: usize| c[j - 4..j] == MARKER;
    while i >= d + delta {
        rounds += 1;
        if rounds > 2 * (n + 5) {
            return Err(Error::Inconsistent("marker encoder failed to terminate".into()));
        }
        let j = (d + 3..=i - 4).rev().find(|&j| is_marker_end(&c, j)).unwrap_or(d - 1);
        if i - j <= delta {
            i = j;
        } else {
            let cut = &c[i - delta..i - 4];
            let mut next = Vec::with_capacity(n + 5);
            next.push(0);
            next.extend(to_digits(BigUint::from(i - 4 - 2), q, p.pos_len()));
            next.extend(compress(cut, q, p.compressed_len()));
            next.extend_from_slice(&MARKER);
            next.extend_from_slice(&c[..i - delta]);
            next.extend_from_slice(&c[i - 4..]);
            debug_assert_eq!(next.len(), n + 5);
            c = next;
            d += delta - 4;
        }
    }
    Ok(Word::from_raw(q, c))
}

/// Inverse of [`encode_to_marker_set`].
pub fn decode_from_marker_set(c: &Word, p: &MarkerParams) -> Result<Word> {
    p.validate()?;
    check_q(c, p)?;
    let (n, delta, q) = (p.n, p.delta, p.q);
    if c.len() != n + 5 {
        return decode_failure(format!("encoded word has length {} instead of {}", c.len(), n + 5));
    }
    let pos_len = p.pos_len();
    let mut x = c.symbols().to_vec();
    let mut rounds = 0usize;
    while x[0] == 0 {
        rounds += 1;
        if rounds > n + 5 || x.len() < delta - 4 || x[delta - 8..delta - 4] != MARKER {
            return decode_failure("malformed leading block");
        }
        let ind = position_value(&x[1..=pos_len], p)?;
        if ind < delta - 4 {
            return decode_failure("leading block points inside itself");
        }
        let restored = decompress(&x[pos_len + 1..delta - 8], q, delta - 4)?;
        let mut next = Vec::with_capacity(n + 5);
        next.extend_from_slice(&x[delta - 4..ind]);
        next.extend(restored);
        next.extend_from_slice(&x[ind..]);
        x = next;
    }
    if x[0] != 1 || x[n + 1..] != MARKER {
        return decode_failure("missing start symbol or trailing marker");
    }
    Ok(Word::from_raw(q, x[1..=n].to_vec()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> Word {
        Word::parse(s, 3).unwrap()
    }

    #[test]
    fn segmentation_examples() {
        // Uses the symbol 3, so it lives over a 4-ary alphabet.
        let w4 = |s: &str| Word::parse(s, 4).unwrap();
        let s = segment(&w4("00111230320011")).unwrap();
        assert_eq!(s.segments, vec![w4("0011"), w4("1230320011")]);
        assert_eq!(segment(&w("0011")).unwrap().count(), 1);
        assert_eq!(segment(&w("00110011")).unwrap().lengths(), vec![4, 4]);
        assert!(segment(&w("0010")).is_err());
    }

    #[test]
    fn r_membership_boundaries() {
        assert!(r_membership(&w("0011"), 4));
        assert!(r_membership(&w("1200110011"), 6));
        assert!(!r_membership(&w("1200110011"), 5));
        assert!(!r_membership(&w("00110"), 8));
    }

    #[test]
    fn density_constants_for_three() {
        assert_eq!(density_constants(3), (136, 356));
        assert_eq!(encoder_constants(3), (1784, 356));
    }

    #[test]
    fn small_counts() {
        assert_eq!(count_r_set(4, 3, 4), BigUint::from(1u32));
        assert_eq!(count_r_set(5, 3, 5), BigUint::from(3u32));
        assert_eq!(count_r_set(3, 3, 8), BigUint::zero());
    }

    #[test]
    fn position_numerals() {
        let p = MarkerParams::new(3, 100, MarkerParams::smallest_delta(3, 100).unwrap()).unwrap();
        assert_eq!(p.pos_len(), 5);
        assert_eq!(position_code(2, &p).unwrap(), Word::zeros(3, 5).unwrap());
        assert_eq!(position_code(101, &p).unwrap(), w("10200"));
        assert!(position_code(1, &p).is_err());
        assert!(position_code(102, &p).is_err());
        for i in 2..=101 {
            assert_eq!(position_decode(&position_code(i, &p).unwrap(), &p).unwrap(), i);
        }
    }

    #[test]
    fn parameter_validation() {
        assert!(MarkerParams::new(3, 100, 12).is_err());
        assert!(MarkerParams::new(3, 100, 2030).is_err());
        let delta = MarkerParams::smallest_delta(3, 100).unwrap();
        assert!(MarkerParams::new(3, 100, delta - 4).is_err());
        // The density constants alone do not leave room for the compressed block.
        let (c1, c2) = density_constants(3);
        assert!(MarkerParams::new(3, 10_000, c1 + c2 * ceil_log(3, 10_000)).is_err());
        assert!(MarkerParams::new(3, 10_000, encoder_delta(3, 10_000)).is_ok());
    }
}
