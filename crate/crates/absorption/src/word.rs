//! Words over a finite alphabet `{0, …, q−1}` and the two symbol-combining operators.

use std::fmt;

use serde::{Deserialize, Serialize, Serializer};

use crate::error::{domain, Error, Result};

pub type Symbol = u8;

/// Largest supported alphabet; symbols are stored as bytes.
pub const MAX_Q: u32 = 256;

/// A finite sequence over `Σ_q`. The alphabet size travels with the symbols so that
/// words over different alphabets can never be silently mixed.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Word {
    q: u32,
    symbols: Vec<Symbol>,
}

fn check_q(q: u32) -> Result<()> {
    if !(2..=MAX_Q).contains(&q) {
        return domain(format!("alphabet size {q} outside [2, {MAX_Q}]"));
    }
    Ok(())
}

impl Word {
    pub fn new(q: u32, symbols: Vec<Symbol>) -> Result<Self> {
        check_q(q)?;
        if let Some(bad) = symbols.iter().find(|&&s| u32::from(s) >= q) {
            return domain(format!("symbol {bad} not in alphabet of size {q}"));
        }
        Ok(Self { q, symbols })
    }

    /// Caller guarantees every symbol is below `q`.
    pub(crate) fn from_raw(q: u32, symbols: Vec<Symbol>) -> Self {
        debug_assert!(symbols.iter().all(|&s| u32::from(s) < q));
        Self { q, symbols }
    }

    pub fn zeros(q: u32, len: usize) -> Result<Self> {
        check_q(q)?;
        Ok(Self { q, symbols: vec![0; len] })
    }

    pub fn empty(q: u32) -> Result<Self> {
        Self::zeros(q, 0)
    }

    /// Parses the text format: a digit string for `q ≤ 10`, comma-separated decimals otherwise.
    pub fn parse(text: &str, q: u32) -> Result<Self> {
        check_q(q)?;
        let text = text.trim();
        let symbols: Vec<Symbol> = if q <= 10 {
            text.chars()
                .map(|c| {
                    c.to_digit(10)
                        .map(|d| d as Symbol)
                        .ok_or_else(|| Error::Domain(format!("'{c}' is not a digit")))
                })
                .collect::<Result<_>>()?
        } else if text.is_empty() {
            Vec::new()
        } else {
            text.split(',')
                .map(|tok| {
                    tok.trim()
                        .parse::<u32>()
                        .ok()
                        .filter(|&v| v < 256)
                        .map(|v| v as Symbol)
                        .ok_or_else(|| Error::Domain(format!("'{tok}' is not a symbol")))
                })
                .collect::<Result<_>>()?
        };
        Self::new(q, symbols)
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.symbols
    }

    pub fn into_symbols(self) -> Vec<Symbol> {
        self.symbols
    }

    /// Largest symbol of the alphabet, `q − 1`.
    pub fn top(&self) -> Symbol {
        (self.q - 1) as Symbol
    }

    /// Symbol at 1-based position `i`.
    pub fn at(&self, i: usize) -> Symbol {
        self.symbols[i - 1]
    }

    /// Sub-word covering the 1-based inclusive range `[from, to]`; empty when `to < from`.
    pub fn range(&self, from: usize, to: usize) -> Word {
        if to < from {
            return Self::from_raw(self.q, Vec::new());
        }
        Self::from_raw(self.q, self.symbols[from - 1..to].to_vec())
    }

    pub fn concat(&self, other: &Word) -> Result<Word> {
        self.same_alphabet(other)?;
        let mut symbols = self.symbols.clone();
        symbols.extend_from_slice(&other.symbols);
        Ok(Self::from_raw(self.q, symbols))
    }

    pub fn same_alphabet(&self, other: &Word) -> Result<()> {
        if self.q != other.q {
            return Err(Error::AlphabetMismatch(self.q, other.q));
        }
        Ok(())
    }

    pub fn count(&self, symbol: Symbol) -> usize {
        self.symbols.iter().filter(|&&s| s == symbol).count()
    }

    pub fn ends_with(&self, suffix: &[Symbol]) -> bool {
        self.symbols.ends_with(suffix)
    }

    /// Every word of `Σ_q^n` in lexicographic order.
    pub fn all(q: u32, n: usize) -> Result<impl Iterator<Item = Word>> {
        check_q(q)?;
        let total = (q as u64).checked_pow(n as u32).filter(|&t| t <= 1 << 32);
        let Some(total) = total else {
            return Err(Error::Resource(format!("{q}^{n} words is too many to enumerate")));
        };
        Ok((0..total).map(move |mut index| {
            let mut symbols = vec![0 as Symbol; n];
            for slot in symbols.iter_mut().rev() {
                *slot = (index % q as u64) as Symbol;
                index /= q as u64;
            }
            Word { q, symbols }
        }))
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.q <= 10 {
            for &s in &self.symbols {
                write!(f, "{s}")?;
            }
            Ok(())
        } else {
            let parts: Vec<String> = self.symbols.iter().map(|s| s.to_string()).collect();
            f.write_str(&parts.join(","))
        }
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Word(q={}, {})", self.q, self)
    }
}

impl Serialize for Word {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

fn check_symbol(a: Symbol, q: u32) -> Result<()> {
    check_q(q)?;
    if u32::from(a) >= q {
        return domain(format!("symbol {a} not in alphabet of size {q}"));
    }
    Ok(())
}

/// `a ⊕ b = min(a + b, q − 1)`.
pub fn saturating_add(a: Symbol, b: Symbol, q: u32) -> Result<Symbol> {
    check_symbol(a, q)?;
    check_symbol(b, q)?;
    Ok(sat(a, b, q))
}

/// `a ⊞ b = (a + b) mod q`.
pub fn modular_add(a: Symbol, b: Symbol, q: u32) -> Result<Symbol> {
    check_symbol(a, q)?;
    check_symbol(b, q)?;
    Ok(wrap(a, b, q))
}

#[inline]
pub(crate) fn sat(a: Symbol, b: Symbol, q: u32) -> Symbol {
    (u32::from(a) + u32::from(b)).min(q - 1) as Symbol
}

#[inline]
pub(crate) fn wrap(a: Symbol, b: Symbol, q: u32) -> Symbol {
    ((u32::from(a) + u32::from(b)) % q) as Symbol
}

/// One absorption event: symbols `start ..= start + absorbed` (1-based) collapse into one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Event {
    pub start: usize,
    pub absorbed: usize,
}

/// A multi-absorption descriptor: a set of non-overlapping collapse events plus a
/// number of symbols dropped from the end of the word.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct AbsorptionPattern {
    pub t_prime: usize,
    pub events: Vec<Event>,
}

impl AbsorptionPattern {
    pub fn new(t_prime: usize, events: &[(usize, usize)]) -> Self {
        Self {
            t_prime,
            events: events.iter().map(|&(start, absorbed)| Event { start, absorbed }).collect(),
        }
    }

    /// A single collapse of positions `p` and `p + 1`.
    pub fn merge(p: usize) -> Self {
        Self::new(0, &[(p, 1)])
    }

    /// Dropping the final symbol.
    pub fn drop_last() -> Self {
        Self::new(1, &[])
    }

    /// A weight-`t` pattern for a word of length `n`: a uniform number of dropped symbols, then
    /// a uniform set of merged adjacent pairs, consecutive merges forming one event.
    pub fn random<R: rand::Rng + ?Sized>(n: usize, t: usize, rng: &mut R) -> Result<Self> {
        if t > 0 && t >= n {
            return Err(Error::InvalidPattern(format!("weight {t} not below length {n}")));
        }
        let t_prime = rng.gen_range(0..=t);
        let gaps = (n - t_prime).saturating_sub(1);
        let mut chosen = rand::seq::index::sample(rng, gaps, t - t_prime).into_vec();
        chosen.sort_unstable();
        let mut events: Vec<Event> = Vec::new();
        for g in chosen {
            match events.last_mut() {
                Some(e) if e.start + e.absorbed == g + 1 => e.absorbed += 1,
                _ => events.push(Event { start: g + 1, absorbed: 1 }),
            }
        }
        Ok(Self { t_prime, events })
    }

    /// Reads `t'/i:s,i:s,…` (for example `0/2:2,6:1`); a bare `t'` means no events.
    pub fn parse(text: &str) -> Result<Self> {
        let bad = || Error::InvalidPattern(format!("cannot read pattern '{text}'"));
        let (tail, events) = text.trim().split_once('/').unwrap_or((text.trim(), ""));
        let t_prime = tail.trim().parse().map_err(|_| bad())?;
        let events = events
            .split(',')
            .filter(|e| !e.trim().is_empty())
            .map(|e| {
                let (i, s) = e.split_once(':').ok_or_else(bad)?;
                Ok(Event { start: i.trim().parse().map_err(|_| bad())?, absorbed: s.trim().parse().map_err(|_| bad())? })
            })
            .collect::<Result<_>>()?;
        Ok(Self { t_prime, events })
    }

    /// Total error weight `t`.
    pub fn weight(&self) -> usize {
        self.t_prime + self.events.iter().map(|e| e.absorbed).sum::<usize>()
    }

    /// Checks the pattern against a word of length `n`.
    pub fn validate(&self, n: usize) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidPattern(m));
        let t = self.weight();
        if t > 0 && t >= n {
            return bad(format!("weight {t} not below length {n}"));
        }
        let usable = n - self.t_prime;
        let mut prev: Option<Event> = None;
        for e in &self.events {
            if e.start == 0 || e.absorbed == 0 {
                return bad(format!("event {e:?} must have start >= 1 and absorbed >= 1"));
            }
            if let Some(p) = prev {
                if e.start <= p.start + p.absorbed {
                    return bad(format!("events {p:?} and {e:?} overlap"));
                }
            }
            if e.start + e.absorbed > usable {
                return bad(format!("event {e:?} runs past position {usable}"));
            }
            prev = Some(*e);
        }
        Ok(())
    }
}

impl fmt::Display for AbsorptionPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/", self.t_prime)?;
        let parts: Vec<String> = self.events.iter().map(|e| format!("{}:{}", e.start, e.absorbed)).collect();
        f.write_str(&parts.join(","))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pattern_text_round_trips() {
        let p = AbsorptionPattern::new(0, &[(2, 2), (6, 1)]);
        assert_eq!(p.to_string(), "0/2:2,6:1");
        assert_eq!(AbsorptionPattern::parse("0/2:2,6:1").unwrap(), p);
        assert_eq!(AbsorptionPattern::parse("1").unwrap(), AbsorptionPattern::drop_last());
        assert!(AbsorptionPattern::parse("x/1:1").is_err());
        assert!(AbsorptionPattern::parse("0/1-1").is_err());
    }

    #[test]
    fn random_patterns_are_valid() {
        use rand::SeedableRng;
        let mut rng = rand::rngs::StdRng::seed_from_u64(1);
        for n in 1..12 {
            for t in 0..n {
                for _ in 0..20 {
                    let p = AbsorptionPattern::random(n, t, &mut rng).unwrap();
                    assert_eq!(p.weight(), t);
                    p.validate(n).unwrap();
                }
            }
        }
        assert!(AbsorptionPattern::random(3, 3, &mut rng).is_err());
    }

    #[test]
    fn operators_on_small_values() {
        assert_eq!(saturating_add(1, 2, 3).unwrap(), 2);
        assert_eq!(saturating_add(1, 1, 3).unwrap(), 2);
        assert_eq!(saturating_add(0, 4, 7).unwrap(), 4);
        assert_eq!(modular_add(1, 2, 3).unwrap(), 0);
        assert_eq!(modular_add(2, 2, 3).unwrap(), 1);
        assert_eq!(modular_add(0, 5, 9).unwrap(), 5);
        assert!(saturating_add(3, 0, 3).is_err());
        assert!(modular_add(0, 9, 4).is_err());
    }

    #[test]
    fn operators_are_associative_and_commutative() {
        for q in 2..=6u32 {
            for a in 0..q as Symbol {
                for b in 0..q as Symbol {
                    assert_eq!(sat(a, b, q), sat(b, a, q));
                    assert_eq!(wrap(a, b, q), wrap(b, a, q));
                    for c in 0..q as Symbol {
                        assert_eq!(sat(sat(a, b, q), c, q), sat(a, sat(b, c, q), q));
                        assert_eq!(wrap(wrap(a, b, q), c, q), wrap(a, wrap(b, c, q), q));
                    }
                }
            }
        }
    }

    #[test]
    fn text_format_round_trips() {
        let w = Word::parse("021211", 3).unwrap();
        assert_eq!(w.to_string(), "021211");
        let big = Word::parse("0,12,3", 13).unwrap();
        assert_eq!(big.symbols(), &[0, 12, 3]);
        assert_eq!(big.to_string(), "0,12,3");
        assert!(Word::parse("013", 3).is_err());
        assert!(Word::parse("0,13", 13).is_err());
        assert!(Word::new(1, vec![]).is_err());
    }

    #[test]
    fn mismatched_alphabets_are_rejected() {
        let a = Word::parse("01", 2).unwrap();
        let b = Word::parse("01", 3).unwrap();
        assert_eq!(a.concat(&b), Err(Error::AlphabetMismatch(2, 3)));
        assert_ne!(a, b);
    }

    #[test]
    fn pattern_validation() {
        assert!(AbsorptionPattern::new(0, &[(2, 2), (6, 1)]).validate(9).is_ok());
        assert!(AbsorptionPattern::new(0, &[(2, 2), (4, 1)]).validate(9).is_err());
        assert!(AbsorptionPattern::new(1, &[(7, 1)]).validate(9).is_ok());
        assert!(AbsorptionPattern::new(1, &[(8, 1)]).validate(9).is_err());
        assert!(AbsorptionPattern::new(2, &[]).validate(2).is_err());
    }
}
