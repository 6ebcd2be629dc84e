//! Multi-absorption codes built by syndrome compression.
//!
//! A [`SeparatingFunction`] gives different labels to any two words whose `t`-error balls meet.
//! Inside a single-absorption code `D`, each codeword `u` only has to be told apart from its
//! confusable neighbours, so the label is reduced modulo the smallest `P(u)` that still separates
//! it from all of them. The pair `(f(u) mod P(u), P(u))` is the compressed label `f̄(u)`, and
//! fixing `f̄ = a` carves a `t`-absorption correcting code `E` out of `D`.
//!
//! The systematic variant [`E2Code`] appends `0^t 0^t h(x) Red(0^t h(x))` to a systematic
//! single-absorption codeword, where `h(x)` is the compressed label written out in base `q`.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};

use num_bigint::BigUint;
use serde::Serialize;

use crate::channel::{absorption_ball, for_each_deletion, split_rounds, substitutions};
use crate::error::{decode_failure, domain, Error, Result};
use crate::improved::{
    d_membership, e1_decode, e1_encode, head_damaged, mixed_width, pack_mixed, unpack_mixed,
    E1Params, ImprovedParams,
};
use crate::marker::to_digits;
use crate::qary::{basic_codebook, code_membership, decode_single_absorption, BasicParams};
use crate::word::{Symbol, Word};

/// Outcome universes up to this size are tracked with dense bitsets.
const DENSE_LIMIT: u64 = 1 << 22;

/// Which error balls a [`SeparatingFunction`] keeps apart.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Relation {
    /// `t` deletions followed by up to `t` substitutions.
    DsBall,
    /// Exactly `t` absorptions.
    AbsorptionBall,
}

/// `Σ s_i q^{len−i}`, the position of a word in lexicographic order among words of its length.
fn rank(s: &[Symbol], q: u32) -> Result<u64> {
    s.iter().try_fold(0u64, |acc, &v| {
        acc.checked_mul(q as u64)
            .and_then(|a| a.checked_add(v as u64))
            .ok_or_else(|| Error::Resource(format!("words of length {} are too long to index", s.len())))
    })
}

/// The ball of `u` as sorted, deduplicated outcome ranks.
fn ball_ranks(u: &Word, t: usize, relation: Relation) -> Result<Vec<u64>> {
    let q = u.q();
    let mut out = Vec::new();
    match relation {
        Relation::DsBall => {
            if t > u.len() {
                return domain(format!("cannot delete {t} symbols from a word of length {}", u.len()));
            }
            let mut failed = None;
            for_each_deletion(u.symbols(), t, &mut |d| {
                let mut buf = d.to_vec();
                substitutions(&mut buf, 0, t, q, &mut |s| match rank(s, q) {
                    Ok(r) => out.push(r),
                    Err(e) => failed = Some(e),
                });
            });
            if let Some(e) = failed {
                return Err(e);
            }
        }
        Relation::AbsorptionBall => {
            for y in absorption_ball(u, t)? {
                out.push(rank(y.symbols(), q)?);
            }
        }
    }
    out.sort_unstable();
    out.dedup();
    Ok(out)
}

fn outcome_space(q: u32, len: usize) -> Option<u64> {
    (q as u64).checked_pow(len as u32)
}

/// Greedy colouring: each word takes the first colour none of whose earlier words shares an
/// outcome with it.
fn greedy_colors(balls: &[Vec<u64>], universe: Option<u64>) -> Vec<u64> {
    let mut colors = Vec::with_capacity(balls.len());
    match universe.filter(|&u| u <= DENSE_LIMIT) {
        Some(size) => {
            let blocks = (size as usize).div_ceil(64);
            let mut unions: Vec<Vec<u64>> = Vec::new();
            let mut mine = vec![0u64; blocks];
            for ball in balls {
                mine.iter_mut().for_each(|b| *b = 0);
                for &r in ball {
                    mine[(r / 64) as usize] |= 1 << (r % 64);
                }
                let c = match unions.iter().position(|u| u.iter().zip(&mine).all(|(a, b)| a & b == 0)) {
                    Some(c) => c,
                    None => {
                        unions.push(vec![0; blocks]);
                        unions.len() - 1
                    }
                };
                unions[c].iter_mut().zip(&mine).for_each(|(a, b)| *a |= b);
                colors.push(c as u64);
            }
        }
        None => {
            let mut unions: Vec<HashSet<u64>> = Vec::new();
            for ball in balls {
                let c = match unions.iter().position(|u| ball.iter().all(|r| !u.contains(r))) {
                    Some(c) => c,
                    None => {
                        unions.push(HashSet::new());
                        unions.len() - 1
                    }
                };
                unions[c].extend(ball);
                colors.push(c as u64);
            }
        }
    }
    colors
}

/// An integer labelling that separates every pair of words whose balls intersect (property P1).
///
/// The shipped provider is a greedy colouring of the conflict graph. Anything that fills in
/// `labels` with the same guarantee can stand in for it.
#[derive(Debug, Clone, Serialize)]
pub struct SeparatingFunction {
    pub q: u32,
    pub n: usize,
    pub t: usize,
    pub relation: Relation,
    /// Number of distinct labels used.
    pub colors: u64,
    /// Smallest power of `q` that is at least `colors`; every label lies below it.
    pub range_bound: u64,
    labels: BTreeMap<Word, u64>,
}

impl SeparatingFunction {
    /// Greedy separating function for an arbitrary set of equal-length words.
    pub fn over_words(words: &[Word], t: usize, relation: Relation) -> Result<Self> {
        let Some(first) = words.first() else {
            return domain("a separating function needs at least one word");
        };
        let (q, n) = (first.q(), first.len());
        if words.iter().any(|w| w.q() != q || w.len() != n) {
            return domain("all words must share length and alphabet");
        }
        if t == 0 || t >= n {
            return domain(format!("need 1 <= t < n, got t={t} n={n}"));
        }
        let balls = words.iter().map(|w| ball_ranks(w, t, relation)).collect::<Result<Vec<_>>>()?;
        let colors = greedy_colors(&balls, outcome_space(q, n - t));
        let used = colors.iter().max().map_or(0, |&c| c + 1);
        let mut range_bound = 1u64;
        while range_bound < used {
            range_bound *= q as u64;
        }
        let labels: BTreeMap<Word, u64> = words.iter().cloned().zip(colors).collect();
        if labels.len() != words.len() {
            return domain("duplicate words");
        }
        Ok(Self { q, n, t, relation, colors: used, range_bound, labels })
    }

    pub fn evaluate(&self, u: &Word) -> Result<u64> {
        self.labels.get(u).copied().ok_or_else(|| Error::Domain(format!("{u} is outside the labelled set")))
    }

    pub fn labels(&self) -> &BTreeMap<Word, u64> {
        &self.labels
    }

    /// Recomputes every ball and checks that words sharing an outcome carry distinct labels.
    pub fn audit(&self) -> Result<()> {
        let mut by_outcome: HashMap<u64, Vec<u64>> = HashMap::new();
        for (w, &label) in &self.labels {
            if label >= self.range_bound {
                return Err(Error::Inconsistent(format!("label {label} of {w} outside range")));
            }
            for r in ball_ranks(w, self.t, self.relation)? {
                by_outcome.entry(r).or_default().push(label);
            }
        }
        for (r, mut labels) in by_outcome {
            let before = labels.len();
            labels.sort_unstable();
            labels.dedup();
            if labels.len() != before {
                return Err(Error::Inconsistent(format!("two words reaching outcome #{r} share a label")));
            }
        }
        Ok(())
    }
}

/// Greedy separating function over all of `Σ_q^n` for the deletion-substitution relation.
pub fn brute_force_separating_function(n: usize, q: u32, t: usize, cap: u64) -> Result<SeparatingFunction> {
    match outcome_space(q, n) {
        Some(size) if size <= cap => {}
        _ => return Err(Error::Resource(format!("{q}^{n} words exceeds the cap {cap}"))),
    }
    let words: Vec<Word> = Word::all(q, n)?.collect();
    SeparatingFunction::over_words(&words, t, Relation::DsBall)
}

fn balls_meet(a: &BTreeSet<Word>, b: &BTreeSet<Word>) -> bool {
    let (small, large) = if a.len() <= b.len() { (a, b) } else { (b, a) };
    small.iter().any(|y| large.contains(y))
}

/// `N_E(u)`: the other members of `code` whose `t`-absorption ball meets that of `u`.
pub fn neighbor_set(u: &Word, code: &[Word], t: usize) -> Result<BTreeSet<Word>> {
    let mine = absorption_ball(u, t)?;
    let mut out = BTreeSet::new();
    for v in code {
        if v != u && balls_meet(&mine, &absorption_ball(v, t)?) {
            out.insert(v.clone());
        }
    }
    Ok(out)
}

/// The same set found by absorbing `u` `t` times, splitting each result `t` times and keeping
/// the code members.
pub fn neighbor_set_by_splitting(u: &Word, contains: impl Fn(&Word) -> bool, t: usize) -> Result<BTreeSet<Word>> {
    let mut out = BTreeSet::new();
    for y in absorption_ball(u, t)? {
        for v in split_rounds(&y, t)? {
            if &v != u && contains(&v) {
                out.insert(v);
            }
        }
    }
    Ok(out)
}

/// `f̄(u) = (f(u) mod P(u), P(u))`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Compressed {
    pub residue: u64,
    pub modulus: u64,
}

fn divisor_count(mut v: u64) -> u64 {
    let mut count = 1;
    let mut p = 2;
    while p * p <= v {
        let mut e = 0;
        while v.is_multiple_of(p) {
            v /= p;
            e += 1;
        }
        count *= e + 1;
        p += 1;
    }
    if v > 1 {
        count *= 2;
    }
    count
}

/// Smallest `P ≥ 1` with `value ≢ other (mod P)` for every neighbour label. At most
/// `Σ τ(|value − other|)` integers divide some difference, so the search stops one past that.
pub fn compress_syndrome(value: u64, neighbor_values: &[u64]) -> Result<Compressed> {
    let mut diffs = Vec::with_capacity(neighbor_values.len());
    for &v in neighbor_values {
        if v == value {
            return Err(Error::Inconsistent(format!("a neighbour shares the label {value}")));
        }
        diffs.push(value.abs_diff(v));
    }
    diffs.sort_unstable();
    diffs.dedup();
    let bound = diffs.iter().map(|&d| divisor_count(d)).sum::<u64>() + 1;
    for p in 1..=bound {
        if diffs.iter().all(|d| d % p != 0) {
            return Ok(Compressed { residue: value % p, modulus: p });
        }
    }
    Err(Error::Inconsistent(format!("no separating modulus up to {bound}")))
}

/// The single-absorption code that `E` is carved from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum BaseCode {
    Basic(BasicParams),
    Improved(ImprovedParams),
}

impl BaseCode {
    pub fn q(&self) -> u32 {
        match self {
            BaseCode::Basic(p) => p.q,
            BaseCode::Improved(p) => p.q,
        }
    }

    pub fn n(&self) -> usize {
        match self {
            BaseCode::Basic(p) => p.n,
            BaseCode::Improved(p) => p.n,
        }
    }

    pub fn contains(&self, x: &Word) -> Result<bool> {
        if x.q() != self.q() || x.len() != self.n() {
            return Ok(false);
        }
        match self {
            BaseCode::Basic(p) => code_membership(x, p),
            BaseCode::Improved(p) => d_membership(x, p),
        }
    }

    /// Every codeword, by filtering `Σ_q^n`.
    pub fn codewords(&self, cap: u64) -> Result<Vec<Word>> {
        let (q, n) = (self.q(), self.n());
        match outcome_space(q, n) {
            Some(size) if size <= cap => {}
            _ => return Err(Error::Resource(format!("{q}^{n} words exceeds the cap {cap}"))),
        }
        match self {
            BaseCode::Basic(p) => basic_codebook(p),
            BaseCode::Improved(p) => {
                let mut out = Vec::new();
                for x in Word::all(q, n)? {
                    if d_membership(&x, p)? {
                        out.push(x);
                    }
                }
                Ok(out)
            }
        }
    }
}

/// A base code with its compressed labels; each label value `a` selects one code `E`.
#[derive(Debug, Clone)]
pub struct MultiCode {
    pub base: BaseCode,
    pub t: usize,
    pub codewords: Vec<Word>,
    /// `f̄` of each codeword, same order.
    pub labels: Vec<Compressed>,
    /// Indices of `N_D(u)` for each codeword.
    pub neighbors: Vec<Vec<usize>>,
    /// Largest modulus used.
    pub pmax: u64,
    index: HashMap<Word, usize>,
}

/// `q^{2t−2} n^{2t−1}`.
pub fn neighbor_bound(q: u32, n: usize, t: usize) -> u128 {
    (q as u128).pow(2 * t as u32 - 2) * (n as u128).pow(2 * t as u32 - 1)
}

/// `q^{2t−2} n^{t−1}`.
pub fn candidate_bound(q: u32, n: usize, t: usize) -> u128 {
    (q as u128).pow(2 * t as u32 - 2) * (n as u128).pow(t as u32 - 1)
}

impl MultiCode {
    pub fn build(base: BaseCode, t: usize, sep: &SeparatingFunction, cap: u64) -> Result<Self> {
        let words = base.codewords(cap)?;
        Self::with_codewords(base, words, t, sep)
    }

    /// Like [`MultiCode::build`] with the codewords supplied by the caller.
    pub fn with_codewords(base: BaseCode, codewords: Vec<Word>, t: usize, sep: &SeparatingFunction) -> Result<Self> {
        if t < 2 {
            return domain(format!("multi-absorption codes need t >= 2, got {t}"));
        }
        if sep.t < t || sep.q != base.q() || sep.n != base.n() {
            return domain("separating function does not cover this code");
        }
        for x in &codewords {
            if !base.contains(x)? {
                return domain(format!("{x} is not in the base code"));
            }
        }
        let index: HashMap<Word, usize> = codewords.iter().cloned().enumerate().map(|(i, w)| (w, i)).collect();
        let mut centers: HashMap<Word, Vec<usize>> = HashMap::new();
        for (i, x) in codewords.iter().enumerate() {
            for y in absorption_ball(x, t)? {
                centers.entry(y).or_default().push(i);
            }
        }
        let mut neighbors: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); codewords.len()];
        for group in centers.values() {
            for &i in group {
                neighbors[i].extend(group.iter().copied().filter(|&j| j != i));
            }
        }
        let neighbors: Vec<Vec<usize>> = neighbors.into_iter().map(|s| s.into_iter().collect()).collect();
        let bound = neighbor_bound(base.q(), base.n(), t);
        if let Some(worst) = neighbors.iter().map(Vec::len).max() {
            if worst as u128 >= bound {
                return Err(Error::Inconsistent(format!("{worst} neighbours reach the bound {bound}")));
            }
        }
        let values = codewords.iter().map(|x| sep.evaluate(x)).collect::<Result<Vec<_>>>()?;
        let labels = neighbors
            .iter()
            .enumerate()
            .map(|(i, nb)| {
                let others: Vec<u64> = nb.iter().map(|&j| values[j]).collect();
                compress_syndrome(values[i], &others)
            })
            .collect::<Result<Vec<_>>>()?;
        let pmax = labels.iter().map(|c| c.modulus).max().unwrap_or(1);
        Ok(Self { base, t, codewords, labels, neighbors, pmax, index })
    }

    /// Digits per numeral of `f̄`: enough for every modulus up to `pmax`.
    pub fn label_width(&self) -> usize {
        digits_for(self.pmax, self.base.q())
    }

    /// `f̄` written as two base-`q` numerals of [`MultiCode::label_width`] digits.
    pub fn label_word(&self, c: Compressed) -> Word {
        label_word(c, self.base.q(), self.label_width())
    }

    pub fn label_of(&self, x: &Word) -> Option<Compressed> {
        self.index.get(x).map(|&i| self.labels[i])
    }

    /// Distinct label values with the number of codewords carrying each.
    pub fn classes(&self) -> BTreeMap<Compressed, usize> {
        let mut out = BTreeMap::new();
        for &c in &self.labels {
            *out.entry(c).or_insert(0) += 1;
        }
        out
    }

    /// The label value shared by the most codewords.
    pub fn largest_class(&self) -> Option<Compressed> {
        let classes = self.classes();
        classes.iter().max_by_key(|&(c, &k)| (k, std::cmp::Reverse(*c))).map(|(&c, _)| c)
    }

    pub fn codewords_of(&self, a: Compressed) -> Vec<&Word> {
        self.codewords.iter().zip(&self.labels).filter(|&(_, &c)| c == a).map(|(w, _)| w).collect()
    }

    pub fn parameter_file<'a>(&'a self, a: Compressed, sep: &'a SeparatingFunction) -> MultiParamsFile<'a> {
        MultiParamsFile { base: &self.base, t: self.t, a, pmax: self.pmax, label_width: self.label_width(), separating: sep }
    }
}

/// What a code parameter file records.
#[derive(Debug, Serialize)]
pub struct MultiParamsFile<'a> {
    pub base: &'a BaseCode,
    pub t: usize,
    pub a: Compressed,
    pub pmax: u64,
    pub label_width: usize,
    pub separating: &'a SeparatingFunction,
}

/// `⌈log_q(v + 1)⌉`, at least one digit.
fn digits_for(v: u64, q: u32) -> usize {
    let mut width = 1;
    let mut power = q as u128;
    while power <= v as u128 {
        power *= q as u128;
        width += 1;
    }
    width
}

fn label_word(c: Compressed, q: u32, width: usize) -> Word {
    let mut s = to_digits(BigUint::from(c.residue), q, width);
    s.extend(to_digits(BigUint::from(c.modulus), q, width));
    Word::from_raw(q, s)
}

/// `x ∈ E`: a base codeword whose compressed label is `a`.
pub fn e_membership(x: &Word, code: &MultiCode, a: Compressed) -> Result<bool> {
    if !code.base.contains(x)? {
        return Ok(false);
    }
    match code.label_of(x) {
        Some(c) => Ok(c == a),
        None => domain(format!("{x} is a base codeword missing from the label table")),
    }
}

/// Recovers the codeword of `E` with label `a` from `t` absorptions of it.
pub fn decode_t_absorptions(y: &Word, code: &MultiCode, a: Compressed) -> Result<Word> {
    let (n, t) = (code.base.n(), code.t);
    if y.len() != n - t {
        return domain(format!("received length {} instead of {}", y.len(), n - t));
    }
    let mut candidates = Vec::new();
    for v in split_rounds(y, t)? {
        if code.base.contains(&v)? {
            candidates.push(v);
        }
    }
    let bound = candidate_bound(code.base.q(), n, t);
    if candidates.len() as u128 > bound {
        return Err(Error::Inconsistent(format!("{} candidates exceed {bound}", candidates.len())));
    }
    let mut hits = candidates.into_iter().filter(|v| code.label_of(v) == Some(a));
    match (hits.next(), hits.next()) {
        (Some(v), None) => Ok(v),
        (None, _) => decode_failure("no candidate carries the target label"),
        (Some(_), Some(_)) => decode_failure("several candidates carry the target label"),
    }
}

/// A systematic code that corrects one absorption.
pub trait SystematicSingleCode {
    fn q(&self) -> u32;
    fn message_len(&self) -> usize;
    fn codeword_len(&self) -> usize;
    fn encode(&self, x: &Word) -> Result<Word>;
    fn decode(&self, y: &Word) -> Result<Word>;
}

impl SystematicSingleCode for E1Params {
    fn q(&self) -> u32 {
        self.marker.q
    }

    fn message_len(&self) -> usize {
        self.marker.n
    }

    fn codeword_len(&self) -> usize {
        E1Params::codeword_len(self)
    }

    fn encode(&self, x: &Word) -> Result<Word> {
        e1_encode(x, self)
    }

    fn decode(&self, y: &Word) -> Result<Word> {
        e1_decode(y, self)
    }
}

/// `x 1 · 010 · Q`, with `Q` the packed parameters of the basic code holding `x 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SystematicBasic {
    pub q: u32,
    pub n: usize,
}

impl SystematicBasic {
    pub fn new(q: u32, n: usize) -> Result<Self> {
        if !(3..=crate::word::MAX_Q).contains(&q) || n < 2 {
            return domain(format!("need q >= 3 and n >= 2, got q={q} n={n}"));
        }
        Ok(Self { q, n })
    }

    fn radices(&self) -> Vec<u64> {
        let (q, m) = (self.q as u64, self.n as u64 + 1);
        let mut r = vec![4u64; q as usize - 1];
        r.extend([m, 2, q * m, 2 * m - 3]);
        r
    }

    pub fn packed_len(&self) -> usize {
        mixed_width(&self.radices(), self.q)
    }
}

impl SystematicSingleCode for SystematicBasic {
    fn q(&self) -> u32 {
        self.q
    }

    fn message_len(&self) -> usize {
        self.n
    }

    fn codeword_len(&self) -> usize {
        self.n + 4 + self.packed_len()
    }

    fn encode(&self, x: &Word) -> Result<Word> {
        if x.q() != self.q || x.len() != self.n {
            return domain(format!("message must have length {} over q={}", self.n, self.q));
        }
        let mut s = x.symbols().to_vec();
        s.push(1);
        let p = BasicParams::of_word(&Word::from_raw(self.q, s.clone()))?;
        let mut digits: Vec<u64> = p.s.iter().map(|&v| v.into()).collect();
        digits.extend([p.t1 as u64, p.t2.into(), p.d1 as u64, p.d2 as u64]);
        s.extend([0, 1, 0]);
        s.extend(pack_mixed(&digits, &self.radices(), self.q));
        Ok(Word::from_raw(self.q, s))
    }

    fn decode(&self, y: &Word) -> Result<Word> {
        let (head, total) = (self.n + 1, self.codeword_len());
        let s = y.symbols();
        let h = if head_damaged(s, head, total)? {
            let d = unpack_mixed(&s[head + 2..], &self.radices(), self.q)?;
            let k = self.q as usize - 1;
            let s_counts = d[..k].iter().map(|&v| v as u8).collect();
            let p = BasicParams::new(self.q, head, s_counts, d[k] as usize, d[k + 1] as u8, d[k + 2] as usize, d[k + 3] as usize)?;
            decode_single_absorption(&Word::from_raw(self.q, s[..head - 1].to_vec()), &p)?
        } else {
            Word::from_raw(self.q, s[..head].to_vec())
        };
        if h.at(head) != 1 {
            return decode_failure("systematic head does not end in 1");
        }
        Ok(h.range(1, self.n))
    }
}

/// `S(x) 0^t 0^t h(x) Red(0^t h(x))` over every message of the inner code.
#[derive(Debug, Clone)]
pub struct E2Code<S> {
    pub inner: S,
    pub t: usize,
    /// Length of `S(x) 0^t`.
    pub n1: usize,
    /// Full codeword length.
    pub n2: usize,
    pub label_width: usize,
    /// Length of each `Red` word.
    pub rho: usize,
    /// Separating function over the words `S(x) 0^t`.
    pub separating: SeparatingFunction,
    /// `S(x) 0^t` to `(x, h(x))`.
    heads: HashMap<Word, (Word, Word)>,
    /// `0^t h` to its `Red` word.
    red: HashMap<Word, Word>,
    /// Every `t`-absorption of every `0^t h Red(0^t h)`, mapped to `h`.
    tails: HashMap<Word, Word>,
}

impl<S: SystematicSingleCode> E2Code<S> {
    /// Enumerates all `q^k` messages; `cap` bounds that count.
    pub fn build(inner: S, t: usize, cap: u64) -> Result<Self> {
        let (q, k) = (inner.q(), inner.message_len());
        if t < 1 {
            return domain("E2 needs t >= 1");
        }
        match outcome_space(q, k) {
            Some(size) if size <= cap => {}
            _ => return Err(Error::Resource(format!("{q}^{k} messages exceeds the cap {cap}"))),
        }
        let zeros = vec![0 as Symbol; t];
        let mut messages = Vec::new();
        let mut words = Vec::new();
        for x in Word::all(q, k)? {
            let mut c = inner.encode(&x)?.into_symbols();
            c.extend(&zeros);
            words.push(Word::from_raw(q, c));
            messages.push(x);
        }
        let n1 = words[0].len();
        let separating = SeparatingFunction::over_words(&words, t, Relation::AbsorptionBall)?;
        let mut centers: HashMap<Word, Vec<usize>> = HashMap::new();
        for (i, w) in words.iter().enumerate() {
            for y in absorption_ball(w, t)? {
                centers.entry(y).or_default().push(i);
            }
        }
        let mut neighbors: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); words.len()];
        for group in centers.values() {
            for &i in group {
                neighbors[i].extend(group.iter().copied().filter(|&j| j != i));
            }
        }
        let values = words.iter().map(|w| separating.evaluate(w)).collect::<Result<Vec<_>>>()?;
        let labels = neighbors
            .iter()
            .enumerate()
            .map(|(i, nb)| compress_syndrome(values[i], &nb.iter().map(|&j| values[j]).collect::<Vec<_>>()))
            .collect::<Result<Vec<_>>>()?;
        let pmax = labels.iter().map(|c| c.modulus).max().unwrap_or(1);
        let label_width = digits_for(pmax, q);
        let mut heads = HashMap::new();
        let mut entries = BTreeSet::new();
        for ((w, x), c) in words.into_iter().zip(messages).zip(labels) {
            let h = label_word(c, q, label_width);
            let mut e = zeros.clone();
            e.extend(h.symbols());
            entries.insert(Word::from_raw(q, e));
            heads.insert(w, (x, h));
        }
        let (rho, red, tails) = red_table(&entries.into_iter().collect::<Vec<_>>(), t)?;
        let n2 = n1 + t + 2 * label_width + rho;
        Ok(Self { inner, t, n1, n2, label_width, rho, separating, heads, red, tails })
    }

    /// Codeword symbols beyond the message.
    pub fn redundancy(&self) -> usize {
        self.n2 - self.inner.message_len()
    }

    /// The two parts `c1 = S(x) 0^t` and `c2 = 0^t h(x) Red(0^t h(x))`.
    pub fn parts(&self, x: &Word) -> Result<(Word, Word)> {
        let mut c1 = self.inner.encode(x)?.into_symbols();
        c1.extend(std::iter::repeat_n(0, self.t));
        let c1 = Word::from_raw(x.q(), c1);
        let Some((_, h)) = self.heads.get(&c1) else {
            return domain(format!("message {x} was not enumerated"));
        };
        let mut c2 = vec![0; self.t];
        c2.extend(h.symbols());
        let c2 = Word::from_raw(x.q(), c2);
        let r = &self.red[&c2];
        Ok((c1, c2.concat(r)?))
    }

    pub fn encode(&self, x: &Word) -> Result<Word> {
        let (c1, c2) = self.parts(x)?;
        c1.concat(&c2)
    }

    /// Inverts up to `t` absorptions.
    pub fn decode(&self, y: &Word) -> Result<Word> {
        let (t, n1, n2) = (self.t, self.n1, self.n2);
        if y.len() + t < n2 || y.len() > n2 {
            return domain(format!("received length {} outside [{}, {n2}]", y.len(), n2 - t));
        }
        // Dropping trailing symbols turns fewer than t absorptions into exactly t.
        let y = y.range(1, n2 - t);
        let Some(h) = self.tails.get(&y.range(n1 + 1, n2 - t)) else {
            return decode_failure("protected tail matches no label");
        };
        let mut found = None;
        for v in split_rounds(&y.range(1, n1 - t), t)? {
            if let Some((x, hv)) = self.heads.get(&v) {
                if hv == h {
                    if found.is_some() {
                        return decode_failure("several heads carry the recovered label");
                    }
                    found = Some(x.clone());
                }
            }
        }
        found.ok_or_else(|| Error::DecodeFailure("no head carries the recovered label".into()))
    }
}

/// Shortest `ρ` for which every entry gets a suffix in `Σ_q^ρ` whose `t`-absorption ball avoids
/// those of the entries already placed; suffixes are chosen greedily in lexicographic order.
#[allow(clippy::type_complexity)]
fn red_table(entries: &[Word], t: usize) -> Result<(usize, HashMap<Word, Word>, HashMap<Word, Word>)> {
    let q = entries[0].q();
    let h_len = entries[0].len() - t;
    'rho: for rho in 0..=64 {
        let Some(space) = outcome_space(q, rho).filter(|&s| s <= 1 << 20) else { break };
        let mut red = HashMap::new();
        let mut tails: HashMap<Word, Word> = HashMap::new();
        for e in entries {
            let mut placed = false;
            for r in Word::all(q, rho)?.take(space as usize) {
                let c = e.concat(&r)?;
                if c.len() <= t {
                    continue 'rho;
                }
                let ball = absorption_ball(&c, t)?;
                if ball.iter().any(|y| tails.contains_key(y)) {
                    continue;
                }
                let h = e.range(t + 1, t + h_len);
                for y in ball {
                    tails.insert(y, h.clone());
                }
                red.insert(e.clone(), r);
                placed = true;
                break;
            }
            if !placed {
                continue 'rho;
            }
        }
        return Ok((rho, red, tails));
    }
    Err(Error::Resource("no redundancy length separates the labels".into()))
}
