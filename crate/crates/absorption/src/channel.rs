//! Channel operations: applying absorption or contraction patterns, and enumerating the
//! absorption, contraction, deletion and deletion-substitution balls.

use std::collections::BTreeSet;

use rand::Rng;

use crate::error::{domain, Result};
use crate::word::{sat, wrap, AbsorptionPattern, Symbol, Word};

/// Which operator collapses adjacent symbols.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Collapse {
    /// `⊕`, saturating at `q − 1` (absorption).
    Saturating,
    /// `⊞`, addition modulo `q` (contraction).
    Modular,
}

impl Collapse {
    #[inline]
    fn apply(self, a: Symbol, b: Symbol, q: u32) -> Symbol {
        match self {
            Collapse::Saturating => sat(a, b, q),
            Collapse::Modular => wrap(a, b, q),
        }
    }
}

pub type Ball = BTreeSet<Word>;

fn apply_pattern(x: &Word, p: &AbsorptionPattern, op: Collapse) -> Result<Word> {
    p.validate(x.len())?;
    let q = x.q();
    let xs = &x.symbols()[..x.len() - p.t_prime];
    let mut out = Vec::with_capacity(x.len() - p.weight());
    let mut pos = 0;
    for e in &p.events {
        let start = e.start - 1;
        out.extend_from_slice(&xs[pos..start]);
        let merged = xs[start + 1..=start + e.absorbed]
            .iter()
            .fold(xs[start], |acc, &s| op.apply(acc, s, q));
        out.push(merged);
        pos = start + e.absorbed + 1;
    }
    out.extend_from_slice(&xs[pos..]);
    Ok(Word::from_raw(q, out))
}

/// Applies a multi-absorption pattern.
pub fn apply_absorptions(x: &Word, p: &AbsorptionPattern) -> Result<Word> {
    apply_pattern(x, p, Collapse::Saturating)
}

/// Applies a multi-contraction pattern (same shape, `⊞` in place of `⊕`).
pub fn apply_contraction(x: &Word, p: &AbsorptionPattern) -> Result<Word> {
    apply_pattern(x, p, Collapse::Modular)
}

/// `t` absorptions applied one after another, each a uniform choice among the `|x|` single
/// absorptions of the current word (`|x| − 1` merges and dropping the last symbol).
pub fn random_absorptions<R: Rng + ?Sized>(x: &Word, t: usize, rng: &mut R) -> Result<Word> {
    check_weight(x, t)?;
    let mut y = x.clone();
    for _ in 0..t {
        let p = rng.gen_range(1..=y.len());
        y = if p == y.len() { y.range(1, p - 1) } else { absorb_at(&y, p) };
    }
    Ok(y)
}

/// Collapses positions `p` and `p + 1` (1-based) with `⊕`. Fast path used by sweeps.
pub fn absorb_at(x: &Word, p: usize) -> Word {
    let s = x.symbols();
    let mut out = Vec::with_capacity(s.len() - 1);
    out.extend_from_slice(&s[..p - 1]);
    out.push(sat(s[p - 1], s[p], x.q()));
    out.extend_from_slice(&s[p + 1..]);
    Word::from_raw(x.q(), out)
}

fn check_weight(x: &Word, t: usize) -> Result<()> {
    if t > 0 && t >= x.len() {
        return domain(format!("error weight {t} must be below word length {}", x.len()));
    }
    Ok(())
}

/// Every pattern of total weight `t` on a word of length `n`, in canonical order.
pub fn patterns(n: usize, t: usize) -> Result<Vec<AbsorptionPattern>> {
    if t > 0 && t >= n {
        return domain(format!("error weight {t} must be below word length {n}"));
    }
    fn rec(
        pos: usize,
        m: usize,
        left: usize,
        cur: &mut Vec<(usize, usize)>,
        t_prime: usize,
        out: &mut Vec<AbsorptionPattern>,
    ) {
        if left == 0 {
            out.push(AbsorptionPattern::new(t_prime, cur));
            return;
        }
        for start in pos..m {
            for s in 1..=left {
                if start + s >= m {
                    break;
                }
                cur.push((start + 1, s));
                rec(start + s + 1, m, left - s, cur, t_prime, out);
                cur.pop();
            }
        }
    }
    let mut out = Vec::new();
    for t_prime in 0..=t {
        rec(0, n - t_prime, t - t_prime, &mut Vec::new(), t_prime, &mut out);
    }
    Ok(out)
}

fn collapse_ball(x: &Word, t: usize, op: Collapse) -> Result<Ball> {
    check_weight(x, t)?;
    fn rec(
        xs: &[Symbol],
        q: u32,
        op: Collapse,
        pos: usize,
        left: usize,
        out: &mut Vec<Symbol>,
        ball: &mut Ball,
    ) {
        let m = xs.len();
        if left > 0 && m - pos < left + 1 {
            return;
        }
        if pos == m {
            ball.insert(Word::from_raw(q, out.clone()));
            return;
        }
        out.push(xs[pos]);
        rec(xs, q, op, pos + 1, left, out, ball);
        out.pop();
        let mut acc = xs[pos];
        for s in 1..=left {
            if pos + s >= m {
                break;
            }
            acc = op.apply(acc, xs[pos + s], q);
            out.push(acc);
            rec(xs, q, op, pos + s + 1, left - s, out, ball);
            out.pop();
        }
    }
    let mut ball = Ball::new();
    for t_prime in 0..=t {
        let prefix = &x.symbols()[..x.len() - t_prime];
        rec(prefix, x.q(), op, 0, t - t_prime, &mut Vec::new(), &mut ball);
    }
    Ok(ball)
}

/// All words reachable from `x` by exactly `t` absorptions.
pub fn absorption_ball(x: &Word, t: usize) -> Result<Ball> {
    collapse_ball(x, t, Collapse::Saturating)
}

/// All words reachable from `x` by exactly `t` contractions.
pub fn contraction_ball(x: &Word, t: usize) -> Result<Ball> {
    collapse_ball(x, t, Collapse::Modular)
}

/// All subsequences of `x` of length `|x| − t`.
pub fn deletion_ball(x: &Word, t: usize) -> Result<Ball> {
    check_weight(x, t)?;
    let mut ball = Ball::new();
    for_each_deletion(x.symbols(), t, &mut |s| {
        ball.insert(Word::from_raw(x.q(), s.to_vec()));
    });
    Ok(ball)
}

/// Calls `f` on every length-`|xs| − t` subsequence (with repetition).
pub(crate) fn for_each_deletion(xs: &[Symbol], t: usize, f: &mut dyn FnMut(&[Symbol])) {
    fn rec(xs: &[Symbol], pos: usize, left: usize, out: &mut Vec<Symbol>, f: &mut dyn FnMut(&[Symbol])) {
        if pos == xs.len() {
            if left == 0 {
                f(out);
            }
            return;
        }
        if xs.len() - pos > left {
            out.push(xs[pos]);
            rec(xs, pos + 1, left, out, f);
            out.pop();
        }
        if left > 0 {
            rec(xs, pos + 1, left - 1, out, f);
        }
    }
    rec(xs, 0, t, &mut Vec::with_capacity(xs.len()), f);
}

/// All words reachable by `t` deletions followed by at most `t` substitutions.
pub fn ds_ball(x: &Word, t: usize) -> Result<Ball> {
    let q = x.q();
    let mut ball = Ball::new();
    for d in deletion_ball(x, t)? {
        let mut buf = d.into_symbols();
        substitutions(&mut buf, 0, t, q, &mut |s| {
            ball.insert(Word::from_raw(q, s.to_vec()));
        });
    }
    Ok(ball)
}

/// Calls `f` on every word within Hamming distance `left` of `buf` (restoring `buf` afterwards).
pub(crate) fn substitutions(
    buf: &mut Vec<Symbol>,
    pos: usize,
    left: usize,
    q: u32,
    f: &mut dyn FnMut(&[Symbol]),
) {
    f(buf);
    if left == 0 {
        return;
    }
    for i in pos..buf.len() {
        let orig = buf[i];
        for v in 0..q as Symbol {
            if v == orig {
                continue;
            }
            buf[i] = v;
            substitutions(buf, i + 1, left - 1, q, f);
        }
        buf[i] = orig;
    }
}

/// Every word one splitting away from `z`: an appended symbol, or some `z_i` replaced by a
/// pair `ab` with `a ⊕ b = z_i`.
pub fn splittings(z: &Word) -> Result<Ball> {
    if z.is_empty() {
        return domain("splitting needs a non-empty word");
    }
    let q = z.q();
    let s = z.symbols();
    let mut out = Ball::new();
    for v in 0..q as Symbol {
        let mut w = s.to_vec();
        w.push(v);
        out.insert(Word::from_raw(q, w));
    }
    for i in 0..s.len() {
        for a in 0..q as Symbol {
            for b in 0..q as Symbol {
                if sat(a, b, q) != s[i] {
                    continue;
                }
                let mut w = Vec::with_capacity(s.len() + 1);
                w.extend_from_slice(&s[..i]);
                w.push(a);
                w.push(b);
                w.extend_from_slice(&s[i + 1..]);
                out.insert(Word::from_raw(q, w));
            }
        }
    }
    Ok(out)
}

/// Applies `t` rounds of splitting with deduplication after each round.
pub fn split_rounds(z: &Word, t: usize) -> Result<Ball> {
    let mut layer: Ball = std::iter::once(z.clone()).collect();
    for _ in 0..t {
        let mut next = Ball::new();
        for w in &layer {
            next.extend(splittings(w)?);
        }
        layer = next;
    }
    Ok(layer)
}
