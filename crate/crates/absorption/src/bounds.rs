//! Upper bounds on the largest single-absorption code.
//!
//! Words of `Σ_q^n` that contain a zero lose one zero under an absorption `0 ⊕ a` or `a ⊕ 0`,
//! so a code is a matching in the hypergraph on `Σ_q^{n−1}` whose edges are the zero-deletion
//! sets `D(x)`. The weight `w(y) = 1/r0(y)` (and 1 on zero-free words) is a fractional
//! transversal of that hypergraph, so its total bounds the matching number.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

use crate::error::{domain, Error, Result};
use crate::word::Word;

fn binom(n: i64, k: i64) -> BigUint {
    if k < 0 || n < 0 || k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc = acc * BigUint::from((n - i) as u64) / BigUint::from((i + 1) as u64);
    }
    acc
}

fn pow(base: u32, e: usize) -> BigUint {
    num_traits::pow(BigUint::from(base), e)
}

fn check_k(n: usize, k: usize) -> Result<()> {
    if n < 2 {
        return domain(format!("need n >= 2, got {n}"));
    }
    if k == 0 || k > n / 2 {
        return domain(format!("k={k} outside [1, {}]", n / 2));
    }
    Ok(())
}

/// `C(n−2, 2k)(q−1)^{k+1} + 2C(n−2, 2k−1)(q−1)^k + C(n−2, 2k−2)(q−1)^{k−1}`.
///
/// This counts words of length `n − 1` with `k` zero runs when every nonzero run repeats a
/// single symbol, which is exact for `q = 2` and an undercount for larger alphabets; see
/// [`zero_run_class_count_exact`].
pub fn zero_run_class_count(n: usize, q: u32, k: usize) -> Result<BigUint> {
    check_k(n, k)?;
    let (m, k) = (n as i64 - 2, k as i64);
    let r = q - 1;
    Ok(binom(m, 2 * k) * pow(r, k as usize + 1)
        + BigUint::from(2u32) * binom(m, 2 * k - 1) * pow(r, k as usize)
        + binom(m, 2 * k - 2) * pow(r, k as usize - 1))
}

/// Compositions of `total` into `parts` positive parts.
fn compositions(total: usize, parts: usize) -> BigUint {
    match (total, parts) {
        (0, 0) => BigUint::one(),
        (_, 0) | (0, _) => BigUint::zero(),
        _ => binom(total as i64 - 1, parts as i64 - 1),
    }
}

/// Number of words in `Σ_q^{n−1}` with exactly `k` zero runs, every nonzero symbol free.
pub fn zero_run_class_count_exact(n: usize, q: u32, k: usize) -> Result<BigUint> {
    check_k(n, k)?;
    let len = n - 1;
    let mut total = BigUint::zero();
    for zeros in k..=len {
        let rest = len - zeros;
        let placements = compositions(rest, k + 1)
            + BigUint::from(2u32) * compositions(rest, k)
            + compositions(rest, k - 1);
        total += compositions(zeros, k) * placements * pow(q - 1, rest);
    }
    Ok(total)
}

fn weighted(n: usize, q: u32, count: impl Fn(usize) -> Result<BigUint>) -> Result<BigRational> {
    if n < 2 || q < 2 {
        return domain(format!("need q >= 2 and n >= 2, got q={q} n={n}"));
    }
    let mut sum = BigRational::from_integer(BigInt::from(pow(q - 1, n - 1)));
    for k in 1..=n / 2 {
        sum += BigRational::new(BigInt::from(count(k)?), BigInt::from(k));
    }
    Ok(sum)
}

/// `(q−1)^{n−1} + Σ_k (1/k)·`[`zero_run_class_count`]`(n, q, k)`.
pub fn fractional_transversal_value(q: u32, n: usize) -> Result<BigRational> {
    weighted(n, q, |k| zero_run_class_count(n, q, k))
}

/// `Σ_{y ∈ Σ_q^{n−1}} w(y)` in closed form via [`zero_run_class_count_exact`].
pub fn weight_sum(q: u32, n: usize) -> Result<BigRational> {
    weighted(n, q, |k| zero_run_class_count_exact(n, q, k))
}

/// `⌈(q−1)^{n−1} + 1 + 8q^{n−1}/((q−1)(n−4))⌉` and that plus `(q−1)^n`.
pub fn matching_upper_bound(q: u32, n: usize) -> Result<(BigUint, BigUint)> {
    if q < 2 || n < 12 || n < q as usize {
        return domain(format!("the bound needs q >= 2, n >= 12 and n >= q, got q={q} n={n}"));
    }
    let num = BigUint::from(8u32) * pow(q, n - 1);
    let den = BigUint::from(q - 1) * BigUint::from(n - 4);
    let frac = (&num + &den - BigUint::one()) / den;
    let a = pow(q - 1, n - 1) + BigUint::one() + frac;
    let c = &a + pow(q - 1, n);
    Ok((a, c))
}

fn rank(s: &[u8], q: u32) -> usize {
    s.iter().fold(0usize, |acc, &v| acc * q as usize + v as usize)
}

/// Zero-deletion hyperedges `D(x)` over `Σ_q^{n−1}`, deduplicated, as vertex bitmasks.
fn zero_deletion_edges(q: u32, n: usize) -> Result<Vec<u128>> {
    let mut edges = Vec::new();
    for x in Word::all(q, n)? {
        let s = x.symbols();
        let mut edge = 0u128;
        for i in 0..n {
            // One deletion per zero run: removing any zero of a run gives the same word.
            if s[i] == 0 && (i + 1 == n || s[i + 1] != 0) {
                let mut y = s.to_vec();
                y.remove(i);
                edge |= 1 << rank(&y, q);
            }
        }
        if edge != 0 {
            edges.push(edge);
        }
    }
    edges.sort_unstable();
    edges.dedup();
    Ok(edges)
}

/// Largest number of pairwise disjoint zero-deletion sets `D(x)`, `x ∈ Σ_q^n` containing a
/// zero. Branch and bound over the lowest free vertex, pruned with the weights `w`.
pub fn brute_force_optimum(q: u32, n: usize) -> Result<u64> {
    if q < 2 || n < 2 {
        return domain(format!("need q >= 2 and n >= 2, got q={q} n={n}"));
    }
    let vertices = (q as u64).checked_pow(n as u32 - 1).filter(|&v| v <= 128);
    let Some(vertices) = vertices else {
        return Err(Error::Resource(format!("{q}^{} vertices exceeds 128", n - 1)));
    };
    let vertices = vertices as usize;
    let edges = zero_deletion_edges(q, n)?;
    let mut by_vertex: Vec<Vec<u128>> = vec![Vec::new(); vertices];
    for &e in &edges {
        by_vertex[e.trailing_zeros() as usize].push(e);
    }
    // Scaled weights: w(y)·lcm so that the bound is integral.
    let lcm = (1..=n as u64 / 2).fold(1u64, |l, k| l / gcd(l, k) * k);
    let weight: Vec<u64> = Word::all(q, n - 1)?
        .map(|y| match crate::stats::zero_run_count(&y) {
            0 => lcm,
            r => lcm / r as u64,
        })
        .collect();
    let all = if vertices == 128 { u128::MAX } else { (1u128 << vertices) - 1 };
    let mut best = 0;
    search(all, 0, &by_vertex, &weight, lcm, &mut best);
    Ok(best)
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn search(free: u128, count: u64, by_vertex: &[Vec<u128>], weight: &[u64], lcm: u64, best: &mut u64) {
    let mut rest = free;
    let mut mass = 0;
    while rest != 0 {
        mass += weight[rest.trailing_zeros() as usize];
        rest &= rest - 1;
    }
    if count + mass / lcm <= *best {
        return;
    }
    // Edges are filed under their lowest vertex, so the lowest free vertex with a fitting
    // edge is either covered by one of its own edges or never covered.
    let mut rest = free;
    while rest != 0 {
        let v = rest.trailing_zeros() as usize;
        let fits: Vec<u128> = by_vertex[v].iter().copied().filter(|&e| e & free == e).collect();
        if fits.is_empty() {
            rest &= rest - 1;
            continue;
        }
        for e in fits {
            search(free & !e, count + 1, by_vertex, weight, lcm, best);
        }
        search(free & !(1 << v), count, by_vertex, weight, lcm, best);
        return;
    }
    *best = (*best).max(count);
}

fn as_text<S: Serializer>(v: &BigRational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_str(v)
}

fn as_text_opt<S: Serializer>(v: &Option<BigUint>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match v {
        Some(v) => s.collect_str(v),
        None => s.serialize_none(),
    }
}

/// Every bound available for one `(q, n)`.
#[derive(Debug, Clone, Serialize)]
pub struct BoundReport {
    pub q: u32,
    pub n: usize,
    /// Closed-form bound on the matching number; needs `n ≥ 12` and `n ≥ q`.
    #[serde(serialize_with = "as_text_opt")]
    pub formula_bound: Option<BigUint>,
    /// `formula_bound + (q−1)^n`, the bound on the whole code.
    #[serde(serialize_with = "as_text_opt")]
    pub c_max_bound: Option<BigUint>,
    #[serde(serialize_with = "as_text")]
    pub transversal_value: BigRational,
    pub transversal_approx: f64,
    #[serde(serialize_with = "as_text")]
    pub weight_sum: BigRational,
    pub weight_sum_approx: f64,
    pub brute_force_optimum: Option<u64>,
}

impl BoundReport {
    pub fn new(q: u32, n: usize, brute_force: bool) -> Result<Self> {
        let (formula_bound, c_max_bound) = match matching_upper_bound(q, n) {
            Ok((a, c)) => (Some(a), Some(c)),
            Err(_) => (None, None),
        };
        let transversal_value = fractional_transversal_value(q, n)?;
        let weight_sum = weight_sum(q, n)?;
        let brute_force_optimum = if brute_force { Some(brute_force_optimum(q, n)?) } else { None };
        Ok(Self {
            q,
            n,
            formula_bound,
            c_max_bound,
            transversal_approx: transversal_value.to_f64().unwrap_or(f64::INFINITY),
            transversal_value,
            weight_sum_approx: weight_sum.to_f64().unwrap_or(f64::INFINITY),
            weight_sum,
            brute_force_optimum,
        })
    }
}
