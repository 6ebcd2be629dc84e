//! Zero-run counts, the weighted transversal sum, exact matching numbers, and the prefix-sum
//! bijection between contractions and deletions.

use std::collections::BTreeSet;

use absorption::binary_vt::{absorption_decode_binary, vt_membership, VtParams};
use absorption::bounds::{
    brute_force_optimum, fractional_transversal_value, matching_upper_bound, weight_sum, zero_run_class_count,
    zero_run_class_count_exact, BoundReport,
};
use absorption::channel::{contraction_ball, deletion_ball};
use absorption::equivalence::{
    classify_contraction_case, equivalence_check, in_a, in_b, phi, phi_inverse, ContractionCase,
};
use absorption::stats::{symbol_counts, zero_run_count};
use absorption::Word;
use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use proptest::prelude::*;

fn w(s: &str, q: u32) -> Word {
    Word::parse(s, q).unwrap()
}

/// Every maximal run of nonzero symbols repeats one symbol.
fn constant_nonzero_runs(y: &Word) -> bool {
    y.symbols().windows(2).all(|p| p[0] == 0 || p[1] == 0 || p[0] == p[1])
}

#[test]
fn zero_run_counts_against_enumeration() {
    for q in [2u32, 3] {
        for n in 2..=9 {
            let words: Vec<Word> = Word::all(q, n - 1).unwrap().collect();
            for k in 1..=n / 2 {
                let with_k = || words.iter().filter(|y| zero_run_count(y) == k);
                let exact = zero_run_class_count_exact(n, q, k).unwrap();
                assert_eq!(exact, BigUint::from(with_k().count()), "q={q} n={n} k={k}");
                let formula = zero_run_class_count(n, q, k).unwrap();
                let constant = with_k().filter(|y| constant_nonzero_runs(y)).count();
                assert_eq!(formula, BigUint::from(constant), "q={q} n={n} k={k}");
                if q == 2 {
                    assert_eq!(formula, exact);
                }
            }
            let exact_total: BigUint = (1..=n / 2).map(|k| zero_run_class_count_exact(n, q, k).unwrap()).sum();
            assert_eq!(exact_total + BigUint::from(q - 1).pow(n as u32 - 1), BigUint::from(q).pow(n as u32 - 1));
        }
    }
    // With three symbols the displayed count misses words such as 012 (one zero run, k = 1).
    assert_eq!(zero_run_class_count(4, 3, 1).unwrap(), BigUint::from(13u32));
    assert_eq!(zero_run_class_count_exact(4, 3, 1).unwrap(), BigUint::from(17u32));
    for n in 2..=14 {
        let total: BigUint = (1..=n / 2).map(|k| zero_run_class_count(n, 2, k).unwrap()).sum();
        assert_eq!(total + BigUint::from(1u32), BigUint::from(2u32).pow(n as u32 - 1));
    }
}

fn direct_weight_sum(q: u32, n: usize) -> BigRational {
    Word::all(q, n - 1)
        .unwrap()
        .map(|y| match zero_run_count(&y) {
            0 => BigRational::from_integer(1.into()),
            r => BigRational::new(1.into(), BigInt::from(r)),
        })
        .sum()
}

#[test]
fn weighted_sums_against_direct_summation() {
    assert_eq!(fractional_transversal_value(2, 2).unwrap(), BigRational::from_integer(2.into()));
    for q in [2u32, 3] {
        for n in 2..=8 {
            let direct = direct_weight_sum(q, n);
            assert_eq!(weight_sum(q, n).unwrap(), direct, "q={q} n={n}");
            let four_term = fractional_transversal_value(q, n).unwrap();
            if q == 2 {
                assert_eq!(four_term, direct, "n={n}");
            } else if n >= 4 {
                assert!(four_term < direct, "n={n}");
            }
        }
    }
}

#[test]
fn weights_cover_every_zero_deletion_set() {
    for q in [2u32, 3] {
        for n in 2..=7 {
            for x in Word::all(q, n).unwrap().filter(|x| x.count(0) > 0) {
                let edge: BTreeSet<Word> = (1..=n)
                    .filter(|&i| x.at(i) == 0)
                    .map(|i| x.range(1, i - 1).concat(&x.range(i + 1, n)).unwrap())
                    .collect();
                assert_eq!(edge.len(), zero_run_count(&x));
                let mass: f64 = edge.iter().map(|y| 1.0 / zero_run_count(y).max(1) as f64).sum();
                assert!(mass >= 1.0 - 1e-12, "x={x}");
            }
        }
    }
}

/// Matching number by trying every subset of distinct edges.
fn matching_by_subsets(q: u32, n: usize) -> u32 {
    let mut edges: Vec<BTreeSet<Word>> = Word::all(q, n)
        .unwrap()
        .filter(|x| x.count(0) > 0)
        .map(|x| (1..=n).filter(|&i| x.at(i) == 0).map(|i| x.range(1, i - 1).concat(&x.range(i + 1, n)).unwrap()).collect())
        .collect();
    edges.sort();
    edges.dedup();
    assert!(edges.len() < 24);
    let mut best = 0;
    for mask in 0u32..1 << edges.len() {
        if mask.count_ones() <= best {
            continue;
        }
        let mut seen = BTreeSet::new();
        let ok = (0..edges.len()).filter(|i| mask >> i & 1 == 1).all(|i| edges[i].iter().all(|y| seen.insert(y.clone())));
        if ok {
            best = mask.count_ones();
        }
    }
    best
}

#[test]
fn exact_optimum_sits_below_the_transversal() {
    for (q, n) in [(2u32, 2usize), (2, 3), (2, 4), (3, 2), (3, 3)] {
        assert_eq!(brute_force_optimum(q, n).unwrap() as u32, matching_by_subsets(q, n), "q={q} n={n}");
    }
    let mut prev = 0;
    for n in 2..=7 {
        let opt = brute_force_optimum(2, n).unwrap();
        assert!(opt >= prev);
        assert!(BigRational::from_integer(opt.into()) <= fractional_transversal_value(2, n).unwrap());
        prev = opt;
    }
    for n in 2..=5 {
        let opt = brute_force_optimum(3, n).unwrap();
        assert!(BigRational::from_integer(opt.into()) <= weight_sum(3, n).unwrap(), "n={n}");
    }
    assert!(brute_force_optimum(3, 7).is_err());
}

#[test]
fn closed_form_bound() {
    let (a, c) = matching_upper_bound(2, 12).unwrap();
    assert_eq!((a, c), (BigUint::from(2050u32), BigUint::from(2051u32)));
    // 8·2^12/9 = 3640.9
    assert_eq!(matching_upper_bound(2, 13).unwrap().0, BigUint::from(2u32 + 3641));
    assert!(matching_upper_bound(2, 11).is_err());
    assert!(matching_upper_bound(13, 12).is_err());
    let report = BoundReport::new(2, 12, false).unwrap();
    assert!(report.transversal_value <= BigRational::from_integer(BigInt::from(2050)));
    assert_eq!(report.transversal_value, report.weight_sum);
    let report = BoundReport::new(2, 6, true).unwrap();
    assert!(report.formula_bound.is_none());
    assert!(report.brute_force_optimum.unwrap() >= 1);
}

#[test]
fn prefix_sum_small_case() {
    let x = w("0121201", 3);
    let y = phi(&x, 1).unwrap();
    assert_eq!(y, w("00101001", 3));
    assert_eq!(phi_inverse(&y, 1).unwrap(), x);
    let contracted = w("001201", 3);
    assert!(contraction_ball(&x, 1).unwrap().contains(&contracted));
    let image = phi(&contracted, 1).unwrap();
    assert_eq!(image, w("0001001", 3));
    assert_eq!(image, y.range(1, 2).concat(&y.range(4, 8)).unwrap());
    // Two contractions at x_2 x_3 x_4 become deleting y_3 and y_4.
    let twice = w("01201", 3);
    assert!(contraction_ball(&x, 2).unwrap().contains(&twice));
    assert_eq!(phi(&twice, 0).unwrap(), y.range(1, 2).concat(&y.range(5, 8)).unwrap());
    assert!(equivalence_check(&x, 1).unwrap());
    assert!(phi(&w("0121201", 3), 2).is_err());
    assert!(phi_inverse(&w("0101", 3), 1).is_err());
}

#[test]
fn prefix_sums_biject_the_two_sets() {
    for n in 1..=8 {
        for t in 0..=2usize.min(n) {
            let a: Vec<Word> = Word::all(3, n).unwrap().filter(|x| in_a(x, t)).collect();
            let images: BTreeSet<Word> = a.iter().map(|x| phi(x, t).unwrap()).collect();
            assert_eq!(images.len(), a.len());
            let b: BTreeSet<Word> = Word::all(3, n + 1).unwrap().filter(|y| in_b(y, t)).collect();
            assert_eq!(images, b);
            for x in &a {
                assert_eq!(&phi_inverse(&phi(x, t).unwrap(), t).unwrap(), x);
            }
        }
    }
}

#[test]
fn contractions_become_deletions() {
    for n in 2..=7 {
        for t in 1..=2usize.min(n - 1) {
            for x in Word::all(3, n).unwrap().filter(|x| in_a(x, t)) {
                assert!(equivalence_check(&x, t).unwrap(), "x={x} t={t}");
            }
            let zero = Word::zeros(3, n).unwrap();
            assert_eq!(contraction_ball(&zero, t).unwrap().len(), 1);
            assert_eq!(deletion_ball(&phi(&zero, t).unwrap(), t).unwrap().len(), 1);
        }
    }
    assert!(equivalence_check(&w("1000", 3), 1).is_err());
}

#[test]
fn contraction_cases_match_count_changes() {
    for q in 3u32..=5 {
        for a in 0..q as u8 {
            for b in 0..q as u8 {
                let case = classify_contraction_case(a, b, q).unwrap();
                match case {
                    ContractionCase::ZeroDeletion => assert!(a == 0 || b == 0),
                    ContractionCase::Doubled { a: s, .. } => assert!(a == b && s == a),
                    ContractionCase::Mixed { .. } => assert!(a != b && a != 0 && b != 0),
                }
                let x = Word::new(q, vec![1, a, b, 2]).unwrap();
                let y = Word::new(q, vec![1, ((a as u32 + b as u32) % q) as u8, 2]).unwrap();
                let (cx, cy) = (symbol_counts(&x), symbol_counts(&y));
                let mut expected = vec![0i64; q as usize];
                for (s, d) in case.count_deltas() {
                    expected[s as usize] += d;
                }
                let actual: Vec<i64> = (0..q as usize).map(|s| cx[s] as i64 - cy[s] as i64).collect();
                assert_eq!(actual, expected, "q={q} a={a} b={b}");
            }
        }
    }
    assert!(classify_contraction_case(3, 0, 3).is_err());
}

#[test]
fn vt_codewords_survive_losing_a_zero() {
    for n in 2..=8 {
        let p = VtParams::new(n, 0).unwrap();
        for c in Word::all(2, n).unwrap().filter(|c| vt_membership(c, p).unwrap() && c.count(0) > 0) {
            for i in (1..=n).filter(|&i| c.at(i) == 0) {
                let y = c.range(1, i - 1).concat(&c.range(i + 1, n)).unwrap();
                assert_eq!(absorption_decode_binary(&y, p).unwrap(), c);
            }
        }
    }
}

proptest! {
    #[test]
    fn prefix_sums_invert(q in 2u32..9, body in proptest::collection::vec(0u32..1000, 0..40), t in 0usize..4) {
        let mut s = vec![0u8; t];
        s.extend(body.iter().map(|v| (v % q) as u8));
        let x = Word::new(q, s).unwrap();
        let y = phi(&x, t).unwrap();
        prop_assert!(in_b(&y, t));
        prop_assert_eq!(phi_inverse(&y, t).unwrap(), x);
    }
}
