//! Separating functions, neighbour sets, label compression and the two multi-absorption codes,
//! checked exhaustively at small lengths.

use std::collections::{BTreeSet, HashMap};
use std::sync::OnceLock;
use std::time::Instant;

use absorption::channel::{absorption_ball, ds_ball, Ball};
use absorption::multi::{
    brute_force_separating_function, compress_syndrome, decode_t_absorptions, e_membership,
    neighbor_bound, neighbor_set, neighbor_set_by_splitting, BaseCode, Compressed, E2Code, MultiCode,
    SeparatingFunction, SystematicBasic, SystematicSingleCode,
};
use absorption::qary::basic_classes;
use absorption::{Error, Word};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const CAP: u64 = 1 << 16;

fn separating(n: usize) -> &'static SeparatingFunction {
    static SEP: [OnceLock<SeparatingFunction>; 9] = [const { OnceLock::new() }; 9];
    SEP[n].get_or_init(|| brute_force_separating_function(n, 3, 2, CAP).unwrap())
}

/// Independent P1 check over every pair, using the set-valued deletion-substitution balls.
fn pairwise_separation(sep: &SeparatingFunction) {
    let words: Vec<(&Word, u64)> = sep.labels().iter().map(|(w, &l)| (w, l)).collect();
    let balls: Vec<Ball> = words.iter().map(|(w, _)| ds_ball(w, sep.t).unwrap()).collect();
    for i in 0..words.len() {
        for j in i + 1..words.len() {
            if balls[i].iter().any(|y| balls[j].contains(y)) {
                assert_ne!(words[i].1, words[j].1, "{} and {}", words[i].0, words[j].0);
            }
        }
    }
}

#[test]
fn brute_force_labels_separate_conflicting_pairs() {
    let sep = brute_force_separating_function(5, 3, 1, CAP).unwrap();
    sep.audit().unwrap();
    pairwise_separation(&sep);
    assert!(sep.colors <= sep.range_bound && sep.range_bound < 3 * sep.colors);
    assert_eq!(3u64.pow(sep.range_bound.ilog(3)), sep.range_bound);
    assert!(sep.labels().values().all(|&l| l < sep.range_bound));

    let binary = brute_force_separating_function(4, 2, 1, CAP).unwrap();
    binary.audit().unwrap();
    pairwise_separation(&binary);
    assert!(binary.colors < 16);

    assert!(matches!(brute_force_separating_function(12, 3, 2, CAP), Err(Error::Resource(_))));
}

#[test]
fn confusable_pair_gets_two_labels() {
    let words: Vec<Word> = ["0000", "0001"].iter().map(|s| Word::parse(s, 3).unwrap()).collect();
    let sep = SeparatingFunction::over_words(&words, 1, absorption::multi::Relation::DsBall).unwrap();
    assert_ne!(sep.evaluate(&words[0]).unwrap(), sep.evaluate(&words[1]).unwrap());
    let lone = SeparatingFunction::over_words(&words[..1], 1, absorption::multi::Relation::DsBall).unwrap();
    assert_eq!(lone.colors, 1);
    lone.audit().unwrap();
    assert!(lone.evaluate(&words[1]).is_err());
}

#[test]
fn compression_separates_from_every_neighbor() {
    assert_eq!(compress_syndrome(17, &[]).unwrap(), Compressed { residue: 0, modulus: 1 });
    let c = compress_syndrome(10, &[4, 16, 22, 3]).unwrap();
    // 6, 6, 12 and 7 are the differences; 2, 3, 4 and 6 all divide one, 5 divides none.
    assert_eq!(c, Compressed { residue: 0, modulus: 5 });
    assert!(matches!(compress_syndrome(3, &[3]), Err(Error::Inconsistent(_))));
}

struct Sweep {
    classes: usize,
    codes: usize,
    decoded: usize,
    max_neighbors: usize,
}

/// Every basic class of `Σ_3^n`, every label value and every 2-absorption of every codeword.
fn exhaustive(n: usize) -> Sweep {
    let sep = separating(n);
    let mut s = Sweep { classes: 0, codes: 0, decoded: 0, max_neighbors: 0 };
    for (params, words) in basic_classes(3, n).unwrap() {
        let code = MultiCode::with_codewords(BaseCode::Basic(params), words, 2, sep).unwrap();
        s.classes += 1;
        let balls: Vec<Ball> = code.codewords.iter().map(|x| absorption_ball(x, 2).unwrap()).collect();
        let values: Vec<u64> = code.codewords.iter().map(|x| sep.evaluate(x).unwrap()).collect();
        for (i, x) in code.codewords.iter().enumerate() {
            let direct = neighbor_set(x, &code.codewords, 2).unwrap();
            let nb: BTreeSet<Word> = code.neighbors[i].iter().map(|&j| code.codewords[j].clone()).collect();
            assert_eq!(nb, direct, "x={x}");
            let split = neighbor_set_by_splitting(x, |v| code.base.contains(v).unwrap(), 2).unwrap();
            assert_eq!(split, direct, "x={x}");
            s.max_neighbors = s.max_neighbors.max(direct.len());
            let own = code.labels[i];
            for &j in &code.neighbors[i] {
                assert_ne!(values[i] % own.modulus, values[j] % own.modulus);
                assert_ne!(own, code.labels[j]);
            }
        }
        for (a, _) in code.classes() {
            s.codes += 1;
            let members: Vec<usize> = (0..code.codewords.len()).filter(|&i| code.labels[i] == a).collect();
            for (k, &i) in members.iter().enumerate() {
                assert!(e_membership(&code.codewords[i], &code, a).unwrap());
                for &j in &members[k + 1..] {
                    assert!(balls[i].is_disjoint(&balls[j]));
                }
                for y in &balls[i] {
                    assert_eq!(decode_t_absorptions(y, &code, a).as_ref(), Ok(&code.codewords[i]));
                    s.decoded += 1;
                }
            }
        }
    }
    assert!((s.max_neighbors as u128) < neighbor_bound(3, n, 2));
    s
}

#[test]
fn every_code_at_length_seven_corrects_two_absorptions() {
    let started = Instant::now();
    let s = exhaustive(7);
    assert!(s.classes > 100 && s.codes >= s.classes && s.decoded > 0);
    eprintln!("n=7: {} classes, {} codes, {} words decoded in {:?}", s.classes, s.codes, s.decoded, started.elapsed());
}

#[test]
fn every_code_at_length_eight_corrects_two_absorptions() {
    let started = Instant::now();
    let s = exhaustive(8);
    assert!(s.max_neighbors > 0);
    eprintln!("n=8: {} classes, {} codes, {} words decoded in {:?}", s.classes, s.codes, s.decoded, started.elapsed());
}

#[test]
fn separating_functions_pass_the_audit() {
    for n in [7, 8] {
        separating(n).audit().unwrap();
    }
    pairwise_separation(separating(7));
}

#[test]
fn all_zero_codeword_and_lone_codes() {
    let sep = separating(7);
    let classes = basic_classes(3, 7).unwrap();
    let zero = Word::zeros(3, 7).unwrap();
    let (params, words) = classes.iter().find(|(_, w)| w.contains(&zero)).unwrap().clone();
    let code = MultiCode::with_codewords(BaseCode::Basic(params), words, 2, sep).unwrap();
    let a = code.label_of(&zero).unwrap();
    assert_eq!(decode_t_absorptions(&Word::zeros(3, 5).unwrap(), &code, a).unwrap(), zero);
    assert!(neighbor_set(&zero, std::slice::from_ref(&zero), 2).unwrap().is_empty());
}

#[test]
fn words_outside_every_ball_are_rejected() {
    let sep = separating(7);
    let (params, words) = basic_classes(3, 7).unwrap().into_iter().max_by_key(|(_, w)| w.len()).unwrap();
    let code = MultiCode::with_codewords(BaseCode::Basic(params), words, 2, sep).unwrap();
    let a = code.largest_class().unwrap();
    let covered: Ball = code.codewords_of(a).iter().flat_map(|x| absorption_ball(x, 2).unwrap()).collect();
    let mut rejected = 0;
    for y in Word::all(3, 5).unwrap() {
        let r = decode_t_absorptions(&y, &code, a);
        if covered.contains(&y) {
            assert!(r.is_ok());
        } else {
            assert!(matches!(r, Err(Error::DecodeFailure(_))), "y={y}");
            rejected += 1;
        }
    }
    assert!(rejected > 0);
    assert!(decode_t_absorptions(&Word::zeros(3, 6).unwrap(), &code, a).is_err());
}

#[test]
fn systematic_basic_corrects_one_absorption() {
    for n in 2..=5 {
        let s = SystematicBasic::new(3, n).unwrap();
        for x in Word::all(3, n).unwrap() {
            let c = s.encode(&x).unwrap();
            assert_eq!(c.len(), s.codeword_len());
            assert_eq!(s.decode(&c).unwrap(), x);
            for y in absorption_ball(&c, 1).unwrap() {
                assert_eq!(s.decode(&y).as_ref(), Ok(&x), "x={x} y={y}");
            }
        }
    }
}

fn in_ball(y: &Word, c: &Word, t: usize) -> bool {
    absorption_ball(c, t).unwrap().contains(y)
}

#[test]
fn e2_corrects_every_two_absorptions_at_length_three() {
    let code = E2Code::build(SystematicBasic::new(3, 3).unwrap(), 2, CAP).unwrap();
    code.separating.audit().unwrap();
    let n1 = code.n1;
    let mut checked = 0;
    for x in Word::all(3, 3).unwrap() {
        let c = code.encode(&x).unwrap();
        assert_eq!(c.len(), code.n2);
        assert_eq!(code.decode(&c).unwrap(), x);
        let (c1, c2) = code.parts(&x).unwrap();
        for y in absorption_ball(&c, 1).unwrap() {
            assert_eq!(code.decode(&y).as_ref(), Ok(&x));
        }
        for y in absorption_ball(&c, 2).unwrap() {
            // Each part of the corrupted word lies in the ball of the matching part.
            assert!(in_ball(&y.range(1, n1 - 2), &c1, 2), "x={x} y={y}");
            assert!(in_ball(&y.range(n1 + 1, code.n2 - 2), &c2, 2), "x={x} y={y}");
            assert_eq!(code.decode(&y).as_ref(), Ok(&x), "x={x} y={y}");
            checked += 1;
        }
    }
    assert!(checked > 0);
    eprintln!("E2 n=3: redundancy {} (rho {}), {checked} words", code.redundancy(), code.rho);
}

#[test]
fn e2_corrects_sampled_absorptions_at_length_four() {
    let code = E2Code::build(SystematicBasic::new(3, 4).unwrap(), 2, CAP).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let messages: Vec<Word> = Word::all(3, 4).unwrap().collect();
    let mut owner: HashMap<Word, Word> = HashMap::new();
    for _ in 0..25 {
        let x = &messages[rng.gen_range(0..messages.len())];
        let c = code.encode(x).unwrap();
        for y in absorption_ball(&c, 2).unwrap() {
            assert_eq!(code.decode(&y).as_ref(), Ok(x), "x={x} y={y}");
            if let Some(prev) = owner.insert(y.clone(), x.clone()) {
                assert_eq!(&prev, x);
            }
        }
    }
}

#[test]
fn e2_rejects_garbage() {
    let code = E2Code::build(SystematicBasic::new(3, 3).unwrap(), 2, CAP).unwrap();
    assert!(code.decode(&Word::zeros(3, code.n2 - 3).unwrap()).is_err());
    let twos = Word::new(3, vec![2; code.n2 - 2]).unwrap();
    assert!(matches!(code.decode(&twos), Err(Error::DecodeFailure(_))));
}

proptest! {
    #[test]
    fn compressed_label_separates(value in 0u64..5000, others in proptest::collection::vec(0u64..5000, 0..40)) {
        let others: Vec<u64> = others.into_iter().filter(|&v| v != value).collect();
        let c = compress_syndrome(value, &others).unwrap();
        prop_assert_eq!(c.residue, value % c.modulus);
        for v in &others {
            prop_assert_ne!(v % c.modulus, c.residue);
        }
        for p in 1..c.modulus {
            prop_assert!(others.iter().any(|v| v % p == value % p));
        }
    }
}
