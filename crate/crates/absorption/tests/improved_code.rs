//! Window localization, interval bookkeeping and the improved decoder, checked against
//! direct absorption at every position of sampled codewords.

use absorption::channel::absorb_at;
use absorption::improved::{
    block_syndrome, d_membership, random_member, decode_improved, e1_decode, e1_encode, e1_leading_term,
    e1_redundancy, g1_hat, g2_hat, intervals, locate_window, pack_syndromes, unpack_syndromes,
    window_bound, E1Params, ImprovedParams, WindowOutcome,
};
use absorption::marker::{r_membership, segment, MarkerParams, MARKER};
use absorption::qary::BlockSyndrome;
use absorption::{Error, Word};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const DELTA: usize = 12;

/// One segment of the given length whose only marker is its suffix.
fn random_segment(rng: &mut ChaCha8Rng, q: u32, len: usize) -> Vec<u8> {
    loop {
        let mut s: Vec<u8> = (0..len - 4).map(|_| rng.gen_range(0..q as u8)).collect();
        s.extend_from_slice(&MARKER);
        if !s[..len - 1].windows(4).any(|w| w == MARKER) {
            return s;
        }
    }
}

/// A random member of `R_{q,n}` whose segments are all at most `delta` long. Long segments are
/// favoured so that merged and split segments stay near the bound.
fn random_marked(rng: &mut ChaCha8Rng, q: u32, n: usize, delta: usize) -> Word {
    let mut x = Vec::with_capacity(n);
    while x.len() < n {
        let rem = n - x.len();
        let len = if rem <= delta {
            rem
        } else if rng.gen_bool(0.6) {
            rng.gen_range((delta - 3).max(4)..=delta.min(rem - 4))
        } else {
            rng.gen_range(4..=delta.min(rem - 4))
        };
        x.extend(random_segment(rng, q, len));
    }
    Word::new(q, x).unwrap()
}

fn segment_count(x: &Word) -> i64 {
    segment(x).map(|s| s.count() as i64).unwrap_or(0)
}

struct Tally {
    shifts: [usize; 3],
    damaged: usize,
}

/// Every single absorption of `x` (each merge plus dropping the last symbol), checked against
/// the localizer and the decoder.
fn sweep(x: &Word, p: &ImprovedParams, tally: &mut Tally) {
    let n = x.len();
    let lx = segment_count(x);
    let mut received: Vec<(usize, Word)> = (1..n).map(|i| (i, absorb_at(x, i))).collect();
    received.push((n, x.range(1, n - 1)));
    for (pos, y) in &received {
        match locate_window(y, p).unwrap() {
            WindowOutcome::ErrorFree => panic!("length {} reported error free", y.len()),
            WindowOutcome::MarkerDamaged => {
                assert!(!y.ends_with(&MARKER), "pos={pos}");
                assert!(*pos >= n - 4);
                tally.damaged += 1;
            }
            WindowOutcome::Located(w) => {
                assert!(w.len() <= window_bound(DELTA), "pos={pos} window {w:?}");
                // Merges that give the same word are the same error; one of them must be inside.
                let explained = (w.start..=w.end).any(|i| absorb_at(x, i) == *y);
                assert!(explained, "pos={pos} window {w:?} misses the error");
                assert_eq!(i64::from(w.shift), segment_count(y) - lx, "pos={pos}");
                tally.shifts[(w.shift + 1) as usize] += 1;
            }
        }
        assert_eq!(decode_improved(y, p).as_ref(), Ok(x), "pos={pos}");
    }
    assert_eq!(decode_improved(x, p).as_ref(), Ok(x));
}

fn run_config(n: usize, samples: usize, seed: u64) -> Tally {
    let l = window_bound(DELTA);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut tally = Tally { shifts: [0; 3], damaged: 0 };
    for _ in 0..samples {
        let x = random_marked(&mut rng, 3, n, DELTA);
        assert!(r_membership(&x, DELTA));
        let p = ImprovedParams::of_word(&x, DELTA, l).unwrap();
        assert!(d_membership(&x, &p).unwrap());
        sweep(&x, &p, &mut tally);
    }
    tally
}

#[test]
fn every_absorption_is_localized_and_corrected_short_tail() {
    // 500 = 2·239 + 22: the tail is absorbed into the last shifted interval.
    let tally = run_config(500, 50, 1);
    assert!(tally.shifts.iter().all(|&c| c > 0), "{:?}", tally.shifts);
    assert!(tally.damaged > 0);
}

#[test]
fn every_absorption_is_localized_and_corrected_long_tail() {
    // 600 = 2·239 + 122: the tail becomes an extra first-family interval.
    let tally = run_config(600, 20, 2);
    assert!(tally.shifts.iter().all(|&c| c > 0), "{:?}", tally.shifts);
}

#[test]
fn every_absorption_is_corrected_on_exact_tiling() {
    run_config(3 * 239, 10, 3);
}

#[test]
fn q4_and_q5_members_decode() {
    let l = window_bound(DELTA);
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for q in [4u32, 5] {
        let mut tally = Tally { shifts: [0; 3], damaged: 0 };
        for _ in 0..5 {
            let x = random_marked(&mut rng, q, 520, DELTA);
            let p = ImprovedParams::of_word(&x, DELTA, l).unwrap();
            sweep(&x, &p, &mut tally);
        }
    }
}

#[test]
fn wrong_class_is_rejected() {
    let l = window_bound(DELTA);
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let x = random_marked(&mut rng, 3, 500, DELTA);
    let mut p = ImprovedParams::of_word(&x, DELTA, l).unwrap();
    p.r2 = (p.r2 + 1) % 3;
    assert!(!d_membership(&x, &p).unwrap());
    assert!(matches!(decode_improved(&x, &p), Err(Error::DecodeFailure(_))));
    assert!(decode_improved(&x.range(1, 498), &p).is_err());
}

#[test]
fn every_short_window_sits_in_an_interval() {
    for l in 1..=20 {
        for n in 2 * l + 1..=300 {
            let iv = intervals(n, l).unwrap();
            let all: Vec<(usize, usize)> = iv.first.iter().chain(&iv.second).copied().collect();
            for i in 1..=n + 1 - l {
                let (a, b) = (i, i + l - 1);
                assert!(all.iter().any(|&(s, e)| s <= a && b <= e), "n={n} l={l} window=[{a},{b}]");
                // The decoder also needs the position after the window inside the interval.
                if b < n {
                    assert!(all.iter().any(|&(s, e)| s <= a && b < e), "n={n} l={l} window=[{a},{b}]");
                }
            }
            let w = 2 * l + 1;
            let t = n / w;
            if n % w == 0 {
                assert_eq!((iv.first.len(), iv.second.len()), (t, t - 1));
            }
            if n == t * w + l {
                let last = *iv.second.last().unwrap();
                assert_eq!(last, ((t - 1) * w + l + 1, n));
                assert!((l + 2..=2 * l + 1).contains(&(last.1 + 1 - last.0)));
            }
        }
    }
}

#[test]
fn subtracting_other_blocks_isolates_one_fingerprint() {
    let l = window_bound(DELTA);
    let m = 2 * l + 1;
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for n in [500, 600, 1000] {
        let x = random_marked(&mut rng, 3, n, DELTA);
        let iv = intervals(n, l).unwrap();
        for (family, total) in [(&iv.first, g1_hat(&x, l).unwrap()), (&iv.second, g2_hat(&x, l).unwrap())] {
            for (k, &(a, b)) in family.iter().enumerate() {
                let others = family
                    .iter()
                    .enumerate()
                    .filter(|&(j, _)| j != k)
                    .fold(BlockSyndrome::zero(3, m), |acc, (_, &(s, e))| {
                        acc.add(&block_syndrome(&x.range(s, e), l).unwrap())
                    });
                assert_eq!(total.sub(&others), block_syndrome(&x.range(a, b), l).unwrap());
            }
        }
    }
    let x = random_marked(&mut rng, 3, m, DELTA);
    assert_eq!(g1_hat(&x, l).unwrap(), block_syndrome(&x, l).unwrap());
    assert_eq!(g2_hat(&x, l).unwrap(), BlockSyndrome::zero(3, m));
}

#[test]
fn packed_syndromes_round_trip() {
    // Pack and unpack only read the lengths, so a small stand-in configuration is enough.
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let l = window_bound(DELTA);
    let e1 = E1Params { marker: MarkerParams { q: 3, n: 2 * l - 4, delta: DELTA }, l };
    for _ in 0..200 {
        let x = random_marked(&mut rng, 3, e1.encoded_len(), DELTA);
        let p = ImprovedParams::of_word(&x, DELTA, l).unwrap();
        let packed = pack_syndromes(&p, &e1);
        assert_eq!(packed.len(), e1.packed_len());
        assert_eq!(unpack_syndromes(packed.symbols(), &e1).unwrap(), p);
    }
    let all_top = vec![2u8; e1.packed_len()];
    assert!(unpack_syndromes(&all_top, &e1).is_err());
}

#[test]
fn e1_needs_room_for_one_interval() {
    assert!(E1Params::new(3, 10_000).is_err());
    let n = E1Params::smallest_n(3).unwrap();
    let e1 = E1Params::new(3, n).unwrap();
    assert_eq!(e1.encoded_len(), 2 * e1.l + 1);
    assert!(E1Params::new(3, n - 1).is_err());
    assert_eq!(e1_redundancy(&e1), 5 + 3 + e1.packed_len());
    assert!(e1.packed_len() >= e1_leading_term(&e1));
}

/// Full-size systematic code; one pass costs a few seconds, so error positions are sampled.
#[test]
fn e1_round_trips_at_smallest_length() {
    let n = E1Params::smallest_n(3).unwrap();
    let e1 = E1Params::new(3, n).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let x = Word::new(3, (0..n).map(|_| rng.gen_range(0..3)).collect()).unwrap();
    let c = e1_encode(&x, &e1).unwrap();
    assert_eq!(c.len(), e1.codeword_len());
    assert_eq!(&c.symbols()[n + 5..n + 8], &[0, 1, 0]);
    assert_eq!(e1_decode(&c, &e1).unwrap(), x);
    let total = c.len();
    let mut positions = vec![1, n / 3, n + 1, n + 2, n + 4, n + 5, n + 6, n + 7, n + 8, total - 1];
    positions.push(rng.gen_range(1..n));
    for pos in positions {
        let y = absorb_at(&c, pos);
        assert_eq!(e1_decode(&y, &e1).as_ref(), Ok(&x), "pos={pos}");
    }
    assert_eq!(e1_decode(&c.range(1, total - 1), &e1).as_ref(), Ok(&x));
    assert!(e1_decode(&c.range(1, total - 2), &e1).is_err());
}

#[test]
fn library_sampler_produces_members() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for (q, n, delta) in [(3u32, 500usize, 12usize), (2, 64, 8), (4, 4, 4), (3, 9000, 4988)] {
        let x = random_member(&mut rng, q, n, delta).unwrap();
        assert_eq!(x.len(), n);
        assert!(r_membership(&x, delta), "q={q} n={n}");
    }
    assert!(random_member(&mut rng, 3, 3, 12).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn random_members_decode_from_random_positions(seed in any::<u64>(), n in 479usize..900) {
        let l = window_bound(DELTA);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = random_marked(&mut rng, 3, n, DELTA);
        let p = ImprovedParams::of_word(&x, DELTA, l).unwrap();
        for _ in 0..40 {
            let y = absorb_at(&x, rng.gen_range(1..n));
            prop_assert_eq!(decode_improved(&y, &p).unwrap(), x.clone());
        }
    }
}
