//! Exhaustive and sampled decoding sweeps with a serializable report.

use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::binary_vt::{absorption_decode_binary, vt_membership, VtParams};
use crate::channel::{absorption_ball, Ball};
use crate::error::{domain, Error, Result};
use crate::improved::{decode_improved, random_member, window_bound, ImprovedParams};
use crate::marker::{decode_from_marker_set, encode_to_marker_set, MarkerParams};
use crate::multi::{brute_force_separating_function, decode_t_absorptions, BaseCode, E2Code, MultiCode, SystematicBasic};
use crate::qary::{basic_classes, decode_single_absorption, BasicParams};
use crate::word::Word;

/// Bumped whenever a field changes meaning.
pub const REPORT_SCHEMA: u32 = 1;

/// Failures kept in a report; the count covers all of them.
pub const MAX_LISTED_FAILURES: usize = 100;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scope {
    pub q: u32,
    pub n: usize,
    pub t: usize,
    /// Parameter tuple, or a description of which tuples were swept.
    pub params: String,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Failure {
    pub codeword: String,
    pub corrupted: String,
    pub decoded: Option<String>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub schema: u32,
    pub code_id: String,
    pub scope: Scope,
    pub total_codewords: u64,
    pub total_corruptions: u64,
    pub failure_count: u64,
    pub failures: Vec<Failure>,
    /// Seconds; left out of reports that must be reproducible byte for byte.
    pub wall_time: Option<f64>,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.failure_count == 0
    }
}

/// Accumulates trials for one report.
pub struct Sweep {
    report: VerificationReport,
    started: Instant,
}

impl Sweep {
    pub fn new(code_id: &str, scope: Scope) -> Self {
        let report = VerificationReport {
            schema: REPORT_SCHEMA,
            code_id: code_id.to_string(),
            scope,
            total_codewords: 0,
            total_corruptions: 0,
            failure_count: 0,
            failures: Vec::new(),
            wall_time: None,
        };
        Self { report, started: Instant::now() }
    }

    /// Decodes every received word and compares with `expected`. `shown` is what the report
    /// prints as the codeword (the transmitted word, which may differ from `expected`).
    pub fn codeword(&mut self, expected: &Word, shown: &Word, received: &Ball, decode: &dyn Fn(&Word) -> Result<Word>) {
        self.report.total_codewords += 1;
        for y in received {
            self.report.total_corruptions += 1;
            let got = decode(y);
            if got.as_ref() == Ok(expected) {
                continue;
            }
            self.report.failure_count += 1;
            if self.report.failures.len() < MAX_LISTED_FAILURES {
                let (decoded, error) = match got {
                    Ok(v) => (Some(v.to_string()), None),
                    Err(e) => (None, Some(e.to_string())),
                };
                self.report.failures.push(Failure { codeword: shown.to_string(), corrupted: y.to_string(), decoded, error });
            }
        }
    }

    pub fn finish(mut self, timed: bool) -> VerificationReport {
        self.report.failures.sort();
        if timed {
            self.report.wall_time = Some(self.started.elapsed().as_secs_f64());
        }
        self.report
    }
}

/// What a `verify` run may touch.
#[derive(Debug, Clone)]
pub struct VerifyOptions {
    pub seed: u64,
    /// Largest word space enumerated.
    pub cap: u64,
    /// Codewords drawn for sampled codes.
    pub samples: usize,
    pub delta: Option<usize>,
    pub timed: bool,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self { seed: 0, cap: 1 << 20, samples: 50, delta: None, timed: false }
    }
}

fn within_cap(q: u32, n: usize, cap: u64) -> Result<()> {
    match (q as u64).checked_pow(n as u32) {
        Some(size) if size <= cap => Ok(()),
        _ => Err(Error::Resource(format!("{q}^{n} words exceeds the cap {cap}"))),
    }
}

pub const CODE_IDS: [&str; 6] = ["vt", "qary-basic", "improved", "marker", "multi", "e2"];

/// Runs the sweep named by `code_id`.
///
/// - `vt`: every codeword of `VT_a(n)` for every `a`, every single absorption.
/// - `qary-basic`: every class of `Σ_q^n` (or only `params`), every single absorption.
/// - `improved`: sampled members of `D(n; r, α, β)` with segment cap `δ`, every single absorption.
/// - `marker`: sampled messages through the constrained encoder and back (no channel).
/// - `multi`: every class of the basic code, every label value, every `t`-absorption.
/// - `e2`: every message of the systematic multi-absorption code, every `t'`-absorption, `t' ≤ t`.
pub fn verify_code(code_id: &str, q: u32, n: usize, t: usize, params: Option<&BasicParams>, opts: &VerifyOptions) -> Result<VerificationReport> {
    let scope = |p: String| Scope { q, n, t, params: p };
    match code_id {
        "vt" => {
            if q != 2 {
                return domain("VT codes are binary");
            }
            within_cap(2, n, opts.cap)?;
            let mut sweep = Sweep::new(code_id, scope("all a in [0, n]".into()));
            for a in 0..=n {
                let p = VtParams::new(n, a)?;
                for c in Word::all(2, n)? {
                    if vt_membership(&c, p)? {
                        sweep.codeword(&c, &c, &absorption_ball(&c, 1)?, &|y| absorption_decode_binary(y, p));
                    }
                }
            }
            Ok(sweep.finish(opts.timed))
        }
        "qary-basic" => {
            within_cap(q, n, opts.cap)?;
            let classes = match params {
                Some(p) => vec![(p.clone(), crate::qary::basic_codebook(p)?)],
                None => basic_classes(q, n)?,
            };
            let label = params.map_or_else(|| "all tuples".to_string(), |p| format!("{p:?}"));
            let mut sweep = Sweep::new(code_id, scope(label));
            for (p, words) in &classes {
                for x in words {
                    sweep.codeword(x, x, &absorption_ball(x, 1)?, &|y| decode_single_absorption(y, p));
                }
            }
            Ok(sweep.finish(opts.timed))
        }
        "improved" => {
            let delta = opts.delta.unwrap_or(12);
            let l = window_bound(delta);
            let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
            let mut sweep = Sweep::new(code_id, scope(format!("delta={delta} L={l} samples={}", opts.samples)));
            for _ in 0..opts.samples {
                let x = random_member(&mut rng, q, n, delta)?;
                let p = ImprovedParams::of_word(&x, delta, l)?;
                sweep.codeword(&x, &x, &absorption_ball(&x, 1)?, &|y| decode_improved(y, &p));
            }
            Ok(sweep.finish(opts.timed))
        }
        "marker" => {
            let delta = match opts.delta {
                Some(d) => d,
                None => MarkerParams::smallest_delta(q, n)?,
            };
            let p = MarkerParams::new(q, n, delta)?;
            let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
            let mut sweep = Sweep::new(code_id, scope(format!("delta={delta} samples={}", opts.samples)));
            let mut messages = vec![Word::zeros(q, n)?];
            for _ in 1..opts.samples.max(1) {
                use rand::Rng;
                messages.push(Word::new(q, (0..n).map(|_| rng.gen_range(0..q) as u8).collect())?);
            }
            for x in &messages {
                let c = encode_to_marker_set(x, &p)?;
                sweep.codeword(x, &c, &[c.clone()].into_iter().collect(), &|y| decode_from_marker_set(y, &p));
            }
            Ok(sweep.finish(opts.timed))
        }
        "multi" => {
            within_cap(q, n, opts.cap)?;
            let sep = brute_force_separating_function(n, q, t, opts.cap)?;
            sep.audit()?;
            let classes = match params {
                Some(p) => vec![(p.clone(), crate::qary::basic_codebook(p)?)],
                None => basic_classes(q, n)?,
            };
            let mut sweep = Sweep::new(code_id, scope(format!("{} basic classes, every label", classes.len())));
            for (p, words) in classes {
                let code = MultiCode::with_codewords(BaseCode::Basic(p), words, t, &sep)?;
                for (x, &a) in code.codewords.iter().zip(&code.labels) {
                    sweep.codeword(x, x, &absorption_ball(x, t)?, &|y| decode_t_absorptions(y, &code, a));
                }
            }
            Ok(sweep.finish(opts.timed))
        }
        "e2" => {
            within_cap(q, n, opts.cap)?;
            let code = E2Code::build(SystematicBasic::new(q, n)?, t, opts.cap)?;
            let mut sweep = Sweep::new(code_id, scope(format!("length {} redundancy {}", code.n2, code.redundancy())));
            for x in Word::all(q, n)? {
                let c = code.encode(&x)?;
                let mut received = Ball::new();
                for k in 1..=t {
                    received.extend(absorption_ball(&c, k)?);
                }
                sweep.codeword(&x, &c, &received, &|y| code.decode(y));
            }
            Ok(sweep.finish(opts.timed))
        }
        other => domain(format!("unknown code '{other}', expected one of {}", CODE_IDS.join(", "))),
    }
}
