mod output;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use absorption::bounds::{brute_force_optimum, zero_run_class_count, zero_run_class_count_exact, BoundReport};
use absorption::channel::{absorption_ball, apply_absorptions, apply_contraction, contraction_ball, deletion_ball, ds_ball};
use absorption::improved::{decode_improved, random_member, e1_redundancy, window_bound, E1Params, ImprovedParams};
use absorption::marker::{decode_from_marker_set, encode_to_marker_set, MarkerParams};
use absorption::multi::{SystematicBasic, SystematicSingleCode};
use absorption::qary::{code_membership, decode_single_absorption, BasicParams};
use absorption::stats::zero_run_count;
use absorption::verify::{verify_code, VerifyOptions};
use absorption::{AbsorptionPattern, Word};
use clap::{Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use output::{Format, Output};

#[derive(Parser)]
#[command(name = "absorb", version, about = "Absorption channels, codes and bounds")]
struct Cli {
    #[arg(long, value_enum, global = true, default_value = "human")]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Pass a word through the channel.
    Channel {
        #[command(subcommand)]
        action: ChannelAction,
    },
    /// Enumerate error balls.
    Ball {
        #[command(subcommand)]
        action: BallAction,
    },
    /// Single-absorption q-ary code.
    Code {
        #[command(subcommand)]
        action: CodeAction,
    },
    /// Constrained encoder into the marker set.
    Marker {
        #[command(subcommand)]
        action: MarkerAction,
    },
    /// Single-absorption code for words with bounded segments.
    Improved {
        #[command(subcommand)]
        action: ImprovedAction,
    },
    /// Exhaustive or sampled decoding sweep.
    Verify {
        #[arg(long)]
        code: String,
        #[arg(long)]
        q: u32,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        t: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Largest word space enumerated.
        #[arg(long, default_value_t = 1 << 20)]
        cap: u64,
        #[arg(long, default_value_t = 50)]
        samples: usize,
        #[arg(long)]
        delta: Option<usize>,
        /// JSON file with one parameter tuple of the basic code.
        #[arg(long)]
        params: Option<PathBuf>,
        /// Record wall-clock time in the report.
        #[arg(long)]
        timing: bool,
    },
    /// Upper bounds on zero-deletion codes.
    Bound {
        #[arg(long)]
        q: u32,
        #[arg(long)]
        n: usize,
        /// Also compute the exact optimum (small cases only).
        #[arg(long)]
        brute_force: bool,
    },
    /// A table over a range of lengths.
    Table {
        #[arg(long, value_enum)]
        what: TableKind,
        #[arg(long)]
        q: u32,
        #[arg(long)]
        from: usize,
        #[arg(long)]
        to: usize,
        /// Largest word space enumerated for the measured columns.
        #[arg(long, default_value_t = 1 << 16)]
        cap: u64,
    },
}

#[derive(Subcommand)]
enum ChannelAction {
    Corrupt {
        #[arg(long)]
        q: u32,
        #[arg(long)]
        word: String,
        #[arg(long)]
        t: usize,
        #[arg(long, value_enum, default_value = "absorption")]
        mode: Mode,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Explicit pattern `t'/i:s,...`, overriding the seed.
        #[arg(long)]
        pattern: Option<String>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Absorption,
    Contraction,
    Deletion,
}

#[derive(Subcommand)]
enum BallAction {
    Enumerate {
        #[arg(long)]
        q: u32,
        #[arg(long)]
        word: String,
        #[arg(long)]
        t: usize,
        #[arg(long, value_enum, default_value = "absorption")]
        kind: BallKind,
        /// Refuse balls whose size estimate is above this.
        #[arg(long, default_value_t = 1 << 20)]
        cap: u64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum BallKind {
    Absorption,
    Contraction,
    Deletion,
    Ds,
}

#[derive(Subcommand)]
enum CodeAction {
    /// Systematic encoding `x 1 010 Q`.
    Encode {
        #[arg(long)]
        q: u32,
        #[arg(long)]
        word: String,
    },
    /// Undo one absorption; with `--params` the word is a plain codeword of that class,
    /// otherwise a systematic codeword for messages of length `--n`.
    Decode {
        #[arg(long)]
        q: u32,
        #[arg(long)]
        word: String,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        params: Option<PathBuf>,
    },
    /// Print the parameter tuple of a word, or test membership in the class given by `--params`.
    Check {
        #[arg(long)]
        q: u32,
        #[arg(long)]
        word: String,
        #[arg(long)]
        params: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum MarkerAction {
    Encode {
        #[arg(long)]
        q: u32,
        #[arg(long)]
        word: String,
        #[arg(long)]
        delta: Option<usize>,
    },
    Decode {
        #[arg(long)]
        q: u32,
        /// Message length.
        #[arg(long)]
        n: usize,
        #[arg(long)]
        word: String,
        #[arg(long)]
        delta: Option<usize>,
    },
}

#[derive(Subcommand)]
enum ImprovedAction {
    /// Draw a word whose segments are all at most `delta`.
    Sample {
        #[arg(long)]
        q: u32,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        delta: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Print the parameters of a word with segments at most `delta`.
    Encode {
        #[arg(long)]
        q: u32,
        #[arg(long)]
        word: String,
        #[arg(long)]
        delta: usize,
        /// Window bound; defaults to the one derived from `delta`.
        #[arg(long)]
        window: Option<usize>,
    },
    Decode {
        #[arg(long)]
        word: String,
        #[arg(long)]
        params: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum TableKind {
    Bound,
    Count,
    Redundancy,
}

#[derive(Debug)]
enum CliError {
    Lib(absorption::Error),
    Io(String),
    Json(String),
    /// Ran fine but the answer is negative; the output is still printed.
    Negative(Box<Output>),
}

impl From<absorption::Error> for CliError {
    fn from(e: absorption::Error) -> Self {
        CliError::Lib(e)
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        use absorption::Error as E;
        match self {
            CliError::Lib(E::DecodeFailure(_) | E::Inconsistent(_)) | CliError::Negative(_) => 1,
            CliError::Lib(E::Resource(_)) => 3,
            _ => 2,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Lib(e) => write!(f, "{e}"),
            CliError::Io(m) => write!(f, "io error: {m}"),
            CliError::Json(m) => write!(f, "json error: {m}"),
            CliError::Negative(_) => write!(f, "negative result"),
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

fn word(text: &str, q: u32) -> CliResult<Word> {
    Ok(Word::parse(text, q)?)
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> CliResult<T> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Json(format!("{}: {e}", path.display())))
}

fn to_json<T: serde::Serialize>(v: &T) -> serde_json::Value {
    serde_json::to_value(v).expect("values serialize")
}

fn binomial(n: u64, k: u64) -> u128 {
    (0..k).fold(1u128, |acc, i| acc.saturating_mul((n - i) as u128) / (i + 1) as u128)
}

/// Number of error patterns behind a ball; the ball is never larger.
fn ball_estimate(kind: BallKind, q: u32, n: usize, t: usize) -> u128 {
    let (n, t) = (n as u64, t as u64);
    let picks = binomial(n, t.min(n));
    match kind {
        BallKind::Deletion => picks,
        BallKind::Absorption | BallKind::Contraction => (0..=t).map(|k| binomial(n, k.min(n))).sum::<u128>().saturating_mul(picks),
        BallKind::Ds => picks.saturating_mul(binomial(n, t.min(n))).saturating_mul((q as u128).saturating_pow(t as u32)),
    }
}

fn run(cli: Cli) -> CliResult<Output> {
    match cli.command {
        Command::Channel { action: ChannelAction::Corrupt { q, word: text, t, mode, seed, pattern } } => {
            let x = word(&text, q)?;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let (y, shown) = match mode {
                Mode::Deletion => {
                    if t > x.len() {
                        return Err(absorption::Error::Domain(format!("cannot delete {t} of {} symbols", x.len())).into());
                    }
                    let mut gone = rand::seq::index::sample(&mut rng, x.len(), t).into_vec();
                    gone.sort_unstable();
                    let kept = x.symbols().iter().enumerate().filter(|(i, _)| !gone.contains(i)).map(|(_, &s)| s).collect();
                    let positions: Vec<String> = gone.iter().map(|i| (i + 1).to_string()).collect();
                    (Word::new(q, kept)?, positions.join(","))
                }
                Mode::Absorption | Mode::Contraction => {
                    let p = match pattern {
                        Some(s) => AbsorptionPattern::parse(&s)?,
                        None => AbsorptionPattern::random(x.len(), t, &mut rng)?,
                    };
                    if p.weight() != t {
                        return Err(absorption::Error::InvalidPattern(format!("pattern {p} has weight {} not {t}", p.weight())).into());
                    }
                    let y = match mode {
                        Mode::Absorption => apply_absorptions(&x, &p)?,
                        _ => apply_contraction(&x, &p)?,
                    };
                    (y, p.to_string())
                }
            };
            Ok(Output::record(json!({ "input": x.to_string(), "pattern": shown, "output": y.to_string() })))
        }
        Command::Ball { action: BallAction::Enumerate { q, word: text, t, kind, cap } } => {
            let x = word(&text, q)?;
            let estimate = ball_estimate(kind, q, x.len(), t);
            if estimate > cap as u128 {
                return Err(absorption::Error::Resource(format!("ball estimate {estimate} exceeds the cap {cap}")).into());
            }
            let ball = match kind {
                BallKind::Absorption => absorption_ball(&x, t)?,
                BallKind::Contraction => contraction_ball(&x, t)?,
                BallKind::Deletion => deletion_ball(&x, t)?,
                BallKind::Ds => ds_ball(&x, t)?,
            };
            let words: Vec<String> = ball.iter().map(|w| w.to_string()).collect();
            let mut out = Output::new(json!({ "word": x.to_string(), "t": t, "size": words.len(), "ball": words }), &["word"]);
            out.notes.push(format!("{} words", words.len()));
            for w in words {
                out.row(vec![w]);
            }
            Ok(out)
        }
        Command::Code { action } => code(action),
        Command::Marker { action } => marker(action),
        Command::Improved { action } => improved(action),
        Command::Verify { code, q, n, t, seed, cap, samples, delta, params, timing } => {
            let params: Option<BasicParams> = params.as_deref().map(read_json).transpose()?;
            let opts = VerifyOptions { seed, cap, samples, delta, timed: timing };
            let report = verify_code(&code, q, n, t, params.as_ref(), &opts)?;
            let mut out = Output::new(to_json(&report), &["codeword", "corrupted", "decoded", "error"]);
            out.notes.push(format!(
                "{} q={} n={} t={} ({}): {} codewords, {} corruptions, {} failures",
                report.code_id,
                q,
                n,
                t,
                report.scope.params,
                report.total_codewords,
                report.total_corruptions,
                report.failure_count
            ));
            if let Some(s) = report.wall_time {
                out.notes.push(format!("wall time {s:.3}s"));
            }
            for f in &report.failures {
                out.row(vec![
                    f.codeword.clone(),
                    f.corrupted.clone(),
                    f.decoded.clone().unwrap_or_default(),
                    f.error.clone().unwrap_or_default(),
                ]);
            }
            if report.passed() {
                Ok(out)
            } else {
                Err(CliError::Negative(Box::new(out)))
            }
        }
        Command::Bound { q, n, brute_force } => {
            let report = BoundReport::new(q, n, brute_force)?;
            Ok(Output::record(to_json(&report)))
        }
        Command::Table { what, q, from, to, cap } => table(what, q, from, to, cap),
    }
}

fn code(action: CodeAction) -> CliResult<Output> {
    match action {
        CodeAction::Encode { q, word: text } => {
            let x = word(&text, q)?;
            let code = SystematicBasic::new(q, x.len())?;
            let c = code.encode(&x)?;
            Ok(Output::record(json!({ "message": x.to_string(), "codeword": c.to_string() })))
        }
        CodeAction::Decode { q, word: text, n, params } => {
            let y = word(&text, q)?;
            let x = match (params, n) {
                (Some(path), _) => {
                    let p: BasicParams = read_json(&path)?;
                    decode_single_absorption(&y, &p)?
                }
                (None, Some(n)) => SystematicBasic::new(q, n)?.decode(&y)?,
                (None, None) => return Err(absorption::Error::Domain("decode needs --params or --n".into()).into()),
            };
            Ok(Output::record(json!({ "received": y.to_string(), "decoded": x.to_string() })))
        }
        CodeAction::Check { q, word: text, params } => {
            let x = word(&text, q)?;
            match params {
                None => Ok(Output::record(to_json(&BasicParams::of_word(&x)?))),
                Some(path) => {
                    let p: BasicParams = read_json(&path)?;
                    let member = code_membership(&x, &p)?;
                    let out = Output::record(json!({ "word": x.to_string(), "member": member }));
                    if member {
                        Ok(out)
                    } else {
                        Err(CliError::Negative(Box::new(out)))
                    }
                }
            }
        }
    }
}

fn marker_params(q: u32, n: usize, delta: Option<usize>) -> CliResult<MarkerParams> {
    let delta = match delta {
        Some(d) => d,
        None => MarkerParams::smallest_delta(q, n)?,
    };
    Ok(MarkerParams::new(q, n, delta)?)
}

fn marker(action: MarkerAction) -> CliResult<Output> {
    match action {
        MarkerAction::Encode { q, word: text, delta } => {
            let x = word(&text, q)?;
            let p = marker_params(q, x.len(), delta)?;
            let c = encode_to_marker_set(&x, &p)?;
            Ok(Output::record(json!({ "delta": p.delta, "message": x.to_string(), "codeword": c.to_string() })))
        }
        MarkerAction::Decode { q, n, word: text, delta } => {
            let c = word(&text, q)?;
            let p = marker_params(q, n, delta)?;
            let x = decode_from_marker_set(&c, &p)?;
            Ok(Output::record(json!({ "delta": p.delta, "codeword": c.to_string(), "message": x.to_string() })))
        }
    }
}

fn improved(action: ImprovedAction) -> CliResult<Output> {
    match action {
        ImprovedAction::Sample { q, n, delta, seed } => {
            let x = random_member(&mut ChaCha8Rng::seed_from_u64(seed), q, n, delta)?;
            Ok(Output::record(json!({ "word": x.to_string() })))
        }
        ImprovedAction::Encode { q, word: text, delta, window } => {
            let x = word(&text, q)?;
            let p = ImprovedParams::of_word(&x, delta, window.unwrap_or_else(|| window_bound(delta)))?;
            Ok(Output::record(to_json(&p)))
        }
        ImprovedAction::Decode { word: text, params } => {
            let p: ImprovedParams = read_json(&params)?;
            p.validate()?;
            let y = word(&text, p.q)?;
            let x = decode_improved(&y, &p)?;
            Ok(Output::record(json!({ "received": y.to_string(), "decoded": x.to_string() })))
        }
    }
}

fn table(what: TableKind, q: u32, from: usize, to: usize, cap: u64) -> CliResult<Output> {
    if from > to || from < 2 {
        return Err(absorption::Error::Domain(format!("need 2 <= from <= to, got {from}..{to}")).into());
    }
    let fits = |len: usize| (q as u64).checked_pow(len as u32).is_some_and(|s| s <= cap);
    let dash = || "-".to_string();
    match what {
        TableKind::Bound => {
            let mut out = Output::new(serde_json::Value::Null, &["n", "formula", "c_max", "transversal", "weight_sum", "optimum"]);
            let mut rows = Vec::new();
            for n in from..=to {
                let r = BoundReport::new(q, n, false)?;
                // The exact search stays quick up to 64 vertices.
                let optimum = if fits(n - 1) && (q as u64).pow(n as u32 - 1) <= 64 { Some(brute_force_optimum(q, n)?) } else { None };
                out.row(vec![
                    n.to_string(),
                    r.formula_bound.as_ref().map_or_else(dash, |v| v.to_string()),
                    r.c_max_bound.as_ref().map_or_else(dash, |v| v.to_string()),
                    format!("{:.3}", r.transversal_approx),
                    format!("{:.3}", r.weight_sum_approx),
                    optimum.map_or_else(dash, |v| v.to_string()),
                ]);
                let mut v = to_json(&r);
                v["brute_force_optimum"] = json!(optimum);
                rows.push(v);
            }
            out.json = json!(rows);
            Ok(out)
        }
        TableKind::Count => {
            let mut out = Output::new(serde_json::Value::Null, &["n", "k", "formula", "exact", "enumerated"]);
            let mut rows = Vec::new();
            for n in from..=to {
                let enumerated: Option<Vec<usize>> = fits(n - 1).then(|| {
                    let mut c = vec![0usize; n / 2 + 1];
                    for y in Word::all(q, n - 1).expect("q checked by the formula") {
                        c[zero_run_count(&y)] += 1;
                    }
                    c
                });
                for k in 1..=n / 2 {
                    let formula = zero_run_class_count(n, q, k)?;
                    let exact = zero_run_class_count_exact(n, q, k)?;
                    let counted = enumerated.as_ref().map(|c| c[k]);
                    out.row(vec![
                        n.to_string(),
                        k.to_string(),
                        formula.to_string(),
                        exact.to_string(),
                        counted.map_or_else(dash, |v| v.to_string()),
                    ]);
                    rows.push(json!({ "n": n, "k": k, "formula": formula.to_string(), "exact": exact.to_string(), "enumerated": counted }));
                }
            }
            out.json = json!(rows);
            Ok(out)
        }
        TableKind::Redundancy => {
            let mut out = Output::new(serde_json::Value::Null, &["n", "marker", "systematic_basic", "e1"]);
            let mut rows = Vec::new();
            for n in from..=to {
                let marker = marker_params(q, n, None)
                    .ok()
                    .and_then(|p| encode_to_marker_set(&Word::zeros(q, n).ok()?, &p).ok())
                    .map(|c| c.len() - n);
                let basic = SystematicBasic::new(q, n).ok().map(|c| c.codeword_len() - n);
                let e1 = E1Params::new(q, n).ok().map(|e| e1_redundancy(&e));
                let cell = |v: Option<usize>| v.map_or_else(dash, |v| v.to_string());
                out.row(vec![n.to_string(), cell(marker), cell(basic), cell(e1)]);
                rows.push(json!({ "n": n, "marker": marker, "systematic_basic": basic, "e1": e1 }));
            }
            out.json = json!(rows);
            Ok(out)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let format = cli.format;
    match run(cli) {
        Ok(out) => {
            print!("{}", out.render(format));
            ExitCode::SUCCESS
        }
        Err(e) => {
            match &e {
                CliError::Negative(out) => print!("{}", out.render(format)),
                other => eprintln!("absorb: {other}"),
            }
            ExitCode::from(e.exit_code())
        }
    }
}
