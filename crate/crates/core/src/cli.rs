//! Command-line front end: argument parsing, set sources and output
//! formatting. Every subcommand is a thin call into the library.
//!
//! Structured subcommands print one JSON object per line; big integers and
//! rationals are decimal strings. `nearmiss` and `cubes` print CSV.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};
use serde_json::{json, Value};

use crate::ap_core::{ArithProgression, RationalExponent};
use crate::constellations::{load_planar, search_constellation, Pattern2D, Window};
use crate::decomposition::{scan_windows, CertificateConfig, DecompositionReport, Outcome, WindowOutcome};
use crate::error::{invalid, Error, Result};
use crate::integer_sets::{
    density_profile, load_set, make_powers, make_primes, make_random, reciprocal_sum_partial, IntegerSet, SetFormat,
};
use crate::near_miss::{cube_identity_search, scan, write_csv};
use crate::progression_free::compute_r_k;
use crate::roots::rational_to_f64;
use crate::search::{search_window, SearchParams, MAX_SEARCH_EXPONENT};
use crate::vdw_extract::{color, extract_exact};

/// Largest limit for a generated set.
const GENERATED_LIMIT_MAX: u64 = 1 << 32;

#[derive(Debug, Parser)]
#[command(name = "aap", version, about = "Approximate arithmetic progressions in integer sets")]
struct Cli {
    /// Worker threads (default: available parallelism).
    #[arg(long, global = true, env = "AAP_WORKERS")]
    workers: Option<usize>,

    /// Seed for `random:` set sources.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct SetArgs {
    /// `primes[:LIMIT]`, `powers:T[:LIMIT]`, `random:GAMMA[:LIMIT]` or a file.
    #[arg(long)]
    set: String,

    /// Column to read when the set file is CSV.
    #[arg(long)]
    column: Option<String>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Count elements up to n against n / (ln n)^gamma.
    Density {
        #[command(flatten)]
        set: SetArgs,
        #[arg(long)]
        n: BigUint,
        #[arg(long, default_value_t = 1.0)]
        gamma: f64,
        /// Also report the exact reciprocal sum up to n.
        #[arg(long)]
        reciprocal: bool,
    },
    /// Largest subset of 1..N without a k-term progression.
    Rk {
        #[arg(long = "N")]
        n: u64,
        #[arg(long, default_value_t = 3)]
        k: usize,
    },
    /// Direct search for an approximate progression in each window.
    Search {
        #[command(flatten)]
        set: SetArgs,
        /// Window exponents, `a..b` (inclusive) or a single `n`.
        #[arg(long = "n-range")]
        n_range: String,
        #[arg(long, default_value_t = 3)]
        k: usize,
        #[arg(long)]
        alpha: RationalExponent,
        /// Accept distance up to factor * gap^alpha.
        #[arg(long, default_value_t = 1)]
        factor: u32,
        #[arg(long = "gap-min", default_value_t = 1)]
        gap_min: u64,
        #[arg(long = "gap-max")]
        gap_max: Option<u64>,
    },
    /// Run the decomposition certificate on each window.
    Certify {
        #[command(flatten)]
        set: SetArgs,
        #[arg(long = "n-range")]
        n_range: String,
        #[arg(long, default_value_t = 3)]
        k: usize,
        #[arg(long)]
        alpha: RationalExponent,
        /// Density parameter, e.g. `1/8` (default: largest admissible 1/2^j).
        #[arg(long)]
        epsilon: Option<BigRational>,
        #[arg(long, default_value_t = 2.0)]
        gamma: f64,
        /// Minimum residue-class size for a level to be retained.
        #[arg(long)]
        threshold: Option<u64>,
    },
    /// Colour an approximate progression and extract an exact one.
    Upgrade {
        #[command(flatten)]
        set: SetArgs,
        #[arg(long)]
        start: BigUint,
        #[arg(long)]
        gap: BigUint,
        /// Number of points of the approximate progression (default: k).
        #[arg(long)]
        length: Option<usize>,
        #[arg(long, default_value_t = 3)]
        k: usize,
        #[arg(long = "C")]
        uncertainty: u64,
    },
    /// Near-miss statistic f_t(b) for 11 <= b <= b-max, as CSV.
    Nearmiss {
        #[arg(long, value_delimiter = ',', default_value = "3")]
        t: Vec<u32>,
        #[arg(long = "b-max")]
        b_max: u64,
    },
    /// Solutions of x^3 + y^3 - 2 z^3 in {±1, ±2}, as CSV.
    Cubes {
        #[arg(long, default_value_t = 100)]
        limit: u64,
    },
    /// Dilated translate of a planar pattern near a planar set.
    Constellation {
        /// File of `x,y` lines.
        #[arg(long)]
        set: PathBuf,
        #[arg(long)]
        pattern: Pattern2D,
        #[arg(long)]
        alpha: RationalExponent,
        #[arg(long)]
        delta0: i64,
        /// `x0,y0,x1,y1`, inclusive.
        #[arg(long)]
        window: Window,
    },
}

/// Runs the command line `args` (program name first) and returns the exit
/// code: 0 on success, 2 on capability errors, 1 otherwise.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(args, &mut stdout.lock(), &mut stderr.lock())
}

/// [`run`] with explicit output streams.
pub fn run_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{}", e.render());
                    return 0;
                }
                _ => 1,
            };
            let _ = write!(err, "{}", e.render());
            return code;
        }
    };
    match execute(&cli) {
        Ok(text) => match &cli.out {
            Some(path) => match fs::write(path, text) {
                Ok(()) => 0,
                Err(source) => report(err, &Error::Io { path: path.clone(), source }),
            },
            None => match out.write_all(text.as_bytes()) {
                Ok(()) => 0,
                Err(_) => 1,
            },
        },
        Err(e) => report(err, &e),
    }
}

fn report(err: &mut dyn Write, e: &Error) -> i32 {
    let _ = writeln!(err, "error: {e}");
    e.exit_code()
}

fn execute(cli: &Cli) -> Result<String> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cli.workers.unwrap_or(0))
        .build()
        .map_err(|e| Error::Internal(format!("cannot start worker pool: {e}")))?;
    pool.install(|| dispatch(cli))
}

fn dispatch(cli: &Cli) -> Result<String> {
    match &cli.command {
        Command::Density { set, n, gamma, reciprocal } => {
            let a = load_source(set, n, cli.seed)?;
            let p = density_profile(&a, n, *gamma)?;
            let mut rec = json!({
                "n": p.n.to_string(),
                "count": p.count,
                "gamma": p.gamma,
                "threshold": p.threshold,
                "satisfied": p.satisfied,
            });
            if *reciprocal {
                let sum = reciprocal_sum_partial(&a, n)?;
                rec["reciprocal_sum"] = json!(sum.to_string());
                rec["reciprocal_sum_approx"] = json!(rational_to_f64(&sum));
            }
            Ok(line(rec))
        }
        Command::Rk { n, k } => {
            let r = compute_r_k(*n, *k)?;
            let witness: Vec<String> = r.witness.iter().map(u64::to_string).collect();
            Ok(format!("r={} witness={}\n", r.r, witness.join(",")))
        }
        Command::Search { set, n_range, k, alpha, factor, gap_min, gap_max } => {
            let range = parse_range(n_range)?;
            if *range.end() > MAX_SEARCH_EXPONENT {
                return Err(Error::Capability(format!("search supports n <= {MAX_SEARCH_EXPONENT}")));
            }
            let a = load_source(set, &(BigUint::one() << (range.end() + 1)), cli.seed)?;
            let params = SearchParams { k: *k, alpha: *alpha, factor: *factor, gap_min: *gap_min, gap_max: *gap_max };
            let mut out = String::new();
            for n in range {
                let rec = match search_window(&a, n, &params) {
                    Ok(Some(hit)) => {
                        let m = &hit.matched;
                        json!({
                            "n": n,
                            "outcome": "match",
                            "start": m.progression.start().to_string(),
                            "gap": m.progression.gap().to_string(),
                            "length": m.progression.length(),
                            "distance": m.distance.to_string(),
                            "within": m.within,
                            "factor": hit.factor,
                        })
                    }
                    Ok(None) => json!({ "n": n, "outcome": "none" }),
                    Err(e @ Error::EmptySet(_)) => json!({ "n": n, "outcome": "skipped", "reason": e.to_string() }),
                    Err(e) => return Err(e),
                };
                out.push_str(&line(rec));
            }
            Ok(out)
        }
        Command::Certify { set, n_range, k, alpha, epsilon, gamma, threshold } => {
            let range = parse_range(n_range)?;
            let config = match epsilon {
                Some(eps) => CertificateConfig::new(eps.clone(), *k, *gamma)?,
                None => CertificateConfig::with_default_epsilon(*k, *gamma, *alpha, &range)?,
            };
            let config = match threshold {
                Some(t) => config.with_threshold(*t),
                None => config,
            };
            let a = load_source(set, &(BigUint::one() << (range.end() + 1)), cli.seed)?;
            let result = scan_windows(&a, range, &config, *alpha)?;
            let mut out = String::new();
            for w in &result.windows {
                out.push_str(&line(window_record(w)));
            }
            out.push_str(&line(json!({
                "record": "summary",
                "windows": result.windows.len(),
                "witness_windows": result.witness_windows,
                "empirical_c": result.empirical_c.as_ref().map(|c| c.to_string()),
            })));
            Ok(out)
        }
        Command::Upgrade { set, start, gap, length, k, uncertainty } => {
            let length = length.unwrap_or(*k);
            let p = ArithProgression::new(start.clone(), gap.clone(), length)?;
            let a = load_source(set, &(p.last() + *uncertainty), cli.seed)?;
            let colored = color(&p, &a, *uncertainty)?;
            let exact = extract_exact(&colored, *k)?;
            Ok(line(json!({
                "progression": progression_json(&p),
                "uncertainty": colored.uncertainty,
                "offsets": colored.offsets,
                "colors_used": colored.colors_used,
                "k": k,
                "exact": exact.as_ref().map(progression_json),
            })))
        }
        Command::Nearmiss { t, b_max } => {
            let mut out = String::new();
            for (i, &t) in t.iter().enumerate() {
                let csv = write_csv(&scan(t, *b_max)?.records);
                // one header for the whole table
                out.push_str(if i == 0 { &csv } else { csv.split_once('\n').map_or("", |(_, rows)| rows) });
            }
            Ok(out)
        }
        Command::Cubes { limit } => {
            let mut out = String::from("x,y,z,value\n");
            for s in cube_identity_search(*limit)? {
                let _ = writeln!(out, "{},{},{},{}", s.x, s.y, s.z, s.value);
            }
            Ok(out)
        }
        Command::Constellation { set, pattern, alpha, delta0, window } => {
            let a = load_planar(set)?;
            let rec = match search_constellation(&a, pattern, *alpha, *delta0, *window)? {
                Some(m) => json!({
                    "outcome": "match",
                    "delta": m.delta,
                    "shift": [m.shift.0, m.shift.1],
                    "distance": m.distance,
                }),
                None => json!({ "outcome": "none" }),
            };
            Ok(line(rec))
        }
    }
}

fn line(v: Value) -> String {
    let mut s = v.to_string();
    s.push('\n');
    s
}

fn progression_json(p: &ArithProgression) -> Value {
    json!({ "start": p.start().to_string(), "gap": p.gap().to_string(), "length": p.length() })
}

fn window_record(w: &WindowOutcome) -> Value {
    match w {
        WindowOutcome::Skipped { n, reason } => {
            json!({ "record": "window", "n": n, "outcome": "skipped", "reason": reason })
        }
        WindowOutcome::Report(r) => report_json(r),
    }
}

fn report_json(r: &DecompositionReport) -> Value {
    let levels: Vec<Value> = r
        .levels
        .iter()
        .map(|l| {
            json!({
                "level": l.level,
                "interval_length": l.interval_length.to_string(),
                "sub_length": l.sub_length.to_string(),
                "modulus": l.modulus.to_string(),
                "intervals": l.intervals,
                "occupied": l.occupied,
                "sub_per_interval": l.sub_per_interval,
                "classes": l.classes,
                "densest_class": format!("{}/{}", l.densest_class.0, l.densest_class.1),
                "density_condition": l.density_condition,
                "discarded": l.discarded,
            })
        })
        .collect();
    let mut rec = json!({
        "record": "window",
        "n": r.n,
        "outcome": match r.outcome { Outcome::Witness(_) => "witness", Outcome::Bound => "bound" },
        "m": r.plan.m,
        "m_prime": r.plan.m_prime,
        "epsilon": r.epsilon.to_string(),
        "bound_value": r.bound_value.to_string(),
        "actual_count": r.actual_count,
        "structured_count": r.structured_count,
        "gap_over_n": r.gap_over_n.as_ref().map(|g| g.to_string()),
        "levels": levels,
    });
    if let Some(w) = r.witness() {
        let mut p = progression_json(&w.matched.progression);
        p["distance"] = json!(w.matched.distance.to_string());
        p["within"] = json!(w.matched.within);
        p["level"] = json!(w.level);
        p["index_step"] = json!(w.index_step);
        p["level_gap"] = json!(w.level_gap.to_string());
        rec["witness"] = p;
    }
    rec
}

/// `a..b` (inclusive) or a single exponent.
fn parse_range(s: &str) -> Result<std::ops::RangeInclusive<u32>> {
    let bad = || Error::InvalidArgument(format!("bad range `{s}`; expected `a..b` or `n`"));
    let (a, b) = match s.split_once("..") {
        Some((a, b)) => (a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?),
        None => {
            let n = s.trim().parse().map_err(|_| bad())?;
            (n, n)
        }
    };
    if a > b {
        return Err(bad());
    }
    Ok(a..=b)
}

fn generated_limit(spec: &str, default: &BigUint) -> Result<u64> {
    let limit = match spec {
        "" => default.clone(),
        s => s.parse::<BigUint>().map_err(|_| Error::InvalidArgument(format!("bad limit `{s}`")))?,
    };
    match limit.to_u64() {
        Some(l) if l <= GENERATED_LIMIT_MAX => Ok(l),
        _ => Err(Error::Capability(format!("generated sets are limited to {GENERATED_LIMIT_MAX}, got {limit}"))),
    }
}

/// Resolves a set source; generated sets default to `limit`.
fn load_source(args: &SetArgs, limit: &BigUint, seed: u64) -> Result<IntegerSet> {
    let mut parts = args.set.splitn(3, ':');
    match parts.next().unwrap_or("") {
        "primes" => {
            if let Some(extra) = parts.nth(1) {
                return invalid(format!("unexpected `:{extra}` in `{}`", args.set));
            }
            let lim = generated_limit(args.set.split_once(':').map_or("", |(_, l)| l), limit)?;
            make_primes(lim.max(2))
        }
        "powers" => {
            let t = parts.next().and_then(|t| t.parse().ok());
            let Some(t) = t else { return invalid(format!("`{}`: expected powers:T[:LIMIT]", args.set)) };
            let lim = match parts.next() {
                Some(l) => l.parse::<BigUint>().map_err(|_| Error::InvalidArgument(format!("bad limit `{l}`")))?,
                None => limit.clone(),
            };
            make_powers(t, &lim)
        }
        "random" => {
            let gamma = parts.next().and_then(|g| g.parse().ok());
            let Some(gamma) = gamma else { return invalid(format!("`{}`: expected random:GAMMA[:LIMIT]", args.set)) };
            let lim = generated_limit(parts.next().unwrap_or(""), limit)?;
            make_random(lim, gamma, seed)
        }
        _ => {
            let path = Path::new(&args.set);
            let is_csv = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv"));
            let format = match (&args.column, is_csv) {
                (Some(c), _) => SetFormat::CsvColumn(c.clone()),
                (None, true) => return invalid(format!("{}: CSV input needs --column", path.display())),
                (None, false) => SetFormat::NewlineDecimal,
            };
            Ok(load_set(path, &format)?.set)
        }
    }
}
