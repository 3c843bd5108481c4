//! Near misses of three t-th powers in arithmetic progression.
//!
//! For `10 <= a < b` the doubled deviation `min_n |a^t + b^t - 2 n^t|` is
//! computed exactly, and
//!
//! ```text
//! f_t(b) = min_a (ln(doubled) - ln 2) / ln(b^t - a^t)
//! ```
//!
//! is the real-valued statistic whose infimum over `b` is being probed.
//! Candidates are compared in double precision; two ratios closer than
//! [`NEAR_TIE`] are re-compared with 200-bit fixed-point logarithms.

use std::cmp::Ordering;
use std::fmt::Write as _;

use num_bigint::BigUint;
use num_traits::Zero;
use rayon::prelude::*;

use crate::error::{invalid, Error, Result};
use crate::roots::{iroot_u128, ln_big, ln_fixed};

pub use crate::roots::iroot;

/// Smallest `a` allowed in the minimisation.
pub const A_MIN: u64 = 10;

/// Ratios closer than this are arbitrated with high-precision logarithms.
pub const NEAR_TIE: f64 = 1e-9;

/// Fractional bits used for the tie arbitration.
pub const TIE_PRECISION_BITS: u32 = 200;

pub const CSV_HEADER: &str = "t,b,a,n,doubled_dev,f";

#[derive(Debug, Clone, PartialEq)]
pub struct NearMissRecord {
    pub t: u32,
    pub b: u64,
    pub a_star: u64,
    pub n_star: BigUint,
    /// `|a_star^t + b^t - 2 n_star^t|`
    pub doubled_dev: BigUint,
    pub f_value: f64,
}

impl NearMissRecord {
    /// `b^t - a_star^t`
    pub fn spread(&self) -> BigUint {
        BigUint::from(self.b).pow(self.t) - BigUint::from(self.a_star).pow(self.t)
    }

    /// Recomputes the statistic from the integer fields.
    pub fn recompute_f(&self) -> f64 {
        ratio_f64(&self.doubled_dev, &self.spread())
    }

    pub fn to_csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{}",
            self.t,
            self.b,
            self.a_star,
            self.n_star,
            self.doubled_dev,
            format_significant(self.f_value, 12)
        )
    }
}

fn ratio_f64(doubled: &BigUint, spread: &BigUint) -> f64 {
    (ln_big(doubled) - std::f64::consts::LN_2) / ln_big(spread)
}

/// `n` minimising `|x - 2 n^t|` and that minimum. Ties go to the smaller `n`.
pub fn nearest_power_doubled(x: &BigUint, t: u32) -> Result<(BigUint, BigUint)> {
    if t < 2 {
        return invalid(format!("power exponent must be >= 2, got {t}"));
    }
    if *x < BigUint::from(2u32) {
        return invalid("nearest power needs X >= 2");
    }
    let r = iroot(&(x >> 1u32), t)?;
    let below = x - (r.pow(t) << 1u32);
    let r1 = &r + 1u32;
    let above = (r1.pow(t) << 1u32) - x;
    Ok(if below <= above { (r, below) } else { (r1, above) })
}

/// Machine-word version of [`nearest_power_doubled`]; `x < 2^126`.
fn nearest_power_doubled_u128(x: u128, t: u32) -> (u128, u128) {
    let r = iroot_u128(x >> 1, t);
    let below = x - 2 * r.pow(t);
    let above = 2 * (r + 1).pow(t) - x;
    if below <= above {
        (r, below)
    } else {
        (r + 1, above)
    }
}

/// Total order on `(ln(d1) - ln 2) / ln(l1)` vs `(ln(d2) - ln 2) / ln(l2)`
/// evaluated with fixed-point logarithms. All inputs positive, `l > 1`.
pub fn compare_ratios_precise(d1: &BigUint, l1: &BigUint, d2: &BigUint, l2: &BigUint) -> Ordering {
    let p = TIE_PRECISION_BITS;
    let ln2 = ln_fixed(&BigUint::from(2u32), p);
    let n1 = ln_fixed(d1, p) - &ln2;
    let n2 = ln_fixed(d2, p) - &ln2;
    let (den1, den2) = (ln_fixed(l1, p), ln_fixed(l2, p));
    // denominators are positive, so cross-multiplying keeps the order;
    // the last few bits are noise and are dropped before comparing
    let lhs: num_bigint::BigInt = (n1 * den2) >> (p + 8) as usize;
    let rhs: num_bigint::BigInt = (n2 * den1) >> (p + 8) as usize;
    lhs.cmp(&rhs)
}

struct Candidate {
    a: u64,
    n: BigUint,
    doubled: BigUint,
    spread: BigUint,
    ratio: f64,
}

impl Candidate {
    /// Strictly better than `other`; `other` always has the smaller `a`.
    fn beats(&self, other: &Candidate) -> bool {
        if (self.ratio - other.ratio).abs() > NEAR_TIE {
            return self.ratio < other.ratio;
        }
        compare_ratios_precise(&self.doubled, &self.spread, &other.doubled, &other.spread) == Ordering::Less
    }
}

fn exact_progression(t: u32, a: u64, b: u64, n: impl ToString) -> Error {
    Error::ExactProgression { t, a, b, n: n.to_string() }
}

/// `f_t(b)` with its minimising `a` and witness `n`.
pub fn f_t_b(b: u64, t: u32) -> Result<NearMissRecord> {
    if b <= A_MIN {
        return invalid(format!("b must exceed {A_MIN}, got {b}"));
    }
    if t < 3 {
        return invalid(format!("t must be >= 3, got {t}"));
    }
    let fits_word = (b as u128).checked_pow(t).is_some_and(|bt| bt < 1u128 << 124);
    let mut best: Option<Candidate> = None;
    for a in A_MIN..b {
        let cand = if fits_word {
            let (at, bt) = ((a as u128).pow(t), (b as u128).pow(t));
            let (n, d) = nearest_power_doubled_u128(at + bt, t);
            if d == 0 {
                return Err(exact_progression(t, a, b, n));
            }
            let spread = bt - at;
            let ratio = ((d as f64).ln() - std::f64::consts::LN_2) / (spread as f64).ln();
            Candidate { a, n: n.into(), doubled: d.into(), spread: spread.into(), ratio }
        } else {
            let (at, bt) = (BigUint::from(a).pow(t), BigUint::from(b).pow(t));
            let (n, d) = nearest_power_doubled(&(&at + &bt), t)?;
            if d.is_zero() {
                return Err(exact_progression(t, a, b, n));
            }
            let spread = bt - at;
            let ratio = ratio_f64(&d, &spread);
            Candidate { a, n, doubled: d, spread, ratio }
        };
        if best.as_ref().is_none_or(|cur| cand.beats(cur)) {
            best = Some(cand);
        }
    }
    let best = best.expect("b > A_MIN gives at least one candidate");
    Ok(NearMissRecord {
        t,
        b,
        a_star: best.a,
        f_value: ratio_f64(&best.doubled, &best.spread),
        n_star: best.n,
        doubled_dev: best.doubled,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct NearMissScan {
    pub t: u32,
    pub records: Vec<NearMissRecord>,
    /// Smallest `f_t(b)` seen and the first `b` attaining it.
    pub infimum: (u64, f64),
}

/// `f_t(b)` for every `b` in `[11, b_max]`, in order of `b`. Runs on the
/// current rayon pool; the output does not depend on its size.
pub fn scan(t: u32, b_max: u64) -> Result<NearMissScan> {
    if b_max <= A_MIN {
        return invalid(format!("b_max must exceed {A_MIN}, got {b_max}"));
    }
    let records = (A_MIN + 1..=b_max).into_par_iter().map(|b| f_t_b(b, t)).collect::<Result<Vec<_>>>()?;
    let infimum =
        records.iter().fold((0, f64::INFINITY), |acc, r| if r.f_value < acc.1 { (r.b, r.f_value) } else { acc });
    Ok(NearMissScan { t, records, infimum })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct CubeSolution {
    pub x: u64,
    pub y: u64,
    pub z: u64,
    /// `x^3 + y^3 - 2 z^3`, one of -2, -1, 1, 2
    pub value: i64,
}

/// All `1 <= x < y <= limit` with `x^3 + y^3 - 2 z^3` in `{±1, ±2}` for
/// the nearest `z`.
pub fn cube_identity_search(limit: u64) -> Result<Vec<CubeSolution>> {
    if limit < 2 {
        return invalid(format!("limit must be >= 2, got {limit}"));
    }
    if (limit as u128).pow(3) >= 1u128 << 124 {
        return Err(Error::Capability(format!("limit {limit} too large for the cube search")));
    }
    let mut out: Vec<CubeSolution> = (1..limit)
        .into_par_iter()
        .flat_map_iter(|x| {
            (x + 1..=limit).filter_map(move |y| {
                let sum = (x as u128).pow(3) + (y as u128).pow(3);
                let (z, d) = nearest_power_doubled_u128(sum, 3);
                (d <= 2).then(|| {
                    let value = sum as i128 - 2 * (z as i128).pow(3);
                    CubeSolution { x, y, z: z as u64, value: value as i64 }
                })
            })
        })
        .collect();
    out.sort_unstable();
    Ok(out)
}

/// `value` rounded to `digits` significant digits, in positional notation.
pub fn format_significant(value: f64, digits: usize) -> String {
    if value == 0.0 || !value.is_finite() {
        return format!("{value}");
    }
    let sci = format!("{:.*e}", digits - 1, value);
    let exp: i32 = sci.rsplit_once('e').and_then(|(_, e)| e.parse().ok()).unwrap_or(0);
    let decimals = (digits as i32 - 1 - exp).max(0) as usize;
    format!("{value:.decimals$}")
}

pub fn write_csv(records: &[NearMissRecord]) -> String {
    let mut out = String::with_capacity(32 * (records.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in records {
        let _ = writeln!(out, "{}", r.to_csv_row());
    }
    out
}

/// Parses a near-miss CSV; the header must match [`CSV_HEADER`] exactly.
pub fn read_csv(text: &str) -> Result<Vec<NearMissRecord>> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h.trim_end() == CSV_HEADER => {}
        _ => return Err(Error::Parse { line: 1, message: format!("expected header `{CSV_HEADER}`") }),
    }
    lines
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            let line = i + 1;
            let bad = |what: &str| Error::Parse { line, message: format!("bad {what} field") };
            let fields: Vec<&str> = l.trim_end().split(',').collect();
            if fields.len() != 6 {
                return Err(Error::Parse { line, message: format!("expected 6 fields, got {}", fields.len()) });
            }
            Ok(NearMissRecord {
                t: fields[0].parse().map_err(|_| bad("t"))?,
                b: fields[1].parse().map_err(|_| bad("b"))?,
                a_star: fields[2].parse().map_err(|_| bad("a"))?,
                n_star: fields[3].parse().map_err(|_| bad("n"))?,
                doubled_dev: fields[4].parse().map_err(|_| bad("doubled_dev"))?,
                f_value: fields[5].parse().map_err(|_| bad("f"))?,
            })
        })
        .collect()
}
