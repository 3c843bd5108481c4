//! Arithmetic progressions and the approximation distance
//! `D(P, A) = max_{p in P} min_{a in A} |p - a|`.
//!
//! Exponents are rational (`alpha = p/q`) so that `D <= gap^alpha` is decided
//! exactly as `D^q <= gap^p`.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::Zero;

use crate::error::{invalid, Error, Result};
use crate::integer_sets::IntegerSet;

/// `{start + j*gap : 0 <= j < length}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ArithProgression {
    start: BigUint,
    gap: BigUint,
    length: usize,
}

impl ArithProgression {
    pub fn new(start: BigUint, gap: BigUint, length: usize) -> Result<Self> {
        if gap.is_zero() {
            return invalid("progression gap must be positive");
        }
        if length == 0 {
            return invalid("progression length must be >= 1");
        }
        Ok(ArithProgression { start, gap, length })
    }

    pub fn from_u64(start: u64, gap: u64, length: usize) -> Result<Self> {
        Self::new(start.into(), gap.into(), length)
    }

    pub fn start(&self) -> &BigUint {
        &self.start
    }

    pub fn gap(&self) -> &BigUint {
        &self.gap
    }

    pub fn length(&self) -> usize {
        self.length
    }

    pub fn point(&self, j: usize) -> BigUint {
        &self.start + &self.gap * j
    }

    pub fn last(&self) -> BigUint {
        self.point(self.length - 1)
    }

    pub fn points(&self) -> impl Iterator<Item = BigUint> + '_ {
        (0..self.length).map(move |j| self.point(j))
    }
}

impl fmt::Display for ArithProgression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.start, self.gap, self.length)
    }
}

/// A rational exponent `p/q` in lowest terms with `0 < p/q < 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RationalExponent {
    p: u32,
    q: u32,
}

impl RationalExponent {
    pub fn new(p: u32, q: u32) -> Result<Self> {
        if p == 0 || q == 0 || p >= q {
            return invalid(format!("exponent {p}/{q} must lie strictly between 0 and 1"));
        }
        let g = p.gcd(&q);
        Ok(RationalExponent { p: p / g, q: q / g })
    }

    pub fn numer(&self) -> u32 {
        self.p
    }

    pub fn denom(&self) -> u32 {
        self.q
    }

    pub fn value(&self) -> f64 {
        self.p as f64 / self.q as f64
    }

    /// `x^p` and `y^q` compared exactly: is `y <= x^(p/q)`?
    pub fn power_bounds(&self, y: &BigUint, x: &BigUint) -> bool {
        y.pow(self.q) <= x.pow(self.p)
    }

    /// `floor(x^(p/q))`.
    pub fn floor_power(&self, x: &BigUint) -> BigUint {
        crate::roots::iroot_unchecked(&x.pow(self.p), self.q)
    }
}

impl fmt::Display for RationalExponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.p, self.q)
    }
}

/// Fractional digits accepted when an exponent is written as a decimal.
const MAX_DECIMAL_DIGITS: usize = 6;

impl FromStr for RationalExponent {
    type Err = Error;

    /// Accepts `p/q` or a short decimal such as `0.75`. Anything else that
    /// still reads as a real number is refused with a rational suggestion.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some((p, q)) = s.split_once('/') {
            let p = p.trim().parse::<u32>();
            let q = q.trim().parse::<u32>();
            return match (p, q) {
                (Ok(p), Ok(q)) => RationalExponent::new(p, q),
                _ => invalid(format!("`{s}` is not a rational p/q with integer p and q")),
            };
        }
        if let Some(frac) = s.strip_prefix("0.") {
            if !frac.is_empty() && frac.len() <= MAX_DECIMAL_DIGITS && frac.bytes().all(|b| b.is_ascii_digit()) {
                let p: u32 = frac.parse().unwrap();
                return RationalExponent::new(p, 10u32.pow(frac.len() as u32));
            }
        }
        match s.parse::<f64>() {
            Ok(x) if x > 0.0 && x < 1.0 => {
                let below = ((x * 64.0).ceil() as u32).saturating_sub(1).max(1);
                let hint = RationalExponent::new(below, 64)?;
                invalid(format!("exponent `{s}` is not an exact rational; use a rational below it such as {hint}"))
            }
            _ => invalid(format!("`{s}` is not an exponent in (0, 1)")),
        }
    }
}

/// A progression together with its exact approximation distance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ApproxMatch {
    pub progression: ArithProgression,
    pub distance: BigUint,
    pub alpha: RationalExponent,
    /// `distance^q <= gap^p`.
    pub within: bool,
}

fn abs_diff(a: &BigUint, b: &BigUint) -> BigUint {
    if a >= b {
        a - b
    } else {
        b - a
    }
}

/// Distance from `x` to the nearest element of a sorted slice.
pub fn nearest_in(sorted: &[BigUint], x: &BigUint) -> Option<BigUint> {
    let idx = sorted.partition_point(|e| e < x);
    let above = sorted.get(idx).map(|e| e - x);
    let below = idx.checked_sub(1).map(|i| x - &sorted[i]);
    match (below, above) {
        (Some(b), Some(a)) => Some(b.min(a)),
        (b, a) => b.or(a),
    }
}

/// Nearest element itself; equidistant neighbours resolve to the smaller one.
pub fn nearest_element<'a>(sorted: &'a [BigUint], x: &BigUint) -> Option<&'a BigUint> {
    let idx = sorted.partition_point(|e| e < x);
    match (idx.checked_sub(1).map(|i| &sorted[i]), sorted.get(idx)) {
        (Some(b), Some(a)) => Some(if abs_diff(x, b) <= abs_diff(a, x) { b } else { a }),
        (b, a) => b.or(a),
    }
}

pub fn nearest_distance(set: &IntegerSet, x: &BigUint) -> Result<BigUint> {
    nearest_in(set.elements(), x).ok_or_else(|| Error::EmptySet(format!("set `{}` is empty", set.label())))
}

/// `max_j min_a |start + j*gap - a|` over a sorted slice; `None` once the
/// running maximum exceeds `cap`.
pub fn distance_to_slice(p: &ArithProgression, sorted: &[BigUint], cap: Option<&BigUint>) -> Option<BigUint> {
    let mut worst = BigUint::zero();
    for x in p.points() {
        let d = nearest_in(sorted, &x)?;
        if cap.is_some_and(|c| d > *c) {
            return None;
        }
        worst = worst.max(d);
    }
    Some(worst)
}

pub fn approx_distance(p: &ArithProgression, set: &IntegerSet) -> Result<BigUint> {
    if set.is_empty() {
        return Err(Error::EmptySet(format!("set `{}` is empty", set.label())));
    }
    Ok(distance_to_slice(p, set.elements(), None).expect("uncapped distance on nonempty set"))
}

/// Like [`approx_distance`], but stops early and returns `None` as soon as
/// some point is farther than `cap` from the set.
pub fn approx_distance_capped(p: &ArithProgression, set: &IntegerSet, cap: &BigUint) -> Result<Option<BigUint>> {
    if set.is_empty() {
        return Err(Error::EmptySet(format!("set `{}` is empty", set.label())));
    }
    Ok(distance_to_slice(p, set.elements(), Some(cap)))
}

pub fn is_within(p: &ArithProgression, set: &IntegerSet, alpha: RationalExponent) -> Result<ApproxMatch> {
    let distance = approx_distance(p, set)?;
    let within = alpha.power_bounds(&distance, p.gap());
    Ok(ApproxMatch { progression: p.clone(), distance, alpha, within })
}

/// `D <= factor * gap^alpha`, exactly: `D^q <= factor^q * gap^p`.
pub fn within_scaled(distance: &BigUint, gap: &BigUint, alpha: RationalExponent, factor: u32) -> bool {
    distance.pow(alpha.denom()) <= BigUint::from(factor).pow(alpha.denom()) * gap.pow(alpha.numer())
}

impl ApproxMatch {
    /// Re-derives `within` from the stored integers.
    pub fn recheck(&self) -> bool {
        self.within == self.alpha.power_bounds(&self.distance, self.progression.gap())
    }
}
