//! Integer sets: construction, file ingestion and density diagnostics.
//!
//! An [`IntegerSet`] is an immutable, strictly increasing list of
//! nonnegative big integers. Dyadic windows `[2^n, 2^(n+1))` are borrowed
//! slices of it, so every query is a binary search.

use std::fs;
use std::path::Path;

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{invalid, Error, Result};
use crate::roots::{iroot, ln_big};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntegerSet {
    elements: Vec<BigUint>,
    label: String,
}

impl IntegerSet {
    /// Builds a set from arbitrary input, sorting and removing duplicates.
    /// Returns the set and the number of duplicates dropped.
    pub fn from_unsorted(mut values: Vec<BigUint>, label: impl Into<String>) -> (Self, usize) {
        values.sort_unstable();
        let before = values.len();
        values.dedup();
        let dups = before - values.len();
        (IntegerSet { elements: values, label: label.into() }, dups)
    }

    pub fn from_u64s<I: IntoIterator<Item = u64>>(values: I, label: impl Into<String>) -> Self {
        Self::from_unsorted(values.into_iter().map(BigUint::from).collect(), label).0
    }

    /// Wraps an already strictly increasing sequence.
    pub fn from_sorted(values: Vec<BigUint>, label: impl Into<String>) -> Result<Self> {
        if values.windows(2).any(|w| w[0] >= w[1]) {
            return invalid("elements must be strictly increasing");
        }
        Ok(IntegerSet { elements: values, label: label.into() })
    }

    pub fn elements(&self) -> &[BigUint] {
        &self.elements
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn contains(&self, x: &BigUint) -> bool {
        self.elements.binary_search(x).is_ok()
    }

    /// Number of elements `<= x`.
    pub fn count_le(&self, x: &BigUint) -> usize {
        self.elements.partition_point(|e| e <= x)
    }

    /// Elements in the half-open range `[lo, hi)`.
    pub fn range(&self, lo: &BigUint, hi: &BigUint) -> &[BigUint] {
        let start = self.elements.partition_point(|e| e < lo);
        let end = self.elements.partition_point(|e| e < hi);
        &self.elements[start..end.max(start)]
    }

    /// The dyadic window `A_n = A ∩ [2^n, 2^(n+1))`.
    pub fn dyadic_window(&self, n: u32) -> &[BigUint] {
        let lo = BigUint::one() << n;
        let hi = BigUint::one() << (n + 1);
        self.range(&lo, &hi)
    }

    pub fn max(&self) -> Option<&BigUint> {
        self.elements.last()
    }
}

/// Perfect `t`-th powers `1^t, 2^t, ...` not exceeding `limit`.
pub fn make_powers(t: u32, limit: &BigUint) -> Result<IntegerSet> {
    if t < 2 {
        return invalid(format!("power exponent must be >= 2, got {t}"));
    }
    if limit.is_zero() {
        return invalid("limit must be >= 1");
    }
    let top = iroot(limit, t)?;
    let mut out = Vec::new();
    let mut base = BigUint::one();
    while base <= top {
        out.push(base.pow(t));
        base += 1u32;
    }
    IntegerSet::from_sorted(out, format!("powers:{t}"))
}

/// All primes `<= limit`.
pub fn make_primes(limit: u64) -> Result<IntegerSet> {
    if limit < 2 {
        return invalid(format!("prime limit must be >= 2, got {limit}"));
    }
    let primes = segmented_sieve(limit).into_iter().map(BigUint::from).collect();
    IntegerSet::from_sorted(primes, "primes")
}

/// Largest limit accepted by [`make_random`].
pub const RANDOM_LIMIT_MAX: u64 = 1 << 32;

/// Each `2 <= x <= limit` kept independently with probability
/// `min(1, (ln x)^-gamma)`, drawn from a ChaCha stream seeded by `seed`.
pub fn make_random(limit: u64, gamma: f64, seed: u64) -> Result<IntegerSet> {
    if !(gamma >= 0.0 && gamma.is_finite()) {
        return invalid(format!("gamma must be a nonnegative real, got {gamma}"));
    }
    if limit > RANDOM_LIMIT_MAX {
        return Err(Error::Capability(format!("random sets are limited to {RANDOM_LIMIT_MAX}, got {limit}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let values = (2..=limit).filter(|&x| rng.gen::<f64>() < (x as f64).ln().powf(-gamma)).map(BigUint::from).collect();
    IntegerSet::from_sorted(values, format!("random:{gamma}:{seed}"))
}

const SEGMENT: u64 = 1 << 16;

/// Segmented sieve of Eratosthenes over odd numbers.
pub fn segmented_sieve(limit: u64) -> Vec<u64> {
    if limit < 2 {
        return Vec::new();
    }
    let root = (limit as f64).sqrt() as u64 + 1;
    let mut small = vec![true; (root + 1) as usize];
    let mut base_primes = Vec::new();
    for i in 2..=root {
        if small[i as usize] {
            if i > 2 {
                base_primes.push(i);
            }
            let mut j = i * i;
            while j <= root {
                small[j as usize] = false;
                j += i;
            }
        }
    }

    let mut out = vec![2u64];
    let mut seg = vec![true; SEGMENT as usize];
    let mut lo = 3u64;
    while lo <= limit {
        let hi = (lo + 2 * SEGMENT).min(limit + 1); // odd numbers in [lo, hi)
        let count = (hi - lo).div_ceil(2) as usize;
        seg[..count].fill(true);
        for &p in &base_primes {
            if p * p >= hi {
                break;
            }
            let mut start = (p * p).max(lo.div_ceil(p) * p);
            if start % 2 == 0 {
                start += p;
            }
            let mut j = start;
            while j < hi {
                seg[((j - lo) / 2) as usize] = false;
                j += 2 * p;
            }
        }
        for (i, &is_prime) in seg[..count].iter().enumerate() {
            let v = lo + 2 * i as u64;
            if is_prime && v <= limit {
                out.push(v);
            }
        }
        lo = hi + hi.is_multiple_of(2) as u64;
    }
    out
}

/// Input layout accepted by [`load_set`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SetFormat {
    NewlineDecimal,
    /// CSV with a header row; values are taken from the named column.
    CsvColumn(String),
}

#[derive(Debug, Clone)]
pub struct LoadedSet {
    pub set: IntegerSet,
    pub duplicates: usize,
}

pub fn load_set(path: &Path, format: &SetFormat) -> Result<LoadedSet> {
    let text = fs::read_to_string(path).map_err(|source| Error::Io { path: path.into(), source })?;
    let label = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let values = match format {
        SetFormat::NewlineDecimal => parse_lines(&text)?,
        SetFormat::CsvColumn(column) => parse_csv_column(&text, column)?,
    };
    if values.is_empty() {
        return Err(Error::EmptySet(format!("{} contains no integers", path.display())));
    }
    let (set, duplicates) = IntegerSet::from_unsorted(values, label);
    if duplicates > 0 {
        log::info!("{}: dropped {duplicates} duplicate value(s)", path.display());
    }
    Ok(LoadedSet { set, duplicates })
}

fn parse_token(token: &str, line: usize) -> Result<BigUint> {
    token
        .parse::<BigUint>()
        .map_err(|_| Error::Parse { line, message: format!("`{token}` is not a nonnegative integer") })
}

fn parse_lines(text: &str) -> Result<Vec<BigUint>> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty())
        .map(|(line, tok)| parse_token(tok, line))
        .collect()
}

fn parse_csv_column(text: &str, column: &str) -> Result<Vec<BigUint>> {
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text.as_bytes());
    let headers = reader.headers().map_err(|e| Error::Parse { line: 1, message: e.to_string() })?;
    let idx = headers
        .iter()
        .position(|h| h == column)
        .ok_or_else(|| Error::Parse { line: 1, message: format!("no column named `{column}`") })?;
    let mut out = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| Error::Parse {
            line: e.position().map_or(0, |p| p.line() as usize),
            message: e.to_string(),
        })?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        let tok = record.get(idx).unwrap_or("");
        if tok.is_empty() {
            continue;
        }
        out.push(parse_token(tok, line)?);
    }
    Ok(out)
}

/// Outcome of the power-log density test `#A ∩ [0,n] >= n / (ln n)^gamma`.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityProfile {
    pub n: BigUint,
    pub count: usize,
    pub gamma: f64,
    pub threshold: f64,
    pub satisfied: bool,
}

/// Relative slack granted to the floating-point threshold comparison.
pub const DENSITY_SLACK: f64 = 1e-9;

pub fn density_profile(set: &IntegerSet, n: &BigUint, gamma: f64) -> Result<DensityProfile> {
    if *n < BigUint::from(2u32) {
        return invalid("density needs n >= 2 so that ln n > 0");
    }
    if !(gamma > 0.0 && gamma.is_finite()) {
        return invalid(format!("gamma must be a positive real, got {gamma}"));
    }
    let count = set.count_le(n);
    let ln_n = ln_big(n);
    let threshold = (ln_n - gamma * ln_n.ln()).exp();
    let satisfied = count as f64 >= threshold * (1.0 - DENSITY_SLACK);
    Ok(DensityProfile { n: n.clone(), count, gamma, threshold, satisfied })
}

/// Exact `sum 1/a` over elements `1 <= a <= upto`. Zero is skipped.
pub fn reciprocal_sum_partial(set: &IntegerSet, upto: &BigUint) -> Result<BigRational> {
    if upto.is_zero() {
        return invalid("upto must be >= 1");
    }
    let mut elems = &set.elements[..set.count_le(upto)];
    if elems.first().is_some_and(|e| e.is_zero()) {
        log::warn!("set `{}` contains 0; skipped in reciprocal sum", set.label);
        elems = &elems[1..];
    }
    // Sum pairwise so intermediate denominators stay balanced.
    fn sum(xs: &[BigUint]) -> BigRational {
        match xs.len() {
            0 => BigRational::zero(),
            1 => BigRational::new(1.into(), xs[0].clone().into()),
            len => sum(&xs[..len / 2]) + sum(&xs[len / 2..]),
        }
    }
    Ok(sum(elems))
}
