//! Direct search for approximate progressions inside one dyadic window.
//!
//! Gaps are tried from largest to smallest and, for each gap, anchors are the
//! window's elements in ascending order. Anchoring at elements loses at most a
//! factor of two: if some progression `P` has distance `D`, shifting `P` so its
//! first point sits on its nearest element gives distance at most `2D`.

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use rayon::prelude::*;

use crate::ap_core::{within_scaled, ApproxMatch, ArithProgression, RationalExponent};
use crate::error::{invalid, Error, Result};
use crate::integer_sets::IntegerSet;
use crate::roots::iroot_unchecked;

/// Largest window exponent handled with word arithmetic.
pub const MAX_SEARCH_EXPONENT: u32 = 62;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchParams {
    pub k: usize,
    pub alpha: RationalExponent,
    /// Accept `D <= factor * gap^alpha`.
    pub factor: u32,
    pub gap_min: u64,
    /// Defaults to the largest gap that fits in the window.
    pub gap_max: Option<u64>,
}

impl SearchParams {
    pub fn new(k: usize, alpha: RationalExponent) -> Self {
        SearchParams { k, alpha, factor: 1, gap_min: 1, gap_max: None }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchHit {
    pub n: u32,
    /// Distance is measured against the window slice `A_n`.
    pub matched: ApproxMatch,
    pub factor: u32,
}

/// `floor(factor * gap^(p/q))`, exactly.
pub fn scaled_cap(gap: u64, alpha: RationalExponent, factor: u32) -> BigUint {
    let x = BigUint::from(factor).pow(alpha.denom()) * BigUint::from(gap).pow(alpha.numer());
    iroot_unchecked(&x, alpha.denom())
}

fn nearest_u64(sorted: &[u64], x: u64) -> u64 {
    let i = sorted.partition_point(|&a| a < x);
    let above = sorted.get(i).map(|&a| a - x);
    let below = i.checked_sub(1).map(|j| x - sorted[j]);
    match (above, below) {
        (Some(u), Some(d)) => u.min(d),
        (u, d) => u.or(d).expect("nonempty slice"),
    }
}

fn capped(sorted: &[u64], start: u64, gap: u64, k: usize, cap: u64) -> Option<u64> {
    let mut worst = 0;
    for j in 0..k as u64 {
        let d = nearest_u64(sorted, start + j * gap);
        if d > cap {
            return None;
        }
        worst = worst.max(d);
    }
    Some(worst)
}

/// First `(gap, start)` in the order described in the module docs whose
/// progression has `D <= factor * gap^alpha`, with all points in the window.
pub fn search_window(set: &IntegerSet, n: u32, params: &SearchParams) -> Result<Option<SearchHit>> {
    if params.k < 2 {
        return invalid(format!("progression length must be >= 2, got {}", params.k));
    }
    if params.factor == 0 {
        return invalid("factor must be positive");
    }
    if n > MAX_SEARCH_EXPONENT {
        return Err(Error::Capability(format!(
            "direct search supports windows up to 2^{MAX_SEARCH_EXPONENT}, got n = {n}"
        )));
    }
    let slice = set.dyadic_window(n);
    if slice.is_empty() {
        return Err(Error::EmptySet(format!("window [2^{n}, 2^{}) has no elements", n + 1)));
    }
    let elems: Vec<u64> = slice.iter().map(|x| x.to_u64().expect("window fits in u64")).collect();
    let lo = 1u64 << n;
    let hi = (lo << 1) - 1;
    let span_max = (hi - lo) / (params.k as u64 - 1);
    let gap_max = params.gap_max.map_or(span_max, |g| g.min(span_max));
    if params.gap_min == 0 || params.gap_min > gap_max {
        return Ok(None);
    }
    let count = (gap_max - params.gap_min + 1) as usize;
    let found = (0..count).into_par_iter().find_map_first(|i| {
        let gap = gap_max - i as u64;
        let cap = scaled_cap(gap, params.alpha, params.factor).to_u64().unwrap_or(u64::MAX);
        let last = hi - (params.k as u64 - 1) * gap;
        elems
            .iter()
            .take_while(|&&a| a <= last)
            .find_map(|&a| capped(&elems, a, gap, params.k, cap).map(|d| (a, gap, d)))
    });
    let Some((start, gap, d)) = found else { return Ok(None) };

    let progression = ArithProgression::from_u64(start, gap, params.k)?;
    let window = IntegerSet::from_sorted(slice.to_vec(), set.label())?;
    let distance = crate::ap_core::approx_distance(&progression, &window)?;
    if distance != BigUint::from(d) || !within_scaled(&distance, progression.gap(), params.alpha, params.factor) {
        return Err(Error::Internal(format!("search hit ({start}, {gap}) failed re-verification")));
    }
    let within = params.alpha.power_bounds(&distance, progression.gap());
    Ok(Some(SearchHit {
        n,
        matched: ApproxMatch { progression, distance, alpha: params.alpha, within },
        factor: params.factor,
    }))
}
