//! Upgrading an approximate progression with bounded uncertainty `C` to an
//! exact one. Each point is coloured by its signed offset to the nearest
//! element of the set (at most `2C + 1` colours); a monochromatic
//! progression of indices is then an exact progression inside the set.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};

use crate::ap_core::{nearest_element, ArithProgression};
use crate::error::{invalid, Error, Result};
use crate::integer_sets::IntegerSet;
use crate::progression_free::find_k_ap;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColoredApproxAP {
    pub progression: ArithProgression,
    pub uncertainty: u64,
    /// Signed displacement from each point to its chosen element.
    pub offsets: Vec<i64>,
    pub colors_used: usize,
}

pub fn color(p: &ArithProgression, set: &IntegerSet, uncertainty: u64) -> Result<ColoredApproxAP> {
    if set.is_empty() {
        return Err(Error::EmptySet(format!("set `{}` is empty", set.label())));
    }
    let mut offsets = Vec::with_capacity(p.length());
    for (j, x) in p.points().enumerate() {
        let nearest = nearest_element(set.elements(), &x).expect("nonempty");
        let offset = BigInt::from(nearest.clone()) - BigInt::from(x.clone());
        match offset.to_i64() {
            Some(o) if o.unsigned_abs() <= uncertainty => offsets.push(o),
            _ => {
                return Err(Error::Precondition(format!(
                    "point {j} ({x}) is {} from the set, more than C = {uncertainty}",
                    offset.magnitude()
                )))
            }
        }
    }
    let mut distinct = offsets.clone();
    distinct.sort_unstable();
    distinct.dedup();
    Ok(ColoredApproxAP { progression: p.clone(), uncertainty, offsets, colors_used: distinct.len() })
}

/// Finds a `k`-term progression of indices sharing one offset and returns the
/// corresponding shifted, exact progression. Among all colour classes the
/// candidate with smallest start (then gap) is returned.
pub fn extract_exact(colored: &ColoredApproxAP, k: usize) -> Result<Option<ArithProgression>> {
    if k < 3 {
        return invalid(format!("progression length must be >= 3, got {k}"));
    }
    let mut classes: BTreeMap<i64, Vec<u64>> = BTreeMap::new();
    for (j, &o) in colored.offsets.iter().enumerate() {
        classes.entry(o).or_default().push(j as u64);
    }
    let p = &colored.progression;
    let best = classes
        .iter()
        .filter_map(|(&offset, idx)| find_k_ap(idx, k).map(|(i0, di)| (offset, i0, di)))
        .map(|(offset, i0, di)| {
            let start = BigInt::from(p.point(i0 as usize)) + offset;
            let start = start.to_biguint().expect("offset point lies in the set");
            (start, p.gap() * di)
        })
        .min();
    best.map(|(start, gap)| ArithProgression::new(start, gap, k)).transpose()
}

/// Every `colors`-colouring of `{1..len}` has a monochromatic `k`-term
/// progression. Exhaustive over all `colors^len` colourings.
pub fn every_coloring_has_mono_ap(len: u32, colors: u32, k: usize) -> bool {
    assert!(colors >= 1 && k >= 2);
    let total = (colors as u64).checked_pow(len).expect("colouring count overflows");
    let mut coloring = vec![0u32; len as usize];
    for code in 0..total {
        let mut c = code;
        for slot in coloring.iter_mut() {
            *slot = (c % colors as u64) as u32;
            c /= colors as u64;
        }
        if !has_mono_ap(&coloring, k) {
            return false;
        }
    }
    true
}

fn has_mono_ap(coloring: &[u32], k: usize) -> bool {
    let n = coloring.len();
    (0..n)
        .any(|s| (1..n).take_while(|g| s + g * (k - 1) < n).any(|g| (1..k).all(|j| coloring[s + j * g] == coloring[s])))
}

/// Smallest `len` such that every colouring of `{1..len}` has a monochromatic
/// `k`-term progression, searched up to `max_len`.
pub fn van_der_waerden_number(colors: u32, k: usize, max_len: u32) -> Option<u32> {
    (1..=max_len).find(|&len| every_coloring_has_mono_ap(len, colors, k))
}

/// Re-verifies that a progression lies inside the set.
pub fn contained_in(p: &ArithProgression, set: &IntegerSet) -> bool {
    !p.gap().is_zero() && p.points().all(|x| set.contains(&x))
}
