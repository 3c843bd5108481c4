//! Exact k-term progression detection and the extremal function `r_k(N)`,
//! the size of the largest subset of `{1..N}` without a k-term progression.
//!
//! `r_k` is computed by branch and bound for `N <= RK_EXACT_LIMIT`. Beyond
//! that a capability error is returned; an approximate answer never is.

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use crate::ap_core::ArithProgression;
use crate::error::{invalid, Error, Result};
use crate::integer_sets::IntegerSet;

/// Largest `N` for which `compute_r_k` guarantees an exact answer.
pub const RK_EXACT_LIMIT: u64 = 40;

/// Lexicographically smallest `(start, gap)` of a `k`-term progression
/// inside a strictly increasing slice.
pub fn find_k_ap(sorted: &[u64], k: usize) -> Option<(u64, u64)> {
    debug_assert!(k >= 2);
    let max = *sorted.last()?;
    for (i, &first) in sorted.iter().enumerate() {
        for &second in &sorted[i + 1..] {
            let gap = second - first;
            match first.checked_add(gap * (k as u64 - 1)) {
                Some(end) if end <= max => {}
                _ => break,
            }
            if (2..k as u64).all(|j| sorted.binary_search(&(first + j * gap)).is_ok()) {
                return Some((first, gap));
            }
        }
    }
    None
}

/// A `k`-term progression with every point in `set`, if one exists. The
/// witness is the one with smallest start, then smallest gap.
pub fn has_k_ap(set: &IntegerSet, k: usize) -> Result<Option<ArithProgression>> {
    if k < 3 {
        return invalid(format!("progression length must be >= 3, got {k}"));
    }
    let elems = set.elements();
    let Some(max) = elems.last() else { return Ok(None) };
    for (i, first) in elems.iter().enumerate() {
        for second in &elems[i + 1..] {
            let gap = second - first;
            if first + &gap * (k - 1) > *max {
                break;
            }
            if (2..k).all(|j| set.contains(&(first + &gap * j))) {
                return Ok(Some(ArithProgression::new(first.clone(), gap, k)?));
            }
        }
    }
    Ok(None)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RkResult {
    pub n: u64,
    pub k: usize,
    pub r: usize,
    /// Lexicographically smallest progression-free subset of size `r`.
    pub witness: Vec<u64>,
}

impl RkResult {
    pub fn witness_set(&self) -> IntegerSet {
        IntegerSet::from_u64s(self.witness.iter().copied(), format!("r_{}({}) witness", self.k, self.n))
    }
}

type Table = HashMap<usize, Vec<RkResult>>;

fn table() -> &'static Mutex<Table> {
    static TABLE: OnceLock<Mutex<Table>> = OnceLock::new();
    TABLE.get_or_init(|| Mutex::new(HashMap::new()))
}

pub fn compute_r_k(n: u64, k: usize) -> Result<RkResult> {
    if k < 3 {
        return invalid(format!("progression length must be >= 3, got {k}"));
    }
    if n == 0 {
        return invalid("N must be >= 1");
    }
    if n > RK_EXACT_LIMIT {
        return Err(Error::Capability(format!("r_{k}({n}) is beyond the exact search limit N <= {RK_EXACT_LIMIT}")));
    }
    let mut guard = table().lock().unwrap_or_else(|e| e.into_inner());
    let results = guard.entry(k).or_default();
    while (results.len() as u64) < n {
        let next = results.len() as u64 + 1;
        let prev: Vec<usize> = results.iter().map(|r| r.r).collect();
        results.push(solve(next, k, &prev));
    }
    Ok(results[n as usize - 1].clone())
}

/// `count > r_k(m)`: every `count`-subset of `{1..m}` holds a k-term progression.
pub fn density_forces_ap(m: u64, k: usize, count: usize) -> Result<bool> {
    Ok(count > compute_r_k(m, k)?.r)
}

/// `r_prev[i]` is `r_k(i + 1)` for every `i + 1 < n`.
fn solve(n: u64, k: usize, r_prev: &[usize]) -> RkResult {
    let base = r_prev.last().copied().unwrap_or(0);
    // r_k(n) is r_k(n-1) or r_k(n-1) + 1; try the larger value first.
    for target in [base + 1, base] {
        let mut search = Search { n, k, r_prev, target, chosen: Vec::new(), mask: 0 };
        if search.dfs(1) {
            return RkResult { n, k, r: target, witness: search.chosen };
        }
    }
    unreachable!("r_k(n) >= r_k(n - 1)")
}

struct Search<'a> {
    n: u64,
    k: usize,
    r_prev: &'a [usize],
    target: usize,
    chosen: Vec<u64>,
    /// bit `x` set when `x` is chosen
    mask: u64,
}

impl Search<'_> {
    /// Largest progression-free size inside an interval of `len` integers.
    fn r_of(&self, len: u64) -> usize {
        match len {
            0 => 0,
            l => self.r_prev.get(l as usize - 1).copied().unwrap_or(l as usize),
        }
    }

    /// Adding `x` (larger than all chosen) completes a k-term progression.
    fn closes_ap(&self, x: u64) -> bool {
        let steps = self.k as u64 - 1;
        (1..=(x - 1) / steps).any(|g| (1..=steps).all(|i| self.mask >> (x - i * g) & 1 == 1))
    }

    /// Include-first depth-first search; the first completion found is the
    /// lexicographically smallest set of size `target`.
    fn dfs(&mut self, x: u64) -> bool {
        if self.chosen.len() == self.target {
            return true;
        }
        if x > self.n || self.chosen.len() + self.r_of(self.n - x + 1) < self.target {
            return false;
        }
        // A set hitting the target can be translated to start at 1; one that
        // beats r_k(n-1) cannot avoid n.
        let forced = (self.chosen.is_empty() && x == 1) || (x == self.n && self.target > self.r_of(self.n - 1));
        if !self.closes_ap(x) {
            self.chosen.push(x);
            self.mask |= 1 << x;
            if self.dfs(x + 1) {
                return true;
            }
            self.chosen.pop();
            self.mask &= !(1 << x);
        }
        !forced && self.dfs(x + 1)
    }
}
