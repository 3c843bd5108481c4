//! Dyadic-window certificate for approximate progressions.
//!
//! The window `[N, 2N)` with `N = 2^n` is cut into intervals of length
//! `N^(alpha^2)`, those into intervals of length `N^(alpha^4)`, and so on.
//! At level `l` the sub-interval labels inside each occupied interval are
//! grouped by residue modulo `N^(alpha^(2l+1)) / N^(alpha^(2l+2))`; the
//! centres of one residue class form a progression of gap
//! `Delta_l = len_(l+1) * modulus_l`.
//!
//! Whenever the occupied labels of a class contain a k-term progression the
//! matching centres give a progression within `2 Delta^alpha` of the window,
//! which is returned after exact re-verification. Otherwise every class is
//! progression-free and the window's cardinality is compared with
//! `2 (2 eps)^(m+1) N`.
//!
//! All real powers `N^(alpha^j)` are materialized as exact integer floors.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::ops::RangeInclusive;

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::ap_core::{distance_to_slice, within_scaled, ApproxMatch, ArithProgression, RationalExponent};
use crate::error::{invalid, Error, Result};
use crate::integer_sets::IntegerSet;
use crate::progression_free::{density_forces_ap, find_k_ap, RK_EXACT_LIMIT};
use crate::roots::{cmp_pow2_rational, floor_pow2_rational};

/// Smallest window exponent accepted by [`plan_levels`].
pub const MIN_WINDOW_EXPONENT: u32 = 4;

/// Level geometry for one window.
#[derive(Debug, Clone, PartialEq)]
pub struct LevelPlan {
    pub n: u32,
    pub alpha: RationalExponent,
    /// `len_l = floor(N^(alpha^(2l)))` for `l = 0..=m+1`; `len_0 = N`.
    pub interval_lengths: Vec<BigUint>,
    /// `floor(floor(N^(alpha^(2l+1))) / len_(l+1))` for `l = 0..=m`.
    pub moduli: Vec<BigUint>,
    /// Smallest residue-class size at each retained level.
    pub class_sizes: Vec<BigUint>,
    pub m_prime: usize,
    pub m: usize,
    /// Real-valued estimate `(ln ln N + ln(1-alpha) - ln ln M) / (-2 ln alpha)`.
    pub m_prime_estimate: f64,
    pub threshold: u64,
    /// Whether exact `r_k` shows density `eps` forces a progression in a class
    /// of the level's size; `None` beyond the exact search limit.
    pub szemeredi_ready: Vec<Option<bool>>,
}

impl LevelPlan {
    pub fn window_start(&self) -> BigUint {
        BigUint::one() << self.n
    }

    /// `Delta_l = len_(l+1) * modulus_l`.
    pub fn level_gap(&self, level: usize) -> BigUint {
        &self.interval_lengths[level + 1] * &self.moduli[level]
    }

    /// `2 * gap >= N^(alpha^(2m+1))`, decided exactly.
    pub fn gap_meets_floor(&self, gap: &BigUint) -> bool {
        let j = 2 * self.m as u32 + 1;
        let (num, den) = exponent(self.n, self.alpha, j);
        cmp_pow2_rational(&(gap << 1u32), &num, &den).is_ok_and(|o| o != Ordering::Less)
    }
}

/// `N^(alpha^j) = 2^(n p^j / q^j)` as a numerator/denominator pair.
fn exponent(n: u32, alpha: RationalExponent, j: u32) -> (BigUint, BigUint) {
    (BigUint::from(n) * BigUint::from(alpha.numer()).pow(j), BigUint::from(alpha.denom()).pow(j))
}

fn power_floor(n: u32, alpha: RationalExponent, j: u32) -> Result<BigUint> {
    let (num, den) = exponent(n, alpha, j);
    floor_pow2_rational(&num, &den)
}

/// Inputs of the certificate that do not depend on the window.
#[derive(Debug, Clone, PartialEq)]
pub struct CertificateConfig {
    pub epsilon: BigRational,
    pub k: usize,
    pub gamma: f64,
    /// Stand-in for the Szemerédi threshold: a level is retained only while
    /// its residue classes have more than this many labels.
    pub threshold: u64,
}

impl CertificateConfig {
    pub fn new(epsilon: BigRational, k: usize, gamma: f64) -> Result<Self> {
        let cfg = CertificateConfig { epsilon, k, gamma, threshold: k as u64 };
        cfg.check_ranges()?;
        Ok(cfg)
    }

    /// Uses the default `eps` for the given exponent and window range.
    pub fn with_default_epsilon(
        k: usize,
        gamma: f64,
        alpha: RationalExponent,
        n_range: &RangeInclusive<u32>,
    ) -> Result<Self> {
        Self::new(default_epsilon(alpha, gamma, n_range)?, k, gamma)
    }

    pub fn with_threshold(mut self, threshold: u64) -> Self {
        self.threshold = threshold;
        self
    }

    fn check_ranges(&self) -> Result<()> {
        let half = BigRational::new(1.into(), 2.into());
        if self.epsilon <= BigRational::zero() || self.epsilon >= half {
            return invalid(format!("epsilon must lie in (0, 1/2), got {}", self.epsilon));
        }
        if self.k < 3 {
            return invalid(format!("k must be >= 3, got {}", self.k));
        }
        if !(self.gamma > 0.0 && self.gamma.is_finite()) {
            return invalid(format!("gamma must be positive, got {}", self.gamma));
        }
        Ok(())
    }

    /// Checks `(ln n / n)^(ln 2eps / (2 ln alpha)) <= n^(-gamma)` on every
    /// window exponent of the run.
    pub fn validate(&self, alpha: RationalExponent, n_range: &RangeInclusive<u32>) -> Result<()> {
        self.check_ranges()?;
        let eps = self.epsilon.to_f64().unwrap_or(0.0);
        match n_range.clone().find(|&n| !epsilon_condition(n, alpha, eps, self.gamma)) {
            Some(n) => invalid(format!(
                "epsilon {} is too large for alpha {alpha}, gamma {} at n = {n}",
                self.epsilon, self.gamma
            )),
            None => Ok(()),
        }
    }
}

fn epsilon_condition(n: u32, alpha: RationalExponent, eps: f64, gamma: f64) -> bool {
    if n <= 1 {
        return true;
    }
    let ln_n = (n as f64).ln();
    let power = (2.0 * eps).ln() / (2.0 * alpha.value().ln());
    power * (ln_n.ln() - ln_n) <= -gamma * ln_n + 1e-12
}

/// Largest `eps = 1/2^j` (`j >= 2`) meeting the condition on every `n` in range.
pub fn default_epsilon(alpha: RationalExponent, gamma: f64, n_range: &RangeInclusive<u32>) -> Result<BigRational> {
    if !(gamma > 0.0 && gamma.is_finite()) {
        return invalid(format!("gamma must be positive, got {gamma}"));
    }
    (2..=1024u32)
        .find(|&j| n_range.clone().all(|n| epsilon_condition(n, alpha, 0.5f64.powi(j as i32), gamma)))
        .map(|j| BigRational::new(BigUint::one().into(), (BigUint::one() << j).into()))
        .ok_or_else(|| Error::InvalidArgument(format!("no epsilon 1/2^j fits alpha {alpha}, gamma {gamma}")))
}

pub fn plan_levels(
    n: u32,
    alpha: RationalExponent,
    k: usize,
    epsilon: &BigRational,
    threshold: u64,
) -> Result<LevelPlan> {
    if n < MIN_WINDOW_EXPONENT {
        return invalid(format!("window exponent must be >= {MIN_WINDOW_EXPONENT}, got {n}"));
    }
    let mut lengths = vec![BigUint::one() << n];
    let mut moduli = Vec::new();
    let mut class_sizes = Vec::new();
    let threshold_big = BigUint::from(threshold);
    loop {
        let l = moduli.len() as u32;
        let len = &lengths[l as usize];
        let sub = power_floor(n, alpha, 2 * l + 2)?;
        if sub.is_zero() || sub >= *len {
            break;
        }
        let modulus = power_floor(n, alpha, 2 * l + 1)? / &sub;
        if modulus < BigUint::from(2u32) {
            break;
        }
        let class = (len / &sub) / &modulus;
        if class <= threshold_big {
            break;
        }
        lengths.push(sub);
        moduli.push(modulus);
        class_sizes.push(class);
    }
    if moduli.is_empty() {
        let minimal = (n + 1..n + 512).find(|&m| plan_levels(m, alpha, k, epsilon, threshold).is_ok());
        return Err(Error::Capability(match minimal {
            Some(m) => format!("window 2^{n} too small for one level at alpha {alpha}; minimal n is {m}"),
            None => format!("window 2^{n} too small for one level at alpha {alpha}"),
        }));
    }
    let m_prime = moduli.len() - 1;
    let ln_n_big = n as f64 * std::f64::consts::LN_2;
    let neg_two_ln_alpha = -2.0 * alpha.value().ln();
    let lll = ln_n_big.ln().ln();
    let reduced = (m_prime as f64 - lll / neg_two_ln_alpha).floor();
    let m = (reduced.max(1.0) as usize).min(m_prime);
    let m_prime_estimate =
        (ln_n_big.ln() + (1.0 - alpha.value()).ln() - (threshold as f64).ln().ln()) / neg_two_ln_alpha;

    lengths.truncate(m + 2);
    moduli.truncate(m + 1);
    class_sizes.truncate(m + 1);
    let szemeredi_ready = class_sizes
        .iter()
        .map(|c| {
            let c = c.to_u64().filter(|&c| c <= RK_EXACT_LIMIT)?;
            let need = (epsilon * BigRational::from_integer(c.into())).ceil().to_integer();
            density_forces_ap(c, k, need.to_usize()?).ok()
        })
        .collect();
    Ok(LevelPlan {
        n,
        alpha,
        interval_lengths: lengths,
        moduli,
        class_sizes,
        m_prime,
        m,
        m_prime_estimate,
        threshold,
        szemeredi_ready,
    })
}

/// Occupancy record of one decomposition step.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LevelLedger {
    pub level: usize,
    pub interval_length: BigUint,
    pub sub_length: BigUint,
    pub modulus: BigUint,
    /// Occupied intervals of `interval_length` examined at this level.
    pub intervals: usize,
    /// Occupied sub-intervals found inside them.
    pub occupied: usize,
    /// Sub-intervals per interval (`floor(interval_length / sub_length)`).
    pub sub_per_interval: u64,
    pub classes: usize,
    /// Largest `occupied / size` over the residue classes, as a pair.
    pub densest_class: (u64, u64),
    /// Every class had fewer than `eps * size` occupied labels.
    pub density_condition: bool,
    /// Elements lying in the discarded right-end fragments.
    pub discarded: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Witness {
    pub matched: ApproxMatch,
    pub level: usize,
    /// Step between the chosen class indices; the gap is `step * Delta_level`.
    pub index_step: u64,
    pub level_gap: BigUint,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Outcome {
    Witness(Witness),
    Bound,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecompositionReport {
    pub n: u32,
    pub plan: LevelPlan,
    pub epsilon: BigRational,
    pub outcome: Outcome,
    pub levels: Vec<LevelLedger>,
    /// `2 (2 eps)^(m+1) N`
    pub bound_value: BigRational,
    /// `|A_n|`
    pub actual_count: usize,
    /// Elements still inside the occupied intervals after the last level.
    pub structured_count: usize,
    /// `gap / n` of the witness.
    pub gap_over_n: Option<BigRational>,
}

impl DecompositionReport {
    pub fn witness(&self) -> Option<&Witness> {
        match &self.outcome {
            Outcome::Witness(w) => Some(w),
            Outcome::Bound => None,
        }
    }
}

/// `2 (2 eps)^(m+1) N` in closed form.
pub fn bound_closed_form(epsilon: &BigRational, m: usize, n: u32) -> BigRational {
    let two = BigRational::from_integer(2.into());
    let n_big = BigRational::from_integer((BigUint::one() << n).into());
    &two * num_traits::pow(&two * epsilon, m + 1) * n_big
}

/// The same bound as the level-by-level product
/// `(2 eps)^(m+1) * prod(len_l / len_(l+1)) * 2 len_(m+1)`.
pub fn bound_running_product(plan: &LevelPlan, epsilon: &BigRational) -> BigRational {
    let two_eps = BigRational::from_integer(2.into()) * epsilon;
    let lens = &plan.interval_lengths;
    let mut acc = BigRational::one();
    for l in 0..=plan.m {
        acc = acc * &two_eps * BigRational::new(lens[l].clone().into(), lens[l + 1].clone().into());
    }
    acc * BigRational::from_integer((&lens[plan.m + 1] << 1u32).into())
}

/// An occupied interval: its left end and the window slice it holds.
#[derive(Debug, Clone)]
struct Cell {
    start: BigUint,
    lo: usize,
    hi: usize,
}

struct CellScan {
    children: Vec<Cell>,
    candidate: Option<(BigUint, BigUint, u64)>,
    classes: usize,
    densest: (u64, u64),
    density_ok: bool,
    discarded: usize,
}

fn scan_cell(
    cell: &Cell,
    window: &[BigUint],
    sub: &BigUint,
    modulus: u64,
    per_interval: u64,
    k: usize,
    epsilon: &BigRational,
) -> CellScan {
    let structured_end = &cell.start + sub * per_interval;
    let elems = &window[cell.lo..cell.hi];
    let kept = elems.partition_point(|e| *e < structured_end);

    // consecutive elements share labels; each run becomes a child cell
    let mut children: Vec<Cell> = Vec::new();
    let mut labels: Vec<u64> = Vec::new();
    for (i, e) in elems[..kept].iter().enumerate() {
        let label = ((e - &cell.start) / sub).to_u64().expect("label fits in u64");
        if labels.last() == Some(&label) {
            children.last_mut().unwrap().hi = cell.lo + i + 1;
        } else {
            labels.push(label);
            children.push(Cell { start: &cell.start + sub * label, lo: cell.lo + i, hi: cell.lo + i + 1 });
        }
    }

    let mut classes: BTreeMap<u64, Vec<u64>> = BTreeMap::new();
    for &label in &labels {
        classes.entry(label % modulus).or_default().push(label / modulus);
    }
    let (num, den) = (epsilon.numer().clone(), epsilon.denom().clone());
    let mut candidate: Option<(BigUint, BigUint, u64)> = None;
    let mut densest = (0u64, 1u64);
    let mut density_ok = true;
    for (&residue, indices) in &classes {
        let size = (per_interval - residue).div_ceil(modulus);
        let occ = indices.len() as u64;
        if occ as u128 * densest.1 as u128 > densest.0 as u128 * size as u128 {
            densest = (occ, size);
        }
        // occ < eps * size  <=>  occ * den < num * size
        if num_bigint::BigInt::from(occ) * &den >= &num * num_bigint::BigInt::from(size) {
            density_ok = false;
        }
        if let Some((i0, step)) = find_k_ap(indices, k) {
            let first_label = residue + i0 * modulus;
            let start = &cell.start + sub * first_label + (sub >> 1u32);
            let gap = sub * (step * modulus);
            let better = candidate.as_ref().is_none_or(|(s, g, _)| (&start, &gap) < (s, g));
            if better {
                candidate = Some((start, gap, step));
            }
        }
    }
    CellScan { children, candidate, classes: classes.len(), densest, density_ok, discarded: elems.len() - kept }
}

/// Runs the decomposition on the window `[2^n, 2^(n+1))` of `set`.
pub fn certify(
    set: &IntegerSet,
    n: u32,
    config: &CertificateConfig,
    alpha: RationalExponent,
) -> Result<DecompositionReport> {
    config.check_ranges()?;
    let window = set.dyadic_window(n);
    if window.is_empty() {
        return Err(Error::EmptySet(format!("window [2^{n}, 2^{}) of `{}` is empty", n + 1, set.label())));
    }
    let plan = plan_levels(n, alpha, config.k, &config.epsilon, config.threshold)?;
    let mut cells = vec![Cell { start: plan.window_start(), lo: 0, hi: window.len() }];
    let mut levels = Vec::with_capacity(plan.m + 1);

    for level in 0..=plan.m {
        let len = &plan.interval_lengths[level];
        let sub = &plan.interval_lengths[level + 1];
        let modulus = plan.moduli[level]
            .to_u64()
            .ok_or_else(|| Error::Capability(format!("level {level} modulus exceeds 64 bits")))?;
        let per_interval = (len / sub)
            .to_u64()
            .ok_or_else(|| Error::Capability(format!("level {level} has more than 2^64 sub-intervals")))?;

        let scans: Vec<CellScan> = cells
            .par_iter()
            .map(|c| scan_cell(c, window, sub, modulus, per_interval, config.k, &config.epsilon))
            .collect();

        let candidate = scans.iter().filter_map(|s| s.candidate.clone()).min_by(|a, b| (&a.0, &a.1).cmp(&(&b.0, &b.1)));
        let densest = scans
            .iter()
            .map(|s| s.densest)
            .max_by(|a, b| (a.0 as u128 * b.1 as u128).cmp(&(b.0 as u128 * a.1 as u128)))
            .unwrap_or((0, 1));
        levels.push(LevelLedger {
            level,
            interval_length: len.clone(),
            sub_length: sub.clone(),
            modulus: plan.moduli[level].clone(),
            intervals: cells.len(),
            occupied: scans.iter().map(|s| s.children.len()).sum(),
            sub_per_interval: per_interval,
            classes: scans.iter().map(|s| s.classes).sum(),
            densest_class: densest,
            density_condition: scans.iter().all(|s| s.density_ok),
            discarded: scans.iter().map(|s| s.discarded).sum(),
        });

        if let Some((start, gap, step)) = candidate {
            let progression = ArithProgression::new(start, gap, config.k)?;
            return finish_witness(progression, window, level, step, plan, config, levels);
        }
        cells = scans.into_iter().flat_map(|s| s.children).collect();
    }

    let structured_count = cells.iter().map(|c| c.hi - c.lo).sum();
    let bound_value = bound_closed_form(&config.epsilon, plan.m, n);
    if bound_value != bound_running_product(&plan, &config.epsilon) {
        return Err(Error::Internal("bound product disagrees with closed form".into()));
    }
    let actual_count = window.len();
    if BigRational::from_integer(actual_count.into()) > bound_value {
        return Err(Error::Capability(format!(
            "window 2^{n}: no {}-term progression among occupied labels, yet {actual_count} elements exceed \
             the bound {bound_value}; the residue classes are below the density threshold for eps = {}",
            config.k, config.epsilon
        )));
    }
    Ok(DecompositionReport {
        n,
        plan,
        epsilon: config.epsilon.clone(),
        outcome: Outcome::Bound,
        levels,
        bound_value,
        actual_count,
        structured_count,
        gap_over_n: None,
    })
}

fn finish_witness(
    progression: ArithProgression,
    window: &[BigUint],
    level: usize,
    step: u64,
    plan: LevelPlan,
    config: &CertificateConfig,
    levels: Vec<LevelLedger>,
) -> Result<DecompositionReport> {
    let alpha = plan.alpha;
    let distance = distance_to_slice(&progression, window, None).expect("window is nonempty");
    let gap = progression.gap().clone();
    if !within_scaled(&distance, &gap, alpha, 2) {
        return Err(Error::Internal(format!("witness {progression} at distance {distance} exceeds 2 gap^{alpha}")));
    }
    if !plan.gap_meets_floor(&gap) {
        return Err(Error::Internal(format!("witness gap {gap} is below N^(alpha^(2m+1)) / 2")));
    }
    let within = alpha.power_bounds(&distance, &gap);
    let n = plan.n;
    let gap_over_n = Some(BigRational::new(gap.clone().into(), n.into()));
    Ok(DecompositionReport {
        n,
        epsilon: config.epsilon.clone(),
        outcome: Outcome::Witness(Witness {
            matched: ApproxMatch { progression, distance, alpha, within },
            level,
            index_step: step,
            level_gap: plan.level_gap(level),
        }),
        levels,
        bound_value: bound_closed_form(&config.epsilon, plan.m, n),
        actual_count: window.len(),
        structured_count: 0,
        gap_over_n,
        plan,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub enum WindowOutcome {
    Report(Box<DecompositionReport>),
    Skipped { n: u32, reason: String },
}

impl WindowOutcome {
    pub fn n(&self) -> u32 {
        match self {
            WindowOutcome::Report(r) => r.n,
            WindowOutcome::Skipped { n, .. } => *n,
        }
    }

    pub fn report(&self) -> Option<&DecompositionReport> {
        match self {
            WindowOutcome::Report(r) => Some(r),
            WindowOutcome::Skipped { .. } => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WindowScan {
    pub windows: Vec<WindowOutcome>,
    pub witness_windows: usize,
    /// Smallest `gap / n` among witness windows.
    pub empirical_c: Option<BigRational>,
}

/// Certifies every window in `n_range`, in ascending order of `n`. Empty
/// windows and windows beyond the exact machinery are skipped with a reason;
/// invalid configuration and internal failures abort the scan.
pub fn scan_windows(
    set: &IntegerSet,
    n_range: RangeInclusive<u32>,
    config: &CertificateConfig,
    alpha: RationalExponent,
) -> Result<WindowScan> {
    config.validate(alpha, &n_range)?;
    let windows = n_range
        .into_par_iter()
        .map(|n| match certify(set, n, config, alpha) {
            Ok(report) => Ok(WindowOutcome::Report(Box::new(report))),
            Err(e @ (Error::EmptySet(_) | Error::Capability(_))) => {
                log::info!("window {n} skipped: {e}");
                Ok(WindowOutcome::Skipped { n, reason: e.to_string() })
            }
            Err(Error::InvalidArgument(msg)) if n < MIN_WINDOW_EXPONENT => {
                Ok(WindowOutcome::Skipped { n, reason: msg })
            }
            Err(e) => Err(e),
        })
        .collect::<Result<Vec<_>>>()?;
    let witness_gaps: Vec<&BigRational> = windows.iter().filter_map(|w| w.report()?.gap_over_n.as_ref()).collect();
    Ok(WindowScan {
        witness_windows: witness_gaps.len(),
        empirical_c: witness_gaps.into_iter().min().cloned(),
        windows,
    })
}
