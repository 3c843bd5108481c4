//! Approximate arithmetic progressions in sparse integer sets.
//!
//! The crate measures how closely a progression `{a, a+gap, ..}` can be
//! shadowed by a set `A` (`max_p min_a |p - a|`), certifies the existence of
//! such progressions window by window through a multi-level residue
//! decomposition, upgrades bounded-uncertainty progressions to exact ones by
//! colouring, computes `r_k(N)` exactly at small `N`, and evaluates the
//! Diophantine near-miss statistic `f_t(b)` for `a^t + b^t` against `2 n^t`.
//!
//! All verdicts are integer-exact; floating point only appears in reported
//! statistics and diagnostics.

pub mod ap_core;
pub mod cli;
pub mod constellations;
pub mod decomposition;
pub mod error;
pub mod integer_sets;
pub mod near_miss;
pub mod progression_free;
pub mod roots;
pub mod search;
pub mod vdw_extract;

pub use error::{Error, Result};
