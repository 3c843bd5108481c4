//! Exact `r_3(N)` with lexicographically smallest witnesses.
//!
//!     cargo run --release --example progression_free

use aap::progression_free::{compute_r_k, density_forces_ap, has_k_ap};

fn main() -> aap::Result<()> {
    for n in [5, 9, 14, 20, 30, 40] {
        let r = compute_r_k(n, 3)?;
        println!("r_3({n:>2}) = {:>2}  {:?}", r.r, r.witness);
        assert!(has_k_ap(&r.witness_set(), 3)?.is_none());
    }
    let r = compute_r_k(12, 4)?;
    println!("r_4(12) = {}  {:?}", r.r, r.witness);
    println!("any 11 of 1..=24 contain a 3-AP: {}", density_forces_ap(24, 3, 11)?);
    Ok(())
}
