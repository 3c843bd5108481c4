//! Approximation distance of a progression to a set and the exact
//! `D <= gap^alpha` verdict.
//!
//!     cargo run --release --example distance

use aap::ap_core::{approx_distance, is_within, ArithProgression, RationalExponent};
use aap::integer_sets::{make_powers, make_primes};
use num_bigint::BigUint;

fn main() -> aap::Result<()> {
    let squares = make_powers(2, &BigUint::from(25u32))?;
    let p = ArithProgression::from_u64(4, 5, 3)?;
    let half: RationalExponent = "1/2".parse()?;
    let m = is_within(&p, &squares, half)?;
    println!("{p} vs squares <= 25: D = {}, within gap^{half}: {}", m.distance, m.within);

    let primes = make_primes(1 << 16)?;
    let alpha: RationalExponent = "0.75".parse()?;
    for (start, gap) in [(1000u64, 1000u64), (30_000, 7_000), (2, 3)] {
        let p = ArithProgression::from_u64(start, gap, 5)?;
        let m = is_within(&p, &primes, alpha)?;
        println!("{p}: D = {:>3}, within gap^{alpha}: {}", approx_distance(&p, &primes)?, m.within);
    }

    match "0.7071067811".parse::<RationalExponent>() {
        Ok(a) => println!("accepted {a}"),
        Err(e) => println!("{e}"),
    }
    Ok(())
}
