//! Builds the standard sets and tests them against `n / (ln n)^gamma`.
//!
//!     cargo run --release --example sets_and_density

use aap::integer_sets::{density_profile, make_powers, make_primes, reciprocal_sum_partial};
use aap::roots::rational_to_f64;
use num_bigint::BigUint;

fn main() -> aap::Result<()> {
    let limit = 1u64 << 20;
    let primes = make_primes(limit)?;
    let squares = make_powers(2, &BigUint::from(limit))?;
    println!("{} primes and {} squares up to 2^20", primes.len(), squares.len());

    for set in [&primes, &squares] {
        for gamma in [1.0, 2.0] {
            let p = density_profile(set, &BigUint::from(limit), gamma)?;
            println!(
                "{:>9} gamma={gamma}: count {:>6} vs threshold {:>10.1} -> {}",
                set.label(),
                p.count,
                p.threshold,
                if p.satisfied { "dense" } else { "sparse" }
            );
        }
    }

    for upto in [100u64, 10_000] {
        let s = reciprocal_sum_partial(&primes, &BigUint::from(upto))?;
        let approx = rational_to_f64(&s);
        println!("sum of 1/p for p <= {upto}: {approx:.6} (exact denominator has {} bits)", s.denom().bits());
    }
    Ok(())
}
