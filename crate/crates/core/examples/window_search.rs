//! Direct search for the widest approximate progression in each window.
//!
//!     cargo run --release --example window_search

use aap::ap_core::RationalExponent;
use aap::integer_sets::{make_powers, make_primes};
use aap::search::{search_window, SearchParams};
use num_bigint::BigUint;

fn main() -> aap::Result<()> {
    let primes = make_primes(1 << 17)?;
    let squares = make_powers(2, &BigUint::from(1u64 << 17))?;
    let params = SearchParams::new(4, RationalExponent::new(1, 2)?);
    for set in [&primes, &squares] {
        for n in [8, 12, 16] {
            match search_window(set, n, &params)? {
                Some(hit) => {
                    println!("{:>9} n={n:>2}: {} D={}", set.label(), hit.matched.progression, hit.matched.distance)
                }
                None => println!("{:>9} n={n:>2}: none", set.label()),
            }
        }
    }
    Ok(())
}
