//! Solutions of `x^3 + y^3 - 2 z^3 = ±1, ±2`.
//!
//!     cargo run --release --example cube_identity [LIMIT]

use aap::near_miss::cube_identity_search;

fn main() -> aap::Result<()> {
    let limit: u64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(1000);
    for s in cube_identity_search(limit)? {
        println!("{:>5}^3 + {:>5}^3 - 2*{:>5}^3 = {:>2}", s.x, s.y, s.z, s.value);
    }
    Ok(())
}
