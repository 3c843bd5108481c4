//! Dilated copies of a planar pattern near the Gaussian-prime-like set of
//! points `(x, y)` with `x^2 + y^2` prime.
//!
//!     cargo run --release --example constellation

use aap::ap_core::RationalExponent;
use aap::constellations::{planar_density, search_constellation, Pattern2D, PlanarSet, Window};
use aap::integer_sets::make_primes;
use num_bigint::BigUint;

fn main() -> aap::Result<()> {
    let side = 300i64;
    let primes = make_primes((2 * side * side) as u64)?;
    let points: Vec<(i64, i64)> = (0..=side)
        .flat_map(|x| (0..=side).map(move |y| (x, y)))
        .filter(|&(x, y)| primes.contains(&BigUint::from((x * x + y * y) as u64)))
        .collect();
    let set = PlanarSet::new(points);
    let (count, threshold) = planar_density(&set, side as u64, 1.0)?;
    println!("{} points; {count} within radius {side} (n^2/ln n = {threshold:.0})", set.points().len());

    let window = Window::new(0, 0, side, side)?;
    for pattern in ["0,0;1,0;0,1", "0,0;1,0;0,1;1,1", "0,0;1,0;2,0;0,1;0,2"] {
        let c: Pattern2D = pattern.parse()?;
        match search_constellation(&set, &c, RationalExponent::new(1, 2)?, 20, window)? {
            Some(m) => println!("{pattern:<20} delta={} shift={:?} D={}", m.delta, m.shift, m.distance),
            None => println!("{pattern:<20} none"),
        }
    }
    Ok(())
}
