//! Colours an approximate progression by offset and extracts an exact one.
//!
//!     cargo run --release --example vdw_upgrade

use aap::ap_core::ArithProgression;
use aap::integer_sets::IntegerSet;
use aap::vdw_extract::{color, extract_exact, van_der_waerden_number};

fn main() -> aap::Result<()> {
    let set = IntegerSet::from_u64s([10, 21, 30, 41, 50], "A");
    let p = ArithProgression::from_u64(10, 10, 5)?;
    let colored = color(&p, &set, 1)?;
    println!("{p} offsets {:?} ({} colours)", colored.offsets, colored.colors_used);
    match extract_exact(&colored, 3)? {
        Some(e) => println!("exact progression in A: {e}"),
        None => println!("no monochromatic progression"),
    }
    println!("W(2,3) = {:?}", van_der_waerden_number(2, 3, 12));
    Ok(())
}
