//! Tabulates `f_t(b)` for t = 3, 4, 5 and writes the CSV read by the
//! plotting script.
//!
//!     cargo run --release --example near_miss [B_MAX] [OUT]

use aap::near_miss::{scan, write_csv};

fn main() -> aap::Result<()> {
    let mut args = std::env::args().skip(1);
    let b_max: u64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(2000);
    let out = args.next().unwrap_or_else(|| "near_miss.csv".into());

    let mut records = Vec::new();
    for t in [3, 4, 5] {
        let s = scan(t, b_max)?;
        let negative = s.records.iter().filter(|r| r.f_value < 0.0).count();
        println!("t={t}: inf f = {:.4} at b = {}, {negative} negative values", s.infimum.1, s.infimum.0);
        records.extend(s.records);
    }
    std::fs::write(&out, write_csv(&records)).map_err(|source| aap::Error::Io { path: out.clone().into(), source })?;
    println!("wrote {} rows to {out}", records.len());
    Ok(())
}
