//! Runs the window-by-window certificate on the primes.
//!
//!     cargo run --release --example certificate [N_MAX]

use aap::ap_core::RationalExponent;
use aap::decomposition::{scan_windows, CertificateConfig, Outcome, WindowOutcome};
use aap::integer_sets::make_primes;
use num_traits::ToPrimitive;

fn main() -> aap::Result<()> {
    let n_max: u32 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(20);
    let primes = make_primes(1 << (n_max + 1))?;
    let alpha = RationalExponent::new(3, 4)?;
    let range = 10..=n_max;
    let config = CertificateConfig::with_default_epsilon(3, 2.0, alpha, &range)?;
    println!("alpha = {alpha}, eps = {}, k = {}", config.epsilon, config.k);

    let scan = scan_windows(&primes, range, &config, alpha)?;
    for w in &scan.windows {
        match w {
            WindowOutcome::Skipped { n, reason } => println!("n={n:>2} skipped: {reason}"),
            WindowOutcome::Report(r) => match &r.outcome {
                Outcome::Witness(w) => println!(
                    "n={:>2} m={} witness {} D={} (level {}, gap/n = {:.1})",
                    r.n,
                    r.plan.m,
                    w.matched.progression,
                    w.matched.distance,
                    w.level,
                    r.gap_over_n.as_ref().unwrap().to_f64().unwrap()
                ),
                Outcome::Bound => println!("n={:>2} bound: {} <= {}", r.n, r.actual_count, r.bound_value),
            },
        }
    }
    println!("{} witness windows", scan.witness_windows);
    Ok(())
}
