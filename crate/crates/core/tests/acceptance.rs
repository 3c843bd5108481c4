//! Acceptance suite. Each criterion prints one PASS/FAIL line; the process
//! exits nonzero if any criterion fails.

use std::time::{Duration, Instant};

use aap::ap_core::{approx_distance, within_scaled, ArithProgression, RationalExponent};
use aap::decomposition::{certify, plan_levels, scan_windows, CertificateConfig, DecompositionReport, Outcome};
use aap::integer_sets::{make_primes, IntegerSet};
use aap::near_miss::{cube_identity_search, f_t_b, nearest_power_doubled, scan, CubeSolution, NearMissRecord};
use aap::progression_free::compute_r_k;
use aap::search::{search_window, SearchParams};
use aap::vdw_extract::{color, every_coloring_has_mono_ap, extract_exact};
use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Verdict = Result<String, String>;
type Criterion = (&'static str, fn() -> Verdict);

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn alpha(p: u32, q: u32) -> RationalExponent {
    RationalExponent::new(p, q).unwrap()
}

fn big(v: u64) -> BigUint {
    BigUint::from(v)
}

fn to_u64s(xs: &[BigUint]) -> Vec<u64> {
    xs.iter().map(|x| x.to_u64().unwrap()).collect()
}

/// Max over points of min over all elements, by double loop.
fn naive_distance(points: impl Iterator<Item = u64>, set: &[u64]) -> u64 {
    points.map(|p| set.iter().map(|&a| a.abs_diff(p)).min().unwrap()).max().unwrap()
}

fn near_miss_identity() -> Verdict {
    let start = Instant::now();
    let cubes = cube_identity_search(100).map_err(|e| e.to_string())?;
    let triple = CubeSolution { x: 42, y: 71, z: 60, value: -1 };
    check(cubes.contains(&triple), || format!("(42, 71, 60, -1) missing from {} solutions", cubes.len()))?;
    let (n, d) = nearest_power_doubled(&(big(42).pow(3) + big(71).pow(3)), 3).map_err(|e| e.to_string())?;
    check((n.clone(), d.clone()) == (big(60), big(1)), || format!("nearest_power_doubled gave ({n}, {d})"))?;
    let rec = f_t_b(71, 3).map_err(|e| e.to_string())?;
    let oracle = 0.5f64.ln() / ((71f64.powi(3)) - 42f64.powi(3)).ln();
    check(rec.a_star == 42 && rec.f_value < 0.0, || format!("f_3(71) argmin a = {}, f = {}", rec.a_star, rec.f_value))?;
    check((rec.f_value + 0.0552).abs() <= 1e-3, || format!("f_3(71) = {} not within 1e-3 of -0.0552", rec.f_value))?;
    check((rec.f_value - oracle).abs() <= 1e-12, || {
        format!("f_3(71) = {} vs ln(1/2)/ln(71^3-42^3) = {oracle}", rec.f_value)
    })?;
    let elapsed = start.elapsed();
    check(elapsed < Duration::from_secs(5), || format!("took {elapsed:?}"))?;
    Ok(format!("(42,71,60,-1) found, f_3(71) = {:.6}, {elapsed:.2?}", rec.f_value))
}

/// Every `10 <= a < b` and every `n <= 2b`, in 128-bit integers; f ties go to
/// the smaller `a`. Also reports the gap to the runner-up `f`.
fn naive_near_miss(b: u64, t: u32) -> (u64, u64, u128, f64, f64) {
    let bt = (b as u128).pow(t);
    let mut best: Option<(u64, u64, u128, f64)> = None;
    let mut runner_up = f64::INFINITY;
    for a in 10..b {
        let at = (a as u128).pow(t);
        let sum = at + bt;
        let mut dmin = u128::MAX;
        let mut nmin = 0;
        for n in 0..=2 * b {
            let two_nt = 2 * (n as u128).pow(t);
            let d = sum.abs_diff(two_nt);
            if d < dmin {
                dmin = d;
                nmin = n;
            }
        }
        let f = ((dmin as f64) / 2.0).ln() / ((bt - at) as f64).ln();
        match best {
            Some((_, _, _, fb)) if f >= fb => runner_up = runner_up.min(f),
            _ => {
                if let Some((_, _, _, fb)) = best {
                    runner_up = runner_up.min(fb);
                }
                best = Some((a, nmin, dmin, f));
            }
        }
    }
    let (a, n, d, f) = best.unwrap();
    (a, n, d, f, runner_up - f)
}

fn near_miss_scan() -> Verdict {
    let start = Instant::now();
    let mut records: Vec<NearMissRecord> = Vec::new();
    for t in [3, 4, 5] {
        let s = scan(t, 2000).map_err(|e| e.to_string())?;
        check(s.records.len() == 1990, || format!("t = {t}: {} records", s.records.len()))?;
        records.extend(s.records);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let sample: Vec<&NearMissRecord> = records.choose_multiple(&mut rng, 50).collect();
    let mut near_ties = 0;
    for r in &sample {
        let (a, n, d, f, margin) = naive_near_miss(r.b, r.t);
        if margin < 1e-9 {
            near_ties += 1;
        }
        let got = (r.a_star, r.n_star.to_u64().unwrap(), r.doubled_dev.to_u128().unwrap());
        check(got == (a, n, d), || format!("t={} b={}: got {got:?}, oracle ({a}, {n}, {d})", r.t, r.b))?;
        check((r.f_value - f).abs() <= 1e-9, || format!("t={} b={}: f {} vs oracle {f}", r.t, r.b, r.f_value))?;
    }
    let elapsed = start.elapsed();
    check(elapsed < Duration::from_secs(600), || format!("took {elapsed:?}"))?;
    Ok(format!("5970 records, 50 sampled match the naive oracle ({near_ties} near ties), {elapsed:.2?}"))
}

/// Largest progression-free subset of 1..=n by enumerating all 2^n masks.
fn brute_r3(n: u32) -> u32 {
    (0u32..1 << n)
        .filter(|&m| (1..=n / 2).all(|d| m & (m >> d) & (m >> (2 * d)) == 0))
        .map(u32::count_ones)
        .max()
        .unwrap()
}

fn rk_oracle() -> Verdict {
    let mut r = [0usize; 21];
    for n in 1..=20u32 {
        let got = compute_r_k(n as u64, 3).map_err(|e| e.to_string())?;
        let oracle = brute_r3(n) as usize;
        check(got.r == oracle, || format!("r_3({n}) = {} but enumeration gives {oracle}", got.r))?;
        check(got.witness.len() == got.r && got.witness.iter().all(|&x| (1..=n as u64).contains(&x)), || {
            format!("r_3({n}) witness {:?} malformed", got.witness)
        })?;
        let mask = got.witness.iter().fold(0u32, |m, &x| m | 1 << (x - 1));
        check((1..=n / 2).all(|d| mask & (mask >> d) & (mask >> (2 * d)) == 0), || {
            format!("r_3({n}) witness {:?} has a 3-AP", got.witness)
        })?;
        r[n as usize] = got.r;
    }
    check(r[5] == 4 && r[9] == 5, || format!("r_3(5) = {}, r_3(9) = {}", r[5], r[9]))?;
    for n in 1..20 {
        check(r[n] <= r[n + 1] && r[n + 1] <= r[n] + 1, || format!("monotonicity fails at {n}"))?;
    }
    for a in 1..20 {
        for b in 1..=20 - a {
            check(r[a + b] <= r[a] + r[b], || format!("subadditivity fails at {a} + {b}"))?;
        }
    }
    Ok(format!("r_3(1..=20) = {:?}", &r[1..]))
}

fn distance_core() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut zero_cases = 0;
    for i in 0..1000 {
        let size = rng.gen_range(1..40);
        let mut elems: Vec<u64> = (0..size).map(|_| rng.gen_range(0..2000)).collect();
        // a fifth of the instances contain their progression
        let (start, gap, len) = (rng.gen_range(0..1000u64), rng.gen_range(1..60u64), rng.gen_range(1..12usize));
        if i % 5 == 0 {
            elems.extend((0..len as u64).map(|j| start + j * gap));
        }
        let set = IntegerSet::from_u64s(elems.clone(), "r");
        let sorted = to_u64s(set.elements());
        let p = ArithProgression::from_u64(start, gap, len).unwrap();
        let d = approx_distance(&p, &set).unwrap().to_u64().unwrap();
        let points = || (0..len as u64).map(|j| start + j * gap);
        check(d == naive_distance(points(), &sorted), || format!("instance {i}: distance {d} vs naive"))?;

        let contained = points().all(|x| sorted.contains(&x));
        check((d == 0) == contained, || format!("instance {i}: D = {d}, contained = {contained}"))?;
        zero_cases += contained as usize;

        let s = rng.gen_range(0..5000u64);
        let shifted = IntegerSet::from_u64s(sorted.iter().map(|a| a + s), "s");
        let ps = ArithProgression::from_u64(start + s, gap, len).unwrap();
        check(approx_distance(&ps, &shifted).unwrap() == big(d), || format!("instance {i}: translation by {s}"))?;

        let c = rng.gen_range(1..20u64);
        let scaled = IntegerSet::from_u64s(sorted.iter().map(|a| a * c), "c");
        let pc = ArithProgression::from_u64(start * c, gap * c, len).unwrap();
        check(approx_distance(&pc, &scaled).unwrap() == big(d * c), || format!("instance {i}: scaling by {c}"))?;

        let extra: Vec<u64> = (0..rng.gen_range(0..20)).map(|_| rng.gen_range(0..2000)).collect();
        let superset = IntegerSet::from_u64s(sorted.iter().copied().chain(extra), "sup");
        check(approx_distance(&p, &superset).unwrap() <= big(d), || format!("instance {i}: superset increased D"))?;
    }
    Ok(format!("1000 instances, {zero_cases} contained, zero violations"))
}

/// Independent re-check of one report against the window's elements.
fn verify_report(rep: &DecompositionReport, window: &[u64], a: RationalExponent) -> Result<bool, String> {
    match &rep.outcome {
        Outcome::Witness(w) => {
            let p = &w.matched.progression;
            let (s, g) = (p.start().to_u64().unwrap(), p.gap().to_u64().unwrap());
            let d = naive_distance((0..p.length() as u64).map(|j| s + j * g), window);
            check(big(d) == w.matched.distance, || {
                format!("n={}: distance {} vs naive {d}", rep.n, w.matched.distance)
            })?;
            check(within_scaled(&big(d), p.gap(), a, 2), || format!("n={}: D = {d} exceeds 2 gap^alpha", rep.n))?;
            check(rep.plan.gap_meets_floor(p.gap()), || format!("n={}: gap {g} below the level floor", rep.n))?;
            let lo = 1u64 << rep.n;
            check(s >= lo && s + (p.length() as u64 - 1) * g < 2 * lo, || {
                format!("n={}: witness leaves window", rep.n)
            })?;
            Ok(true)
        }
        Outcome::Bound => {
            let count = BigRational::from_integer(rep.actual_count.into());
            check(count <= rep.bound_value, || {
                format!("n={}: {} > bound {}", rep.n, rep.actual_count, rep.bound_value)
            })?;
            Ok(false)
        }
    }
}

/// A violation is a report whose claim fails the independent re-check. A
/// window may abstain (capability error) only when its plan has `m' = 0`,
/// i.e. no level beyond the first qualifies; such abstentions are counted.
fn certificate_dichotomy() -> Verdict {
    let mut summary = Vec::new();
    for (p, q) in [(1, 2), (3, 4)] {
        let a = alpha(p, q);
        let config = CertificateConfig::with_default_epsilon(3, 2.0, a, &(10..=14)).map_err(|e| e.to_string())?;
        let (mut witnesses, mut bounds, mut abstained) = (0, 0, Vec::new());
        for n in [10u32, 12, 14] {
            let plan = plan_levels(n, a, 3, &config.epsilon, config.threshold).map_err(|e| e.to_string())?;
            let lo = 1u64 << n;
            let density = (lo as f64).ln().powi(-2);
            for seed in 0..100u64 {
                let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (n as u64) << 32);
                let mut elems: Vec<u64> = (lo..2 * lo).filter(|_| rng.gen_bool(density)).collect();
                if elems.is_empty() {
                    elems.push(lo + rng.gen_range(0..lo));
                }
                let set = IntegerSet::from_u64s(elems.clone(), "random");
                match certify(&set, n, &config, a) {
                    Ok(rep) => {
                        if verify_report(&rep, &elems, a)? {
                            witnesses += 1
                        } else {
                            bounds += 1
                        }
                    }
                    Err(aap::Error::Capability(e)) => {
                        check(plan.m_prime == 0, || {
                            format!("alpha={a} n={n} seed={seed}: abstained with m' = {}: {e}", plan.m_prime)
                        })?;
                        abstained.push(n);
                    }
                    Err(e) => return Err(format!("alpha={a} n={n} seed={seed}: {e}")),
                }
            }
        }
        let mut line = format!("alpha={a} eps={}: {witnesses} witness / {bounds} bound", config.epsilon);
        if !abstained.is_empty() {
            abstained.dedup();
            let ns: Vec<String> = abstained.iter().map(u32::to_string).collect();
            line += &format!(" / {} abstained (m'=0 at n={})", 300 - witnesses - bounds, ns.join(","));
        }
        summary.push(line);
    }
    Ok(format!("{}; zero violations", summary.join("; ")))
}

fn prime_windows() -> Verdict {
    let start = Instant::now();
    let primes = make_primes(1 << 21).map_err(|e| e.to_string())?;
    let a = alpha(3, 4);
    let config = CertificateConfig::with_default_epsilon(3, 2.0, a, &(10..=20)).map_err(|e| e.to_string())?;
    let result = scan_windows(&primes, 10..=20, &config, a).map_err(|e| e.to_string())?;
    check(result.witness_windows >= 1, || "no witness window".into())?;
    let mut params = SearchParams::new(3, a);
    params.factor = 2;
    for w in &result.windows {
        let Some(rep) = w.report() else { continue };
        let window = to_u64s(primes.dyadic_window(rep.n));
        if verify_report(rep, &window, a)? {
            let direct = search_window(&primes, rep.n, &params).map_err(|e| e.to_string())?;
            check(direct.is_some(), || format!("n={}: direct search disagrees", rep.n))?;
        }
    }
    let c = result.empirical_c.as_ref().map_or("-".into(), |c| format!("{:.2}", c.to_f64().unwrap()));
    Ok(format!("{}/11 witness windows re-verified, empirical c = {c}, {:.2?}", result.witness_windows, start.elapsed()))
}

fn vdw_extraction() -> Verdict {
    let set = IntegerSet::from_u64s([10, 21, 30, 41, 50], "A");
    let p = ArithProgression::from_u64(10, 10, 5).unwrap();
    let colored = color(&p, &set, 1).map_err(|e| e.to_string())?;
    check(colored.offsets == [0, 1, 0, 1, 0], || format!("offsets {:?}", colored.offsets))?;
    let exact = extract_exact(&colored, 3).map_err(|e| e.to_string())?;
    let expected = ArithProgression::from_u64(10, 20, 3).unwrap();
    check(exact.as_ref() == Some(&expected), || format!("extracted {exact:?}"))?;
    check(expected.points().all(|x| set.contains(&x)), || "extracted progression not in A".into())?;

    // independent enumeration: bit i of the mask colours i + 1
    let mono = |len: u32, m: u32| {
        (0..len).any(|s| {
            (1..len)
                .any(|d| s + 2 * d < len && [s, s + d, s + 2 * d].map(|i| m >> i & 1).windows(2).all(|w| w[0] == w[1]))
        })
    };
    let w = (1..=12).find(|&len| (0u32..1 << len).all(|m| mono(len, m)));
    check(w == Some(9), || format!("enumeration gives W(2,3) = {w:?}"))?;
    check(every_coloring_has_mono_ap(9, 2, 3) && !every_coloring_has_mono_ap(8, 2, 3), || {
        "library disagrees on W(2,3)".into()
    })?;
    Ok("{10,30,50} extracted; W(2,3) = 9 over 2^9 colourings".into())
}

fn run_cli(args: &[&str]) -> Result<Vec<u8>, String> {
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = aap::cli::run_with(std::iter::once("aap").chain(args.iter().copied()), &mut out, &mut err);
    check(code == 0, || format!("{args:?} exited {code}: {}", String::from_utf8_lossy(&err)))?;
    Ok(out)
}

fn determinism() -> Verdict {
    let scans: [&[&str]; 5] = [
        &["nearmiss", "--t", "3,4,5", "--b-max", "600"],
        &["cubes", "--limit", "400"],
        &["certify", "--set", "primes", "--n-range", "8..18", "--alpha", "3/4"],
        &["search", "--set", "random:1", "--seed", "3", "--n-range", "6..14", "--alpha", "1/2"],
        &["density", "--set", "powers:2", "--n", "100000", "--gamma", "1.5"],
    ];
    for args in scans {
        let outputs: Vec<Vec<u8>> =
            ["1", "2", "8"].iter().map(|w| run_cli(&[args, &["--workers", w]].concat())).collect::<Result<_, _>>()?;
        check(outputs.windows(2).all(|w| w[0] == w[1]), || format!("{} differs across worker counts", args[0]))?;
        check(!outputs[0].is_empty(), || format!("{} produced no output", args[0]))?;
    }
    Ok("nearmiss, cubes, certify, search, density identical at 1, 2, 8 workers".into())
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("near-miss identity", near_miss_identity),
        ("near-miss scan reproduction", near_miss_scan),
        ("r_k oracle", rk_oracle),
        ("distance core", distance_core),
        ("certificate dichotomy", certificate_dichotomy),
        ("prime window demonstration", prime_windows),
        ("vdw extraction", vdw_extraction),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (name, f) in criteria {
        match f() {
            Ok(detail) => println!("PASS  {name}: {detail}"),
            Err(why) => {
                failed += 1;
                println!("FAIL  {name}: {why}");
            }
        }
    }
    println!("acceptance: {}/{} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
