use std::fs;
use std::process::{Command, Output};

use aap::near_miss::{read_csv, write_csv};
use serde_json::Value;

fn aap(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_aap")).args(args).env_remove("AAP_WORKERS").output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn records(o: &Output) -> Vec<Value> {
    stdout(o).lines().map(|l| serde_json::from_str(l).unwrap()).collect()
}

#[test]
fn nearmiss_writes_plot_csv() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("f3.csv");
    let o = aap(&["nearmiss", "--t", "3", "--b-max", "71", "--out", path.to_str().unwrap()]);
    assert!(o.status.success(), "{o:?}");
    let text = fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("t,b,a,n,doubled_dev,f\n"));
    assert!(text.lines().last().unwrap().starts_with("3,71,42,60,1,-0.0552"), "{text}");
    assert_eq!(text.lines().count(), 1 + 61);

    let parsed = read_csv(&text).unwrap();
    assert_eq!(write_csv(&parsed), text);
}

#[test]
fn nearmiss_multiple_exponents_share_one_header() {
    let o = aap(&["nearmiss", "--t", "3,4,5", "--b-max", "40"]);
    let text = stdout(&o);
    assert_eq!(text.matches("t,b,a").count(), 1);
    assert_eq!(read_csv(&text).unwrap().len(), 3 * 30);
}

#[test]
fn rk_prints_size_and_witness() {
    let o = aap(&["rk", "--N", "5", "--k", "3"]);
    assert_eq!(stdout(&o), "r=4 witness=1,2,4,5\n");
    assert!(stdout(&aap(&["rk", "--N", "9", "--k", "3"])).starts_with("r=5 "));
}

#[test]
fn density_of_primes() {
    let o = aap(&["density", "--set", "primes", "--n", "100", "--gamma", "1"]);
    let r = &records(&o)[0];
    assert_eq!(r["count"], 25);
    assert_eq!(r["n"], "100");
    assert!((r["threshold"].as_f64().unwrap() - 100.0 / 100f64.ln()).abs() < 1e-9);
    assert_eq!(r["satisfied"], true);
}

#[test]
fn density_of_a_csv_column() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("set.csv");
    fs::write(&path, "id,value\na,4\nb,9\nc,1\nd,16\n").unwrap();
    let p = path.to_str().unwrap();
    let r = &records(&aap(&["density", "--set", p, "--column", "value", "--n", "10"]))[0];
    assert_eq!(r["count"], 3);
    let o = aap(&["density", "--set", p, "--n", "10"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn certify_emits_one_record_per_window_and_a_summary() {
    let o = aap(&["certify", "--set", "primes", "--n-range", "3..12", "--k", "3", "--alpha", "3/4"]);
    assert!(o.status.success(), "{o:?}");
    let recs = records(&o);
    assert_eq!(recs.len(), 11);
    for (i, r) in recs[..10].iter().enumerate() {
        assert_eq!(r["record"], "window");
        assert_eq!(r["n"], 3 + i as u64);
    }
    // windows below the decomposition's minimum are skipped, not fatal
    assert_eq!(recs[0]["outcome"], "skipped");
    let summary = &recs[10];
    assert_eq!(summary["record"], "summary");
    let witnesses = recs[..10].iter().filter(|r| r["outcome"] == "witness").count();
    assert_eq!(summary["witness_windows"], witnesses as u64);
    assert!(witnesses >= 1);
}

#[test]
fn certify_rejects_bad_epsilon() {
    let o = aap(&["certify", "--set", "primes", "--n-range", "10..12", "--alpha", "1/2", "--epsilon", "3/4"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn search_reports_matches() {
    let o = aap(&["search", "--set", "powers:2", "--n-range", "8..9", "--alpha", "1/2", "--factor", "2"]);
    let recs = records(&o);
    assert_eq!(recs.len(), 2);
    for r in recs {
        assert_eq!(r["outcome"], "match");
        let (d, g): (u64, u64) =
            (r["distance"].as_str().unwrap().parse().unwrap(), r["gap"].as_str().unwrap().parse().unwrap());
        assert!(d * d <= 4 * g);
    }
}

#[test]
fn upgrade_extracts_exact_progression() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("a.txt");
    fs::write(&path, "10\n21\n30\n41\n50\n").unwrap();
    let args = [
        "upgrade",
        "--set",
        path.to_str().unwrap(),
        "--start",
        "10",
        "--gap",
        "10",
        "--length",
        "5",
        "--k",
        "3",
        "--C",
        "1",
    ];
    let r = &records(&aap(&args))[0];
    assert_eq!(r["offsets"], serde_json::json!([0, 1, 0, 1, 0]));
    assert_eq!(r["exact"]["start"], "10");
    assert_eq!(r["exact"]["gap"], "20");
    let mut tight = args;
    tight[12] = "0";
    assert_eq!(aap(&tight).status.code(), Some(1));
}

#[test]
fn cubes_lists_the_near_miss() {
    let text = stdout(&aap(&["cubes", "--limit", "100"]));
    assert!(text.starts_with("x,y,z,value\n"));
    assert!(text.lines().any(|l| l == "42,71,60,-1"));
}

#[test]
fn constellation_finds_a_dilated_corner() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("grid.txt");
    let pts: String = (0..=10).flat_map(|i| (0..=10).map(move |j| format!("{},{}\n", 3 * i, 3 * j))).collect();
    fs::write(&path, pts).unwrap();
    let o = aap(&[
        "constellation",
        "--set",
        path.to_str().unwrap(),
        "--pattern",
        "0,0;1,0;0,1",
        "--alpha",
        "1/2",
        "--delta0",
        "4",
        "--window",
        "0,0,30,30",
    ]);
    let r = &records(&o)[0];
    assert_eq!(r["outcome"], "match");
    let (delta, d) = (r["delta"].as_i64().unwrap(), r["distance"].as_i64().unwrap());
    assert!(delta >= 4 && d * d <= delta);
}

#[test]
fn exit_codes() {
    let o = aap(&["rk", "--N", "5", "--bogus"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("Usage"));
    assert_eq!(aap(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(aap(&["rk", "--N", "41"]).status.code(), Some(2));
    assert_eq!(
        aap(&["certify", "--set", "primes:99999999999", "--n-range", "10..11", "--alpha", "1/2"]).status.code(),
        Some(2)
    );
    assert_eq!(aap(&["density", "--set", "/nonexistent/file", "--n", "10"]).status.code(), Some(1));
    assert_eq!(aap(&["search", "--set", "primes", "--n-range", "10", "--alpha", "0.70710678"]).status.code(), Some(1));
    assert_eq!(aap(&["--help"]).status.code(), Some(0));
}

#[test]
fn workers_flag_and_environment() {
    let args = ["nearmiss", "--t", "4", "--b-max", "200"];
    let base = stdout(&aap(&args));
    for w in ["1", "3"] {
        let o = Command::new(env!("CARGO_BIN_EXE_aap")).args(args).env("AAP_WORKERS", w).output().unwrap();
        assert_eq!(stdout(&o), base);
    }
    let o = Command::new(env!("CARGO_BIN_EXE_aap")).args(args).env("AAP_WORKERS", "many").output().unwrap();
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn random_sets_depend_only_on_the_seed() {
    let run = |seed: &str, w: &str| {
        stdout(&aap(&["density", "--set", "random:1:20000", "--seed", seed, "--n", "20000", "--workers", w]))
    };
    assert_eq!(run("4", "1"), run("4", "8"));
    assert_ne!(run("4", "1"), run("5", "1"));
}
