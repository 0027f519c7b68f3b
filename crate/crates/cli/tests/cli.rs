use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn lamsec(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lamsec")).args(args).output().expect("spawn lamsec")
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("json summary")
}

fn generate_uniform(dir: &Path, n: usize, rank: u32) -> String {
    let path = dir.join(format!("uniform-{n}-{rank}.laminst.json"));
    let p = path.to_str().unwrap();
    let out = lamsec(&[
        "generate", "--kind", "uniform", "--n", &n.to_string(), "--capacities", &rank.to_string(), "--seed", "5",
        "--out", p,
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    p.to_string()
}

/// Success probability of the threshold rule on `n` candidates, summed over
/// the binomial count of arrivals before `t0`.
fn threshold_rule_success(n: usize, t0: f64) -> f64 {
    let mut ln_choose = 0.0f64;
    let mut total = 0.0;
    for k in 0..=n {
        if k > 0 {
            ln_choose += ((n - k + 1) as f64).ln() - (k as f64).ln();
        }
        let p_k = (ln_choose + k as f64 * t0.ln() + (n - k) as f64 * (1.0 - t0).ln()).exp();
        let win = match k {
            0 => 1.0 / n as f64,
            k if k == n => 0.0,
            k => k as f64 / n as f64 * (k..n).map(|j| 1.0 / j as f64).sum::<f64>(),
        };
        total += p_k * win;
    }
    total
}

#[test]
fn simulate_is_deterministic_and_worker_invariant() {
    let dir = tempfile::tempdir().unwrap();
    let inst = dir.path().join("r.laminst.json");
    let p = inst.to_str().unwrap();
    assert!(lamsec(&["generate", "--n", "30", "--depth", "3", "--seed", "9", "--out", p]).status.success());
    let a = lamsec(&["simulate", "--instance", p, "--trials", "1", "--seed", "0"]);
    let b = lamsec(&["simulate", "--instance", p, "--trials", "1", "--seed", "0"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let one = lamsec(&["simulate", "--instance", p, "--trials", "3000", "--seed", "4", "--workers", "1"]);
    let many = lamsec(&["simulate", "--instance", p, "--trials", "3000", "--seed", "4", "--workers", "7"]);
    assert_eq!(one.stdout, many.stdout);
    json(&one);
}

#[test]
fn rank_one_simulation_matches_exact_probability() {
    let dir = tempfile::tempdir().unwrap();
    let p = generate_uniform(dir.path(), 50, 1);
    let v = json(&lamsec(&["simulate", "--instance", &p, "--t0", "0.36788", "--trials", "100000", "--seed", "11"]));
    let freq = v["min_frequency"].as_f64().unwrap();
    let exact = threshold_rule_success(50, 0.36788);
    let sigma = (exact * (1.0 - exact) / 1e5).sqrt();
    assert!((freq - exact).abs() < 3.0 * sigma, "{freq} vs {exact}");
}

#[test]
fn trace_has_one_record_per_arrival() {
    let dir = tempfile::tempdir().unwrap();
    let p = generate_uniform(dir.path(), 20, 3);
    let trace = dir.path().join("trace.jsonl");
    let out = lamsec(&["simulate", "--instance", &p, "--trials", "5", "--trace", trace.to_str().unwrap()]);
    assert!(out.status.success());
    let text = std::fs::read_to_string(trace).unwrap();
    let records: Vec<Value> = text.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(records.len(), 20);
    let times: Vec<f64> = records.iter().map(|r| r["time"].as_f64().unwrap()).collect();
    assert!(times.windows(2).all(|w| w[0] < w[1]));
    assert!(records.iter().filter(|r| r["selected"] == true).count() <= 3);
}

#[test]
fn out_of_range_t0_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let p = generate_uniform(dir.path(), 5, 1);
    let out = lamsec(&["simulate", "--instance", &p, "--t0", "1.5"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("--t0"));
    assert_eq!(lamsec(&["bound", "--t0", "0"]).status.code(), Some(1));
    assert_eq!(lamsec(&["simulate", "--bogus"]).status.code(), Some(1));
    assert_eq!(lamsec(&["--help"]).status.code(), Some(0));
}

#[test]
fn bad_instance_files_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("nope.laminst.json");
    let out = lamsec(&["simulate", "--instance", missing.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let broken = dir.path().join("broken.laminst.json");
    std::fs::write(&broken, "{\"elements\": [").unwrap();
    assert_eq!(lamsec(&["simulate", "--instance", broken.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn bound_command() {
    let v = json(&lamsec(&["bound", "--t0", "0.7", "--max-rank", "inf"]));
    assert!(v["lower_bound"].as_f64().unwrap() > 0.210526);
    assert!(v["ratio"].as_f64().unwrap() < 4.75);
    assert_eq!(v["max_rank"], "inf");

    let out = lamsec(&["bound", "--t0", "0.65", "--max-rank", "inf"]);
    assert_eq!(out.status.code(), Some(3));

    let v = json(&lamsec(&["bound", "--t0", "0.36788", "--max-rank", "1"]));
    let lb = v["lower_bound"].as_f64().unwrap();
    let closed = 0.36788 * (1.0f64 / 0.36788).ln();
    assert!((lb - closed).abs() / closed < 1e-4);
    assert!(((lb - 0.36788) / 0.36788).abs() < 1e-4);
}

#[test]
fn figure_and_optimize_csv() {
    let out = lamsec(&["figure", "--ranks", "1"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let row: Vec<&str> = text.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(row[0], "1");
    assert!((row[1].parse::<f64>().unwrap() - 0.3679).abs() < 1e-4);
    assert!((row[2].parse::<f64>().unwrap() - 2.71828).abs() < 1e-5);

    let a = lamsec(&["figure", "--ranks", "1..10", "--include-inf"]);
    let b = lamsec(&["figure", "--ranks", "1..10", "--include-inf"]);
    assert_eq!(a.stdout, b.stdout);
    let text = String::from_utf8(a.stdout).unwrap();
    let ratios: Vec<f64> = text.lines().skip(1).map(|l| l.split(',').nth(2).unwrap().parse().unwrap()).collect();
    assert_eq!(ratios.len(), 11);
    assert!(ratios.windows(2).all(|w| w[0] <= w[1]));

    let out = lamsec(&["optimize", "--max-rank", "2"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().next(), Some("rank,t0_star,ratio"));
    assert!(text.lines().nth(1).unwrap().starts_with("2,0.5701"));

    assert_eq!(lamsec(&["figure", "--ranks", "0..3"]).status.code(), Some(1));
    assert_eq!(lamsec(&["optimize", "--max-rank", "zero"]).status.code(), Some(1));
}

#[test]
fn generate_to_stdout_round_trips_through_file() {
    let dir = tempfile::tempdir().unwrap();
    let stdout = lamsec(&["generate", "--kind", "partition", "--n", "12", "--capacities", "1,2,1", "--seed", "3"]);
    assert!(stdout.status.success());
    let file = dir.path().join("p.laminst.json");
    let summary = json(&lamsec(&[
        "generate", "--kind", "partition", "--n", "12", "--capacities", "1,2,1", "--seed", "3", "--out",
        file.to_str().unwrap(),
    ]));
    assert_eq!(summary["rank"], 4);
    assert_eq!(std::fs::read(&file).unwrap(), stdout.stdout);
    let out = lamsec(&["generate", "--kind", "chain", "--n", "4", "--capacities", "1,2,3,4,5"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn verify_lemma_summary() {
    let v = json(&lamsec(&["verify-lemma", "--capacity", "2", "--n", "100", "--trials", "20000", "--seed", "3"]));
    assert_eq!(v["effective_trials"].as_u64().unwrap() + v["discarded"].as_u64().unwrap(), 20000);
    assert!(v["critical_value_95"].as_f64().unwrap() > 0.0);
    assert!(v["ks_exp"].as_f64().unwrap() < 0.05);
    assert_eq!(lamsec(&["verify-lemma", "--capacity", "0", "--n", "10"]).status.code(), Some(1));
}
