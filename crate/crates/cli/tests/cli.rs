use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

const GAMMA_34: &str = "1.3333333333333333";

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ferro-zeros")).args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn write(dir: &TempDir, name: &str, text: &str) -> String {
    let path = dir.path().join(name);
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

fn triangle(dir: &TempDir) -> String {
    write(dir, "tri.txt", "3 3\n0 1\n1 2\n0 2\n")
}

fn csv_rows(text: &str) -> Vec<Vec<f64>> {
    text.lines().skip(1).map(|l| l.split(',').map(|c| c.parse().unwrap()).collect()).collect()
}

#[test]
fn thresholds_golden_row_and_ordering() {
    let out = run(&["thresholds"]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("gamma,lambda_mcmc,d_c,lambda_c,d_star,lambda_star\n"));
    let rows = csv_rows(&text);
    // gamma = 0.5 has beta * gamma = 1 and is skipped
    assert_eq!(rows.len(), 150);
    assert!((rows[0][0] - 0.51).abs() < 1e-12);
    let at_one = rows.iter().find(|r| r[0] == 1.0).unwrap();
    assert_eq!(at_one[1], 2.0);
    assert!((at_one[2] - 3.41421).abs() < 1e-5);
    assert!((at_one[3] - 10.66066).abs() < 1e-4);
    assert_eq!((at_one[4], at_one[5]), (4.0, 4.0));
    let last = rows.last().unwrap();
    assert_eq!((last[0], last[1], last[3], last[5]), (2.0, 1.0, 1.0, 1.0));
    for r in &rows {
        let (gamma, mcmc, lambda_c, star) = (r[0], r[1], r[3], r[5]);
        if gamma < 2.0 {
            assert!(star > mcmc, "gamma {gamma}");
        }
        if gamma <= 1.0 {
            assert!(mcmc <= star && star <= lambda_c, "gamma {gamma}");
        }
    }
}

#[test]
fn outputs_are_byte_identical_across_runs() {
    let dir = TempDir::new().unwrap();
    let tri = triangle(&dir);
    let cases: [Vec<&str>; 4] = [
        vec!["thresholds", "--step", "0.05"],
        vec!["regions", "--beta", "3", "--gamma", GAMMA_34, "--samples", "60"],
        vec!["verify", "--count", "3", "--seed", "11"],
        vec!["approx", "--graph", &tri, "--beta", "4", "--gamma", "0.5", "--lambda", "20"],
    ];
    for args in cases {
        let a = run(&args);
        let b = run(&args);
        assert_eq!(code(&a), 0, "{args:?}: {}", String::from_utf8_lossy(&a.stderr));
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
}

#[test]
fn out_flag_writes_file() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("o.csv");
    let out = run(&["oracle", "--beta", "2", "--gamma", "2", "--d-max", "4", "--out", path.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    assert_eq!(text, "d,closed_form,oracle,relative_gap\n2,1,1,0\n3,1,1,0\n4,1,1,0\n");
}

#[test]
fn regions_intercepts_are_minimised_at_d_star() {
    for (beta, gamma, d_list, d_star, value, tol) in
        [("3", GAMMA_34, "2,3,4", 3, 3.375, 1e-3), ("4", "0.5", "2,3,4,5", 4, 64.0, 0.1)]
    {
        let out = run(&["regions", "--beta", beta, "--gamma", gamma, "--d-list", d_list, "--samples", "120"]);
        assert_eq!(code(&out), 0);
        let doc: Value = serde_json::from_slice(&out.stdout).unwrap();
        let best = doc["clouds"]
            .as_array()
            .unwrap()
            .iter()
            .filter_map(|c| Some((c["d"].as_u64()?, c["intercept"].as_f64()?)))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .unwrap();
        assert_eq!(best.0, d_star);
        assert!((best.1 - value).abs() <= tol, "{best:?}");
    }
}

#[test]
fn unit_circle_cloud_for_ising() {
    let out = run(&["regions", "--beta", "2", "--gamma", "2", "--d-list", "2", "--samples", "36"]);
    assert_eq!(code(&out), 0);
    let doc: Value = serde_json::from_slice(&out.stdout).unwrap();
    for p in doc["clouds"][0]["points"].as_array().unwrap() {
        let (re, im) = (p[0].as_f64().unwrap(), p[1].as_f64().unwrap());
        assert!((re.hypot(im) - 1.0).abs() < 1e-9);
    }
}

#[test]
fn approx_matches_exact_on_triangle() {
    let dir = TempDir::new().unwrap();
    let tri = triangle(&dir);
    let out = run(&["approx", "--graph", &tri, "--beta", "3", "--gamma", GAMMA_34, "--lambda", "1", "--epsilon", "1e-2"]);
    assert_eq!(code(&out), 0);
    let doc: Value = serde_json::from_slice(&out.stdout).unwrap();
    let exact = doc["exact"]["value"].as_f64().unwrap();
    assert!((exact - 42.370370370370374).abs() < 1e-9);
    assert!(doc["exact"]["relative_error"].as_f64().unwrap() <= 1e-2);
    assert!(doc["tail_bound"].as_f64().unwrap() >= doc["tail_measured"].as_f64().unwrap());
    let keys: Vec<&str> = doc.as_object().unwrap().keys().map(String::as_str).collect();
    assert_eq!(&keys[..5], &["value", "value_im", "k", "N", "m"]);
}

#[test]
fn approx_with_fields_file() {
    let dir = TempDir::new().unwrap();
    let tri = triangle(&dir);
    let fields = write(&dir, "f.txt", "0.5\n1.0\n1.5\n");
    let out = run(&["approx", "--graph", &tri, "--fields", &fields, "--beta", "3", "--gamma", GAMMA_34]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let doc: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(doc["exact"]["relative_error"].as_f64().unwrap() <= 1e-2);
}

#[test]
fn approx_large_graph_omits_exact() {
    let dir = TempDir::new().unwrap();
    let n = 20;
    let mut text = format!("{n} {n}\n");
    for v in 0..n {
        text.push_str(&format!("{} {}\n", v, (v + 1) % n));
    }
    let g = write(&dir, "cycle.txt", &text);
    let out = run(&["approx", "--graph", &g, "--beta", "3", "--gamma", GAMMA_34, "--lambda", "1"]);
    assert_eq!(code(&out), 0);
    let doc: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(doc["exact"].is_null());
    assert_eq!(doc["n"], 20);
    assert!(doc["m"].as_u64().unwrap() > 0);
}

#[test]
fn exit_codes() {
    let dir = TempDir::new().unwrap();
    let tri = triangle(&dir);
    // field at the threshold is outside the regime
    let out = run(&["approx", "--graph", &tri, "--beta", "3", "--gamma", GAMMA_34, "--lambda", "3.375"]);
    assert_eq!(code(&out), 2);
    // not ferromagnetic
    assert_eq!(code(&run(&["oracle", "--beta", "1", "--gamma", "0.5"])), 2);
    // missing required value, unknown flag, malformed graph
    assert_eq!(code(&run(&["approx", "--beta", "3", "--gamma", GAMMA_34, "--lambda", "1"])), 2);
    assert_eq!(code(&run(&["thresholds", "--bogus"])), 2);
    let bad = write(&dir, "bad.txt", "3 2\n0 1\n0 1\n");
    assert_eq!(code(&run(&["approx", "--graph", &bad, "--beta", "3", "--gamma", GAMMA_34, "--lambda", "1"])), 2);
    // empty sweep passes trivially
    let out = run(&["verify", "--count", "0"]);
    assert_eq!(code(&out), 0);
    let doc: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!((doc["total"].as_u64(), doc["passed"].as_u64()), (Some(0), Some(0)));
}

#[test]
fn strip_beyond_threshold_reports_failures() {
    let out = run(&["verify", "--count", "4", "--beta", "3", "--gamma", GAMMA_34, "--safety", "1.05"]);
    assert_eq!(code(&out), 1);
    let doc: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(doc["passed"].as_u64().unwrap() < doc["total"].as_u64().unwrap());
}

#[test]
fn default_sweep_subset_passes() {
    let out = run(&["verify", "--count", "5"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn config_file_supplies_defaults_and_flags_win() {
    let dir = TempDir::new().unwrap();
    let cfg = write(&dir, "run.toml", "beta = 2.0\ngamma = 2.0\nd-max = 3\n");
    let out = run(&["--config", &cfg, "oracle"]);
    assert_eq!(code(&out), 0);
    assert_eq!(String::from_utf8(out.stdout).unwrap(), "d,closed_form,oracle,relative_gap\n2,1,1,0\n3,1,1,0\n");
    let out = run(&["oracle", "--config", &cfg, "--d-max", "2"]);
    assert_eq!(String::from_utf8(out.stdout).unwrap().lines().count(), 2);
    let bad = write(&dir, "bad.toml", "betta = 2.0\n");
    assert_eq!(code(&run(&["--config", &bad, "oracle"])), 2);
    assert_eq!(code(&run(&["--config", "/nonexistent/run.toml", "oracle"])), 2);
}
