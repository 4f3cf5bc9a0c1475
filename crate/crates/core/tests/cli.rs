//! End-to-end runs of the `nasearch` binary.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use nasearch_core::analytic::{alg_ii_limit_prob, alg_ii_limit_prob_inf};

fn nasearch(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nasearch"))
        .args(args)
        .env_remove("NASEARCH_WORKERS")
        .output()
        .expect("spawn nasearch")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn simulate_algorithm_1_reaches_peak() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("a1.csv");
    let o = nasearch(&[
        "simulate", "--algorithm", "1", "--n", "5000", "--epsilon", "1", "--alpha", "1",
        "--t-max-in-tau", "3", "--samples", "301", "--out", p(&out),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let text = fs::read_to_string(&out).unwrap();
    let rows: Vec<Vec<f64>> = text
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(|x| x.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 301);
    // t = τ is sample 100 of 300 intervals over 3τ
    assert!(rows[100][1] >= 0.99, "P_s(tau) = {}", rows[100][1]);
    let meta: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("a1.csv.meta.json")).unwrap()).unwrap();
    assert_eq!(meta["config"]["command"], "simulate");
    assert_eq!(meta["config"]["t_max_in_tau"], 3.0);
    assert!(meta["summary"]["max_norm_drift"].as_f64().unwrap() < 1e-8);
    assert!(stdout(&o).contains("tau = 111.08"));
}

#[test]
fn simulate_algorithm_2_reports_crossing() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("a2.csv");
    let o = nasearch(&[
        "simulate", "--algorithm", "2", "--n", "1000000", "--a", "1", "--b", "4.5", "--t-max", "20",
        "--samples", "200", "--out", p(&out),
    ]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("t_c = 4.5000000000"));
    let last = fs::read_to_string(&out).unwrap().lines().last().unwrap().to_string();
    let ps: f64 = last.split(',').nth(1).unwrap().parse().unwrap();
    let limit = alg_ii_limit_prob(1_000_000, 1.0, 4.5).unwrap().value;
    assert!((ps - limit).abs() < 0.05);
}

#[test]
fn argument_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("x.csv");
    let o = p(&out);
    for args in [
        vec!["simulate", "--algorithm", "1", "--n", "1", "--epsilon", "1", "--alpha", "1", "--t-max", "3", "--out", o],
        vec!["simulate", "--algorithm", "3", "--n", "10", "--t-max", "3", "--out", o],
        vec!["simulate", "--algorithm", "1", "--n", "10", "--epsilon", "1", "--t-max", "3", "--out", o],
        vec!["simulate", "--algorithm", "2", "--n", "10", "--a", "1", "--b", "0", "--t-max-in-tau", "1", "--out", o],
        vec!["simulate", "--algorithm", "2", "--n", "10", "--a", "1", "--b", "0", "--alpha", "1", "--t-max", "1", "--out", o],
        vec!["simulate", "--algorithm", "2", "--n", "10", "--a", "1", "--b", "0", "--t-max", "1", "--tol", "1e-3", "--out", o],
        vec!["limit", "--a", "-1", "--b", "0"],
        vec!["limit", "--a", "0", "--b", "0"],
        vec!["sweep", "--cells", "2by2", "--n", "100", "--out", o],
        vec!["sweep", "--a-range", "-1:2", "--n", "100", "--out", o],
        vec!["figure", "--id", "fig3", "--out-dir", o],
        vec!["frobnicate"],
    ] {
        let r = nasearch(&args);
        assert_eq!(code(&r), 2, "{args:?}: {}", String::from_utf8_lossy(&r.stderr));
    }
    assert!(!out.exists());
}

#[test]
fn help_and_version_exit_0() {
    assert_eq!(code(&nasearch(&["--help"])), 0);
    assert_eq!(code(&nasearch(&["simulate", "--help"])), 0);
    let v = nasearch(&["--version"]);
    assert_eq!(code(&v), 0);
    assert!(stdout(&v).contains(env!("CARGO_PKG_VERSION")));
}

#[test]
fn limit_matches_library() {
    let o = nasearch(&["limit", "--n", "inf", "--a", "1", "--b", "4.5", "--json"]);
    assert_eq!(code(&o), 0);
    let v: serde_json::Value = serde_json::from_str(stdout(&o).trim()).unwrap();
    assert_eq!(v["p"].as_f64().unwrap(), alg_ii_limit_prob_inf(1.0, 4.5).unwrap().value);
    assert_eq!(v["N"], "inf");

    let o = nasearch(&["limit", "--n", "100", "--a", "1", "--b", "0"]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    let pv: f64 = text.split_whitespace().nth(2).unwrap().parse().unwrap();
    assert!((0.0..=1.0).contains(&pv));
}

#[test]
fn sweep_cells_reproducible_by_limit() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("g.json");
    let o = nasearch(&["sweep", "--cells", "2x2", "--n", "100", "--out", p(&out), "--workers", "2"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let text = fs::read_to_string(&out).unwrap();
    let pos: Vec<usize> = ["\"a_values\"", "\"b_values\"", "\"p\"", "\"N\"", "\"meta\""]
        .iter()
        .map(|k| text.find(k).unwrap())
        .collect();
    assert!(pos.windows(2).all(|w| w[0] < w[1]), "top-level key order {pos:?}");
    let g: serde_json::Value = serde_json::from_str(&text).unwrap();
    for (i, b) in g["b_values"].as_array().unwrap().iter().enumerate() {
        for (j, a) in g["a_values"].as_array().unwrap().iter().enumerate() {
            let (a, b) = (a.to_string(), b.to_string());
            let r = nasearch(&["limit", "--n", "100", "--a", &a, "--b", &b, "--json"]);
            let v: serde_json::Value = serde_json::from_str(stdout(&r).trim()).unwrap();
            assert_eq!(v["p"], g["p"][i][j]);
        }
    }
}

#[test]
fn replay_is_bit_exact() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run.csv");
    let o = nasearch(&[
        "simulate", "--algorithm", "1", "--n", "500", "--epsilon", "1", "--alpha", "-0.02",
        "--t-max", "60", "--samples", "500", "--out", p(&out),
    ]);
    assert_eq!(code(&o), 0);
    let again = dir.path().join("again.csv");
    let meta = dir.path().join("run.csv.meta.json");
    assert_eq!(code(&nasearch(&["replay", p(&meta), "--out", p(&again)])), 0);
    assert_eq!(fs::read(&out).unwrap(), fs::read(&again).unwrap());

    let grid = dir.path().join("grid.json");
    let o = nasearch(&["sweep", "--cells", "5x4", "--n", "inf", "--out", p(&grid), "--workers", "3"]);
    assert_eq!(code(&o), 0);
    let grid2 = dir.path().join("grid2.json");
    assert_eq!(code(&nasearch(&["replay", p(&grid), "--out", p(&grid2), "--workers", "1"])), 0);
    assert_eq!(fs::read(&grid).unwrap(), fs::read(&grid2).unwrap());

    let figs = dir.path().join("figs");
    let o = nasearch(&["figure", "--id", "fig5", "--out-dir", p(&figs), "--samples", "100"]);
    assert_eq!(code(&o), 0);
    let figs2 = dir.path().join("figs2");
    assert_eq!(code(&nasearch(&["replay", p(&figs.join("fig5.meta.json")), "--out", p(&figs2)])), 0);
    for label in ["a1", "a5", "a20"] {
        let f = format!("fig5_{label}.csv");
        assert_eq!(fs::read(figs.join(&f)).unwrap(), fs::read(figs2.join(&f)).unwrap(), "{f}");
    }
    assert_eq!(fs::read(figs.join("fig5.meta.json")).unwrap(), fs::read(figs2.join("fig5.meta.json")).unwrap());
}

#[test]
fn replay_rejects_files_without_config() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("junk.json");
    fs::write(&f, "{\"x\": 1}").unwrap();
    assert_eq!(code(&nasearch(&["replay", p(&f)])), 2);
}

#[test]
fn verify_suites() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("r.json");
    let o = nasearch(&["verify", "--suite", "specfun", "--fast", "--report", p(&report)]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(v["passed"], true);
    let checks = v["checks"].as_array().unwrap();
    assert!(!checks.is_empty());
    assert!(checks.iter().all(|c| c["suite"] == "specfun"));

    let o = nasearch(&["verify", "--suite", "figures", "--fast"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(v["checks"].as_array().unwrap().iter().all(|c| c["suite"] == "figures"));
}
