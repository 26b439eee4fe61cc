use std::path::Path;
use std::process::{Command, Output};

use lyapcert_cli::report::without_timings;
use serde_json::Value;

fn lyapcert(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lyapcert")).args(args).env_remove("LYAPCERT_SEED").output().unwrap()
}

fn stdout(out: &Output) -> String {
    assert!(out.status.success(), "status {:?}: {}", out.status.code(), String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_str(&stdout(out)).unwrap()
}

fn write_system(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

fn csv_rows(text: &str) -> Vec<Vec<f64>> {
    text.lines().skip(1).map(|l| l.split(',').map(|v| v.parse().unwrap()).collect()).collect()
}

#[test]
fn region_of_example_2_1() {
    let r: f64 =
        stdout(&lyapcert(&["region", "builtin:example-2.1", "--rmax", "10", "--tol", "0.01"])).trim().parse().unwrap();
    assert!((r - 2.83).abs() <= 0.02, "{r}");
}

#[test]
fn region_of_example_2_2_reaches_rmax() {
    let r: f64 = stdout(&lyapcert(&["region", "builtin:example-2.2", "--rmax", "50"])).trim().parse().unwrap();
    assert_eq!(r, 50.0);
}

#[test]
fn region_of_degenerate_system_is_zero() {
    let dir = tempfile::tempdir().unwrap();
    let file = write_system(
        dir.path(),
        "zero.json",
        r#"{"kind": "expressions", "n": 1, "components": ["0*x1"], "ball_radius": "unbounded"}"#,
    );
    let report = dir.path().join("region.json");
    let out = lyapcert(&["region", &file, "--rmax", "5", "--out", report.to_str().unwrap()]);
    assert_eq!(stdout(&out).trim(), "0");
    let v: Value = serde_json::from_str(&std::fs::read_to_string(report).unwrap()).unwrap();
    assert_eq!(v["search"]["radius"], 0.0);
    assert!(v["search"]["diagnostic"].is_string());
}

#[test]
fn hopfield_random_trajectories_converge() {
    let v = json(&lyapcert(&["simulate", "builtin:hopfield-2", "--random", "100", "--tend", "20"]));
    assert_eq!(v["summary"]["count"], 100);
    assert_eq!(v["summary"]["converged"], 100);
}

#[test]
fn interior_start_converges() {
    let v = json(&lyapcert(&["simulate", "builtin:example-2.1", "--x0", "1.5,1.5", "--tend", "20"]));
    assert!(v["summary"]["max_terminal_norm"].as_f64().unwrap() <= 1e-6);
    assert_eq!(v["summary"]["v_violations"], 0);
}

#[test]
fn origin_stays_at_origin() {
    let dir = tempfile::tempdir().unwrap();
    let csv_dir = dir.path().join("traj");
    let v = json(&lyapcert(&[
        "simulate",
        "builtin:example-2.1",
        "--x0",
        "0,0",
        "--tend",
        "1",
        "--csv",
        csv_dir.to_str().unwrap(),
    ]));
    let files = v["csv_files"].as_array().unwrap();
    assert_eq!(files.len(), 1);
    let text = std::fs::read_to_string(files[0].as_str().unwrap()).unwrap();
    assert_eq!(text.lines().next(), Some("t,x1,x2,V"));
    let rows = csv_rows(&text);
    assert!(rows.len() > 100);
    assert!(rows.iter().all(|r| r[1..].iter().all(|v| *v == 0.0)));
}

#[test]
fn negative_initial_conditions_parse() {
    let v = json(&lyapcert(&["simulate", "builtin:example-2.1", "--x0", "-2.7,0.5", "--integrator", "rkf45"]));
    assert_eq!(v["integrator"]["integrator"]["kind"], "rkf45");
    assert_eq!(v["summary"]["converged"], 1);
}

fn beta_row(system: &str, point: &str) -> Vec<f64> {
    let text = stdout(&lyapcert(&["beta-field", system, "--point", point]));
    assert_eq!(text.lines().next(), Some("x1,x2,beta1,beta2"));
    csv_rows(&text).remove(0)
}

#[test]
fn beta_rows_match_hand_values() {
    let r = beta_row("builtin:example-2.1", "0,0");
    assert!((r[2] + 2.0).abs() <= 1e-12);
    let r = beta_row("builtin:example-2.2", "0,3.141592653589793");
    assert!((r[3] + 2.5).abs() <= 1e-9);
    let r = beta_row("builtin:hopfield-2", "0,0");
    assert!((r[2] + 15.0).abs() <= 1e-9 && (r[3] + 9.4).abs() <= 1e-9);
}

#[test]
fn beta_grid_contains_origin() {
    let text = stdout(&lyapcert(&["beta-field", "builtin:example-2.1", "--grid", "41", "--extent", "4"]));
    let rows = csv_rows(&text);
    assert_eq!(rows.len(), 41 * 41);
    let origin = rows.iter().find(|r| r[0] == 0.0 && r[1] == 0.0).unwrap();
    assert!((origin[2] + 2.0).abs() <= 1e-12);
    for r in &rows {
        let expected = -2.0 + 0.5 * (r[0].abs() + r[1].abs());
        assert!((r[2] - expected).abs() <= 1e-8, "{r:?}");
    }
}

#[test]
fn beta_grid_rejects_other_dimensions() {
    let dir = tempfile::tempdir().unwrap();
    let file = write_system(
        dir.path(),
        "one.json",
        r#"{"kind": "expressions", "n": 1, "components": ["-x1"], "ball_radius": 1}"#,
    );
    let out = lyapcert(&["beta-field", &file, "--grid", "5"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn unstable_system_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let file = write_system(
        dir.path(),
        "unstable.json",
        r#"{"kind": "expressions", "n": 1, "components": ["x1"], "ball_radius": 1}"#,
    );
    let out = lyapcert(&["analyze", &file]);
    assert_eq!(out.status.code(), Some(3));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["theorem2"]["classification"], "inconclusive");
    assert!(v["simulation"].is_null());
}

#[test]
fn missing_file_exits_2() {
    assert_eq!(lyapcert(&["analyze", "/nonexistent/system.json"]).status.code(), Some(2));
}

#[test]
fn analyze_is_deterministic_and_honours_out() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let first = stdout(&lyapcert(&["analyze", "builtin:example-2.1", "--seed", "3"]));
    stdout(&lyapcert(&["analyze", "builtin:example-2.1", "--seed", "3", "--out", a.to_str().unwrap()]));
    let second = std::fs::read_to_string(a).unwrap();
    assert_eq!(without_timings(&first), without_timings(&second));
    let v: Value = serde_json::from_str(&first).unwrap();
    assert_eq!(v["seed"], 3);
    assert_eq!(v["theorem2"]["classification"], "asymptotically_stable");
    assert_eq!(v["lakshmikantham"]["classification"], "asymptotically_stable");
    assert!((v["certified_radius"].as_f64().unwrap() - 8f64.sqrt()).abs() <= 0.02);
    let last_key = first.lines().rfind(|l| l.starts_with("  \"")).unwrap();
    assert!(last_key.starts_with("  \"timings\""), "{last_key}");
}

#[test]
fn seed_env_is_a_fallback_for_the_flag() {
    let run = |env: Option<&str>, flag: Option<&str>| {
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_lyapcert"));
        cmd.args(["simulate", "builtin:hopfield-2", "--random", "3", "--tend", "0.1"]).env_remove("LYAPCERT_SEED");
        if let Some(s) = env {
            cmd.env("LYAPCERT_SEED", s);
        }
        if let Some(s) = flag {
            cmd.args(["--seed", s]);
        }
        let v: Value = serde_json::from_slice(&cmd.output().unwrap().stdout).unwrap();
        (v["seed"].as_u64().unwrap(), v["summary"]["trajectories"].clone())
    };
    let from_env = run(Some("11"), None);
    assert_eq!(from_env.0, 11);
    assert_eq!(from_env, run(None, Some("11")));
    assert_eq!(run(Some("11"), Some("4")).0, 4);
    assert_ne!(from_env.1, run(None, None).1);
}

#[test]
fn bad_flag_values_exit_2() {
    assert_eq!(lyapcert(&["region", "builtin:example-2.1", "--tol", "-1"]).status.code(), Some(2));
    assert_eq!(lyapcert(&["analyze", "builtin:example-2.1", "--quad-tol", "nan"]).status.code(), Some(2));
    assert_eq!(lyapcert(&["simulate", "builtin:example-2.1", "--x0", "1,2,3"]).status.code(), Some(2));
    assert_eq!(lyapcert(&["simulate", "builtin:example-2.1"]).status.code(), Some(2));
}

#[test]
fn shipped_system_files_load() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../systems");
    let mut count = 0;
    for entry in std::fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().is_some_and(|e| e == "json") {
            let loaded = lyapcert_cli::file::load_path(path.to_str().unwrap()).unwrap();
            assert!(loaded.system.dim() >= 2, "{}", path.display());
            count += 1;
        }
    }
    assert!(count >= 5);
}

#[test]
fn finite_difference_system_is_certified() {
    let file = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../systems/cubic-damping.json");
    let v = json(&lyapcert(&["analyze", file.to_str().unwrap()]));
    assert_eq!(v["theorem2"]["classification"], "asymptotically_stable");
    assert_eq!(v["simulation"]["converged"], v["simulation"]["count"]);
}
