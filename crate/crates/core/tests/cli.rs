use std::process::{Command, Output};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_landscape-lab"));
    c.env_remove("LANDSCAPE_LAB_THREADS");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("valid JSON on stdout")
}

fn payload(out: &Output) -> String {
    let mut v = json(out);
    v.as_object_mut().unwrap().remove("wall_time_s");
    serde_json::to_string(&v).unwrap()
}

#[test]
fn boundary_trap_report() {
    let out = run(&[
        "ce-boundary",
        "--T",
        "1",
        "--Z",
        "4",
        "--kappa",
        "auto",
        "--expect-trap",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["results"]["is_trap"], true);
    assert!(v["results"]["j_at_corner"].as_f64().unwrap().abs() < 1e-10);
    assert!(v["results"]["j_at_corner_hex"].is_string());
    assert_eq!(v["derived"]["K"], 12);
    assert_eq!(v["config"]["tolerances"]["root"], 1e-10);
}

#[test]
fn failed_expectation_exits_one() {
    let out = run(&["ce-boundary", "--kappa", "5", "--samples", "200", "--expect-trap"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out)["results"]["is_trap"], false);
}

#[test]
fn config_errors_exit_two() {
    assert_eq!(run(&["no-such-command"]).status.code(), Some(2));
    assert_eq!(run(&["basis", "--N", "1"]).status.code(), Some(2));
    assert_eq!(run(&["propagate", "--T", "-1"]).status.code(), Some(2));
    assert_eq!(run(&["ce-boundary", "--kappa", "100"]).status.code(), Some(2));
    assert_eq!(run(&["scan", "--coord1", "zero"]).status.code(), Some(2));
    assert_eq!(
        run(&["basis", "--config", "/nonexistent/file.json"]).status.code(),
        Some(2)
    );
}

#[test]
fn slice_csv_layout() {
    let out = run(&["ce-slice", "--steps", "101", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(!text.contains('\r'));
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "c,max_loc,max_val,min_loc,min_val");
    assert_eq!(lines.len(), 102);
    let mid: Vec<f64> = lines[51].split(',').map(|s| s.parse().unwrap()).collect();
    assert_eq!(mid[0], 0.0);
    assert!((mid[2] - 4.0 / (3.0 * 3f64.sqrt() * std::f64::consts::PI)).abs() < 1e-12);
}

#[test]
fn sine_census_csv() {
    let out = run(&["census1d", "--fn", "sin", "--a", "-20", "--b", "20", "--format", "csv"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let rows: Vec<&str> = text.lines().skip(1).collect();
    assert_eq!(rows.len(), 12);
    assert!(rows.iter().all(|r| r.ends_with(",max") || r.ends_with(",min")));
}

#[test]
fn config_file_overrides_flags() {
    let dir = std::env::temp_dir().join(format!("landscape-lab-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let cfg = dir.join("cfg.json");
    std::fs::write(
        &cfg,
        r#"{"seed": 5, "params": {"count": 3}, "tolerances": {"grad": 1e-7}}"#,
    )
    .unwrap();
    let out = run(&["basins", "--count", "50", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["config"]["seed"], 5);
    assert_eq!(v["config"]["params"]["count"], 3);
    assert_eq!(v["config"]["tolerances"]["grad"], 1e-7);
    assert_eq!(v["results"]["records"].as_array().unwrap().len(), 3);
    assert_eq!(v["results"]["records"][0]["seed"], 5);

    let file = dir.join("out.csv");
    let out = run(&["kappa-thr", "--format", "csv", "--output", file.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    assert!(std::fs::read_to_string(&file).unwrap().starts_with("key,value\n"));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn repeated_runs_are_identical() {
    for args in [
        vec!["basins", "--count", "8", "--seed", "3"],
        vec!["propagate", "--N", "3", "--seed", "9"],
        vec!["scan", "--system", "random", "--steps", "5", "--seed", "4"],
        vec!["rank", "--controls", "random", "--seed", "2"],
    ] {
        let a = run(&args);
        let b = bin().args(&args).env("LANDSCAPE_LAB_THREADS", "1").output().unwrap();
        assert_eq!(a.status.code(), Some(0), "{args:?}");
        assert_eq!(payload(&a), payload(&b), "{args:?}");
    }
}

#[test]
fn different_seeds_differ() {
    let a = run(&["propagate", "--seed", "1"]);
    let b = run(&["propagate", "--seed", "2"]);
    assert_ne!(payload(&a), payload(&b));
}
