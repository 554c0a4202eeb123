use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn potlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_potlab"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn run_ok(args: &[&str]) {
    let out = potlab(args);
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
}

/// Every artifact except the wall-clock file.
fn bundle(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap())
        .filter(|e| e.file_name() != "timing.json")
        .map(|e| (e.file_name().into_string().unwrap(), fs::read(e.path()).unwrap()))
        .collect()
}

fn code(args: &[&str]) -> (i32, String) {
    let out = potlab(args);
    (out.status.code().unwrap(), String::from_utf8_lossy(&out.stderr).into_owned())
}

#[test]
fn grid_interval_is_gamblers_ruin() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("g");
    run_ok(&["grid", "--domain", "interval:10", "--out", out.to_str().unwrap()]);
    let mut reader = csv::Reader::from_path(out.join("exit.csv")).unwrap();
    let mut rows = 0;
    for rec in reader.records() {
        let rec = rec.unwrap();
        let x: f64 = rec[0].parse().unwrap();
        let b: f64 = rec[1].parse().unwrap();
        let mass: f64 = rec[2].parse().unwrap();
        let want = if b == 10.0 { x / 10.0 } else { 1.0 - x / 10.0 };
        assert!((mass - want).abs() < 1e-12);
        rows += 1;
    }
    assert_eq!(rows, 18);
    let checks = fs::read_to_string(out.join("checks.csv")).unwrap();
    assert!(!checks.contains("fail"), "{checks}");
    assert!(out.join("timing.json").exists());
}

#[test]
fn usage_errors_exit_2() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("x");
    let out = out.to_str().unwrap();
    let empty = tmp.path().join("empty.toml");
    fs::write(&empty, "").unwrap();
    let (c, msg) = code(&["--config", empty.to_str().unwrap(), "--out", out]);
    assert_eq!(c, 2);
    assert!(msg.contains("scenario"), "{msg}");

    let bad = tmp.path().join("bad.toml");
    fs::write(&bad, "scenario = \"growth\"\n[model]\nspec = \"free:2\"\ncolour = 1\n").unwrap();
    let (c, msg) = code(&["--config", bad.to_str().unwrap(), "--out", out]);
    assert_eq!(c, 2);
    assert!(msg.contains("colour"), "{msg}");

    assert_eq!(code(&["growth", "--model", "hyperbolic:3", "--out", out]).0, 2);
    assert_eq!(code(&["green", "--model", "abelian:2", "--out", out]).0, 2);
    assert_eq!(code(&["grid", "--domain", "interval:1", "--out", out]).0, 2);
    assert_eq!(code(&["grid", "--domain", "interval:10", "--from", "0", "--out", out]).0, 2);
    assert_eq!(code(&["growth", "--out", out]).0, 2);
}

#[test]
fn resource_and_numeric_errors() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("x");
    let out = out.to_str().unwrap();
    let (c, msg) = code(&["green", "--model", "free:2", "--margin", "9", "--budget", "1000", "--out", out]);
    assert_eq!(c, 3, "{msg}");
    // Elements beyond the Green domain cannot be bracketed.
    let (c, msg) = code(&["green", "--model", "free:2", "--margin", "2", "--trunc", "20", "--n", "3", "--out", out]);
    assert_eq!(c, 4, "{msg}");
}

#[test]
fn curves_are_emitted() {
    let tmp = tempfile::tempdir().unwrap();
    let g = tmp.path().join("growth");
    run_ok(&["growth", "--model", "free:2", "--n", "5", "--out", g.to_str().unwrap()]);
    let curve = fs::read_to_string(g.join("growth_curve.csv")).unwrap();
    assert_eq!(curve.lines().count(), 6);
    assert!(curve.starts_with("n,ln_ball_over_n\n1,"));

    let d = tmp.path().join("dev");
    run_ok(&[
        "deviation", "--model", "free:2", "--margin", "9", "--trunc", "100", "--n-from", "1",
        "--n-to", "3", "--window-offset", "2", "--out", d.to_str().unwrap(),
    ]);
    let curve = fs::read_to_string(d.join("deviation_curve.csv")).unwrap();
    assert_eq!(curve.lines().count(), 4);
    let table = fs::read_to_string(d.join("deviation.csv")).unwrap();
    assert_eq!(table.lines().count(), 7);
}

#[test]
fn bundles_are_byte_identical() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = |name: &str| tmp.path().join(name);
    let grid = ["grid", "--domain", "rectangle:6,6", "--paths", "20000", "--seed", "11"];
    let mut a = grid.to_vec();
    let (pa, pb) = (dir("a"), dir("b"));
    a.extend(["--threads", "1", "--out", pa.to_str().unwrap()]);
    let mut b = grid.to_vec();
    b.extend(["--threads", "4", "--out", pb.to_str().unwrap()]);
    run_ok(&a);
    run_ok(&b);
    assert_eq!(bundle(&pa), bundle(&pb));

    let other_seed = dir("c");
    run_ok(&["grid", "--domain", "rectangle:6,6", "--paths", "20000", "--seed", "12", "--out", other_seed.to_str().unwrap()]);
    assert_ne!(bundle(&pa)["mc.csv"], bundle(&other_seed)["mc.csv"]);

    // The echoed config reproduces the bundle.
    let echo = pa.join("config.toml");
    let rerun = dir("d");
    run_ok(&["--config", echo.to_str().unwrap(), "--out", rerun.to_str().unwrap()]);
    assert_eq!(bundle(&pa), bundle(&rerun));
}

#[test]
fn obstruct_from_config_file() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("obstruct.toml");
    fs::write(
        &cfg,
        "scenario = \"obstruct\"\n\n[model]\nspec = \"free:2\"\nmeasure = \"srw\"\n\n[green]\nmargin = 10\n\n[params]\nn0 = 3\nwindow = 7\n",
    )
    .unwrap();
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    run_ok(&["--config", cfg.to_str().unwrap(), "--out", a.to_str().unwrap()]);
    run_ok(&["--config", cfg.to_str().unwrap(), "--out", b.to_str().unwrap()]);
    assert_eq!(bundle(&a), bundle(&b));
    let report: serde_json::Value =
        serde_json::from_slice(&fs::read(a.join("report.json")).unwrap()).unwrap();
    assert_eq!(report["schema_version"], 1);
    assert_eq!(report["results"]["verdict"], "obstruction-witnessed");
    assert_eq!(report["results"]["bound_rate"], "inf");
    assert_eq!(report["provenance"]["trunc"], 200);
}
