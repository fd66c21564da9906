mod common;

use std::path::Path;
use std::process::{Command, Output};

fn topoband(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_topoband")).args(args).output().unwrap()
}

fn json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn chern_to_json_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out.json");
    let o = topoband(&["invariant", "chern", "--model", "qahe2d", "--m", "1", "--grid", "24", "--json", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v = json(&out);
    assert_eq!(v["value"], 1);
    assert_eq!(v["grid"], 24);
    assert_eq!(v["model"], "qahe2d");
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
}

#[test]
fn table_matches_reference() {
    let o = topoband(&["classify", "table"]);
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    let rows: Vec<Vec<&str>> = text.lines().skip(1).map(|l| l.split_whitespace().collect()).collect();
    assert_eq!(rows.len(), 10);
    for (row, (label, cells)) in rows.iter().zip(common::PERIODIC_TABLE) {
        assert_eq!(row[0], label);
        assert_eq!(&row[1..], &cells[..], "{label}");
    }
}

#[test]
fn gap_closing_is_a_precondition_failure() {
    let o = topoband(&["invariant", "chern", "--model", "qahe2d", "--m", "0", "--grid", "24"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("GapClosed"));
}

#[test]
fn usage_errors() {
    assert_eq!(topoband(&["invariant", "frobnicate"]).status.code(), Some(2));
    assert_eq!(topoband(&["invariant", "chern", "--model", "nonesuch", "--m", "1"]).status.code(), Some(2));
    let o = topoband(&["invariant", "chern", "--model", "qahe2d", "--m", "1", "--bogus", "3"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("UsageError"));
}

#[test]
fn identical_runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str, threads: &str| {
        let p = dir.path().join(name);
        let o = topoband(&[
            "invariant", "n3", "--model", "qahe2d", "--m", "-1", "--kgrid", "12", "--wquad", "60", "--threads", threads,
            "--json", p.to_str().unwrap(),
        ]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        std::fs::read(p).unwrap()
    };
    let a = run("a.json", "1");
    let b = run("b.json", "1");
    let c = run("c.json", "4");
    assert_eq!(a, b);
    assert_eq!(a, c);
}

#[test]
fn spectrum_csv_columns() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("ribbon.csv");
    let o = topoband(&[
        "edge", "spectrum", "--model", "qahe2d", "--m", "1", "--width", "30", "--kgrid", "11", "--csv", p.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(p).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 12);
    assert!(lines.iter().all(|l| l.split(',').count() == 61));
}

#[test]
fn config_file_with_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "# qahe run\nmodel=qahe2d\nm=-1\ngrid=16\n").unwrap();
    let p = dir.path().join("out.json");
    let o = topoband(&["invariant", "chern", "--config", cfg.to_str().unwrap(), "--json", p.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(json(&p)["value"], -1);
    let o = topoband(&["invariant", "chern", "--config", cfg.to_str().unwrap(), "--m", "1", "--json", p.to_str().unwrap()]);
    assert!(o.status.success());
    let v = json(&p);
    assert_eq!(v["value"], 1);
    assert_eq!(v["grid"], 16);
}

#[test]
fn other_subcommands_run() {
    for args in [
        &["classify", "entry", "--label", "AII", "--dim", "3"][..],
        &["classify", "torus", "--label", "AII", "--dim", "3"],
        &["symmetry", "check", "--model", "doubled_qahe_trs", "--m", "1", "--eps", "0.1", "--tr", "kramers"],
        &["invariant", "z2", "--model", "doubled_qahe_trs", "--m", "1", "--eps", "0.1"],
        &["invariant", "z2-3d", "--model", "ti3d", "--m", "-2", "--grid", "8"],
        &["invariant", "winding", "--model", "ssh1d", "--t1", "0.5", "--t2", "1"],
        &["invariant", "gauss", "--model", "qahe2d", "--m", "1"],
        &["invariant", "heff", "--model", "qahe2d", "--m", "1", "--kgrid", "12"],
        &["edge", "count", "--model", "qahe2d", "--m", "1", "--width", "20", "--kgrid", "101"],
        &["phase-diagram", "--model", "qahe2d", "--samples", "-3,-1,1,3"],
        &["critical-points", "--model", "qahe2d", "--m-range", "-3,3"],
    ] {
        let o = topoband(args);
        assert!(o.status.success(), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
        assert!(!o.stdout.is_empty(), "{args:?}");
    }
}
