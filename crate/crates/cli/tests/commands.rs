use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

const FORK: &str = "n 5\n1 2\n2 3\n3 4\n2 5\n5 4\nD: 1\nT: 4\n";

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_decouple"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn file(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    fs::write(&p, text).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn solve_prints_minimal_placements() {
    let dir = TempDir::new().unwrap();
    let g = file(&dir, "fork.txt", FORK);
    let out = run(&["solve", "sf", s(&g)]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("B = {v2} (|B| = 1)"));

    let out = run(&["solve", "of", s(&g)]);
    let text = stdout(&out);
    assert!(text.contains("B = {v2} (|B| = 1)") && text.contains("C = {v1} (|C| = 1)"));
    assert!(text.contains("W = {v1}"));

    let out = run(&["solve", "df", s(&g)]);
    assert!(stdout(&out).contains("|B| + |C| = 2"));
}

#[test]
fn solve_writes_roles_back_in_either_format() {
    let dir = TempDir::new().unwrap();
    let g = file(&dir, "fork.txt", FORK);
    let txt = dir.path().join("placed.txt");
    assert!(run(&["solve", "df", s(&g), "--out", s(&txt)]).status.success());
    let written = fs::read_to_string(&txt).unwrap();
    assert!(written.contains("B: 4\n") && written.contains("C: 1\n"));

    let json = dir.path().join("placed.json");
    assert!(run(&["solve", "sf", s(&g), "--out", s(&json)]).status.success());
    let doc: serde_json::Value = serde_json::from_str(&fs::read_to_string(&json).unwrap()).unwrap();
    assert_eq!(doc["inputs"], serde_json::json!([2]));
    // the written file is a valid input again
    assert!(run(&["analyze", s(&json)]).status.success());
}

#[test]
fn synthesize_then_verify_round_trip() {
    let dir = TempDir::new().unwrap();
    let g = file(&dir, "fork.txt", FORK);
    for kind in ["sf", "of", "df"] {
        let report = dir.path().join(format!("{kind}.json"));
        let out = run(&["synthesize", kind, s(&g), "--seed", "5", "--out", s(&report)]);
        assert!(out.status.success(), "{kind}: {}", stderr(&out));
        let doc: serde_json::Value = serde_json::from_str(&fs::read_to_string(&report).unwrap()).unwrap();
        assert_eq!(doc["kind"], kind);
        assert_eq!(doc["verification"]["pass"], true);

        let out = run(&["verify", s(&report), "--seed", "1"]);
        assert!(out.status.success(), "{kind}: {}", stderr(&out));
        // static laws cancel exactly; the observer loop only to rounding
        let expected = if kind == "df" { " PASS" } else { "residual 0.0e0 PASS" };
        assert!(stdout(&out).contains(expected), "{kind}: {}", stdout(&out));
    }
}

#[test]
fn synthesis_is_deterministic_per_seed() {
    let dir = TempDir::new().unwrap();
    let g = file(&dir, "fork.txt", FORK);
    let a = stdout(&run(&["synthesize", "df", s(&g), "--seed", "9"]));
    let b = stdout(&run(&["synthesize", "df", s(&g), "--seed", "9"]));
    let c = stdout(&run(&["synthesize", "df", s(&g), "--seed", "10"]));
    assert_eq!(a, b);
    assert_ne!(a, c);
    assert!(a.contains("compensator order"));
}

#[test]
fn verify_accepts_a_weighted_instance() {
    let dir = TempDir::new().unwrap();
    let g = file(
        &dir,
        "w.txt",
        "n 5\n1 2 0.7\n2 3 -1.2\n3 4 0.4\n2 5 1.5\n5 4 0.3\nD: 1\nT: 4\nB: 2\n",
    );
    let out = run(&["verify", s(&g), "--feedback", "sf"]);
    assert!(out.status.success(), "{}", stderr(&out));
    assert!(stdout(&out).contains("residual 0.0e0 PASS"));
    let out = run(&["verify", s(&g)]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn disjointness_violation_exits_with_2() {
    let dir = TempDir::new().unwrap();
    let g = file(&dir, "bad.txt", "n 3\n1 2\n2 3\nD: 1 3\nT: 3\n");
    let out = run(&["solve", "sf", s(&g)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("D∩T≠∅ ({v3})"));

    let g = file(&dir, "garbled.txt", "n 3\n1 two\n");
    assert_eq!(run(&["analyze", s(&g)]).status.code(), Some(2));
}

#[test]
fn infeasible_placement_exits_with_3_and_a_witness() {
    let dir = TempDir::new().unwrap();
    let g = file(&dir, "fork.txt", &format!("{FORK}B: 3\n"));
    let out = run(&["synthesize", "sf", s(&g)]);
    assert_eq!(out.status.code(), Some(3));
    assert!(stderr(&out).contains("path v1 -> v2 -> v5 -> v4"));
}

#[test]
fn size_caps_exit_with_4() {
    let dir = TempDir::new().unwrap();
    let mut chain = String::from("n 30\n");
    for i in 1..30 {
        chain.push_str(&format!("{i} {}\n", i + 1));
    }
    chain.push_str("D: 1\nT: 30\n");
    let g = file(&dir, "chain.txt", &chain);
    assert_eq!(run(&["solve", "of", s(&g)]).status.code(), Some(4));
    let out = run(&["solve", "of", s(&g), "--mode", "heuristic"]);
    assert!(out.status.success());
    assert_eq!(run(&["oracle", s(&g)]).status.code(), Some(4));
}

#[test]
fn path_cap_is_respected() {
    let dir = TempDir::new().unwrap();
    let g = file(&dir, "fork.txt", FORK);
    assert_eq!(run(&["oracle", s(&g), "--cap", "1"]).status.code(), Some(4));
    let out = run(&["analyze", s(&g), "--cap", "1"]);
    assert!(stdout(&out).contains("paths: more than 1"));
}

#[test]
fn oracle_agrees_on_the_fork() {
    let dir = TempDir::new().unwrap();
    let g = file(&dir, "fork.txt", FORK);
    let out = run(&["oracle", s(&g)]);
    assert!(out.status.success(), "{}", stdout(&out));
    assert!(stdout(&out).contains("all solvers match exhaustive search"));
}

#[test]
fn analyze_reports_verdicts() {
    let dir = TempDir::new().unwrap();
    let g = file(&dir, "fork.txt", &format!("{FORK}B: 4\nC: 1\n"));
    let report = dir.path().join("analysis.json");
    let out = run(&["analyze", s(&g), "--out", s(&report)]);
    let text = stdout(&out);
    assert!(text.contains("sf: solvable"));
    assert!(text.contains("of: not solvable"));
    assert!(text.contains("df: solvable"));
    let doc: serde_json::Value = serde_json::from_str(&fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(doc["path_count"], 2);
    assert_eq!(doc["verdicts"]["df"]["solvable"], true);
}

#[test]
fn export_dot_colours_roles() {
    let dir = TempDir::new().unwrap();
    let g = file(&dir, "fork.txt", FORK);
    let out = run(&["export-dot", s(&g), "--feedback", "of"]);
    let dot = stdout(&out);
    assert!(dot.starts_with("digraph network {"));
    assert!(dot.contains("v1 [style=wedged, fillcolor=\"red:purple\"];"));
    assert!(dot.contains("v2 [fillcolor=blue];"));
    assert!(dot.contains("v4 [fillcolor=yellow];"));

    let path = dir.path().join("g.dot");
    assert!(run(&["export-dot", s(&g), "--feedback", "df", "--out", s(&path)])
        .status
        .success());
    assert!(fs::read_to_string(&path).unwrap().contains("fuchsia"));
}

#[test]
fn missing_file_is_an_io_error() {
    assert_eq!(run(&["analyze", "/nonexistent/instance.txt"]).status.code(), Some(1));
}
