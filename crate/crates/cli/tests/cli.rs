use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn reebli(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_reebli")).args(args).output().unwrap()
}

fn write(dir: &Path, name: &str, body: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

const SEG4: &str = r#"{"version":1,"nodes":[{"id":"a","f":[0,1],"labels":[1]},{"id":"b","f":[4,1],"labels":[2]}],
"edges":[["a","b"]]}"#;
const SEG6: &str = r#"{"version":1,"nodes":[{"id":"a","f":[0,1],"labels":[1]},{"id":"b","f":[6,1],"labels":[2]}],
"edges":[["a","b"]]}"#;
const SEG6_FLIPPED: &str = r#"{"version":1,"nodes":[{"id":"a","f":[0,1],"labels":[2]},{"id":"b","f":[6,1],"labels":[1]}],
"edges":[["a","b"]]}"#;

#[test]
fn validate_reports_and_exits() {
    let dir = TempDir::new().unwrap();
    let good = write(dir.path(), "good.json", SEG4);
    let out = reebli(&["validate", s(&good)]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).starts_with("valid"));

    let tied = write(
        dir.path(),
        "tied.json",
        r#"{"version":1,"nodes":[{"id":"a","f":[0,1]},{"id":"b","f":[0,1]},{"id":"c","f":[1,1]}],
        "edges":[["a","c"],["b","c"]]}"#,
    );
    assert_eq!(reebli(&["validate", s(&tied)]).status.code(), Some(2));
    assert_eq!(reebli(&["validate", "--perturb", s(&tied)]).status.code(), Some(0));
    assert_eq!(reebli(&["classify", s(&tied)]).status.code(), Some(2));
}

#[test]
fn contour_distance_and_infinity() {
    let dir = TempDir::new().unwrap();
    let a = write(dir.path(), "a.json", SEG4);
    let b = write(dir.path(), "b.json", SEG6);
    let out = reebli(&["dist", "contour", s(&a), s(&b)]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out).lines().next(), Some("2"));
    let out = reebli(&["dist", "contour", "--bisect", "8", "--sequential", s(&a), s(&b)]);
    assert_eq!(stdout(&out).lines().next(), Some("2"));
    // as merge trees both maxima are roots, which sit at a shared sentinel
    let out = reebli(&["dist", "merge", s(&a), s(&b)]);
    assert_eq!(stdout(&out).trim(), "0");

    let flipped = write(dir.path(), "f.json", SEG6_FLIPPED);
    let out = reebli(&["dist", "contour", s(&a), s(&flipped)]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(stdout(&out).lines().next(), Some("inf"));
}

#[test]
fn cycle_bound_gives_size_limit_exit() {
    let dir = TempDir::new().unwrap();
    let body = r#"{"version":1,"nodes":[{"id":"s","f":[0,1]},{"id":"j","f":[3,1]}],"edges":[["s","j"],["s","j"],["s","j"]]}"#;
    let g = write(dir.path(), "g.json", body);
    let out = reebli(&["loop-height", s(&g)]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("max loop height 3"));
    let out = Command::new(env!("CARGO_BIN_EXE_reebli"))
        .env("REEBLI_CYCLE_BOUND", "1")
        .args(["loop-height", s(&g)])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn ingest_smooth_and_export() {
    let dir = TempDir::new().unwrap();
    let grid = write(dir.path(), "grid.csv", "0,4,1,5\n");
    let tree = dir.path().join("tree.json");
    assert_eq!(reebli(&["ingest", "contour", s(&grid), "-o", s(&tree)]).status.code(), Some(0));
    assert_eq!(reebli(&["validate", s(&tree)]).status.code(), Some(0));
    let out = reebli(&["export-dot", s(&tree)]);
    assert!(stdout(&out).starts_with("digraph"));
    assert!(stdout(&out).contains("labels=1"));

    let merge = dir.path().join("merge.json");
    let grid = write(dir.path(), "m.csv", "1,0,2,-1,3\n");
    assert_eq!(reebli(&["ingest", "merge", s(&grid), "-o", s(&merge)]).status.code(), Some(0));
    let out = reebli(&["dist", "merge", s(&merge), s(&merge)]);
    assert_eq!(stdout(&out).trim(), "0");

    let decimal = write(dir.path(), "d.csv", "0.5,1.5\n");
    assert_eq!(reebli(&["ingest", "merge", s(&decimal)]).status.code(), Some(2));
    assert_eq!(reebli(&["ingest", "merge", "--allow-decimal", s(&decimal)]).status.code(), Some(0));

    let lp = write(
        dir.path(),
        "loop.json",
        r#"{"version":1,"nodes":[{"id":"s","f":[0,1]},{"id":"j","f":[6,1]}],"edges":[["s","j"],["s","j"]]}"#,
    );
    let smoothed = dir.path().join("sm.json");
    assert_eq!(reebli(&["smooth", "--epsilon", "1", s(&lp), "-o", s(&smoothed)]).status.code(), Some(0));
    assert!(stdout(&reebli(&["loop-height", s(&smoothed)])).contains("max loop height 4"));
}

#[test]
fn obstruct_and_demo() {
    let dir = TempDir::new().unwrap();
    let lp = write(
        dir.path(),
        "loop.json",
        r#"{"version":1,"nodes":[{"id":"s","f":[0,1]},{"id":"j","f":[6,1]}],"edges":[["s","j"],["s","j"]]}"#,
    );
    let out = reebli(&["obstruct", "reeb", "--alpha", "8", s(&lp)]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("verdict: contradiction"));
    let out = reebli(&["--json", "demo", "contour-counterexample", "--alpha", "8"]);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["candidates"], v["contradictions"]);
    assert_eq!(reebli(&["obstruct", "reeb", "--alpha", "0", s(&lp)]).status.code(), Some(2));
}
