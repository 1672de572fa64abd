use std::path::Path;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_flimits"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let out = run(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap().trim_end().to_string()
}

fn json(args: &[&str]) -> serde_json::Value {
    let mut full = vec!["--json"];
    full.extend_from_slice(args);
    serde_json::from_str(&stdout(&full)).expect("valid json")
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn documented_examples() {
    assert_eq!(stdout(&["f", "eval", "--elem", "x0", "--point", "1/2"]), "1/4");
    assert_eq!(stdout(&["grig", "wp", "--word", "(ad)^4"]), "identity");
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("A.json");
    stdout(&["limits", "h1-seq", "--n", "1", "--out", path(&a)]);
    assert_eq!(
        stdout(&["limits", "distance", "--rmax", "6", path(&a), path(&a)]),
        "<= e^-6"
    );
}

#[test]
fn exit_codes() {
    let bad = run(&["f", "eval", "--elem", "bogus", "--point", "1/2"]);
    assert_eq!(bad.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&bad.stderr).contains("`bogus`"));
    let bad_point = run(&["f", "eval", "--elem", "x0", "--point", "3/x"]);
    assert_eq!(bad_point.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&bad_point.stderr).contains("`3/x`"));
    assert_eq!(run(&["f", "nope"]).status.code(), Some(2));
    // identity input is a domain error
    let id = run(&["solve", "free-pair", "--elem", "x0 * x0^-1", "--length", "2", "--budget", "5", "--seed", "1"]);
    assert_eq!(id.status.code(), Some(1));
    assert_eq!(run(&["grig", "rist", "--vertex", ""]).status.code(), Some(1));
    assert_eq!(run(&["grig", "wp", "--word", "abx"]).status.code(), Some(2));
}

#[test]
fn stochastic_solvers_require_seed_and_budget() {
    let no_seed = run(&["solve", "free-pair", "--elem", "x0", "--length", "2", "--budget", "5"]);
    assert_eq!(no_seed.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&no_seed.stderr).contains("--seed"));
    let no_budget = run(&["solve", "oscillating", "--word", "y1 * x0", "--region", "(0,1)", "--seed", "1"]);
    assert_eq!(no_budget.status.code(), Some(2));
    assert_eq!(run(&["word", "law-check", "--word", "y1", "--samples", "3"]).status.code(), Some(2));
    assert_eq!(
        run(&["grig", "mixed-check", "--vertex", "00", "--vertex", "01", "--vertex", "10", "--samples", "5"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn seeded_runs_are_byte_identical() {
    let cases: [&[&str]; 4] = [
        &["word", "law-check", "--word", "[y1, y2]", "--samples", "50", "--seed", "7"],
        &["solve", "free-pair", "--elem", "x0", "--length", "4", "--budget", "50", "--seed", "9"],
        &["solve", "oscillating", "--word", "y1 * x0 * y1^-1 * x1", "--region", "(1/2,1)", "--budget", "50", "--seed", "2"],
        &["grig", "mixed-check", "--vertex", "00", "--vertex", "01", "--vertex", "11", "--samples", "100", "--seed", "5"],
    ];
    for args in cases {
        let a = run(args);
        let b = run(args);
        assert!(a.status.success(), "{args:?}");
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
}

#[test]
fn law_check_finds_commutator_counterexample() {
    let v = json(&["word", "law-check", "--word", "[y1, y2]", "--samples", "50", "--seed", "7"]);
    assert_eq!(v["holds"], false);
    let v = json(&[
        "word", "law-check", "--i1", "0,1/4", "--i2", "1/2,3/4", "--h1",
        "{[(0,0), (1/8,1/16), (3/16,1/8), (1/4,1/4), (1,1)]}", "--h2",
        "{[(0,0), (1/2,1/2), (5/8,9/16), (11/16,5/8), (3/4,3/4), (1,1)]}", "--samples", "40", "--seed", "1",
    ]);
    assert_eq!(v["holds"], true);
}

#[test]
fn elements_round_trip_through_text_and_json() {
    let dir = tempfile::tempdir().unwrap();
    let text = stdout(&["f", "compose", "--f", "x0^-1 * x2", "--g", "x1"]);
    let again = stdout(&["f", "inv", "--elem", &stdout(&["f", "inv", "--elem", &text])]);
    assert_eq!(again, text);
    let rec = json(&["f", "compose", "--f", "x0^-1 * x2", "--g", "x1"]);
    let file = dir.path().join("e.json");
    std::fs::write(&file, rec["element"].to_string()).unwrap();
    let at = format!("@{}", path(&file));
    assert_eq!(stdout(&["f", "inv", "--elem", &stdout(&["f", "inv", "--elem", &at])]), text);
}

#[test]
fn words_round_trip() {
    for w in ["[y1, x0] * y2^-1 * x1^3", "y1 * x0 * x1^-1 * y1^-1", "x0 * y1 * x20 * y1"] {
        let printed = stdout(&["word", "parse", "--word", w]);
        assert_eq!(stdout(&["word", "parse", "--word", &printed]), printed, "{w}");
    }
    let law = stdout(&[
        "word", "interval-law", "--i1", "0,1/4", "--i2", "1/2,3/4", "--h1",
        "{[(0,0), (1/8,1/16), (3/16,1/8), (1/4,1/4), (1,1)]}", "--h2",
        "{[(0,0), (1/2,1/2), (5/8,9/16), (11/16,5/8), (3/4,3/4), (1,1)]}",
    ]);
    assert_eq!(stdout(&["word", "parse", "--word", &law]), law);
    let g = stdout(&["grig", "sigma", "--word", "abcd", "--times", "2"]);
    assert_eq!(stdout(&["grig", "sigma", "--word", &g, "--times", "0"]), g);
}

#[test]
fn json_mirrors_text() {
    assert_eq!(json(&["f", "eval", "--elem", "x0", "--point", "1/2"])["value"], "1/4");
    assert_eq!(json(&["grig", "wp", "--word", "(ad)^4"])["identity"], true);
    assert_eq!(json(&["grig", "order", "--word", "ad"])["order"], 4);
    assert_eq!(stdout(&["grig", "order", "--word", "ad"]), "4");
    assert_eq!(json(&["hnn", "trivial", "--word", "[t, x0^-1 * t * x0]"])["trivial"], "no");
    assert_eq!(stdout(&["hnn", "t", "--word", "[t, x0^-1 * t * x0]"]), "no");
    let supp = stdout(&["f", "supp", "--elem", "x1"]);
    assert_eq!(json(&["f", "supp", "--elem", "x1"])["support"], supp);
}

#[test]
fn symbol_tables() {
    let dir = tempfile::tempdir().unwrap();
    let table = dir.path().join("t.json");
    std::fs::write(
        &table,
        r#"{"version": 1,
            "symbols": {"h": {"version": 1, "breakpoints": [["0","0"],["1/2","1/4"],["3/4","1/2"],["1","1"]]}},
            "words": {"r": "(ad)^4"}}"#,
    )
    .unwrap();
    let t = path(&table);
    assert_eq!(stdout(&["--symbols", t, "f", "ispower", "--elem", "x0^3", "--base", "h"]), "3");
    assert_eq!(stdout(&["--symbols", t, "word", "parse", "--word", "y1 * x0"]), "y1 * h");
    assert_eq!(stdout(&["--symbols", t, "grig", "wp", "--word", "r"]), "identity");

    let dup = dir.path().join("dup.json");
    std::fs::write(&dup, r#"{"version":1,"symbols":{},"words":{"r":"a","r":"b"}}"#).unwrap();
    let out = run(&["--symbols", path(&dup), "grig", "wp", "--word", "r"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("bound twice"));
}

#[test]
fn hnn_reduction_removes_pinches() {
    assert_eq!(stdout(&["hnn", "reduce", "--word", "t * x0^-1 * x1 * t^-1 * x1^-1 * x0"]), "1");
    assert_eq!(stdout(&["hnn", "trivial", "--word", "t * x0^-1 * x1 * t^-1 * x1^-1 * x0"]), "yes");
    assert_eq!(
        stdout(&["hnn", "trivial", "--word", "t * x0^2 * t^-1 * x0^-2", "--oracle", "cyclic", "--generator", "x0"]),
        "yes"
    );
    assert_eq!(run(&["hnn", "trivial", "--word", "t", "--oracle", "cyclic"]).status.code(), Some(2));
}

#[test]
fn limits_commands() {
    let dir = tempfile::tempdir().unwrap();
    let files: Vec<String> = (1..=3)
        .map(|n| {
            let p = dir.path().join(format!("g{n}.json"));
            stdout(&["limits", "h1-seq", "--n", &n.to_string(), "--out", path(&p)]);
            path(&p).to_string()
        })
        .collect();
    let v = json(&["limits", "report", "--rmax", "4", &files[0], &files[1], &files[2]]);
    assert_eq!(v["pairs"].as_array().unwrap().len(), 3);
    assert_eq!(v["diagonal"].as_array().unwrap().len(), 2);
    assert_eq!(
        stdout(&["limits", "relations", "--marker", "x0", "--marker", "x1", "--radius", "4"]),
        "no relations of length <= 4"
    );
    let rels = json(&["limits", "relations", "--backend", "grigorchuk", "--marker", "a", "--marker", "d", "--radius", "4"]);
    assert!(rels["relations"].as_array().unwrap().contains(&"y1 y1".into()));
}

#[test]
fn solver_commands() {
    let v = json(&["solve", "iva", "--word", "y1 * x1 * y1^-1 * x1", "--h", "x1"]);
    assert!(v["certificate"]["checks"].as_array().unwrap().iter().all(|c| c["holds"] == true));
    let v = json(&["solve", "h1", "--e", "{[(0,0),(1/4,1/8),(3/8,1/4),(1/2,1/2),(1,1)]}", "--word", "[y1, x0]"]);
    assert!(v["certificate"]["checks"].as_array().unwrap().iter().all(|c| c["holds"] == true));
    let v = json(&["solve", "free-pair", "--elem", "x0", "--length", "4", "--budget", "50", "--seed", "9"]);
    assert_eq!(v["words_checked"], 160);
}
