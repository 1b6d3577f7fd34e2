//! End-to-end runs of the `hecke` binary.

use std::collections::BTreeMap;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn hecke(args: &[&str]) -> Output {
    hecke_env(args, None)
}

fn hecke_env(args: &[&str], cache: Option<&Path>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_hecke"));
    cmd.args(args).env_remove("HECKE_CACHE_DIR");
    if let Some(dir) = cache {
        cmd.env("HECKE_CACHE_DIR", dir);
    }
    cmd.output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn graph_json(args: &[&str]) -> Value {
    let o = hecke(args);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    serde_json::from_str(&stdout(&o)).unwrap()
}

/// `src -> (dst -> mult)`.
fn adjacency(g: &Value) -> BTreeMap<String, BTreeMap<String, u64>> {
    let mut out: BTreeMap<String, BTreeMap<String, u64>> = BTreeMap::new();
    for e in g["edges"].as_array().unwrap() {
        out.entry(e["src"].as_str().unwrap().to_string())
            .or_default()
            .insert(e["dst"].as_str().unwrap().to_string(), e["mult"].as_u64().unwrap());
    }
    out
}

#[test]
fn curve_info_one_point_curve() {
    let o = hecke(&["curve-info", "--preset", "f2-one-point"]);
    assert_eq!(code(&o), 0);
    let s = stdout(&o);
    assert!(s.contains("N_1 = 1 "), "{s}");
    assert!(s.contains("Pic0(X_2) = Z/5"), "{s}");
    assert!(s.contains("N_3 = 13 "), "{s}");
    let j: Value = serde_json::from_str(&stdout(&hecke(&[
        "curve-info",
        "--preset",
        "f2-one-point",
        "--format",
        "json",
    ])))
    .unwrap();
    assert_eq!(j["degrees"][1]["structure"], serde_json::json!([5]));
    assert_eq!(j["degrees"][2]["points"], 13);
}

#[test]
fn rank_two_edges_on_the_one_point_curve() {
    let g = graph_json(&["graph", "--preset", "f2-one-point", "--window", "0:0"]);
    let adj = adjacency(&g);
    let m = |s: &str, t: &str| adj[s][t];
    assert_eq!(m("E(1,0)[P1.0^1]+E(1,0)[P1.0^1]", "E(1,-1)[P1.0^1]+E(1,0)[P1.0^1]"), 3);
    assert_eq!(m("E(2,0)[P1.0^2]", "E(2,-1)[P1.0^1]"), 2);
    assert_eq!(m("E(2,0)[P1.0^2]", "E(1,-1)[P1.0^1]+E(1,0)[P1.0^1]"), 1);
    assert_eq!(m("E(2,0)[P2.0^1]", "E(2,-1)[P1.0^1]"), 3);
    for (src, out) in &adj {
        assert_eq!(out.values().sum::<u64>(), 3, "{src}");
    }
    let v = &g["vertices"][0];
    assert!(v["id"].is_string() && v["label"].is_string() && v["hn"].is_array());
    assert_eq!(g["operator"]["x"], serde_json::json!({"degree": 1, "rep": 0}));
}

#[test]
fn json_round_trips_and_runs_are_identical() {
    let args = ["graph", "--preset", "f3-one-point", "--window", "-1:1", "--format", "json"];
    let a = stdout(&hecke(&args));
    let b = stdout(&hecke(&args));
    assert_eq!(a, b);
    let v: Value = serde_json::from_str(&a).unwrap();
    assert_eq!(serde_json::to_string_pretty(&v).unwrap() + "\n", a);
    let dot = ["graph", "--preset", "f3-one-point", "--window", "-1:1", "--format", "dot", "--sequential"];
    assert_eq!(stdout(&hecke(&dot)), stdout(&hecke(&dot)));
}

#[test]
fn dot_orders_vertices_by_degree() {
    let s = stdout(&hecke(&["graph", "--preset", "f2-one-point", "--window", "-1:0", "--format", "dot"]));
    assert!(s.starts_with("digraph hecke {"));
    let degrees: Vec<i64> = s
        .lines()
        .filter(|l| l.contains("[label=") && !l.contains("->"))
        .map(|l| {
            let id = l.trim().split('"').nth(1).unwrap();
            id.split('+')
                .map(|p| p[2..].split(')').next().unwrap().split(',').nth(1).unwrap().parse::<i64>().unwrap())
                .sum()
        })
        .collect();
    assert!(!degrees.is_empty());
    assert!(degrees.windows(2).all(|w| w[0] <= w[1]), "{degrees:?}");
    assert!(s.contains("-> \"E(1,-2)[P1.0^1]+E(1,-1)[P1.0^1]\" [label=\"3\"]"));
}

#[test]
fn empty_window_has_no_edges() {
    let g = graph_json(&["graph", "--preset", "f2-one-point", "--window", "1:0"]);
    assert_eq!(g["vertices"], serde_json::json!([]));
    assert_eq!(g["edges"], serde_json::json!([]));
}

#[test]
fn missing_gamma_two_constant_exits_3() {
    let args = ["graph", "--preset", "f2-one-point", "--rank", "3", "--r", "2", "--window", "0:0"];
    let o = hecke(&args);
    assert_eq!(code(&o), 3);
    assert!(String::from_utf8_lossy(&o.stderr).contains("gamma=2"));
    let mut with = args.to_vec();
    with.extend(["--gamma2-constant", "probe"]);
    let g = graph_json(&with);
    for (src, out) in adjacency(&g) {
        assert_eq!(out.values().sum::<u64>(), 7, "{src}");
    }
}

#[test]
fn config_errors_exit_2() {
    let cases: [&[&str]; 6] = [
        &["graph", "--q", "2", "--coeffs", "0,0,1,0,0"],
        &["graph", "--preset", "nope"],
        &["graph", "--preset", "f2-one-point", "--window", "3"],
        &["graph", "--preset", "f2-one-point", "--point", "P1.4"],
        &["graph", "--preset", "f2-one-point", "--r", "3"],
        &["graph", "--preset", "f2-one-point", "--gamma2-constant", "v^x"],
    ];
    for args in cases {
        let o = hecke(args);
        assert_eq!(code(&o), 2, "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    }
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"curve": {"preset": "f2-one-point"}, "colour": 1}"#).unwrap();
    assert_eq!(code(&hecke(&["graph", "--config", bad.to_str().unwrap()])), 2);
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.json");
    std::fs::write(
        &path,
        r#"{
            "curve": {"q": 2, "coeffs": [0, 0, 1, 0, 0], "base_point": "inf", "max_degree": 3},
            "point": [0, 0],
            "rank": 2,
            "window": [0, 0],
            "format": "json"
        }"#,
    )
    .unwrap();
    let p = path.to_str().unwrap();
    let g = graph_json(&["graph", "--config", p]);
    assert_eq!(g["curve"]["coeffs"], serde_json::json!([0, 0, 1, 0, 0]));
    assert_eq!(g["operator"]["x"]["degree"], 1);
    assert!(!g["edges"].as_array().unwrap().is_empty());
    let wider = graph_json(&["graph", "--config", p, "--window", "0:1"]);
    assert!(wider["vertices"].as_array().unwrap().len() > g["vertices"].as_array().unwrap().len());
}

#[test]
fn cache_dir_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["graph", "--preset", "f2-five-points", "--window", "0:0"];
    let a = hecke_env(&args, Some(dir.path()));
    assert_eq!(code(&a), 0);
    let files: Vec<_> = std::fs::read_dir(dir.path()).unwrap().collect();
    assert_eq!(files.len(), 1);
    let b = hecke_env(&args, Some(dir.path()));
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(a.stdout, hecke(&args).stdout);
}

#[test]
fn output_prefix_writes_both_files() {
    let dir = tempfile::tempdir().unwrap();
    let prefix = dir.path().join("g");
    let o = hecke(&[
        "graph",
        "--preset",
        "f2-one-point",
        "--window",
        "0:0",
        "--format",
        "both",
        "--output",
        prefix.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0);
    assert!(o.stdout.is_empty());
    let json = std::fs::read_to_string(dir.path().join("g.json")).unwrap();
    let dot = std::fs::read_to_string(dir.path().join("g.dot")).unwrap();
    assert!(json.starts_with('{') && dot.starts_with("digraph"));
}

#[test]
fn verify_reports_and_exit_codes() {
    let o = hecke(&["verify", "--preset", "f2-one-point", "--window", "-1:1"]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    let rep: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(rep["pass"], true);
    let names: Vec<&str> = rep["suites"].as_array().unwrap().iter().map(|s| s["suite"].as_str().unwrap()).collect();
    assert_eq!(names, ["sum-rule", "rank3", "stable", "symfunc"]);
    // a wrong constant breaks integrality, reported as a failed suite
    let o = hecke(&[
        "verify",
        "--preset",
        "f2-one-point",
        "--rank",
        "3",
        "--r",
        "2",
        "--window",
        "0:0",
        "--gamma2-constant",
        "1",
        "--suite",
        "sum-rule",
    ]);
    assert_eq!(code(&o), 4);
    let rep: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(rep["suites"][0]["pass"], false);
}

#[test]
fn rank_three_suite_with_several_rational_points() {
    let o = hecke(&[
        "verify", "--q", "2", "--coeffs", "0,0,1,0,0", "--base-point", "inf", "--point", "0,1", "--suite", "rank3",
        "--suite", "stable",
    ]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    let rep: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(rep["suites"][0]["checks"], 3);
}

#[test]
fn symfunc_expand_power_sums() {
    let s = stdout(&hecke(&["symfunc-expand", "2,1"]));
    assert_eq!(s, "P(1,1,1)\tv^6 - 1\nP(2,1)\tv^2\nP(3)\t1\n");
    let back = stdout(&hecke(&["symfunc-expand", "1,1", "--direction", "hl-to-p"]));
    assert!(back.starts_with("p(1,1)"), "{back}");
    assert_eq!(code(&hecke(&["symfunc-expand", "2,x"])), 2);
}
