use std::fs;

use arboreal::algebra::{parse_rational, rational};
use arboreal::graph::{generate, is_isomorphic, parse_graph, GraphKind};
use arboreal::Graph;
use arboreal_cli::{replay_witness, run, Outcome, EXIT_INPUT, EXIT_OK, EXIT_SIZE};
use serde_json::Value;

fn arboreal(args: &[&str]) -> Outcome {
    run(std::iter::once("arboreal").chain(args.iter().copied()))
}

fn json(args: &[&str]) -> Value {
    let out = arboreal(args);
    assert_eq!(out.code, EXIT_OK, "{args:?}: {}", out.stderr);
    serde_json::from_str(&out.stdout).unwrap()
}

#[test]
fn report_schema_fields() {
    let v = json(&["trees", "--gen", "complete:4"]);
    for key in ["command", "input", "params", "results", "verdicts", "witnesses", "timing_ms", "version"] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
    assert_eq!(v["results"]["tree_count"], "16/1");
}

#[test]
fn disjoint_pair_on_k4_has_vanishing_leading_coefficient() {
    let v = json(&["nc-pair", "--gen", "complete:4", "--beta", "symbolic", "--e1", "0", "--e2", "5"]);
    let lead = &v["results"]["leading_coefficient"];
    assert_eq!(lead["value"], "0/1");
    assert_eq!(lead["degree"], 4);
    assert_eq!(v["params"]["e2"]["u"], 2);
    assert!(v["results"]["margin"]["coefficients"].is_array());
}

#[test]
fn trees_with_constraints() {
    let v = json(&["trees", "--gen", "complete:5", "--require", "0"]);
    assert_eq!(v["results"]["tree_count"], "50/1");
    let out = arboreal(&["trees", "--gen", "complete:4", "--format", "csv"]);
    assert_eq!(out.stdout, "tree_count\n16/1\n");
}

#[test]
fn reduce_explain_ends_in_smaller_ladder() {
    let out = arboreal(&["reduce", "--gen", "ladder:4", "--explain"]);
    assert_eq!(out.code, EXIT_OK);
    let lines: Vec<&str> = out.stdout.lines().collect();
    assert!(lines[0].starts_with("suppress"));
    let start = lines.iter().position(|l| l.starts_with("vertices")).unwrap();
    let reduced = parse_graph(&lines[start..].join("\n")).unwrap();
    let expect: Graph = generate(GraphKind::Ladder(2), rational(1, 1)).unwrap();
    let reduced = reduced.with_uniform_weight(&rational(1, 1));
    assert_eq!(is_isomorphic(&reduced, &expect), Some(true));

    let v = json(&["reduce", "--gen", "cycle:4", "--e1", "0", "--e2", "2"]);
    assert_eq!(v["verdicts"]["reason"], "SameReducedEdge");
    assert_eq!(v["results"]["constant_c"], "9/1");
}

#[test]
fn graph_files_and_parse_errors() {
    let dir = tempfile::tempdir().unwrap();
    let good = dir.path().join("tri.graph");
    fs::write(&good, "# triangle\nvertices 3\n0 1 1/1\n1 2 1/1\n2 0 1/1\n").unwrap();
    let v = json(&["nc-pair", "--input", good.to_str().unwrap(), "--e1", "0", "--e2", "1"]);
    assert_eq!(v["results"]["probabilities"]["e1"], "3/7");

    let bad = dir.path().join("bad.graph");
    fs::write(&bad, "vertices 3\n0 1 1/1\n1 x 1/1\n").unwrap();
    let out = arboreal(&["trees", "--input", bad.to_str().unwrap()]);
    assert_eq!(out.code, EXIT_INPUT);
    assert!(out.stderr.contains("line 3"), "{}", out.stderr);

    let out = arboreal(&["trees", "--input", dir.path().join("missing").to_str().unwrap()]);
    assert_eq!(out.code, EXIT_INPUT);
}

#[test]
fn input_errors_exit_two() {
    assert_eq!(arboreal(&["trees"]).code, EXIT_INPUT);
    assert_eq!(arboreal(&["trees", "--gen", "complete:4", "--input", "x"]).code, EXIT_INPUT);
    assert_eq!(arboreal(&["frobnicate"]).code, EXIT_INPUT);
    assert_eq!(arboreal(&["nc-pair", "--gen", "complete:4", "--e1", "0", "--e2", "9"]).code, EXIT_INPUT);
    assert_eq!(arboreal(&["trees", "--gen", "complete:4", "--beta", "-1"]).code, EXIT_INPUT);
    // polynomial reports have no csv form
    assert_eq!(arboreal(&["poly", "--gen", "cycle:3", "--format", "csv"]).code, EXIT_INPUT);
    assert_eq!(arboreal(&["--help"]).code, EXIT_OK);
}

#[test]
fn symbolic_mode_rejects_mixed_weights() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("mixed.graph");
    fs::write(&path, "vertices 3\n0 1 1/2\n1 2 1/1\n2 0 1/1\n").unwrap();
    let out = arboreal(&["nc-pair", "--input", path.to_str().unwrap(), "--beta", "symbolic", "--e1", "0", "--e2", "1"]);
    assert_eq!(out.code, EXIT_INPUT);
}

#[test]
fn size_limits_exit_three() {
    assert_eq!(arboreal(&["scan", "--n-max", "9"]).code, EXIT_SIZE);
    assert_eq!(arboreal(&["kn", "--n", "12", "--direct"]).code, EXIT_SIZE);
}

#[test]
fn poly_and_text_output() {
    let out = arboreal(&["poly", "--gen", "cycle:3", "--format", "text"]);
    assert_eq!(out.stdout.trim(), "1 + 3*b + 3*b^2");
    let v = json(&["poly", "--gen", "cycle:3", "--require", "0"]);
    assert_eq!(v["results"]["polynomial"]["coefficients"][1], "2/1");
}

#[test]
fn resistance_and_flow() {
    let v = json(&["resistance", "--gen", "complete:4", "--u", "0", "--v", "1"]);
    assert_eq!(v["results"]["effective_resistance"], "1/2");
    let v = json(&["flow", "--gen", "cycle:4", "--u", "0", "--v", "2"]);
    assert_eq!(v["results"]["effective_resistance"], "1/1");
    assert_eq!(v["verdicts"]["kirchhoff_residuals_zero"], true);
}

#[test]
fn kn_reports_both_sums() {
    let v = json(&["kn", "--n", "6", "--direct"]);
    assert_eq!(v["results"]["direct"]["second"], "5184/1");
    assert_eq!(v["results"]["second_coeff_plain_sum"], "2592/1");
    assert_eq!(v["verdicts"]["half_weighted_matches_direct"], true);
    let v = json(&["kn", "--n", "5", "--ik-upto", "40"]);
    assert_eq!(v["results"]["ik_scan"]["n0"], 5);
}

#[test]
fn sampling_is_reproducible() {
    let args = ["sample", "--gen", "cycle:3", "--seed", "4", "--samples", "2000", "--e1", "0", "--e2", "1"];
    let a = json(&args);
    let b = json(&args);
    assert_eq!(a["results"], b["results"]);
    assert_eq!(a["results"]["edges"][0]["exact"], "3/7");
    let v = json(&["sample", "--gen", "complete:4", "--sampler", "ust", "--samples", "500", "--chains", "3"]);
    assert_eq!(v["results"]["n_samples"], 1500);
    assert_eq!(v["results"]["edges"][0]["exact"], "1/2");
}

fn strip_timing(mut v: Value) -> Value {
    v["timing_ms"] = Value::Null;
    v
}

#[test]
fn scan_small_graphs() {
    let v = json(&["scan", "--n-max", "3", "--beta", "1", "--workers", "2"]);
    assert_eq!(v["results"]["graphs"], 3);
    assert_eq!(v["verdicts"]["violations"], 0);
    let per_graph = v["results"]["per_graph"].as_array().unwrap();
    // the single edge has no pairs
    assert!(per_graph[0]["min_margin"].is_null());
    for g in &per_graph[1..] {
        let min = parse_rational(g["min_margin"].as_str().unwrap()).unwrap();
        // the two paths are trees, the triangle is the only cyclic graph
        if g["edges"] == 3 {
            assert!(min > rational(0, 1));
        } else {
            assert_eq!(min, rational(0, 1));
        }
    }

    let a = json(&["scan", "--n-max", "4", "--beta", "1", "--workers", "1"]);
    let b = json(&["scan", "--n-max", "4", "--beta", "1", "--workers", "3"]);
    assert_eq!(a["verdicts"]["violations"], 0);
    assert!(a["results"]["distribution"]["min"].is_string());
    let (mut a, mut b) = (strip_timing(a), strip_timing(b));
    a["params"]["workers"] = Value::Null;
    b["params"]["workers"] = Value::Null;
    assert_eq!(a, b);
}

#[test]
fn workers_from_environment() {
    std::env::set_var("ARBOREAL_WORKERS", "3");
    let v = json(&["scan", "--n-max", "3"]);
    assert_eq!(v["params"]["workers"], 3);
    let v = json(&["scan", "--n-max", "3", "--workers", "2"]);
    assert_eq!(v["params"]["workers"], 2);
    std::env::remove_var("ARBOREAL_WORKERS");
}

#[test]
fn identical_runs_are_byte_identical_apart_from_timing() {
    let args = ["nc-all", "--gen", "ladder:3", "--beta", "2/3"];
    let (a, b) = (arboreal(&args), arboreal(&args));
    let norm = |s: &str| s.lines().filter(|l| !l.contains("\"timing_ms\"")).collect::<Vec<_>>().join("\n");
    assert_eq!(norm(&a.stdout), norm(&b.stdout));
}

#[test]
fn witness_replay_recomputes_margin() {
    let text = "# witness e1 0 e2 1 beta 1/1 margin -1/1\nvertices 3\n0 1 1/1\n1 2 1/1\n2 0 1/1\n";
    // the recorded margin is ignored; the triangle's true margin is 2/49
    assert_eq!(replay_witness(text).unwrap(), rational(2, 49));
    assert!(replay_witness("vertices 2\n0 1 1/1\n").is_err());
}
