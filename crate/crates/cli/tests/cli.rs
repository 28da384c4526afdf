use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::{json, Value};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_flatfoliate"));
    c.env_remove("FLATFOLIATE_RETRY_BUDGET");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn write(dir: &Path, name: &str, v: &Value) -> String {
    let p = dir.join(name);
    fs::write(&p, v.to_string()).unwrap();
    p.to_str().unwrap().to_owned()
}

fn configuration(bordered: Value, regular: Value) -> Value {
    json!({"schema": "flatfoliate.configuration/1", "n": 2, "bordered": bordered, "regular": regular})
}

#[test]
fn index_outcomes_and_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let plus = write(dir.path(), "plus.json", &configuration(json!([["1/1", "0/1"], ["0/1", "1/1"]]), json!([["-3/5", "-4/5"]])));
    let o = run(&["index", "--input", &plus]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "+1\n");

    let rep = write(dir.path(), "rep.json", &configuration(json!([["1/1", "0/1"], ["1/1", "0/1"]]), json!([["0/1", "1/1"]])));
    let o = run(&["index", "--input", &rep]);
    assert_eq!((o.status.code(), stdout(&o).as_str()), (Some(0), "0\n"));

    let anti = write(dir.path(), "anti.json", &configuration(json!([["1/1", "0/1"], ["-2/1", "0/1"]]), json!([["0/1", "1/1"]])));
    let o = run(&["index", "--input", &anti]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("determinant"));

    for bad in [
        json!({"schema": "flatfoliate.configuration/1", "n": 2, "bordered": [["0.5", "1"]], "regular": [["1", "0"], ["0", "1"]]}),
        json!({"schema": "flatfoliate.configuration/1", "n": 2, "bordered": [["1/0", "1"]], "regular": [["1", "0"], ["0", "1"]]}),
        json!({"schema": "flatfoliate.configuration/1", "n": 2, "bordered": [], "regular": [["1", "0"]]}),
        json!({"schema": "something/else", "n": 2, "bordered": [], "regular": []}),
    ] {
        let p = write(dir.path(), "bad.json", &bad);
        assert_eq!(run(&["index", "--input", &p]).status.code(), Some(1), "{bad}");
    }
    assert_eq!(run(&["index", "--input", "/nonexistent/file.json"]).status.code(), Some(1));
}

#[test]
fn formula_on_synthetic_and_exported_lists() {
    let dir = tempfile::tempdir().unwrap();
    let single = json!({"schema": "flatfoliate.crossings/1", "n": 2, "crossings": [
        {"id": 7, "bordered": [["1/1", "0/1"], ["0/1", "1/1"]], "regular": [["-3/5", "-4/5"]]}
    ]});
    let p = write(dir.path(), "single.json", &single);
    let o = run(&["formula", "--input", &p]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "1/3\nbound 1/3\n");
    assert!(String::from_utf8_lossy(&o.stderr).contains("warning"));

    let empty = write(dir.path(), "empty.json", &json!({"schema": "flatfoliate.crossings/1", "n": 2, "crossings": []}));
    let o = run(&["formula", "--input", &empty]);
    assert_eq!(stdout(&o).lines().next(), Some("0/1"));
    assert!(o.stderr.is_empty());

    let degenerate = json!({"schema": "flatfoliate.crossings/1", "n": 2, "crossings": [
        {"id": 41, "bordered": [["1/1", "0/1"], ["-1/1", "0/1"]], "regular": [["0/1", "1/1"]]}
    ]});
    let p = write(dir.path(), "degenerate.json", &degenerate);
    let o = run(&["formula", "--input", &p]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("crossing 41"));

    let cx = dir.path().join("cx.json");
    let o = run(&["torus-decay", "--L", "2", "--crossings-out", cx.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let o = run(&["formula", "--input", cx.to_str().unwrap()]);
    assert_eq!(stdout(&o).lines().next(), Some("0/1"));
    assert!(o.stderr.is_empty());
}

#[test]
fn decay_csv_contract() {
    let o = run(&["torus-decay", "--L", "2,4"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "L,N,N_boundary,X,k_min,k_max,bound,formula_value");
    assert_eq!(lines.len(), 3);
    for row in &lines[1..] {
        let cols: Vec<&str> = row.split(',').collect();
        assert_eq!(cols.len(), 8);
        assert!(cols[6].contains('/'));
        assert_eq!(cols[7], "0/1");
    }

    let o = run(&["torus-decay", "--L", ""]);
    assert_eq!(stdout(&o), "L,N,N_boundary,X,k_min,k_max,bound,formula_value\n");

    assert_eq!(run(&["torus-decay", "--L", "4,2"]).status.code(), Some(1));
    assert_eq!(run(&["torus-decay", "--L", "2,x"]).status.code(), Some(1));
}

#[test]
fn decay_config_file_and_output_path() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("decay.csv");
    let cfg = json!({
        "schema": "flatfoliate.experiment/1",
        "holonomy": {"a": ["3/5", "-4/5", "4/5", "3/5"], "b": ["5/13", "-12/13", "12/13", "5/13"]},
        "v0": ["1/1", "0/1"],
        "L": [2, 3],
        "schedule": 1,
        "output": out.to_str().unwrap()
    });
    let p = write(dir.path(), "exp.json", &cfg);
    let o = run(&["torus-decay", "--input", &p]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = fs::read_to_string(&out).unwrap();
    assert_eq!(csv.lines().count(), 3);

    let identity = json!({
        "schema": "flatfoliate.experiment/1",
        "holonomy": {"a": ["1", "0", "0", "1"], "b": ["1", "0", "0", "1"]},
        "L": [2]
    });
    let p = write(dir.path(), "identity.json", &identity);
    let o = run(&["torus-decay", "--input", &p]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("v0"));

    let not_unimodular = json!({
        "schema": "flatfoliate.experiment/1",
        "holonomy": {"a": ["2", "0", "0", "1"], "b": ["1", "0", "0", "1"]}
    });
    let p = write(dir.path(), "det.json", &not_unimodular);
    assert_eq!(run(&["torus-decay", "--input", &p]).status.code(), Some(1));
}

#[test]
fn retry_budget_comes_from_the_environment() {
    let o = bin().args(["torus-decay", "--L", "2"]).env("FLATFOLIATE_RETRY_BUDGET", "nope").output().unwrap();
    assert_eq!(o.status.code(), Some(1));
    let dir = tempfile::tempdir().unwrap();
    let identity = json!({
        "schema": "flatfoliate.experiment/1",
        "holonomy": {"a": ["1", "0", "0", "1"], "b": ["1", "0", "0", "1"]},
        "L": [2]
    });
    let p = write(dir.path(), "identity.json", &identity);
    let o = bin().args(["torus-decay", "--input", &p]).env("FLATFOLIATE_RETRY_BUDGET", "2").output().unwrap();
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("2"));
}

#[test]
fn outputs_are_deterministic() {
    for args in [
        vec!["torus-decay", "--L", "2,3,4"],
        vec!["folner", "--L", "2,5"],
        vec!["triangulate", "assemble", "--fixture", "torus"],
        vec!["triangulate", "kuhn", "3", "--marks", "010"],
    ] {
        let a = run(&args);
        let b = run(&args);
        assert_eq!(a.status.code(), Some(0), "{args:?}");
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
}

fn complex(args: &[&str]) -> Value {
    let o = run(args);
    assert_eq!(o.status.code(), Some(0), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    serde_json::from_slice(&o.stdout).unwrap()
}

#[test]
fn triangulate_kinds() {
    assert_eq!(complex(&["triangulate", "staircase", "1", "1"])["simplices"].as_array().unwrap().len(), 2);
    let kuhn = complex(&["triangulate", "kuhn", "3"]);
    assert_eq!(kuhn["simplices"].as_array().unwrap().len(), 6);
    assert_eq!(kuhn["audit"]["total_volume"], "1/1");

    let two = complex(&["triangulate", "assemble", "--fixture", "two-squares"]);
    assert_eq!(two["audit"]["no_new_vertices"], true);
    assert_eq!(two["audit"]["faces_compatible"], true);

    let torus = complex(&["triangulate", "assemble", "--fixture", "torus"]);
    assert_eq!(torus["audit"]["euler_characteristic"], 0);
    assert_eq!(torus["audit"]["closed_surface"], true);

    let o = run(&["triangulate", "assemble", "--fixture", "incompatible-cubes"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("shared face"));

    assert_eq!(run(&["triangulate", "kuhn", "3", "--marks", "01"]).status.code(), Some(1));
}

#[test]
fn cells_and_complex_files_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let cells = dir.path().join("cells.json");
    let direct = run(&["triangulate", "assemble", "--fixture", "two-squares", "--cells-out", cells.to_str().unwrap()]);
    let reread = run(&["triangulate", "assemble", "--input", cells.to_str().unwrap()]);
    assert_eq!(direct.stdout, reread.stdout);

    let cx = dir.path().join("complex.json");
    fs::write(&cx, &direct.stdout).unwrap();
    let audited = run(&["triangulate", "audit", "--input", cx.to_str().unwrap()]);
    let a: Value = serde_json::from_slice(&audited.stdout).unwrap();
    let b: Value = serde_json::from_slice(&direct.stdout).unwrap();
    assert_eq!(a["simplices"], b["simplices"]);
    assert_eq!(a["vertices"], b["vertices"]);

    let staircase = run(&["triangulate", "staircase", "2", "2"]);
    fs::write(&cx, &staircase.stdout).unwrap();
    assert_eq!(run(&["triangulate", "audit", "--input", cx.to_str().unwrap()]).stdout, staircase.stdout);
}

#[test]
fn product_cell_ambiguity_is_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let labels: Vec<String> = (0..8).map(|i| format!("v{i}")).collect();
    let tie = json!({"schema": "flatfoliate.cells/1", "cells": [
        {"cube_dim": 2, "simplex_dim": 1, "labels": labels, "nu": [0, 0, 1, 2, 4, 4, 5, 6]}
    ]});
    let p = write(dir.path(), "tie.json", &tie);
    let o = run(&["triangulate", "product", "--input", &p]);
    assert_eq!(o.status.code(), Some(2), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn folner_csv() {
    let o = run(&["folner", "--L", "2,4,8"]);
    let text = stdout(&o);
    let rows: Vec<Vec<&str>> = text.lines().skip(1).map(|l| l.split(',').collect()).collect();
    assert_eq!(text.lines().next(), Some("L,box_size,ratio_e1,ratio_e2,N,N_boundary"));
    assert_eq!(rows.iter().map(|r| r[2]).collect::<Vec<_>>(), ["1/1", "1/2", "1/4"]);
}

#[test]
fn verify_scopes() {
    let o = run(&["verify", "exactgeom"]);
    assert_eq!(o.status.code(), Some(0));
    let report: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(report["passed"], true);
    assert_eq!(run(&["verify", "nowhere"]).status.code(), Some(1));

    let o = run(&["verify", "toruslab", "--mutant"]);
    assert_eq!(o.status.code(), Some(3));
    let report: Value = serde_json::from_slice(&o.stdout).unwrap();
    let failed: Vec<&str> = report["checks"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|c| c["passed"] == false)
        .map(|c| c["name"].as_str().unwrap())
        .collect();
    assert!(failed.iter().any(|n| n.contains("integral")), "{failed:?}");
}
