use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_forcing-lab"))
        .args(args)
        .env_remove("FORCING_LAB_BUDGET")
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("json on stdout")
}

#[test]
fn verify_upper_bound_lists_counts() {
    let out = run(&["verify", "upper-bound", "--m", "6"]);
    assert_eq!(out.status.code(), Some(0));
    let report = json(&out);
    assert_eq!(report["passed"], true);
    assert_eq!(report["config"]["m"], 6);
    for inst in report["instances"].as_array().unwrap() {
        let k = inst["params"]["o_len"].as_u64().unwrap();
        let expected: u64 = (k + 1..=6).product();
        assert_eq!(inst["detail"]["total_orders"], expected);
    }
}

#[test]
fn verify_array_inequality_certifies_nonexistence() {
    let out = run(&["verify", "array-inequality", "--n", "3", "--p", "2", "--h", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let report = json(&out);
    for inst in report["instances"].as_array().unwrap() {
        assert_eq!(inst["detail"]["verdict"], "nonexistent");
    }
}

#[test]
fn corrupted_trees_fail_with_counterexample() {
    let out = run(&["verify", "tree-props", "--input", data("corrupted_tree.json").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let report = json(&out);
    let covering = &report["instances"][0]["detail"]["covering"];
    assert_eq!(covering["passed"], false);
    assert_eq!(covering["counterexample"][0], serde_json::json!([0, 1]));

    let out = run(&["verify", "tree-props", "--input", data("duplicated_leaf_tree.json").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out)["instances"][0]["detail"]["incompatibility"]["passed"], false);
}

#[test]
fn reports_are_reproducible() {
    let a = json(&run(&["verify", "frame-bounds", "--frame", "partialfn"]));
    let b = json(&run(&["verify", "frame-bounds", "--frame", "partialfn"]));
    assert_eq!(a["digest"], b["digest"]);
    assert_eq!(a["digest"].as_str().unwrap().len(), 64);
}

#[test]
fn budget_and_usage_exit_codes() {
    assert_eq!(run(&["verify", "upper-bound", "--budget-nodes", "10"]).status.code(), Some(3));
    let env = Command::new(env!("CARGO_BIN_EXE_forcing-lab"))
        .args(["verify", "upper-bound"])
        .env("FORCING_LAB_BUDGET", "10")
        .output()
        .unwrap();
    assert_eq!(env.status.code(), Some(3));
    assert_eq!(run(&["verify", "no-such-suite"]).status.code(), Some(2));
    assert_eq!(run(&["verify", "tree-props", "--input", "/nonexistent.json"]).status.code(), Some(4));
}

#[test]
fn counts_examples() {
    let out = run(&["counts", "--m", "4", "--o-len", "1", "--depth", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let row = &json(&out)["report"]["rows"][0];
    assert_eq!(row["formula"], "6");
    assert_eq!(row["tree_size"], 6);
    assert_eq!(row["max_antichain"], 6);

    let out = run(&["counts", "--frame", "partialfn", "--n", "2", "--depth", "1", "--format", "csv"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("frame,base_size,depth,formula"));
    assert!(lines.next().unwrap().starts_with("partialfn,0,1,4,4,4,4"));

    for frame in ["order", "tournament", "partialfn"] {
        let out = run(&["counts", "--frame", frame, "--n", "3", "--m", "3", "--depth", "0"]);
        assert_eq!(json(&out)["report"]["rows"][0]["tree_size"], 1);
    }
}

#[test]
fn order_game_with_requirement() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("t.json");
    let out = run(&[
        "run-game", "--frame", "order", "--n", "8", "--schedule", "MIN,PASS,PHP", "--rounds", "3",
        "--requirements", data("modular_requirement.json").to_str().unwrap(),
        "--out", path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let t: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(t["rounds"][2]["alternative"]["kind"], "row-collision");
    assert_eq!(t["rounds"][2]["requirement"], "modular");
    let summary = String::from_utf8(out.stderr).unwrap();
    assert!(summary.contains("\"requirements_discharged\":1"));
}

#[test]
fn tournament_game_defeats_domination() {
    let out = run(&["run-game", "--frame", "tournament", "--n", "5", "--x", "0,1", "--schedule", "TOUR,TOUR,DOM", "--rounds", "3"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8(out.stderr).unwrap().contains("\"x_dominates\":false"));
}

#[test]
fn empty_game() {
    let out = run(&["run-game", "--rounds", "0"]);
    assert_eq!(out.status.code(), Some(0));
    let t = json(&out);
    assert_eq!(t["rounds"], serde_json::json!([]));
    assert_eq!(t["final"], serde_json::json!([]));
}

#[test]
fn aborted_game_keeps_partial_transcript() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("t.json");
    // two minima fill the cap, leaving no room to compile the queries
    let out = run(&[
        "run-game", "--n", "6", "--length-cap", "2", "--schedule", "MIN,MIN,PHP", "--rounds", "3",
        "--requirements", data("query_requirement.json").to_str().unwrap(),
        "--out", path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(4));
    let t: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(t["rounds"].as_array().unwrap().len(), 2);
}

#[test]
fn search_and_compile() {
    let out = run(&["search", "--n", "3", "--p", "1", "--h", "2", "--depth", "2"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["report"]["result"]["verdict"], "exists");

    let out = run(&["compile", "--program", data("query_program.json").to_str().unwrap(), "--n", "3", "--p", "1", "--h", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let fam = json(&out);
    assert_eq!(fam["Tplus"][0][0], serde_json::json!([[0, 1]]));
    assert_eq!(fam["Tminus"][0][0], serde_json::json!([[1, 0]]));
}
