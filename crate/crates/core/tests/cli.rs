use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_squarebraid"))
        .args(args)
        .env("SQUAREBRAID_THREADS", "2")
        .output()
        .expect("binary runs")
}

fn json(args: &[&str]) -> Value {
    let out = run(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("valid json")
}

#[test]
fn complex_schema() {
    let v = json(&["complex", "--p", "3", "--q", "3", "--n", "7"]);
    assert_eq!(v["p"], 3);
    assert_eq!(v["n"], 7);
    assert_eq!(v["f"], serde_json::json!([36, 84, 44]));
    let v = json(&["complex", "--p", "2", "--q", "2", "--n", "3", "--cells"]);
    assert_eq!(v["cells"][0].as_array().unwrap().len(), v["f"][0].as_u64().unwrap() as usize);
}

#[test]
fn homology_and_morse_schema() {
    let v = json(&["homology", "--p", "5", "--q", "4", "--n", "18"]);
    assert_eq!(v["betti"], serde_json::json!([1, 13, 39]));
    assert_eq!(v["predicted"]["beta2"], 39);
    assert_eq!(v["match"], true);
    assert_eq!(v["euler"], 27);
    let v = json(&["morse", "--p", "4", "--q", "3"]);
    assert_eq!(v["critical"], v["predicted"]);
    assert_eq!(v["match"], true);
    assert_eq!(v["acyclic"], true);
}

#[test]
fn present_log_replay_round_trip() {
    let dir = std::env::temp_dir().join(format!("squarebraid-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let log = dir.join("moves.log");
    let fin = dir.join("final.txt");
    let replayed = dir.join("replayed.txt");
    let out = run(&[
        "present", "--p", "5", "--q", "3", "--stage", "q3",
        "--log", log.to_str().unwrap(), "--out", fin.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let out = run(&["replay", "--log", log.to_str().unwrap(), "--out", replayed.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let a = std::fs::read_to_string(&fin).unwrap();
    assert_eq!(a, std::fs::read_to_string(&replayed).unwrap());
    assert!(a.starts_with("gens: "));
    assert_eq!(a.lines().filter(|l| l.starts_with("rel: ")).count(), 12);

    let text = std::fs::read_to_string(&log).unwrap().replacen("MOVE eliminate", "MOVE eliminat", 1);
    std::fs::write(&log, text).unwrap();
    let out = run(&["replay", "--log", log.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line"));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn present_raw_and_abcd() {
    let out = run(&["present", "--p", "3", "--q", "3", "--stage", "raw"]);
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("gens: "));
    let out = run(&["present", "--p", "6", "--q", "3", "--stage", "abcd"]);
    assert!(out.status.success());
    assert_eq!(String::from_utf8_lossy(&out.stdout).lines().count(), 1 + 24);
    let out = run(&["present", "--p", "4", "--q", "4", "--stage", "abcd"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn hnn_verify_and_graph() {
    let v = json(&["hnn", "--p", "6", "verify"]);
    assert_eq!(v["p"], 6);
    assert_eq!(v["pass"], true);
    for key in ["theta_well_defined", "relations_I_VIII", "section", "lemma_vii_viii", "abelianization", "phi_graph_iso"] {
        assert_eq!(v["verdicts"][key], true, "{key}");
    }
    let out = run(&["hnn", "--p", "8", "graph"]);
    let text = String::from_utf8_lossy(&out.stdout);
    assert_eq!(text.lines().filter(|l| !l.starts_with("vertices:")).count(), 62);
    let out = run(&["hnn", "--p", "4", "verify"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn report_exit_code_and_determinism() {
    let a = run(&["report", "--p", "4", "--q", "3", "--format", "json"]);
    assert!(a.status.success());
    let v: Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(v["pass"], true);
    assert!(v["checks"].as_array().unwrap().iter().all(|c| c["anchor"].is_string()));
    let b = run(&["report", "--p", "4", "--q", "3", "--format", "json"]);
    assert_eq!(a.stdout, b.stdout);
    let text = run(&["report", "--p", "3", "--q", "3", "--format", "text"]);
    assert!(String::from_utf8_lossy(&text.stdout).contains("comb_tree_census"));
    assert_eq!(run(&["report", "--p", "3", "--q", "4"]).status.code(), Some(2));
    assert!(!run(&["report"]).status.success());
}
