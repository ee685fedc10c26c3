use std::fs;
use std::process::{Command, Output};

use serde_json::Value;

fn unstable(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_unstable"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn resolution_n2_reports_rank_certificates() {
    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("r.json");
    let o = unstable(&["resolution", "--n", "2", "--cap", "16", "--json", json.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let v: Value = serde_json::from_str(&fs::read_to_string(&json).unwrap()).unwrap();
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["params"]["cap"], 16);
    let exact = v["claims"]
        .as_array()
        .unwrap()
        .iter()
        .find(|c| c["id"] == "resolution.n2.exact")
        .unwrap();
    assert_eq!(exact["status"], "pass");
    let rows = exact["data"].as_array().unwrap();
    assert_eq!(rows.len(), 17);
    assert!(rows[7]["ranks"].is_array());
}

#[test]
fn andrews_n3() {
    let o = unstable(&["series", "--which", "andrews", "--n", "3", "--cap", "64"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("PASS"));
    assert!(!text.contains("FAIL"));
}

#[test]
fn presentation_bound_is_named() {
    let o = unstable(&["presentation", "--n", "5"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("n <= 4"));
}

#[test]
fn unknown_command_is_a_usage_error() {
    let o = unstable(&["frobnicate"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn reports_are_deterministic_and_cached() {
    let dir = tempfile::tempdir().unwrap();
    let ws = dir.path().join("ws");
    let run = |name: &str| {
        let json = dir.path().join(name);
        let o = unstable(&[
            "basis",
            "--flavor",
            "L",
            "--n",
            "2",
            "--cap",
            "12",
            "--workspace",
            ws.to_str().unwrap(),
            "--json",
            json.to_str().unwrap(),
        ]);
        assert_eq!(o.status.code(), Some(0));
        (fs::read(json).unwrap(), String::from_utf8_lossy(&o.stderr).into_owned())
    };
    let (first, err1) = run("a.json");
    let (second, err2) = run("b.json");
    assert_eq!(first, second);
    assert!(!err1.contains("cache hit"));
    assert!(err2.contains("cache hit"));

    for entry in fs::read_dir(&ws).unwrap() {
        fs::write(entry.unwrap().path(), "{ truncated").unwrap();
    }
    let (third, err3) = run("c.json");
    assert_eq!(first, third);
    assert!(err3.contains("discarded"));
}

#[test]
fn basis_emits_labels() {
    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("b.json");
    let o = unstable(&[
        "basis", "--flavor", "M", "--n", "2", "--cap", "8", "--json", json.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_str(&fs::read_to_string(&json).unwrap()).unwrap();
    assert_eq!(v["claims"][0]["data"][4][0], "w(3,1)");
}

#[test]
fn threads_flag_is_accepted() {
    let o = unstable(&["--threads", "2", "idempotent", "--n", "2"]);
    assert_eq!(o.status.code(), Some(0));
}
