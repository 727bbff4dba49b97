//! End-to-end checks of the command-line surface against the bundled
//! scenario files.

use std::path::PathBuf;
use std::process::{Command, Output};

fn omnikit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_omnikit"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn fixture_path(name: &str) -> String {
    let mut p = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    p.push("fixtures");
    p.push(name);
    p.to_string_lossy().into_owned()
}

#[test]
fn analyze_reports_the_two_user_verdict_as_json() {
    let out = omnikit(&["analyze", &fixture_path("xj.json"), "--json"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["verdict"], "OO_SUBOPTIMAL");
    assert_eq!(v["C_S"], "1");
    assert_eq!(v["R_CO"], "2");
}

#[test]
fn mmi_prints_value_and_fundamental_partition() {
    let out = omnikit(&["mmi", &fixture_path("ubsl1.json")]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("3/2"), "{text}");
    assert!(text.contains("[[1,2],[3],[4]]"), "{text}");
}

#[test]
fn fixtures_run_clean() {
    let out = omnikit(&["fixtures"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stdout));
}

#[test]
fn json_output_is_byte_stable() {
    let a = omnikit(&["analyze", &fixture_path("snn.json"), "--json"]);
    let b = omnikit(&["analyze", &fixture_path("snn.json"), "--json"]);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn validation_errors_name_the_violated_rule() {
    let dir = std::env::temp_dir().join("omnikit-cli-test");
    std::fs::create_dir_all(&dir).unwrap();
    let bad = dir.join("all-silent.json");
    let text = std::fs::read_to_string(fixture_path("xj.json"))
        .unwrap()
        .replace("\"active\": true", "\"active\": true, \"silent\": true");
    std::fs::write(&bad, text).unwrap();
    let out = omnikit(&["analyze", bad.to_str().unwrap()]);
    assert!(!out.status.success());
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("vocal active"), "{err}");
}

#[test]
fn user_cap_is_enforced_and_overridable() {
    let dir = std::env::temp_dir().join("omnikit-cli-test");
    std::fs::create_dir_all(&dir).unwrap();
    let big = dir.join("thirteen-users.json");
    let users: Vec<String> = (1..=13)
        .map(|i| format!("{{\"id\": {i}, \"active\": true}}"))
        .collect();
    let text = format!(
        "{{\"version\": 1, \"users\": [{}], \"source\": {{\"type\": \"hypergraph\", \
         \"edges\": [{{\"label\": \"a\", \"on\": [1, 2], \"weight\": \"1\"}}]}}}}",
        users.join(", ")
    );
    std::fs::write(&big, text).unwrap();
    let spec = dir.join("noop-transform.json");
    std::fs::write(&spec, r#"{"kind":"drop_silent_only_edges"}"#).unwrap();
    let args =
        ["transform", big.to_str().unwrap(), "--transform", spec.to_str().unwrap(), "--json"];
    // Default cap: 13 users are refused at parse time.
    let out = omnikit(&args);
    assert!(!out.status.success());
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("cap of 12"), "{err}");
    // Raising the cap admits the scenario.
    let out = Command::new(env!("CARGO_BIN_EXE_omnikit"))
        .args(args)
        .env("OMNIKIT_MAX_USERS", "13")
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn trace_flag_logs_pivots_to_stderr() {
    let out = omnikit(&["capacity", &fixture_path("xor-triple.json"), "--trace-lp"]);
    assert!(out.status.success());
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("lp:"), "{err}");
}

#[test]
fn transform_command_emits_the_reduced_scenario() {
    let dir = std::env::temp_dir().join("omnikit-cli-test");
    std::fs::create_dir_all(&dir).unwrap();
    let spec = dir.join("remove-helper.json");
    std::fs::write(&spec, r#"{"kind":"remove_determined_helper","user":4,"by":2}"#).unwrap();
    let out = omnikit(&[
        "transform",
        &fixture_path("hyp4.json"),
        "--transform",
        spec.to_str().unwrap(),
        "--json",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let ids: Vec<u64> = v["users"]
        .as_array()
        .unwrap()
        .iter()
        .map(|u| u["id"].as_u64().unwrap())
        .collect();
    assert_eq!(ids, vec![1, 2, 3]);
}
