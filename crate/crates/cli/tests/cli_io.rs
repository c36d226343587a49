//! End-to-end checks of the binary: exit-status mapping, rejection
//! messages, and the CSV side channel.

mod common;

use std::process::Command;

use common::fixture;

fn run(args: &[&str]) -> (String, String, i32) {
    let output = Command::new(env!("CARGO_BIN_EXE_chokepoint"))
        .args(args)
        .output()
        .expect("binary runs");
    (
        String::from_utf8_lossy(&output.stdout).into_owned(),
        String::from_utf8_lossy(&output.stderr).into_owned(),
        output.status.code().unwrap_or(-1),
    )
}

#[test]
fn screen_chart_reports_and_exits_zero() {
    let input = fixture("supercharger.json").display().to_string();
    let (out, _, code) = run(&[
        "screen",
        "chart",
        "--input",
        &input,
        "--criterion",
        "C1",
        "--threshold",
        "6.8",
    ]);
    assert_eq!(code, 0);
    assert!(out.contains("selected (2): 4, 7.11"));
}

#[test]
fn unknown_criterion_is_an_input_error() {
    let input = fixture("supercharger.json").display().to_string();
    let (_, err, code) = run(&[
        "screen",
        "chart",
        "--input",
        &input,
        "--criterion",
        "C9",
        "--threshold",
        "1.0",
    ]);
    assert_eq!(code, 1);
    assert!(err.contains("C9"));
}

#[test]
fn single_node_graph_is_a_precondition_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("single.json");
    std::fs::write(&path, r#"{ "kind": "graph", "nodes": ["a"], "edges": [] }"#).unwrap();
    let (_, err, code) = run(&["net", "mlst", "--input", &path.display().to_string()]);
    assert_eq!(code, 1, "degenerate input maps to the input-error status");
    assert!(err.contains("at least 2 nodes"));
}

#[test]
fn exact_limit_overflow_is_infeasible() {
    let input = fixture("sample_network.json").display().to_string();
    let (_, err, code) = run(&[
        "net",
        "mlst",
        "--input",
        &input,
        "--method",
        "exact",
        "--exact-limit",
        "4",
    ]);
    assert_eq!(
        code, 2,
        "exact-search overflow maps to the infeasible status"
    );
    assert!(err.contains("exceed"));
}

#[test]
fn enumeration_budget_overflow_is_infeasible() {
    let input = fixture("four_component_system.json").display().to_string();
    let (_, err, code) = run(&["morph", "solve", "--input", &input, "--budget", "7"]);
    assert_eq!(code, 2);
    assert!(err.contains("budget"));
}

#[test]
fn removed_compat_pair_rejects_with_the_pair_name() {
    let text = std::fs::read_to_string(fixture("four_component_system.json")).unwrap();
    // Drop the (X1, Y1) entry but keep valid JSON.
    let broken = text.replace("    { \"a\": \"X1\", \"b\": \"Y1\", \"w\": 3 },\n", "");
    assert_ne!(text, broken);
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("broken.json");
    std::fs::write(&path, broken).unwrap();
    let (_, err, code) = run(&["morph", "solve", "--input", &path.display().to_string()]);
    assert_eq!(code, 1);
    assert!(
        err.contains("missing-compat-pair") && err.contains("X1") && err.contains("Y1"),
        "rejection must name the missing pair, got: {err}"
    );
}

#[test]
fn malformed_json_is_an_input_error_with_position() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("broken.json");
    std::fs::write(&path, "{ \"kind\": \"graph\", \"nodes\": [\n").unwrap();
    let (_, err, code) = run(&["net", "cds", "--input", &path.display().to_string()]);
    assert_eq!(code, 1);
    assert!(err.contains("line"), "parse errors carry a position: {err}");
}

#[test]
fn wrong_document_kind_is_rejected() {
    let input = fixture("sample_network.json").display().to_string();
    let (_, err, code) = run(&["morph", "solve", "--input", &input]);
    assert_eq!(code, 1);
    assert!(err.contains("expected a morph-system"));
}

#[test]
fn empty_component_table_is_accepted() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("empty.json");
    std::fs::write(
        &path,
        r#"{ "kind": "estimate-table", "components": [], "criteria": [ { "id": "C1", "weight": 1.0 } ], "values": [] }"#,
    )
    .unwrap();
    let (out, _, code) = run(&[
        "screen",
        "chart",
        "--input",
        &path.display().to_string(),
        "--criterion",
        "C1",
        "--threshold",
        "1.0",
    ]);
    assert_eq!(code, 0);
    assert!(out.contains("selected (0):"));
}

#[test]
fn json_report_wraps_command_and_payload() {
    let input = fixture("four_component_system.json").display().to_string();
    let (out, _, code) = run(&[
        "morph",
        "solve",
        "--input",
        &input,
        "--format",
        "json-report",
    ]);
    assert_eq!(code, 0);
    let doc: serde_json::Value = serde_json::from_str(&out).expect("valid JSON");
    assert_eq!(doc["command"], "morph solve");
    assert!(doc["report"]["solutions"].is_array());
}

#[test]
fn seed_flag_is_accepted_and_ignored() {
    let input = fixture("four_component_system.json").display().to_string();
    let (a, _, code_a) = run(&["morph", "solve", "--input", &input, "--seed", "7"]);
    let (b, _, code_b) = run(&["morph", "solve", "--input", &input, "--seed", "8"]);
    assert_eq!((code_a, code_b), (0, 0));
    assert_eq!(a, b);
}
