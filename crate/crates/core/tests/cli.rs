use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn graded_fca(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_graded-fca")).args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn health() -> String {
    fixture("health_center.csv").display().to_string()
}

fn scratch(name: &str) -> PathBuf {
    let dir = Path::new(env!("CARGO_TARGET_TMPDIR")).join("cli");
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn concepts_on_the_sample_lists_seven_lines() {
    let out = graded_fca(&["concepts", "-i", &health(), "--theta", "0.5"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 7);
    assert_eq!(lines[0], "P1 P2 P3 P4 | ");
    assert!(lines.contains(&"P1 | S1"));
}

#[test]
fn graded_text_ends_with_the_chain() {
    let out = graded_fca(&["graded", "-i", &health(), "--theta", "0.5"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert_eq!(text.lines().last(), Some("chain 1 4"));
    assert!(text.contains("- 4 | P1 P2 P3 P4 | "));
}

#[test]
fn graded_json_round_trips() {
    let out = graded_fca(&["graded", "-i", &health(), "--theta", "0.5", "--json"]);
    assert_eq!(out.status.code(), Some(0));
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["concepts"].as_array().unwrap().len(), 7);
    assert_eq!(doc["chain"], serde_json::json!([1.0, 4.0]));
    let again: serde_json::Value = serde_json::from_str(&serde_json::to_string(&doc).unwrap()).unwrap();
    assert_eq!(doc, again);
}

#[test]
fn itemsets_json_is_in_lectic_order() {
    let out = graded_fca(&["itemsets", "-i", &health(), "--theta", "0.5", "--json"]);
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let expected = serde_json::json!([[], ["S3"], ["S3", "S4"], ["S2", "S3"], ["S2", "S3", "S4"], ["S1"], ["S1", "S2", "S3", "S4"]]);
    assert_eq!(doc["itemsets"], expected);
}

#[test]
fn output_is_deterministic() {
    for args in [
        vec!["graded", "-i", &health(), "--theta", "0.5", "--json"],
        vec!["iterate", "-i", &health()],
        vec!["export-dot", "-i", &health(), "--theta", "0.5"],
    ] {
        assert_eq!(graded_fca(&args).stdout, graded_fca(&args).stdout);
    }
}

#[test]
fn threshold_writes_the_crisp_context() {
    let out = graded_fca(&["threshold", "-i", &health(), "--theta", "0.5"]);
    assert_eq!(out.status.code(), Some(0));
    let expected = std::fs::read_to_string(fixture("health_theta05.cxt")).unwrap();
    assert_eq!(stdout(&out), expected);
}

#[test]
fn output_flag_writes_a_file() {
    let path = scratch("theta05.cxt");
    let target = path.display().to_string();
    let out = graded_fca(&["threshold", "-i", &health(), "--theta", "0.5", "-o", &target]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let written = std::fs::read_to_string(&path).unwrap();
    assert_eq!(written, std::fs::read_to_string(fixture("health_theta05.cxt")).unwrap());
}

#[test]
fn dot_edges_follow_the_covers() {
    let out = graded_fca(&["export-dot", "-i", &fixture("identity2.cxt").display().to_string()]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.starts_with("digraph concepts {"));
    let edges = text.lines().filter(|l| l.contains("->")).count();
    assert_eq!(edges, 4);
}

#[test]
fn iterate_reports_the_fixed_point() {
    let out = graded_fca(&["iterate", "-i", &health()]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert_eq!(text.lines().next(), Some("k = 0.1"));
    assert!(text.lines().last().unwrap().starts_with("fixed point (0, 0) k = 0.1 steps = 11"));
}

#[test]
fn iterate_json_carries_the_bound() {
    let out = graded_fca(&["iterate", "-i", &health(), "--json"]);
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["steps"], 11);
    assert!(doc["certified_bound"].as_f64().unwrap() <= 1e-9);
}

#[test]
fn classic_context_has_nineteen_concepts() {
    let out = graded_fca(&["concepts", "-i", &fixture("living_beings.cxt").display().to_string()]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out).lines().count(), 19);
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(graded_fca(&["bogus", "-i", &health()]).status.code(), Some(1));
    assert_eq!(graded_fca(&["concepts", "-i", &health(), "--theta", "1.5"]).status.code(), Some(1));
    assert_eq!(graded_fca(&["concepts", "-i", &health()]).status.code(), Some(1));
    assert_eq!(graded_fca(&["threshold", "-i", &health(), "--theta", "0.5", "--json"]).status.code(), Some(1));
}

#[test]
fn parse_errors_exit_two() {
    let missing = graded_fca(&["concepts", "-i", "/nonexistent/file.cxt"]);
    assert_eq!(missing.status.code(), Some(2));
    let broken = fixture("broken_cxt.txt").display().to_string();
    let out = graded_fca(&["concepts", "-i", &broken, "--format", "cxt"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 10"));
    let bad = fixture("bad_value.csv").display().to_string();
    assert_eq!(graded_fca(&["graded", "-i", &bad, "--theta", "0.5"]).status.code(), Some(2));
}

#[test]
fn numeric_errors_exit_three() {
    let path = scratch("unit_k.csv");
    std::fs::write(&path, ",a,b\ng,1,0\nh,0,1\n").unwrap();
    let out = graded_fca(&["iterate", "-i", &path.display().to_string()]);
    assert_eq!(out.status.code(), Some(3));
    let out = graded_fca(&["iterate", "-i", &health(), "--max-iter", "1"]);
    assert_eq!(out.status.code(), Some(3));
}
