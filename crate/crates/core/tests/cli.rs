mod common;

use std::path::Path;

use common::*;

fn golden(name: &str) -> String {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name);
    std::fs::read_to_string(path).expect("read golden")
}

#[test]
fn heap_dumps_match_goldens() {
    for (file, entry) in [
        ("monomorphism_pos", "Student::generate"),
        ("linked_list", "Main::run"),
        ("cyclic_pools", "Main::run"),
        ("mixed_pools", "Main::run"),
    ] {
        let out = shapes(&["run", &corpus_path(&format!("{file}.shapes")), "--entry", entry, "--dump-heap"]);
        assert_eq!(out.code, 0, "{file}: {}", out.stderr);
        assert_eq!(out.stdout, golden(&format!("{file}.out")), "{file}");
    }
}

#[test]
fn invariant_checking_does_not_change_output() {
    for (e, entry) in positive_entries(&shapes::corpus::corpus().unwrap()) {
        let path = corpus_path(&e.path);
        let plain = shapes(&["run", &path, "--entry", entry, "--dump-heap"]);
        let checked = shapes(&["run", &path, "--entry", entry, "--dump-heap", "--check-invariants"]);
        assert_eq!(plain.code, 0, "{}", e.path);
        assert_eq!(plain.stdout, checked.stdout, "{}", e.path);
    }
}

#[test]
fn check_accepts_and_rejects() {
    let ok = shapes(&["check", &corpus_path("layout_video.shapes")]);
    assert_eq!((ok.code, ok.stdout.as_str(), ok.stderr.as_str()), (0, "", ""));
    let path = corpus_path("monomorphism_neg.shapes");
    let bad = shapes(&["check", &path]);
    assert_eq!(bad.code, 1);
    let lines: Vec<&str> = bad.stderr.lines().collect();
    assert_eq!(lines.len(), 1);
    assert!(lines[0].starts_with(&format!("{path}:12:16: error[E210]: ")), "{}", lines[0]);
}

#[test]
fn runtime_errors_exit_two() {
    let null = shapes(&["run", &corpus_path("runtime_null.shapes"), "--entry", "Node::run"]);
    assert_eq!(null.code, 2);
    assert!(null.stderr.starts_with("runtime error[R001]: "), "{}", null.stderr);
    assert!(null.stdout.is_empty());
    let deep = shapes(&["run", &corpus_path("recursion.shapes"), "--entry", "Node::run", "--max-depth", "50"]);
    assert_eq!(deep.code, 2);
    assert!(deep.stderr.contains("runtime error[R002]") && deep.stderr.contains("50"), "{}", deep.stderr);
}

#[test]
fn max_depth_bounds_legal_recursion() {
    let path = corpus_path("deep_call.shapes");
    assert_eq!(shapes(&["run", &path, "--entry", "Main::run"]).code, 0);
    let shallow = shapes(&["run", &path, "--entry", "Main::run", "--max-depth", "2"]);
    assert_eq!(shallow.code, 2, "{}", shallow.stderr);
}

#[test]
fn unknown_entry_is_a_static_error() {
    let path = corpus_path("linked_list.shapes");
    let out = shapes(&["run", &path, "--entry", "Main::nope"]);
    assert_eq!(out.code, 1);
    assert!(out.stderr.contains("error[E100]") && out.stderr.contains("nope"), "{}", out.stderr);
    let malformed = shapes(&["run", &path, "--entry", "Main"]);
    assert_eq!(malformed.code, 1);
}

#[test]
fn trace_goes_to_stderr() {
    let path = corpus_path("linked_list.shapes");
    let plain = shapes(&["run", &path, "--entry", "Main::run"]);
    let traced = shapes(&["run", &path, "--entry", "Main::run", "--trace"]);
    assert_eq!(traced.code, 0);
    assert_eq!(plain.stdout, traced.stdout);
    let lines: Vec<&str> = traced.stderr.lines().collect();
    assert!(!lines.is_empty());
    assert!(lines.iter().all(|l| l.starts_with('[') && l.contains("] ")), "{}", traced.stderr);
    assert!(lines.iter().any(|l| l.starts_with("[New Pooled Object] (pool@")));
    assert!(lines.iter().any(|l| l.starts_with("[Pooled Object Write]")));
    assert!(lines.last().unwrap().starts_with("[Variable/Pool Declaration] "), "{}", traced.stderr);
}

#[test]
fn io_and_usage_errors_exit_three() {
    let missing = shapes(&["check", "/nonexistent/file.shapes"]);
    assert_eq!(missing.code, 3);
    assert!(missing.stderr.contains("/nonexistent/file.shapes"));
    assert_eq!(shapes(&["frobnicate"]).code, 3);
    assert_eq!(shapes(&["--help"]).code, 0);
}

#[test]
fn bench_prints_two_lines() {
    let out = shapes(&["bench", "500"]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    let parsed = shapes::bench::parse_report(&out.stdout).expect("parseable report");
    let labels: Vec<&str> = parsed.iter().map(|p| p.0.as_str()).collect();
    assert_eq!(labels, ["pooled", "unpooled"]);
    assert!(parsed.iter().all(|p| p.1 == 500 && p.2 > 0));
    assert_ne!(shapes(&["bench", "0"]).code, 0);
}
