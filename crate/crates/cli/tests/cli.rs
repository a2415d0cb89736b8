use std::path::PathBuf;
use std::process::Command as Proc;

use krflow::{run, Command, RunConfig, EXIT_INPUT, EXIT_NOT_GROUP_MAPPING, EXIT_OK, EXIT_REJECTED};

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name)
}

fn verify(aut: &str, flow: &str) -> krflow::Outcome {
    let mut cfg = RunConfig::new(Command::Verify, fixture("m1.mon"));
    cfg.automaton = Some(fixture(aut));
    cfg.labeling = Some(fixture(flow));
    run(&cfg)
}

#[test]
fn analyze_m1() {
    let out = run(&RunConfig::new(Command::Analyze, fixture("m1.mon")));
    assert_eq!(out.code, EXIT_OK, "{}", out.stdout);
    assert!(out.stdout.contains("complexity ≥ 1"), "{}", out.stdout);
}

#[test]
fn reports_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let mut bytes = Vec::new();
    for _ in 0..2 {
        let mut cfg = RunConfig::new(Command::Analyze, fixture("m1.mon"));
        cfg.out = Some(dir.path().join("r.json"));
        assert_eq!(run(&cfg).code, EXIT_OK);
        bytes.push(std::fs::read(cfg.out.unwrap()).unwrap());
    }
    assert_eq!(bytes[0], bytes[1]);
    let v: serde_json::Value = serde_json::from_slice(&bytes[0]).unwrap();
    assert_eq!(v["config"]["backend"], "both");
    assert_eq!(v["result"]["bound"], 1);
    assert!(v["tool_version"].is_string());
}

#[test]
fn cyclic_group_is_rejected() {
    let out = run(&RunConfig::new(Command::Analyze, fixture("z3.mon")));
    assert_eq!(out.code, EXIT_NOT_GROUP_MAPPING);
    assert!(out.stdout.starts_with("NOT_GROUP_MAPPING"));

    let mut cfg = RunConfig::new(Command::Analyze, fixture("z3.mon"));
    cfg.auto_gm_note = true;
    let out = run(&cfg);
    assert_eq!(out.code, EXIT_NOT_GROUP_MAPPING);
    assert!(out.stdout.contains("J0: 3 elements"), "{}", out.stdout);
}

#[test]
fn unreadable_inputs() {
    assert_eq!(run(&RunConfig::new(Command::Analyze, fixture("missing.mon"))).code, EXIT_INPUT);
    assert_eq!(run(&RunConfig::new(Command::Analyze, fixture("cayley.aut.json"))).code, EXIT_INPUT);
    let mut cfg = RunConfig::new(Command::Analyze, fixture("m1.mon"));
    cfg.oracle = "sometimes".into();
    assert_eq!(run(&cfg).code, EXIT_INPUT);
    // verify without its files
    assert_eq!(run(&RunConfig::new(Command::Verify, fixture("m1.mon"))).code, EXIT_INPUT);
}

#[test]
fn verify_accepts_the_cayley_flow() {
    let out = verify("cayley.aut.json", "cayley.flow.json");
    assert_eq!(out.code, EXIT_OK, "{}", out.stdout);
    assert!(out.stdout.contains("not aperiodic"));
}

#[test]
fn verify_names_the_first_violation() {
    for (aut, flow, want) in [
        ("no_a.aut.json", "top.flow.json", "SINK_VIOLATION(q,a)"),
        ("loop.aut.json", "discrete.flow.json", "EDGE_VIOLATION(q,a)"),
        ("loop.aut.json", "top.flow.json", "PRESENTATION_VIOLATION"),
    ] {
        let out = verify(aut, flow);
        assert_eq!(out.code, EXIT_REJECTED, "{aut} {flow}");
        assert!(out.stdout.contains(want), "{}", out.stdout);
    }
    // the replay shows why: a merges two points the label keeps apart
    let out = verify("loop.aut.json", "discrete.flow.json");
    assert!(out.stdout.contains("a0.e.b1·a = a0.e.b0"), "{}", out.stdout);
}

#[test]
fn laws_on_two_points() {
    let mut cfg = RunConfig::new(Command::Laws, fixture("m1.mon"));
    cfg.law_points = vec![2, 9];
    let out = run(&cfg);
    assert_eq!(out.code, EXIT_OK, "{}", out.stdout);
    assert!(out.stdout.contains("|R| = 2, |L| = 5"));
    assert!(out.stdout.contains("skipping |R| = 9"));
    assert!(!out.stdout.contains("FAIL"));
}

#[test]
fn dumps() {
    let out = run(&RunConfig::new(Command::DumpGreen, fixture("m1.mon")));
    assert_eq!(out.code, EXIT_OK);
    assert!(out.stdout.contains("8 elements, 2 R-classes, 2 L-classes, |H| = 2"), "{}", out.stdout);

    let out = run(&RunConfig::new(Command::DumpRees, fixture("m1.mon")));
    assert_eq!(out.code, EXIT_OK);
    assert!(out.stdout.contains("|A| = 2 rows, |B| = 2 columns"), "{}", out.stdout);
    assert_eq!(run(&RunConfig::new(Command::DumpRees, fixture("z3.mon"))).code, EXIT_NOT_GROUP_MAPPING);
}

#[test]
fn binary_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_krflow");
    let code = |args: &[&str]| Proc::new(bin).args(args).output().unwrap().status.code().unwrap();
    let m1 = fixture("m1.mon");
    let z3 = fixture("z3.mon");
    let m1 = m1.to_str().unwrap();
    assert_eq!(code(&["analyze", "--input", m1, "--backend", "symbolic"]), 0);
    assert_eq!(code(&["analyze", "--input", z3.to_str().unwrap()]), 2);
    assert_eq!(code(&["analyze", "--input", m1, "--backend", "sideways"]), 1);
    assert_eq!(code(&["frobnicate"]), 1);
    assert_eq!(code(&["--help"]), 0);
}

#[test]
fn budget_exhaustion_still_writes_the_report() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = RunConfig::new(Command::Analyze, fixture("m1.mon"));
    cfg.backend = krflow_core::states::Backend::Symbolic;
    cfg.max_states = 2;
    cfg.out = Some(dir.path().join("r.json"));
    let out = run(&cfg);
    assert_eq!(out.code, krflow::EXIT_BUDGET, "{}", out.stdout);
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(cfg.out.unwrap()).unwrap()).unwrap();
    assert_eq!(v["result"]["budget_exhausted"], true);
}
