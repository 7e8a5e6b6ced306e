use std::fs;
use std::process::{Command, Output};

use riesz_arcs::circle_set::build_s_alpha;
use riesz_arcs::multiplicity::{nu_profile, StepProfile};
use riesz_arcs::riesz::{extremal_eigs, gram};
use riesz_arcs::scenario::{block, ScenarioReport, SCENARIOS};
use riesz_arcs::{ArcSet, GramMatrix, SAlphaSpec};

fn cli(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_riesz-arcs"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn default_set() -> ArcSet {
    build_s_alpha(&SAlphaSpec::new(0.5, 0.2, 125).unwrap()).unwrap()
}

#[test]
fn list_names_every_scenario() {
    let out = cli(&["list"]);
    assert_eq!(code(&out), 0);
    let names: Vec<String> = String::from_utf8(out.stdout).unwrap().lines().map(String::from).collect();
    assert_eq!(names, SCENARIOS);
}

#[test]
fn passing_check_exits_zero_with_report() {
    let out = cli(&["check", "lemma8", "--prime", "3"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let report = ScenarioReport::from_json(&String::from_utf8(out.stdout).unwrap()).unwrap();
    assert_eq!(report.schema, 1);
    assert_eq!(report.scenario, "lemma8");
    assert!(report.passed());
    for key in ["seed", "gram_cap", "alpha", "eps", "c0", "prime", "L"] {
        assert!(report.params.contains_key(key), "{key} not echoed");
    }
    assert!(String::from_utf8(out.stderr).unwrap().lines().all(|l| l.starts_with("PASS")));
}

#[test]
fn failing_check_exits_one() {
    // the literal dyadic shell bound is exceeded on the adversarial grid
    let out = cli(&["check", "lemma7"]);
    assert_eq!(code(&out), 1);
    let report = ScenarioReport::from_json(&String::from_utf8(out.stdout).unwrap()).unwrap();
    assert!(!report.passed());
    assert_eq!(report.failed_checks().count(), 1);
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(code(&cli(&["check", "lemma3"])), 2);
    assert_eq!(code(&cli(&["check"])), 2);
    assert_eq!(code(&cli(&["--format", "xml", "list"])), 2);
    assert_eq!(code(&cli(&["--alpha", "1.5", "check", "lemma4"])), 2);
}

#[test]
fn gram_cap_exits_three() {
    let out = cli(&["--gram-cap", "10", "check", "lemma4"]);
    assert_eq!(code(&out), 3);
    assert!(String::from_utf8(out.stderr).unwrap().contains("resource limit"));
}

#[test]
fn exhausted_search_exits_one() {
    let out = cli(&["--m-max", "1", "--trunc-L", "125", "check", "uniting-blocks"]);
    assert_eq!(code(&out), 1);
    assert!(String::from_utf8(out.stderr).unwrap().contains("search exhausted at step 1"));
}

#[test]
fn reports_are_deterministic() {
    let run = || {
        let out = cli(&["--seed", "7", "check", "corollary-pdivides"]);
        let mut r = ScenarioReport::from_json(&String::from_utf8(out.stdout).unwrap()).unwrap();
        r.wall_time_s = 0.0;
        r
    };
    let a = run();
    assert_eq!(a.seed, 7);
    assert_eq!(a, run());
}

#[test]
fn set_json_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("set.json");
    assert_eq!(code(&cli(&["export", "set", path.to_str().unwrap()])), 0);
    let back = ArcSet::from_json(&fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(back.arcs(), default_set().arcs());
}

#[test]
fn set_csv_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("set.csv");
    assert_eq!(code(&cli(&["--format", "csv", "export", "set", path.to_str().unwrap()])), 0);
    let text = fs::read_to_string(&path).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("start,end"));
    let expected = default_set();
    let parsed: Vec<(f64, f64)> = lines
        .map(|l| {
            let (a, b) = l.split_once(',').unwrap();
            (a.parse().unwrap(), b.parse().unwrap())
        })
        .collect();
    assert_eq!(parsed.len(), expected.len());
    for (arc, (a, b)) in expected.arcs().iter().zip(parsed) {
        assert_eq!((arc.start(), arc.end()), (a, b));
    }
}

#[test]
fn gram_csv_reproduces_eigenvalues() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("gram.csv");
    let out = cli(&["--format", "csv", "--prime", "5", "export", "gram", path.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let g = GramMatrix::read_csv(fs::File::open(&path).unwrap()).unwrap();
    let fresh = gram(&block(5, 0.5).unwrap(), &default_set()).unwrap();
    let (lo, hi) = extremal_eigs(&g).unwrap();
    let (flo, fhi) = extremal_eigs(&fresh).unwrap();
    assert!((lo - flo).abs() < 1e-12 && (hi - fhi).abs() < 1e-12);
    assert_eq!(g.entries(), fresh.entries());
}

#[test]
fn gram_json_has_both_parts() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("gram.json");
    assert_eq!(code(&cli(&["export", "gram", path.to_str().unwrap()])), 0);
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["frequencies"].as_array().unwrap().len(), 25);
    assert_eq!(v["re"].as_array().unwrap().len(), 25);
    assert_eq!(v["im"][3].as_array().unwrap().len(), 25);
}

#[test]
fn profile_json_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("profile.json");
    assert_eq!(code(&cli(&["export", "profile", path.to_str().unwrap(), "--ell", "3"])), 0);
    let back = StepProfile::from_json(&fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(back, nu_profile(&default_set(), 3).unwrap());
}

#[test]
fn report_export_is_schema_valid() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let out = cli(&["export", "report", path.to_str().unwrap(), "--scenario", "lemma9"]);
    assert_eq!(code(&out), 0);
    let report = ScenarioReport::from_json(&fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(report.scenario, "lemma9");
    assert!(report.checks.iter().all(|c| c.tolerance >= 0.0));

    let csv_path = dir.path().join("report.csv");
    let out = cli(&["--format", "csv", "export", "report", csv_path.to_str().unwrap(), "--scenario", "lemma9"]);
    assert_eq!(code(&out), 0);
    let text = fs::read_to_string(&csv_path).unwrap();
    assert_eq!(text.lines().count(), report.checks.len() + 1);
}

#[test]
fn unwritable_path_is_an_error() {
    let out = cli(&["export", "set", "/nonexistent-dir/for/sure/set.json"]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8(out.stderr).unwrap().contains("i/o error"));
}
