use std::io::Write;
use std::process::{Command, Output};

use serde_json::Value;

fn preduals(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_preduals"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn reports(out: &Output) -> Vec<Value> {
    String::from_utf8(out.stdout.clone())
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str(l).expect("one JSON object per line"))
        .collect()
}

fn statuses(out: &Output) -> Vec<(String, String)> {
    reports(out)
        .iter()
        .map(|r| (r["check_name"].as_str().unwrap().to_string(), r["status"].as_str().unwrap().to_string()))
        .collect()
}

#[test]
fn verify_xzero_passes_exactly() {
    let out = preduals(&["verify-xzero", "--lambda", "2", "--window", "4096"]);
    assert_eq!(out.status.code(), Some(0));
    let rs = reports(&out);
    assert!(!rs.is_empty());
    for r in &rs {
        assert_eq!(r["status"], "pass", "{r}");
    }
    for r in rs.iter().filter(|r| ["x0-identities", "intertwine", "pairing"].contains(&r["check_name"].as_str().unwrap())) {
        assert_eq!(r["max_error"], 0.0, "{r}");
    }
}

#[test]
fn power_table_writes_csv_rows() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("out.csv");
    let out = preduals(&["power-table", "--element", "newman", "--max-m", "128", "--csv", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(&path).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("m,l1,sup"));
    assert_eq!(lines.count(), 128);
}

#[test]
fn identical_invocations_are_identical() {
    let a = preduals(&["szlenk-probe", "--seed", "5", "--families", "4"]);
    let b = preduals(&["szlenk-probe", "--seed", "5", "--families", "4", "--workers", "3"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let c = preduals(&["semigroup-theta", "--seed", "9"]);
    let d = preduals(&["semigroup-theta", "--seed", "9"]);
    assert_eq!(c.stdout, d.stdout);
}

#[test]
fn timing_fills_runtime() {
    let out = preduals(&["extend", "--y", "1=1;2=-1", "--timing"]);
    assert!(reports(&out)[0]["runtime_ms"].is_u64());
    let out = preduals(&["extend", "--y", "1=1;2=-1"]);
    assert_eq!(reports(&out)[0]["runtime_ms"], 0);
}

#[test]
fn extend_complex_lambda() {
    let out = preduals(&["extend", "--lambda", "1.5,0.5", "--y", "1=1,1;3=-2", "--window", "256"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(statuses(&out), vec![("extension".to_string(), "pass".to_string())]);
}

#[test]
fn errors_map_to_exit_codes() {
    assert_eq!(preduals(&["suite", "--config", "/nonexistent/spec.toml"]).status.code(), Some(3));
    assert_eq!(preduals(&["power-table", "--bogus"]).status.code(), Some(2));
    assert_eq!(preduals(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(preduals(&["extend", "--y", "1:1"]).status.code(), Some(3));
    assert_eq!(preduals(&["extend", "--lambda", "1/2", "--y", "1=1"]).status.code(), Some(3));
    assert_eq!(preduals(&["power-table", "--element", "cubic"]).status.code(), Some(3));
}

#[test]
fn failing_probe_sets_exit_code() {
    let out = preduals(&["power-table", "--element", "double", "--max-m", "8", "--bound", "2"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(statuses(&out).iter().any(|(n, s)| n == "power-bounded-probe" && s == "fail"));
}

#[test]
fn two_generator_config() {
    let mut file = tempfile::NamedTempFile::new().unwrap();
    write!(
        file,
        r#"
k = 2
search_bound = 1048576
[[generator]]
image = [[0, "1/2", 0], [1, "1/2", 0]]
set = "powers:2/residue:0/mod:2"
[[generator]]
image = [[-1, "1/2", 0], [0, "1/2", 0]]
set = "powers:2/residue:1/mod:2"
"#
    )
    .unwrap();
    let path = file.path().to_str().unwrap();
    let out = preduals(&["semigroup-theta", "--config", path, "--trials", "20"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    let out = preduals(&["limit-sim", "--config", path, "--cells", "50"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    assert_eq!(statuses(&out).iter().filter(|(n, _)| n == "limit-predict").count(), 8);
}

#[test]
fn suite_aggregates_every_module() {
    let out = preduals(&["suite", "--config", "default"]);
    let st = statuses(&out);
    let (last, status) = st.last().unwrap();
    assert_eq!(last, "suite");
    for name in ["x0-identities", "extension", "power-table", "additive-sparseness", "theta-homomorphism",
        "theta-involution", "limit-predict", "shrink-witness", "witness-chain"] {
        assert!(st.iter().any(|(n, _)| n == name), "missing {name}");
    }
    let failed: Vec<&str> = st.iter().filter(|(_, s)| s == "fail").map(|(n, _)| n.as_str()).collect();
    // The strict-decrease demand on the Newman sup norms does not hold past the onset.
    assert_eq!(failed, vec!["newman-decay", "suite"]);
    assert_eq!(status, "fail");
    assert_eq!(out.status.code(), Some(1));
}
