use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use leibnizlab::catalog::{build, Family, FamilySpec};
use leibnizlab::scalar::rat;
use leibnizlab::Algebra;
use serde_json::Value;
use tempfile::TempDir;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_leibnizlab"))
        .args(args)
        .env_remove("LEIBNIZLAB_SEED")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn path(dir: &TempDir, name: &str) -> String {
    dir.path().join(name).to_str().unwrap().to_owned()
}

fn write(dir: &TempDir, name: &str, text: &str) -> String {
    let p = path(dir, name);
    fs::write(&p, text).unwrap();
    p
}

fn matrix_json(rows: &[Vec<i64>]) -> String {
    let entries: Vec<Vec<String>> = rows.iter().map(|r| r.iter().map(|v| v.to_string()).collect()).collect();
    serde_json::json!({ "rows": rows.len(), "cols": rows[0].len(), "entries": entries }).to_string()
}

fn identity_plus(n: usize, r: usize, c: usize) -> Vec<Vec<i64>> {
    (0..n).map(|i| (0..n).map(|j| i64::from(i == j) + i64::from((i, j) == (r, c))).collect()).collect()
}

#[test]
fn catalog_matches_library_and_is_stable() {
    let dir = TempDir::new().unwrap();
    let out = path(&dir, "a.json");
    assert!(run(&["catalog", "--family", "mu2", "--n", "8", "--k", "2", "--out", &out]).status.success());
    let first = fs::read_to_string(&out).unwrap();
    let expected = build(&FamilySpec::new(Family::Mu2, 8, 2).unwrap()).to_json_string();
    assert_eq!(first, expected);
    let again = run(&["catalog", "--family", "mu2", "--n", "8", "--k", "2"]);
    assert_eq!(stdout(&again), first);
}

#[test]
fn catalog_rejects_inadmissible_parameters() {
    let o = run(&["catalog", "--family", "mu1", "--n", "7", "--k", "2"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("inadmissible"));
    let o = run(&["catalog", "--family", "mu3", "--n", "6", "--k", "1"]);
    assert!(o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("warning"));
}

#[test]
fn analyze_reports_family_invariants() {
    let dir = TempDir::new().unwrap();
    let a = path(&dir, "a.json");
    run(&["catalog", "--family", "mu3", "--n", "7", "--k", "1", "--out", &a]);
    let o = run(&["analyze", "--algebra", &a]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.contains("lower central series: [7, 4, 2, 1, 0], index 5"), "{text}");
    assert!(text.contains("characteristic sequence: (4,1,1,1)"), "{text}");
    assert!(text.contains("graded dims: [3, 2, 1, 1]"), "{text}");
    assert!(text.contains("non-Lie: [e1, e1] gives e3"), "{text}");
    assert!(text.contains("family: mu3(n=7, k=1), checks ok"), "{text}");
}

#[test]
fn analyze_lists_leibniz_violations() {
    let mut bad = Algebra::abelian(3);
    bad.set_product(0, 1, &[(2, rat(1))]).unwrap();
    bad.set_product(2, 0, &[(0, rat(1))]).unwrap();
    let expected = bad.leibniz_violations().len();
    assert!(expected > 0);
    let dir = TempDir::new().unwrap();
    let a = write(&dir, "bad.json", &bad.to_json_string());
    let o = run(&["analyze", "--algebra", &a]);
    assert_eq!(o.status.code(), Some(2));
    let text = stdout(&o);
    assert!(text.contains(&format!("leibniz: {expected} violating triples")), "{text}");
    assert_eq!(text.lines().filter(|l| l.starts_with("  (")).count(), expected);
}

#[test]
fn witness_prints_the_example() {
    let o = run(&["witness", "--family", "mu1", "--n", "6", "--k", "1"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.contains("0 1 0 1 0 0"), "{text}");
    assert!(text.contains("not multiplicative at (e1, e1)"), "{text}");
    assert!(text.contains("probes: 200/200 certified"), "{text}");
    assert!(text.contains("local but not global: true"), "{text}");
    assert_eq!(run(&["witness", "--family", "mu2", "--n", "6", "--k", "1"]).status.code(), Some(1));
}

#[test]
fn aut_build_from_params() {
    let dir = TempDir::new().unwrap();
    let params = serde_json::json!({
        "family": "mu2",
        "a": ["2", "1", "-1", "3"],
        "b": ["1", "5"],
        "c": ["7"],
        "d": [["3"]],
        "d2": [["-2"]]
    });
    let p = write(&dir, "p.json", &params.to_string());
    let out = path(&dir, "m.json");
    let o = run(&["aut", "build", "--family", "mu2", "--n", "6", "--k", "1", "--params", &p, "--check", "--out", &out]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("check: automorphism"));
    let m: Value = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(m["entries"][3], serde_json::json!(["3", "-3", "9", "54", "7", "0"]));

    let degenerate = serde_json::json!({
        "family": "mu1", "a": ["0", "0", "0", "0"], "b": ["0", "0"], "c": ["0"], "d": [["1"]], "d2": [["1"]]
    });
    let p = write(&dir, "zero.json", &degenerate.to_string());
    let o = run(&["aut", "build", "--family", "mu1", "--n", "6", "--k", "1", "--params", &p]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("a_1"));
}

#[test]
fn aut_audit_reports_counts() {
    let o = run(&["aut", "audit", "--family", "mu3", "--n", "7", "--k", "1"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.contains("parameters:       12"));
    assert!(text.contains("derivation dim:   12"));
    assert!(text.contains("matches closed form: true"));
}

#[test]
fn localaut_pattern_json() {
    let dir = TempDir::new().unwrap();
    let out = path(&dir, "p.json");
    assert!(run(&["localaut", "pattern", "--family", "mu1", "--n", "8", "--k", "1", "--out", &out]).status.success());
    let p: Value = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(p["size"], 8);
    // Lower triangle of the 6×6 e-block, two f-stripes, three 1×1 blocks.
    assert_eq!(p["free"].as_array().unwrap().len(), 21 + 4 + 3);
    assert!(p["free"].as_array().unwrap().contains(&serde_json::json!([1, 1])));
    assert_eq!(p["ties"].as_array().unwrap().len(), 0);
}

#[test]
fn localaut_certify_round_trip() {
    let dir = TempDir::new().unwrap();
    let a = path(&dir, "a.json");
    run(&["catalog", "--family", "mu1", "--n", "6", "--k", "1", "--out", &a]);
    let good = write(&dir, "good.json", &matrix_json(&identity_plus(6, 3, 1)));
    let report = path(&dir, "r.json");
    let o = run(&["localaut", "certify", "--algebra", &a, "--delta", &good, "--seed", "7", "--report", &report]);
    assert!(o.status.success(), "{}", stdout(&o));
    let r: Value = serde_json::from_str(&fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(r["seed"], 7);
    assert_eq!(r["certified"], r["probes"]);
    let outcomes = r["outcomes"].as_array().unwrap();
    assert!(outcomes.len() >= 200);
    assert!(outcomes.iter().all(|o| o["case"].is_string()));

    // e1 row of the e2 column is off the pattern; the basis probe e2 fails.
    let bad = write(&dir, "bad.json", &matrix_json(&identity_plus(6, 0, 1)));
    let probes = write(&dir, "probes.json", r#"[["0","1","0","0","0","0"],["1","0","0","0","0","0"]]"#);
    let o = run(&["localaut", "certify", "--algebra", &a, "--delta", &bad, "--probes", &probes, "--report", &report]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stdout(&o).contains("1/2 probes certified"), "{}", stdout(&o));
    let r: Value = serde_json::from_str(&fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(r["seed"], Value::Null);
    assert_eq!(r["outcomes"][0]["certified"], false);
}

#[test]
fn localaut_audit_csv() {
    let dir = TempDir::new().unwrap();
    let csv = path(&dir, "dims.csv");
    let o = run(&["localaut", "audit", "--grid", "nmax=9,kmax=2", "--csv", &csv]);
    assert!(o.status.success());
    let text = fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("family,n,k,free_count,closed_form,aut_params,matches,exceeds_aut"));
    assert_eq!(lines.next(), Some("mu1,6,1,17,17,9,true,true"));
    assert!(text.contains("mu2,6,1,17,17,8,true,true"));
    assert!(text.contains("mu3,7,1,20,20,12,true,true"));
    assert_eq!(run(&["localaut", "audit", "--grid", "nmax=9"]).status.code(), Some(1));
}

fn sweep_csv(dir: &Path, name: &str, extra: &[&str]) -> (Output, String) {
    let csv = dir.join(name);
    let mut args = vec!["sweep", "--nmax", "12", "--kmax", "2", "--csv", csv.to_str().unwrap()];
    args.extend_from_slice(extra);
    let o = run(&args);
    (o, fs::read_to_string(csv).unwrap_or_default())
}

#[test]
fn sweep_matches_golden_and_is_deterministic() {
    let dir = TempDir::new().unwrap();
    let (o, first) = sweep_csv(dir.path(), "a.csv", &[]);
    assert!(o.status.success(), "{}", stdout(&o));
    assert_eq!(first, include_str!("golden/sweep_n12_k2.csv"));
    let (_, second) = sweep_csv(dir.path(), "b.csv", &["--seed", "42"]);
    assert_eq!(first, second);
    let (o, strict) = sweep_csv(dir.path(), "c.csv", &["--strict-remarks"]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(strict, first);
    assert_eq!(stdout(&o).lines().filter(|l| l.starts_with("mismatch")).count(), 12);
}

#[test]
fn seed_comes_from_the_environment() {
    let dir = TempDir::new().unwrap();
    let a = path(&dir, "a.json");
    run(&["catalog", "--family", "mu1", "--n", "6", "--k", "1", "--out", &a]);
    let d = write(&dir, "d.json", &matrix_json(&identity_plus(6, 3, 1)));
    let report = path(&dir, "r.json");
    let o = Command::new(env!("CARGO_BIN_EXE_leibnizlab"))
        .args(["localaut", "certify", "--algebra", &a, "--delta", &d, "--report", &report])
        .env("LEIBNIZLAB_SEED", "99")
        .output()
        .unwrap();
    assert!(o.status.success());
    let r: Value = serde_json::from_str(&fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(r["seed"], 99);
}

#[test]
fn usage_errors() {
    assert_eq!(run(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(run(&["catalog", "--family", "mu4", "--n", "6", "--k", "1"]).status.code(), Some(1));
    assert_eq!(run(&["sweep", "--nmax", "x"]).status.code(), Some(1));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
    assert_eq!(run(&["--version"]).status.code(), Some(0));
    assert_eq!(run(&["analyze", "--algebra", "/nonexistent.json"]).status.code(), Some(1));
}
