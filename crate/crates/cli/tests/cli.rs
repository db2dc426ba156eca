// SPDX-License-Identifier: Apache-2.0

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use gindex_core::divergence::{dag_from_text, delta};
use serde_json::{json, Value};

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn gindex(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gindex"))
        .args(args)
        .env_remove("GINDEX_CLIQUE_BUDGET")
        .output()
        .expect("binary runs")
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("json on stdout")
}

#[test]
fn score_identical_programs() {
    let r = fixture("ref.json");
    let out = gindex(&["score", path(&r), path(&r)]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert_eq!(v["delta"], json!(0.0));
    assert_eq!(v["theta"], json!(1.0));
}

#[test]
fn score_malformed_generated_program() {
    let out = gindex(&["score", path(&fixture("ref.json")), path(&fixture("malformed.json"))]);
    assert_eq!(out.status.code(), Some(2));
    let v = stdout_json(&out);
    assert_eq!(v["delta"], json!(1.0));
    assert_eq!(v["errors"]["syntax"], json!(1));
}

#[test]
fn score_distinct_programs_matches_library() {
    let (r, g) = (fixture("ref.json"), fixture("gen.json"));
    let out = gindex(&["score", path(&r), path(&g)]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    let lib = delta(
        &dag_from_text(&std::fs::read_to_string(&r).unwrap()).unwrap(),
        &dag_from_text(&std::fs::read_to_string(&g).unwrap()).unwrap(),
    );
    let cli = v["delta"].as_f64().unwrap();
    assert!(cli > 0.0 && cli < 1.0);
    assert_eq!(cli, lib.delta);
}

#[test]
fn score_missing_file_is_exit_one() {
    let out = gindex(&["score", path(&fixture("ref.json")), "/nonexistent/gen.json"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("cannot read"));
}

#[test]
fn score_csv_format() {
    let r = fixture("ref.json");
    let out = gindex(&["score", path(&r), path(&fixture("gen.json")), "--format", "csv"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("delta,theta,exact,syntax_errors,function_errors,dataflow_errors\n"));
    assert_eq!(text.lines().count(), 2);
}

#[test]
fn clique_budget_from_environment() {
    let (r, g) = (fixture("ref.json"), fixture("gen.json"));
    let run = |budget: Option<&str>| {
        let mut c = Command::new(env!("CARGO_BIN_EXE_gindex"));
        c.args(["score", path(&r), path(&g)]);
        match budget {
            Some(b) => c.env("GINDEX_CLIQUE_BUDGET", b),
            None => c.env_remove("GINDEX_CLIQUE_BUDGET"),
        };
        serde_json::from_slice::<Value>(&c.output().unwrap().stdout).unwrap()
    };
    assert_eq!(run(None)["exact"], json!(true));
    assert_eq!(run(Some("1"))["exact"], json!(false));
    let bad = Command::new(env!("CARGO_BIN_EXE_gindex"))
        .args(["score", path(&r), path(&g)])
        .env("GINDEX_CLIQUE_BUDGET", "lots")
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(1));
}

#[test]
fn gindex_single_task_fixture() {
    let dir = tempfile::tempdir().unwrap();
    let out = gindex(&["gindex", path(&fixture("manifest_single.json")), "--out", path(dir.path())]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(
        String::from_utf8(out.stdout).unwrap(),
        "g-index=285.267236 tasks=1 mean_theta=1.000000\n"
    );
    let report: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("gindex_report.json")).unwrap()).unwrap();
    assert!((report["g_index"].as_f64().unwrap() - 285.267).abs() < 1e-2);
    let csv = std::fs::read_to_string(dir.path().join("gindex_report.csv")).unwrap();
    assert_eq!(csv.lines().count(), 2);
}

#[test]
fn gindex_reports_are_byte_identical() {
    let manifest = fixture("manifest_mixed.json");
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    assert!(gindex(&["gindex", path(&manifest), "--out", path(a.path())]).status.success());
    assert!(gindex(&["gindex", path(&manifest), "--out", path(b.path()), "--jobs", "1"]).status.success());
    for name in ["gindex_report.json", "gindex_report.csv"] {
        assert_eq!(
            std::fs::read(a.path().join(name)).unwrap(),
            std::fs::read(b.path().join(name)).unwrap(),
            "{name}"
        );
    }
}

#[test]
fn gindex_empty_test_set() {
    let out = gindex(&["gindex", path(&fixture("manifest_empty.json"))]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("empty test set"));
}

#[test]
fn gindex_schema_error_names_field() {
    let out = gindex(&["gindex", path(&fixture("manifest_bad_field.json"))]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("curriculum.domains[0].sample_count"));
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(gindex(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(gindex(&["score"]).status.code(), Some(1));
    assert_eq!(gindex(&["--help"]).status.code(), Some(0));
}

#[test]
fn simulate_samples_is_decreasing_csv() {
    let out = gindex(&["simulate", "--sweep", "samples", "--seed", "3"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("sweep_value,g_index,band_low,band_high"));
    let values: Vec<f64> = lines.map(|l| l.split(',').nth(1).unwrap().parse().unwrap()).collect();
    assert_eq!(values.len(), 50);
    assert!(values.windows(2).all(|w| w[1] < w[0]));
    let again = gindex(&["simulate", "--sweep", "samples", "--seed", "3"]);
    assert_eq!(again.stdout, text.as_bytes());
}

#[test]
fn flatland_render_empty_program() {
    let out = gindex(&["flatland", "render", path(&fixture("empty_flatland.json"))]);
    assert!(out.status.success());
    let header = b"P4\n128 128\n";
    assert_eq!(&out.stdout[..header.len()], header);
    assert_eq!(out.stdout.len(), header.len() + 128 * 16);
    assert!(out.stdout[header.len()..].iter().all(|&b| b == 0));
}

#[test]
fn flatland_score_and_augment() {
    let sq = fixture("square.json");
    let out = gindex(&["flatland", "score", path(&sq), path(&sq)]);
    assert_eq!(stdout_json(&out)["delta"], json!(0.0));
    let out = gindex(&["flatland", "augment", path(&sq), "--count", "5", "--seed", "11"]);
    assert!(out.status.success());
    let samples = stdout_json(&out);
    assert_eq!(samples.as_array().unwrap().len(), 5);
    assert!(samples.as_array().unwrap().iter().all(|s| s["delta"].as_f64().unwrap() <= 0.3));
}

#[test]
fn flatland_gen_writes_dataset() {
    let dir = tempfile::tempdir().unwrap();
    let out = gindex(&["flatland", "gen", "--samples", "4", "--out", path(dir.path())]);
    assert!(out.status.success());
    let manifest: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["seed"], json!(0));
    assert_eq!(manifest["samples"].as_array().unwrap().len(), 4);
    assert!(dir.path().join("sample_00003.pbm").exists());
}

/// Eight-node chain of `prefix`-typed nodes with four attributes each;
/// `variant` changes one attribute of node `variant`.
fn chain_document(prefix: &str, variant: usize) -> String {
    let nodes: Vec<Value> = (0..8)
        .map(|k| {
            let mut node = json!({
                "id": format!("n{k}"),
                "type": format!("{prefix}{k}"),
                "a": 1, "b": "x", "c": true, "d": k,
                "wires": if k < 7 { json!([[format!("n{}", k + 1)]]) } else { json!([]) },
            });
            if k == variant {
                node["a"] = json!(2);
            }
            node
        })
        .collect();
    serde_json::to_string(&nodes).unwrap()
}

#[test]
fn cluster_two_groups() {
    let dir = tempfile::tempdir().unwrap();
    let mut files = Vec::new();
    for (prefix, variants) in [("alpha", [0, 3, 5]), ("beta", [1, 2, 7])] {
        for v in variants {
            let p = dir.path().join(format!("{prefix}-{v}.json"));
            std::fs::write(&p, chain_document(prefix, v)).unwrap();
            files.push(p);
        }
    }
    let mut args = vec!["cluster"];
    args.extend(files.iter().map(|p| path(p)));
    let out = gindex(&args);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v = stdout_json(&out);
    let clusters = v["clusters"].as_array().unwrap();
    assert_eq!(clusters.len(), 2);
    assert_eq!(clusters[0]["members"], json!([0, 1, 2]));
    assert_eq!(clusters[1]["members"], json!([3, 4, 5]));
}

#[test]
fn omega_against_curriculum() {
    let out = gindex(&["omega", "--curriculum", path(&fixture("curriculum.json")), path(&fixture("ref.json"))]);
    assert!(out.status.success());
    let v = stdout_json(&out);
    assert_eq!(v["omega"], json!(0.0));
    assert_eq!(v["domains"][0]["id"], json!("clock"));
}
