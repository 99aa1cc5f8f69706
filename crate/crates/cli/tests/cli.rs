//! End-to-end tests of the stabctx binary: exit codes, file formats, and
//! run-to-run determinism.

use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_stabctx"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).to_string()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).to_string()
}

#[test]
fn graph_dimacs_qubit() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&[
        "graph",
        "--p",
        "2",
        "--facet",
        "0",
        "--format",
        "dimacs",
        "--output",
        dir.path().to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let dimacs = std::fs::read_to_string(dir.path().join("graph_p2_facet0.dimacs")).unwrap();
    assert!(dimacs.starts_with("p edge 30 "));
    let sidecar = dir.path().join("graph_p2_facet0.partition.json");
    assert!(sidecar.exists());
    let classes: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(sidecar).unwrap()).unwrap();
    assert_eq!(classes["classes"].as_array().unwrap().len(), 9);
}

#[test]
fn graph_rejects_composite_p() {
    let out = run(&["graph", "--p", "4", "--facet", "0"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("prime"));
}

#[test]
fn graph_backend_both_agrees_on_qutrit() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&[
        "graph",
        "--p",
        "3",
        "--facet",
        "0",
        "--backend",
        "both",
        "--format",
        "json",
        "--output",
        dir.path().to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = std::fs::read_to_string(dir.path().join("graph_p3_facet0.json")).unwrap();
    let doc: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(doc["vertex_count"], 240);
    assert_eq!(doc["partition"].as_array().unwrap().len(), 28);
}

#[test]
fn graph_output_is_deterministic() {
    let d1 = tempfile::tempdir().unwrap();
    let d2 = tempfile::tempdir().unwrap();
    for d in [&d1, &d2] {
        let out = run(&[
            "graph",
            "--p",
            "2",
            "--facet",
            "all",
            "--output",
            d.path().to_str().unwrap(),
        ]);
        assert!(out.status.success());
    }
    for i in 0..8 {
        let name = format!("graph_p2_facet{i}.dimacs");
        let a = std::fs::read(d1.path().join(&name)).unwrap();
        let b = std::fs::read(d2.path().join(&name)).unwrap();
        assert_eq!(a, b, "{name} differs between runs");
    }
}

#[test]
fn alpha_qubit_all_facets() {
    let out = run(&["alpha", "--p", "2", "--facet", "all"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let doc: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let facets = doc["facets"].as_array().unwrap();
    assert_eq!(facets.len(), 8);
    for f in facets {
        assert_eq!(f["alpha"], 8);
        assert_eq!(f["exact"], true);
        assert_eq!(f["vertices"], 30);
    }
}

#[test]
fn alpha_qutrit_certificate() {
    let out = run(&["alpha", "--p", "3", "--facet", "0"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let doc: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let f = &doc["facets"][0];
    assert_eq!(f["alpha"], 27);
    let cert = &f["certificate"];
    assert_eq!(cert["clique_cover_upper"], 28);
    assert_eq!(cert["resolved"], true);
    assert!((cert["quantum_value_lower"].as_f64().unwrap() - 28.0).abs() < 1e-8);
}

#[test]
fn alpha_solves_external_dimacs_with_partition() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&[
        "graph",
        "--p",
        "2",
        "--facet",
        "0",
        "--output",
        dir.path().to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let g = dir.path().join("graph_p2_facet0.dimacs");
    let p = dir.path().join("graph_p2_facet0.partition.json");
    let out = run(&[
        "alpha",
        "--graph",
        g.to_str().unwrap(),
        "--partition",
        p.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let doc: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(doc["alpha"], 8);
    assert_eq!(doc["clique_cover_upper"], 9);
}

#[test]
fn verify_p2_passes_and_seed_does_not_change_verdicts() {
    let a = run(&["verify", "--p", "2", "--seed", "1"]);
    assert_eq!(a.status.code(), Some(0), "{}", stderr(&a));
    let b = run(&["verify", "--p", "2", "--seed", "999"]);
    assert_eq!(b.status.code(), Some(0));
    let verdicts = |o: &Output| {
        stdout(o)
            .lines()
            .map(|l| l.split('—').next().unwrap_or("").trim().to_string())
            .collect::<Vec<_>>()
    };
    assert_eq!(verdicts(&a), verdicts(&b));
    assert!(stdout(&a).lines().all(|l| l.contains("PASS")));
}

#[test]
fn classify_strange_is_contextual() {
    let out = run(&["classify", "--p", "3", "--state", "strange"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let doc: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(doc["class"], "contextual");
    assert!((doc["min_value"].as_f64().unwrap() + 1.0).abs() < 1e-9);
}

#[test]
fn classify_mixed_qubit_is_stabilizer() {
    let out = run(&["classify", "--p", "2", "--state", "mixed"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let doc: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(doc["class"], "stab");
}

#[test]
fn classify_rejects_malformed_state() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(&path, "{\"not\": \"a matrix\"}").unwrap();
    let out = run(&["classify", "--p", "3", "--state", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn classify_accepts_custom_matrix() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("mixed.json");
    // I/2 as a row-major [re, im] matrix
    std::fs::write(&path, "[[[0.5,0],[0,0]],[[0,0],[0.5,0]]]").unwrap();
    let out = run(&["classify", "--p", "2", "--state", path.to_str().unwrap()]);
    assert!(out.status.success(), "{}", stderr(&out));
    let doc: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(doc["class"], "stab");
}

#[test]
fn slice_csv_has_all_regions() {
    let out = run(&["slice", "--p", "3", "--grid", "41"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let csv = stdout(&out);
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), "s,t,class,min_facet,min_eig");
    assert_eq!(csv.lines().count(), 1 + 41 * 41);
    for token in [",stab,", ",bound,", ",contextual,", ",nonstate,"] {
        assert!(csv.contains(token), "missing class {token}");
    }
}

#[test]
fn dump_ops_facets() {
    let out = run(&["dump-ops", "--p", "2", "--kind", "facets"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let doc: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let items = doc["items"].as_array().unwrap();
    assert_eq!(items.len(), 8);
    // row-major [re, im] pairs
    let m = items[0]["matrix"].as_array().unwrap();
    assert_eq!(m.len(), 2);
    assert_eq!(m[0].as_array().unwrap()[0].as_array().unwrap().len(), 2);
}

#[test]
fn dump_ops_witness_jsonl() {
    let out = run(&["dump-ops", "--p", "2", "--kind", "witness", "--facet", "0"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 30);
    let first: serde_json::Value = serde_json::from_str(lines[0]).unwrap();
    assert_eq!(first["kind"], "sep");
    let last: serde_json::Value = serde_json::from_str(lines[29]).unwrap();
    assert_eq!(last["kind"], "ent");
}

#[test]
fn config_file_is_overridden_by_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.conf");
    std::fs::write(&cfg, "p=3\nstate=mixed\n").unwrap();
    // config alone: p = 3
    let out = run(&["classify", "--config", cfg.to_str().unwrap()]);
    assert!(out.status.success(), "{}", stderr(&out));
    let doc: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(doc["p"], 3);
    // flag wins over config
    let out = run(&["classify", "--config", cfg.to_str().unwrap(), "--p", "2"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let doc: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(doc["p"], 2);
}

#[test]
fn config_rejects_unknown_keys() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.conf");
    std::fs::write(&cfg, "prime=3\n").unwrap();
    let out = run(&["classify", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn alpha_timeout_zero_means_no_limit() {
    let out = bin()
        .args(["alpha", "--p", "3", "--facet", "0", "--timeout-secs", "0"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let doc: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(doc["facets"][0]["exact"], true);
}

#[test]
fn facet_out_of_range_is_usage_error() {
    let out = run(&["alpha", "--p", "2", "--facet", "8"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("out of range"));
}
