use std::path::Path;

use serde_json::Value;
use uhyp_cli::{run, EXIT_OK, EXIT_USAGE};

fn uhyp(args: &[&str]) -> i32 {
    let mut full = vec!["uhyp", "--quiet"];
    full.extend_from_slice(args);
    run(full)
}

fn read_json(p: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap()
}

#[test]
fn usage_errors() {
    assert_eq!(uhyp(&["detect", "--bogus"]), EXIT_USAGE);
    assert_eq!(uhyp(&["detect", "--system", "B3"]), EXIT_USAGE);
    assert_eq!(uhyp(&["detect", "--system", "B3", "--fermat", "--d", "4", "--m", "3"]), EXIT_USAGE);
    assert_eq!(uhyp(&["detect", "--system", "Q3", "--d", "4", "--m", "3"]), EXIT_USAGE);
    assert_eq!(uhyp(&["detect", "--system", "B3", "--d", "2", "--m", "3"]), EXIT_USAGE);
    assert_eq!(uhyp(&["reproduce", "nope"]), EXIT_USAGE);
    assert_eq!(uhyp(&["--version"]), EXIT_OK);
}

#[test]
fn a4_search_is_empty() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("a4.json");
    let csv_path = dir.path().join("a4.csv");
    let code = uhyp(&[
        "search",
        "--system",
        "A",
        "--rank",
        "4",
        "--out",
        out.to_str().unwrap(),
        "--csv",
        csv_path.to_str().unwrap(),
        "--certify",
    ]);
    assert_eq!(code, EXIT_OK);
    let report = read_json(&out);
    let cells = report["result"]["cells"].as_array().unwrap();
    assert_eq!(cells.len(), 15);
    assert!(cells.iter().all(|c| c["unexpected"] == false));
    assert!(cells.iter().all(|c| c.get("runtime_ms").is_none()));
    let rows = csv::Reader::from_path(&csv_path).unwrap().records().count();
    assert_eq!(rows, 15);
}

#[test]
fn detect_reports_are_byte_stable() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let mut runs = Vec::new();
    for _ in 0..2 {
        let code = uhyp(&["detect", "--system", "D4", "--d", "3", "--m", "3", "--form", "--out", a.to_str().unwrap()]);
        assert_eq!(code, EXIT_OK);
        runs.push(std::fs::read(&a).unwrap());
    }
    assert_eq!(runs[0], runs[1]);
    let r = read_json(&a);
    assert_eq!(r["result"]["unexpected"], true);
    assert_eq!(r["result"]["certificate"], "certified");
    assert!(r["result"]["form"].as_str().unwrap().contains("x3"));
}

#[test]
fn point_files_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    for (name, field) in [("h3.json", "q"), ("h3.csv", "sqrt5")] {
        let path = dir.path().join(name);
        assert_eq!(uhyp(&["points", "--system", "H3", "--out", path.to_str().unwrap()]), EXIT_OK);
        let out = dir.path().join(format!("{name}.report.json"));
        let code = uhyp(&[
            "detect",
            "--points",
            path.to_str().unwrap(),
            "--field",
            field,
            "--d",
            "7",
            "--m",
            "6",
            "--out",
            out.to_str().unwrap(),
        ]);
        assert_eq!(code, EXIT_OK);
        let r = read_json(&out);
        assert_eq!(r["result"]["adim"], 2);
        assert_eq!(r["result"]["edim"], 0);
    }
}

#[test]
fn certify_downgrade_exit() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("b5.json");
    let args = ["detect", "--system", "B5", "--d", "4", "--m", "4", "--max-unknowns", "10", "--out"];
    let mut with = args.to_vec();
    with.push(out.to_str().unwrap());
    assert_eq!(uhyp(&with), EXIT_OK);
    assert_eq!(read_json(&out)["result"]["certificate"], "probabilistic");
    with.push("--certify");
    assert_eq!(uhyp(&with), uhyp_cli::EXIT_DOWNGRADE);
}

#[test]
fn reproduce_h3() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("h3.json");
    let store = dir.path().join("store.jsonl");
    let args = ["reproduce", "h3", "--store", store.to_str().unwrap(), "--out", out.to_str().unwrap()];
    assert_eq!(uhyp(&args), EXIT_OK);
    let first = std::fs::read(&out).unwrap();
    assert_eq!(read_json(&out)["result"][0]["matches"], true);
    // Second run is served from the store.
    assert_eq!(uhyp(&args), EXIT_OK);
    assert_eq!(first, std::fs::read(&out).unwrap());
}

#[test]
fn duality_and_wlp() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("dual.json");
    let code = uhyp(&[
        "duality",
        "--system",
        "B3",
        "--d",
        "4",
        "--m",
        "3",
        "--point",
        "-6,-5,4",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code, EXIT_OK);
    let r = read_json(&out);
    assert_eq!(r["result"]["tangent_cone_match"], true);
    assert_eq!(r["result"]["samples"].as_array().unwrap().len(), 4);
    assert_eq!(r["result"]["samples"][0]["ratio"], "-1");

    let out = dir.path().join("wlp.json");
    let code = uhyp(&["wlp", "--twisted-cubic", "31", "--k", "4", "--check-equivalence", "--out", out.to_str().unwrap()]);
    assert_eq!(code, EXIT_OK);
    let r = read_json(&out);
    assert_eq!(r["result"]["verdict"]["fails"], true);
    assert_eq!(r["result"]["equivalence"]["unexpected"], true);
}
