use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_flatorbit")).args(args).env_remove("FLATORBIT_SEED").output().expect("binary runs")
}

fn data(name: &str) -> String {
    format!("{}/tests/data/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn text(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn validate_bundled_passes() {
    for name in ["ex57", "ex58", "heisenberg_m1", "semidirect_m1", "abelian"] {
        let out = run(&["validate", &format!("bundled:{name}")]);
        assert_eq!(out.status.code(), Some(0), "{name}: {}", text(&out));
    }
    let path = format!("{}/data/ex57.json", env!("CARGO_MANIFEST_DIR"));
    assert_eq!(run(&["validate", &path]).status.code(), Some(0));
}

#[test]
fn malformed_json_exits_2() {
    let out = run(&["validate", &data("malformed.json")]);
    assert_eq!(out.status.code(), Some(2));
    assert!(text(&out).contains("malformed JSON"));
    assert_eq!(run(&["validate", "/nonexistent/file.json"]).status.code(), Some(2));
}

#[test]
fn non_jacobi_lists_failing_triple() {
    let out = run(&["validate", &data("non_jacobi.json"), "--json"]);
    assert_eq!(out.status.code(), Some(1));
    let report = json(&out);
    let jacobi = report["checks"].as_array().unwrap().iter().find(|c| c["name"] == "jacobi").unwrap();
    assert_eq!(jacobi["status"], "fail");
    assert_eq!(jacobi["details"][0], serde_json::json!(["X1", "X2", "X3"]));
}

#[test]
fn non_flat_orbit_exits_3() {
    assert_eq!(run(&["invariant-ops", &data("not_flat.json")]).status.code(), Some(3));
    let out = run(&["orbit-info", &data("not_flat.json")]);
    assert_eq!(out.status.code(), Some(3));
    assert_eq!(json(&out)["checks"][0]["details"]["flat"], false);
}

#[test]
fn degree_cap_exits_4() {
    let out = run(&["invariant-ops", "bundled:ex58", "--max-degree", "1"]);
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn orbit_info_reports_flat_orbit() {
    let out = run(&["orbit-info", "bundled:ex57"]);
    assert_eq!(out.status.code(), Some(0));
    let d = &json(&out)["checks"][0]["details"];
    assert_eq!(d["flat"], true);
    assert_eq!(d["rank"], 4);
    assert_eq!(d["chi"].as_array().unwrap().len(), 4);
}

fn operator_texts(report: &Value, check: &str) -> Vec<String> {
    let c = report["checks"].as_array().unwrap().iter().find(|c| c["name"] == check).unwrap();
    c["details"]["operators"].as_array().unwrap().iter().map(|o| o["text"].as_str().unwrap().to_string()).collect()
}

#[test]
fn invariant_ops_goldens() {
    let out = run(&["invariant-ops", "bundled:ex57", "--method", "both", "--json"]);
    assert_eq!(out.status.code(), Some(0), "{}", text(&out));
    let r = json(&out);
    assert_eq!(operator_texts(&r, "commutant"), ["1", "∂1 + η1·∂3 − η2·∂4", "∂2", "∂3", "∂4"]);
    let names: Vec<_> = r["checks"].as_array().unwrap().iter().map(|c| c["name"].as_str().unwrap().to_string()).collect();
    assert_eq!(names, ["commutant", "pushforward", "span_equal", "golden"]);

    let r = json(&run(&["invariant-ops", "bundled:ex58", "--json"]));
    let ops = operator_texts(&r, "commutant");
    assert!(ops.contains(&"∂1 + η1·∂2 + 1/2·η1^2·∂3 + (η3 − η1·η2 + 1/3·η1^3)·∂4".to_string()), "{ops:?}");

    let r = json(&run(&["invariant-ops", "bundled:heisenberg_m1", "--json"]));
    assert_eq!(operator_texts(&r, "commutant"), ["1", "∂1", "∂2"]);
    let r = json(&run(&["invariant-ops", "bundled:abelian", "--json"]));
    assert_eq!(operator_texts(&r, "commutant"), ["1"]);
}

#[test]
fn coefficient_json() {
    let r = json(&run(&["invariant-ops", "bundled:ex57", "--json"]));
    let ops = r["checks"][0]["details"]["operators"].as_array().unwrap();
    let first = ops.iter().find(|o| o["text"] == "∂1 + η1·∂3 − η2·∂4").unwrap();
    assert_eq!(first["coeffs"], serde_json::json!({ "1": "1", "3": "η1", "4": "−η2" }));
}

#[test]
fn golden_mismatch_fails() {
    let dir = std::env::temp_dir().join(format!("flatorbit-golden-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("ex57_wrong.json");
    let src = flatorbit::io::bundled("ex57").unwrap().replace("∂1 + η1·∂3 − η2·∂4", "∂1 + η1·∂3 + η2·∂4");
    std::fs::write(&path, src).unwrap();
    let out = run(&["invariant-ops", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(text(&out).contains("FAIL  golden"));
}

#[test]
fn fixed_degree_below_need_misses_operators() {
    let r = json(&run(&["invariant-ops", "bundled:ex58", "--degree", "1", "--json"]));
    assert!(r["checks"][0]["details"]["dim"].as_u64().unwrap() < 5);
    assert_eq!(run(&["invariant-ops", "bundled:ex58", "--degree", "x"]).status.code(), Some(2));
}

#[test]
fn bch_product() {
    let out = run(&["bch", "bundled:heisenberg_m1", "--x", "0,1,0", "--y", "0,0,1", "--json"]);
    assert_eq!(out.status.code(), Some(0));
    // [Y1, X1] = Z, so Y1 · X1 = Y1 + X1 + Z/2
    assert_eq!(json(&out)["checks"][0]["details"]["product"], serde_json::json!(["1/2", "1", "1"]));
    assert_eq!(run(&["bch", "bundled:heisenberg_m1", "--x", "0,1", "--y", "0,0,1"]).status.code(), Some(2));
}

#[test]
fn heisenberg_checks() {
    for check in ["lemma61", "prop62", "cor63"] {
        let out = run(&["heisenberg", "--m", "1", "--check", check]);
        assert_eq!(out.status.code(), Some(0), "{check}: {}", text(&out));
        assert_eq!(json(&out)["checks"][0]["status"], "pass");
    }
    let out = run(&["heisenberg", "--m", "2", "--check", "cor63"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["checks"][0]["details"]["generators"].as_array().unwrap().len(), 5);
}

#[test]
fn weyl_check_report_shape() {
    let out = run(&["weyl-check", "--n", "64", "--suite", "pairing"]);
    assert_eq!(out.status.code(), Some(0), "{}", text(&out));
    let r = json(&out);
    for c in r["checks"].as_array().unwrap() {
        let d = &c["details"];
        assert!(d["test"].is_string() && d["value"].is_number() && d["tolerance"].is_number() && d["pass"].is_boolean());
    }
    assert_eq!(run(&["weyl-check", "--n", "100", "--suite", "pairing"]).status.code(), Some(2));
}

#[test]
fn suite_symbolic_passes_and_is_deterministic() {
    let a = run(&["suite", "--no-numeric", "--json"]);
    assert_eq!(a.status.code(), Some(0), "{}", text(&a));
    let b = run(&["suite", "--no-numeric", "--json"]);
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(json(&a)["checks"].as_array().unwrap().len(), 9);
}

#[test]
fn reports_are_byte_identical() {
    for args in [&["orbit-info", "bundled:semidirect_m1"][..], &["invariant-ops", "bundled:ex58", "--method", "both", "--json"], &["weyl-check", "--n", "64", "--suite", "pairing"]] {
        assert_eq!(run(args).stdout, run(args).stdout, "{args:?}");
    }
}

#[test]
fn bad_usage_exits_2() {
    assert_eq!(run(&["heisenberg", "--check", "nope"]).status.code(), Some(2));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
}
