use std::path::PathBuf;
use std::sync::Arc;

use serde_json::{json, Value};
use trilocal::cli::{run, EXIT_OK, EXIT_USAGE, EXIT_VIOLATION};
use trilocal::freemod::Matrix;
use trilocal::json::{matrix_to_json, triangle_to_json};
use trilocal::rings::Ring;
use trilocal::structure::{LocalStructure, TriangulationDescriptor};
use trilocal::triangulated::delta_triangle;

fn call(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("trilocal").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn call_json(args: &[&str]) -> (i32, Value) {
    let mut full = args.to_vec();
    full.extend(["--format", "json"]);
    let (code, out, err) = call(&full);
    let v = serde_json::from_str(&out).unwrap_or_else(|e| panic!("{e}: {out} {err}"));
    (code, v)
}

fn payload(name: &str, v: &Value) -> PathBuf {
    let path = std::env::temp_dir().join(format!("trilocal-cli-{}-{name}.json", std::process::id()));
    std::fs::write(&path, v.to_string()).unwrap();
    path
}

fn strip_timing(mut v: Value) -> Value {
    v.as_object_mut().unwrap().remove("timing_ms");
    v
}

#[test]
fn classify_equicharacteristic_prime_field_twist() {
    let (code, v) = call_json(&["classify", "--ring", "skewpoly(8; frob^1)"]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(v["schema"], "trilocal/1");
    assert_eq!(v["result"]["case"], "equicharacteristic");
    assert_eq!(v["result"]["admissible_r"], json!([1]));
    assert_eq!(v["result"]["triangulations"], 1);
}

#[test]
fn classes_of_three_triangulations() {
    let (code, v) = call_json(&["classes", "--ring", "skewpoly(2^6; frob^2)"]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(v["result"]["triangulations"], 3);
    assert_eq!(v["result"]["class_count"], 1);
    assert_eq!(v["result"]["classes"][0].as_array().unwrap().len(), 3);
}

#[test]
fn odd_witt_ring_has_no_triangulation() {
    let (code, v) = call_json(&["classify", "--ring", "w2(3)"]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(v["result"]["case"], "none");
    assert_eq!(v["result"]["triangulations"], 0);
    let failed = v["result"]["obstruction"]["failed"].as_array().unwrap();
    assert!(failed.contains(&json!("x=-x")));
    assert!(!v["result"]["obstruction"]["sign_witness"].is_null());
    let (_, v) = call_json(&["classes", "--ring", "w2(3)"]);
    assert_eq!(v["result"]["class_count"], 0);
}

#[test]
fn semisimple_counts_once() {
    let (_, v) = call_json(&["classes", "--ring", "gf(8)"]);
    assert_eq!(v["result"]["triangulations"], 1);
    assert_eq!(v["result"]["class_count"], 1);
}

#[test]
fn text_output_is_flat() {
    let (code, out, _) = call(&["count", "--ring", "w2(4)"]);
    assert_eq!(code, EXIT_OK);
    assert!(out.lines().any(|l| l == "result.triangulations: 3"), "{out}");
    assert!(out.lines().any(|l| l == "schema: trilocal/1"));
}

#[test]
fn reports_are_deterministic() {
    let args = ["axioms", "--ring", "w2(2)", "--samples", "15", "--seed", "9"];
    let (c1, a) = call_json(&args);
    let (c2, b) = call_json(&args);
    assert_eq!((c1, c2), (EXIT_OK, EXIT_OK));
    assert_eq!(strip_timing(a), strip_timing(b));
}

#[test]
fn mixed_class_fails_the_axioms() {
    let (code, v) = call_json(&[
        "axioms",
        "--ring",
        "w2(4)",
        "--r",
        "1",
        "--mixed-with",
        "2",
        "--samples",
        "30",
    ]);
    assert_eq!(code, EXIT_VIOLATION);
    assert!(v["result"]["violations"].as_u64().unwrap() > 0);
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(call(&["count", "--ring", "w2(4)", "--frobnicate"]).0, EXIT_USAGE);
    assert_eq!(call(&["count"]).0, EXIT_USAGE);
    assert_eq!(call(&["count", "--ring", "w2(0)"]).0, EXIT_USAGE);
    assert_eq!(
        call(&["distinguished", "--ring", "w2(4)", "--input", "/nonexistent/x.json"]).0,
        EXIT_USAGE
    );
    assert_eq!(call(&["count", "--ring", "w2(4)", "--r", "99"]).0, EXIT_OK);
    assert_eq!(call(&["axioms", "--ring", "w2(4)", "--r", "99"]).0, EXIT_USAGE);
}

fn delta_over(spec: &str, r: u32, n: usize) -> (Arc<Ring>, Value) {
    let ring = Ring::parse(spec).unwrap();
    let ls = LocalStructure::new(&ring).unwrap();
    let desc = TriangulationDescriptor::new(&ls, trilocal::scalars::FieldElem(r)).unwrap();
    let t = delta_triangle(&ls, &desc, n);
    (ring, triangle_to_json(&t))
}

#[test]
fn distinguished_and_fill_from_payloads() {
    let (ring, t) = delta_over("w2(4)", 1, 2);
    let path = payload("delta", &t);
    let (code, v) = call_json(&["distinguished", "--input", path.to_str().unwrap()]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(v["result"]["distinguished"], true);

    let id = matrix_to_json(&Matrix::identity(&ring, 2));
    let square = json!({ "ring": "w2(4)", "source": t, "target": t, "alpha": id, "beta": id });
    let path = payload("square", &square);
    let (code, v) = call_json(&["fill", "--input", path.to_str().unwrap()]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(v["result"]["filled"], true);
    assert_eq!(v["result"]["cone_membership"]["distinguished"], true);

    let (_, other) = delta_over("w2(4)", 2, 2);
    let square = json!({ "ring": "w2(4)", "source": t, "target": other, "alpha": id, "beta": id });
    let path = payload("mixed-square", &square);
    let args = [
        "fill",
        "--input",
        path.to_str().unwrap(),
        "--r",
        "1",
        "--mixed-with",
        "2",
    ];
    let (code, v) = call_json(&args);
    assert_eq!(code, EXIT_VIOLATION);
    assert_eq!(v["result"]["filled"], false);
}

#[test]
fn normal_form_complete_cone_contract() {
    let ring = Ring::parse("w2(2)").unwrap();
    let m = Matrix::from_rows(
        &ring,
        &[vec![2, 1], vec![2, 0]]
            .iter()
            .map(|r| r.iter().map(|&i| ring.element(i)).collect())
            .collect::<Vec<_>>(),
    )
    .unwrap();
    let path = payload("matrix", &matrix_to_json(&m));
    let p = path.to_str().unwrap();

    let (code, v) = call_json(&["normal-form", "--input", p]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(v["result"]["unit_rank"], 1);
    assert_eq!(v["result"]["x_rank"], 1);

    let (code, v) = call_json(&["complete", "--input", p]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(v["result"]["membership"]["distinguished"], true);

    let (_, t) = delta_over("w2(2)", 1, 1);
    let id = matrix_to_json(&Matrix::identity(&ring, 1));
    let phi = json!({ "ring": "w2(2)", "source": t, "target": t, "f": id, "g": id, "h": id });
    let path = payload("identity", &phi);
    let (code, v) = call_json(&["cone", "--input", path.to_str().unwrap()]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(v["result"]["membership"]["distinguished"], true);

    let (_, v) = call_json(&["contract", "--input", path.to_str().unwrap()]);
    assert_eq!(v["result"]["nullhomotopic"], false);
    let path = payload("delta-triangle", &t);
    let (_, v) = call_json(&["contract", "--input", path.to_str().unwrap()]);
    assert_eq!(v["result"]["nullhomotopic"], false);
}

#[test]
fn premise_report() {
    let (code, v) = call_json(&["ring", "--ring", "w2(4)"]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(v["result"]["premises_hold"], true);
    assert_eq!(v["ring"]["size"], 16);
}

#[test]
fn counterexamples_replay() {
    let class = ["--r", "1", "--mixed-with", "2"];
    let mut args = vec!["axioms", "--ring", "w2(4)", "--samples", "40"];
    args.extend(class);
    let (code, v) = call_json(&args);
    assert_eq!(code, EXIT_VIOLATION);
    let found = v["result"]["report"]["counterexamples"].as_array().unwrap();
    assert!(!found.is_empty());
    for (i, c) in found.iter().enumerate() {
        let path = payload(&format!("replay-{i}"), &c["instance"]);
        let mut replay = vec![c["replay"].as_str().unwrap(), "--input", path.to_str().unwrap()];
        replay.extend(class);
        let (code, _) = call_json(&replay);
        assert_eq!(code, EXIT_VIOLATION, "{}: {}", c["check"], c["detail"]);
    }
}
