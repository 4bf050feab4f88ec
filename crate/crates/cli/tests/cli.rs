use std::path::PathBuf;

use num_bigint::BigInt;
use serde_json::Value;

fn run(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("rus-synth").chain(args.iter().copied());
    let code = rus_synth::run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn scratch(name: &str, contents: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("rus-synth-tests-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, contents).unwrap();
    path
}

const IDENTITY: [&str; 8] = ["approximate", "--target", "coeffs:1,0,0,0", "--epsilon", "0.1", "--p-fail", "0.5", "--deterministic"];

#[test]
fn four_squares_seven() {
    let (code, out, _) = run(&["four-squares", "7"]);
    assert_eq!(code, 0);
    let v: Value = serde_json::from_str(&out).unwrap();
    let sol = v["solutions"][0].as_array().unwrap();
    let sum: BigInt = sol.iter().map(|x| x.as_str().unwrap().parse::<BigInt>().unwrap().pow(2)).sum();
    assert_eq!(sum, BigInt::from(7));
}

#[test]
fn four_squares_rejects_negative() {
    let (code, _, err) = run(&["four-squares", "--", "-5"]);
    assert_eq!(code, 1, "{err}");
}

#[test]
fn identity_approximation() {
    let (code, out, _) = run(&IDENTITY);
    assert_eq!(code, 0);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["success_prob"], "1/1");
    assert_eq!(v["error_bound"], 0.0);
    assert_eq!(v["N"], 2);
    assert_eq!(v["verification"]["passed"], true);
    assert!(v.get("timestamp").is_none());
}

#[test]
fn timestamp_only_without_deterministic() {
    let (_, out, _) = run(&IDENTITY[..7]);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert!(v["timestamp"].is_u64());
}

#[test]
fn parameter_errors_name_the_constraint() {
    let (code, _, err) = run(&["approximate", "--target", "coeffs:1,0,0,0", "--epsilon", "3", "--p-fail", "0.5"]);
    assert_eq!(code, 1);
    assert!(err.contains("(0, 2)"), "{err}");
    let (code, _, err) = run(&["approximate", "--target", "coeffs:1,0,0,0", "--epsilon", "0.1", "--p-fail", "1"]);
    assert_eq!(code, 1);
    assert!(err.contains("(0, 1)"), "{err}");
    let (code, _, err) = run(&["approximate", "--target", "coeffs:0,0,0,0", "--epsilon", "0.1", "--p-fail", "0.5"]);
    assert_eq!(code, 1);
    assert!(err.contains("zero"), "{err}");
    let (code, _, _) = run(&["approximate", "--target", "coeffs:1,0,0,0", "--epsilon", "0.1", "--p-fail", "0.5", "--select", "best"]);
    assert_eq!(code, 1);
    let (code, _, _) = run(&["approximate", "--target", "coeffs:1,0,0,0", "--epsilon", "0.1", "--p-fail", "0.5", "--format", "svg"]);
    assert_eq!(code, 1);
    let (code, _, _) = run(&["frobnicate"]);
    assert_eq!(code, 1);
}

#[test]
fn help_exits_zero() {
    let (code, out, _) = run(&["--help"]);
    assert_eq!(code, 0);
    assert!(out.contains("approximate"));
}

#[test]
fn exhaustion_exit_code() {
    let (code, _, err) = run(&["approximate", "--target", "axis:x:0.6", "--epsilon", "0.01", "--p-fail", "0.5", "--n-max", "3"]);
    assert_eq!(code, 2);
    assert!(err.contains("N=2") && err.contains("N=3"), "{err}");
}

#[test]
fn verify_accepts_own_output_and_catches_tampering() {
    let args = ["approximate", "--target", "axis:0,1,0:0.9", "--epsilon", "0.1", "--p-fail", "0.25", "--rounds", "2", "--deterministic"];
    let (code, out, _) = run(&args);
    assert_eq!(code, 0);
    let path = scratch("result.json", &out);
    let (code, report, err) = run(&["verify", "--input", path.to_str().unwrap()]);
    assert_eq!(code, 0, "{err}");
    let report: Value = serde_json::from_str(&report).unwrap();
    assert_eq!(report["passed"], true);
    let doc: Value = serde_json::from_str(&out).unwrap();
    let rounds = 1 + doc["followups"].as_array().map_or(0, Vec::len);
    assert_eq!(report["rounds"].as_array().unwrap().len(), rounds);

    let mut tampered = doc.clone();
    let gates = tampered["gates"].as_array_mut().unwrap();
    let cs = gates.iter().position(|g| g["kind"] == "CS" || g["kind"] == "CSdg").expect("a non-Clifford gate");
    gates.remove(cs);
    let path = scratch("tampered.json", &tampered.to_string());
    let (code, _, err) = run(&["verify", "--input", path.to_str().unwrap()]);
    assert_eq!(code, 3);
    assert!(err.contains("\"exact_match\": false"), "{err}");

    let mut stricter = doc.clone();
    stricter["config"]["p_fail"] = Value::from("1/1000");
    let path = scratch("stricter.json", &stricter.to_string());
    let (code, _, err) = run(&["verify", "--input", path.to_str().unwrap()]);
    assert_eq!(code, 3);
    assert!(err.contains("\"success_bound_ok\": false") && err.contains("\"exact_match\": true"), "{err}");

    let path = scratch("garbage.json", "{");
    assert_eq!(run(&["verify", "--input", path.to_str().unwrap()]).0, 1);
}

#[test]
fn identical_runs_are_byte_identical() {
    let args = ["approximate", "--target", "matrix:0.8,0.6,0,0,0,0,0.8,-0.6", "--epsilon", "0.1", "--p-fail", "0.25", "--seed", "3", "--deterministic"];
    let (_, a, _) = run(&args);
    let (_, b, _) = run(&args);
    assert!(!a.is_empty());
    assert_eq!(a, b);
}

#[test]
fn qasm_output() {
    let args = ["approximate", "--target", "axis:z:0.5", "--epsilon", "0.1", "--p-fail", "0.25", "--format", "qasm", "--qasm-rus"];
    let (code, out, _) = run(&args);
    assert_eq!(code, 0);
    assert!(out.starts_with("OPENQASM 2.0;\ninclude \"qelib1.inc\";\nqreg q[2];\ncreg c[1];\nreset q[0];\n"));
    assert!(out.contains("measure q[0] -> c[0];"));
}

#[test]
fn synth_isometry_from_plan_and_rows() {
    let path = scratch("plan.json", r#"{"N":4,"u0":["3","2","1","1"],"u1":["1","0","0","0"]}"#);
    let (code, out, err) = run(&["synth-isometry", "--input", path.to_str().unwrap()]);
    assert_eq!(code, 0, "{err}");
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["exact_match"], true);

    // columns e1, e2 of the identity
    let e = |re: &str| format!(r#"{{"re":"{re}","im":"0","k":0}}"#);
    let rows = format!(
        r#"{{"rows":[[{},{}],[{},{}],[{},{}],[{},{}]]}}"#,
        e("1"), e("0"), e("0"), e("1"), e("0"), e("0"), e("0"), e("0")
    );
    let path = scratch("rows.json", &rows);
    let (code, out, _) = run(&["synth-isometry", "--input", path.to_str().unwrap()]);
    assert_eq!(code, 0);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["gates"].as_array().unwrap().len(), 0);

    let bad = rows.replacen(r#""re":"1""#, r#""re":"2""#, 1);
    let path = scratch("bad.json", &bad);
    let (code, _, err) = run(&["synth-isometry", "--input", path.to_str().unwrap()]);
    assert_eq!(code, 1);
    assert!(err.contains("isometry"), "{err}");

    let path = scratch("plan.json", r#"{"N":4,"u0":["3","2","1","1"],"u1":["1","0","0","0"]}"#);
    let (code, _, _) = run(&["synth-isometry", "--input", path.to_str().unwrap(), "--budget", "1"]);
    assert_eq!(code, 2);
}

#[test]
fn enumerate_identity() {
    let (code, out, _) = run(&["enumerate", "--target", "coeffs:1,0,0,0", "--epsilon", "0.1", "--p-fail", "0.5", "--n", "2"]);
    assert_eq!(code, 0);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["count"], 1);
    assert_eq!(v["candidates"][0]["u0"], serde_json::json!(["2", "0", "0", "0"]));
    assert_eq!(v["candidates"][0]["success_prob"], "1/1");
}
