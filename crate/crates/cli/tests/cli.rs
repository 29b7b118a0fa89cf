use std::io::Write;
use std::process::{Command, Output, Stdio};

use serde_json::Value;

fn hardy(args: &[&str], stdin: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_hardy"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("binary starts");
    child
        .stdin
        .take()
        .unwrap()
        .write_all(stdin.as_bytes())
        .unwrap();
    child.wait_with_output().unwrap()
}

fn report(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is a JSON report")
}

fn without_timing(mut v: Value) -> Value {
    v.as_object_mut().unwrap().remove("timing");
    v
}

#[test]
fn basis_check_examples() {
    let out = hardy(&["basis-check", "--grid", "2048"], r#"{"zeros":[[0,0],[0,0]]}"#);
    assert_eq!(out.status.code(), Some(0));
    let rep = report(&out);
    assert!(rep["outputs"]["gram_deviation"].as_f64().unwrap() <= 1e-12);
    assert_eq!(rep["verdicts"][0]["tolerance"].as_f64(), Some(1e-8));

    let out = hardy(&["basis-check", "--grid", "2048"], r#"{"zeros":[[0,0],[0.5,0]]}"#);
    assert_eq!(out.status.code(), Some(0));

    let out = hardy(&["basis-check"], r#"{"zeros":[[0.5,0],[0,0]]}"#);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("first zero"));
}

#[test]
fn decompose_examples() {
    let doc = r#"{"function":{"kind":"taylor","coefficients":[[1,0],[2,0],[3,0],[0,1]]},"zeros":[[0,0],[0.5,0.2]]}"#;
    let out = hardy(&["decompose", "--grid", "1024", "--mmax", "8"], doc);
    assert_eq!(out.status.code(), Some(0));
    let rep = report(&out);
    assert!(rep["outputs"]["relative_residual"].as_f64().unwrap() <= 1e-12);
    assert_eq!(rep["outputs"]["components"].as_array().unwrap().len(), 2);

    let rational = r#"{"function":{"kind":"rational","numerator":[[1,0]],"denominator":[[2,0],[-1,0]]},"zeros":[[0,0]]}"#;
    let out = hardy(&["decompose", "--grid", "1024", "--mmax", "60"], rational);
    assert_eq!(out.status.code(), Some(0));

    // A pole on the circle is rejected before any computation.
    let pole = r#"{"function":{"kind":"rational","numerator":[[1,0]],"denominator":[[1,0],[-1,0]]},"zeros":[[0,0]]}"#;
    assert_eq!(hardy(&["decompose"], pole).status.code(), Some(2));
    // The budget n(M+1) ≤ N/8 is exceeded.
    assert_eq!(hardy(&["decompose", "--grid", "64", "--mmax", "16"], doc).status.code(), Some(2));
    assert_eq!(hardy(&["decompose"], "{not json").status.code(), Some(2));
    assert_eq!(hardy(&["decompose"], r#"{"zeros":[[0,0]]}"#).status.code(), Some(2));
}

#[test]
fn subspace_examples() {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let doc = format!(
        r#"{{"zeros":[[0,0]],"generators":[{{"kind":"taylor","coefficients":[[{h},0],[{h},0]]}}],"algebra":"constrained"}}"#
    );
    let out = hardy(&["subspace", "--grid", "2048", "--mspan", "24"], &doc);
    assert_eq!(out.status.code(), Some(0));
    let rep = report(&out);
    let outputs = &rep["outputs"];
    assert_eq!(outputs["outcome"], "decomposed");
    assert_eq!((outputs["r"].as_u64(), outputs["k"].as_u64()), (Some(1), Some(1)));
    let a = outputs["a"].as_array().unwrap();
    assert_eq!(a.len(), 2);
    for row in a {
        let entry = &row[0];
        let modulus = entry[0].as_f64().unwrap().hypot(entry[1].as_f64().unwrap());
        assert!((modulus - h).abs() < 1e-6);
    }

    let full = r#"{"zeros":[[0,0]],"generators":[{"kind":"taylor","coefficients":[[1,0]]},{"kind":"taylor","coefficients":[[0,0],[1,0]]}],"algebra":"constrained"}"#;
    let out = hardy(&["subspace", "--grid", "2048", "--mspan", "24"], full);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(report(&out)["outputs"]["outcome"], "fully_invariant");

    let beurling = r#"{"zeros":[[0,0],[0,0]],"generators":[{"kind":"taylor","coefficients":[[0,0],[1,0]]}],"algebra":"full"}"#;
    let out = hardy(&["subspace", "--grid", "2048", "--mspan", "24"], beurling);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(report(&out)["outputs"]["r"].as_u64(), Some(1));
}

#[test]
fn indeterminate_rank_exits_nonzero() {
    let doc = r#"{"zeros":[[0,0]],"generators":[
        {"kind":"taylor","coefficients":[[0,0],[0,0],[1,0]]},
        {"kind":"taylor","coefficients":[[0,0],[1e-7,0],[1,0]]},
        {"kind":"taylor","coefficients":[[5e-9,0],[0,0],[1,0]]}],"algebra":"full"}"#;
    let out = hardy(&["subspace", "--grid", "1024", "--mspan", "16"], doc);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("indeterminate rank"));
    assert_eq!(report(&out)["passed"], false);
}

#[test]
fn input_file_is_read() {
    let path = std::env::temp_dir().join(format!("hardy-cli-{}.json", std::process::id()));
    std::fs::write(&path, r#"{"zeros":[[0,0]]}"#).unwrap();
    let out = hardy(
        &["basis-check", "--grid", "256", "--input", path.to_str().unwrap()],
        "",
    );
    std::fs::remove_file(&path).ok();
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(report(&out)["outputs"]["grid"].as_u64(), Some(256));
}

#[test]
fn conformance_runs() {
    let out = hardy(&["conformance", "--seed", "0", "--trials", "1", "--grid", "2048"], "");
    assert_eq!(out.status.code(), Some(0));
    let rep = report(&out);
    let trial = &rep["outputs"]["results"][0];
    assert!(trial["verdicts"].as_array().unwrap().len() > 10);
    assert_eq!(rep["verdicts"].as_array().unwrap().len(), 1);

    let out = hardy(&["conformance", "--trials", "0"], "");
    assert_eq!(out.status.code(), Some(0));
    let rep = report(&out);
    assert_eq!(rep["passed"], true);
    assert!(rep["verdicts"].as_array().unwrap().is_empty());
}

#[test]
fn conformance_is_deterministic() {
    let args = ["conformance", "--seed", "42", "--trials", "3", "--grid", "2048"];
    let a = hardy(&args, "");
    let b = hardy(&args, "");
    let one_thread = hardy(&[&args[..], &["--threads", "1"]].concat(), "");
    let a = without_timing(report(&a));
    assert_eq!(a, without_timing(report(&b)));
    assert_eq!(a, without_timing(report(&one_thread)));
    assert_eq!(
        serde_json::to_string(&a).unwrap(),
        serde_json::to_string(&without_timing(report(&b))).unwrap()
    );
}
