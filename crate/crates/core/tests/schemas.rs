use std::path::PathBuf;
use std::process::Command;

use serde_json::Value;

fn schema(name: &str) -> jsonschema::Validator {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../docs/schemas")
        .join(format!("{name}.json"));
    let text = std::fs::read_to_string(&path).unwrap();
    jsonschema::validator_for(&serde_json::from_str(&text).unwrap()).unwrap()
}

fn run(args: &[&str]) -> Value {
    let out = Command::new(env!("CARGO_BIN_EXE_dunkl")).args(args).output().unwrap();
    assert!(out.status.code().unwrap() <= 1, "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn check(name: &str, doc: &Value) {
    let v = schema(name);
    let errors: Vec<String> = v.iter_errors(doc).map(|e| e.to_string()).collect();
    assert!(errors.is_empty(), "{name}: {errors:?}");
}

#[test]
fn rootsys_output() {
    for fam in [&["--family", "b2"][..], &["--family", "z2n", "--n", "3", "--k", "1,2,3"]] {
        let mut a = vec!["rootsys"];
        a.extend(fam);
        check("rootsys", &run(&a));
    }
}

#[test]
fn eval_output() {
    check("eval", &run(&["eval", "--family", "b2", "--k", "1,1", "--x", "1,0.3", "--y", "0.8,0.2", "--t", "2"]));
    check("eval", &run(&["eval", "--family", "a2", "--x", "300,1", "--y", "300,2"]));
}

#[test]
fn verify_output() {
    check("verify", &run(&["verify", "--family", "b2", "--which", "ez", "--samples", "50", "--timing"]));
    check("verify", &run(&["verify", "--family", "z2n", "--n", "1", "--k", "1", "--which", "d1", "--samples", "50"]));
    check("verify", &run(&["verify", "--family", "a2", "--which", "all", "--samples", "100"]));
}

#[test]
fn cover_output() {
    check("cover", &run(&["cover", "--family", "z2n", "--n", "2", "--k", "1,1", "--delta", "0.5"]));
}

#[test]
fn asymp_output() {
    check(
        "asymp",
        &run(&["asymp", "--family", "b2", "--d1", "1,0.35", "--d2", "1,0.4", "--t-max", "16"]),
    );
}

#[test]
fn schemas_reject_malformed_reports() {
    let v = schema("verify");
    assert!(!v.is_valid(&serde_json::json!({"check": "ez"})));
    let e = schema("eval");
    assert!(!e.is_valid(&serde_json::json!({"values": {"0": [1.0]}})));
}
