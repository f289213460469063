use std::process::{Command, Output};

use serde_json::Value;

fn dunkl(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dunkl"))
        .args(args)
        .env("DUNKL_THREADS", "2")
        .output()
        .expect("run dunkl")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("JSON on stdout")
}

#[test]
fn rootsys_reports_group_orders() {
    for (args, order, gamma) in [
        (vec!["--family", "z2n", "--n", "3", "--k", "1,1,1"], 8, 3.0),
        (vec!["--family", "a2", "--k", "0.5"], 6, 1.5),
        (vec!["--family", "b2", "--k", "1,0.5"], 8, 3.0),
        (vec!["--family", "i2m", "--m", "5", "--k", "1"], 10, 5.0),
    ] {
        let mut a = vec!["rootsys"];
        a.extend(args);
        let out = dunkl(&a);
        assert_eq!(out.status.code(), Some(0));
        let v = json(&out);
        assert_eq!(v["group_order"], order);
        assert_eq!(v["gamma_k"].as_f64().unwrap(), gamma);
    }
}

#[test]
fn eval_k_zero_is_exponential() {
    let out = dunkl(&["eval", "--family", "b2", "--k", "0,0", "--x", "0.5,0.2", "--y", "1,-0.3"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let e = v["values"]["0"][0].as_f64().unwrap();
    assert!((e - (0.5f64 - 0.06).exp()).abs() < 1e-13);
}

#[test]
fn imaginary_eval_has_unit_modulus_at_k_zero() {
    let out = dunkl(&[
        "eval", "--family", "a2", "--k", "0", "--x", "3,1", "--y", "2,2", "--imaginary",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    for (_, z) in v["values"].as_object().unwrap() {
        let (re, im) = (z[0].as_f64().unwrap(), z[1].as_f64().unwrap());
        assert!((re.hypot(im) - 1.0).abs() < 1e-12);
    }
}

#[test]
fn cover_z2_squared() {
    let out = dunkl(&["cover", "--family", "z2n", "--n", "2", "--k", "1,1", "--delta", "0.5"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["p0"], 1);
    assert!(v["margin"].as_f64().unwrap() > 0.0);
}

#[test]
fn verify_is_reproducible_and_writes_files() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str| {
        let path = dir.path().join(name);
        let out = dunkl(&[
            "verify", "--family", "b2", "--which", "ez", "--samples", "300", "--seed", "11",
            "--output", path.to_str().unwrap(),
        ]);
        assert_eq!(out.status.code(), Some(0));
        (out.stdout, std::fs::read(path).unwrap())
    };
    let (a, fa) = run("a.json");
    let (b, fb) = run("b.json");
    assert_eq!(a, b);
    assert_eq!(fa, fb);
    let v: Value = serde_json::from_slice(&fa).unwrap();
    assert_eq!(v["check"], "ez");
    assert_eq!(v["pass"], true);
    assert!(v.get("runtime_ms").is_none());
}

#[test]
fn config_file_and_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.conf");
    std::fs::write(&cfg, "# test\nfamily = z2n\nn = 2\nk = 1, 1\ndelta = 0.9\n").unwrap();
    let out = dunkl(&["cover", "--config", cfg.to_str().unwrap(), "--delta", "0.5"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["delta"].as_f64().unwrap(), 0.5);
}

#[test]
fn exit_codes() {
    assert_eq!(dunkl(&["rootsys", "--family", "e8"]).status.code(), Some(2));
    assert_eq!(dunkl(&["eval", "--family", "b2", "--x", "1"]).status.code(), Some(2));
    assert_eq!(
        dunkl(&["verify", "--config", "/nonexistent/dunkl.conf"]).status.code(),
        Some(3)
    );
    let out = dunkl(&[
        "verify", "--family", "b2", "--which", "polytope", "--variant", "n", "--samples", "2000",
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out)["pass"], false);
}
