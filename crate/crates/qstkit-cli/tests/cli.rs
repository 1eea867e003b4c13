use std::process::{Command, Output};

fn qstkit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qstkit"))
        .args(args)
        .env_remove("QSTKIT_SEED")
        .output()
        .expect("binary runs")
}

fn write(dir: &tempfile::TempDir, name: &str, text: &str) -> String {
    let p = dir.path().join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn hopf_suite_exit_zero() {
    let o = qstkit(&["suite", "hopf"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["pass"], true);
}

#[test]
fn moyal_mixing_verdict_in_json() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(&dir, "m.json", r#"{"spacetime":"moyal_extended","theta":1}"#);
    let o = qstkit(&["suite", "mixing", "--config", &cfg]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["data"]["verdict"], "MIXING");
}

#[test]
fn corrupted_structure_exit_one_and_usage_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(
        &dir,
        "bad.json",
        r#"{"spacetime":{"name":"bad","dim":3,"deformation":1,"entries":[
            {"mu":0,"nu":1,"rho":1,"re":0,"im":1},{"mu":1,"nu":0,"rho":1,"re":0,"im":-1},
            {"mu":1,"nu":2,"rho":0,"re":1,"im":0},{"mu":2,"nu":1,"rho":0,"re":-1,"im":0}]}}"#,
    );
    let o = qstkit(&["suite", "group", "--config", &bad, "--format", "csv"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stdout).contains("jacobi:bch:bad,false"));

    let unk = write(&dir, "unk.json", r#"{"spacetime":"kappa_minkowski","output":{"formt":"csv"}}"#);
    let o = qstkit(&["suite", "group", "--config", &unk]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("/output/formt"));

    assert_eq!(qstkit(&["suite", "nonsense"]).status.code(), Some(2));
    assert_eq!(qstkit(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(qstkit(&["suite", "hopf", "--format", "xml"]).status.code(), Some(2));
    assert_eq!(qstkit(&["suite", "hopf", "--tol-override", "bogus=1"]).status.code(), Some(2));
    assert_eq!(qstkit(&["suite", "hopf", "--config", "/nonexistent.json"]).status.code(), Some(2));
}

#[test]
fn seed_flag_env_and_jobs_are_deterministic() {
    let a = qstkit(&["suite", "trace", "--seed", "9", "--jobs", "1"]);
    let b = qstkit(&["suite", "trace", "--seed", "9", "--jobs", "4"]);
    let c = Command::new(env!("CARGO_BIN_EXE_qstkit"))
        .args(["suite", "trace"])
        .env("QSTKIT_SEED", "9")
        .output()
        .unwrap();
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(a.stdout, c.stdout);
    let v: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(v["seed"], 9);
    let d = qstkit(&["suite", "trace", "--seed", "10"]);
    assert_ne!(a.stdout, d.stdout);
}

#[test]
fn out_file_and_csv_quoting() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.csv");
    let o = qstkit(&["suite", "causality", "--format", "csv", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.starts_with("suite,check,pass,residual,detail,anchor\r\n"));
    assert!(text.contains("\"256 points, 200 states, worst of a = ±1\""));
}

#[test]
fn dim_scan_zero_only_at_four() {
    let o = qstkit(&["gauge", "dim-scan", "--kappa", "1", "--d", "1:8", "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0));
    let text = String::from_utf8(o.stdout).unwrap();
    let zero: Vec<&str> = text
        .lines()
        .skip(1)
        .filter(|l| l.split(',').nth(1) == Some("0.0"))
        .map(|l| l.split(',').next().unwrap())
        .collect();
    assert_eq!(zero, vec!["4"]);
}

#[test]
fn sw_from_input_file() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(
        &dir,
        "sw.json",
        r#"{"nvars":2,"theta":[["0","3"],["-3","0"]],
            "field":[[],[{"exponents":[1,0],"coeff":"1"}]],
            "gauge_parameter":[{"exponents":[1,1],"coeff":"1/2"}]}"#,
    );
    let o = qstkit(&["gauge", "sw", "--input", &input]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["consistency_zero"], true);
    let bad = write(&dir, "bad.json", r#"{"nvars":2,"theta":[],"field":[],"extra":1}"#);
    let o = qstkit(&["gauge", "sw", "--input", &bad]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("/extra"));
}

#[test]
fn cone_sweep_rows() {
    let o = qstkit(&["causality", "cone", "--kappa", "1", "--v", "-1:1:0.25", "--grid", "256", "--states", "40"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let rows = v.as_array().unwrap();
    assert_eq!(rows.len(), 9);
    assert!(rows.iter().all(|r| r["pass"] == true));
    let o = qstkit(&["causality", "cone", "--v", "2", "--states", "40"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v[0]["pass"], false);
}

#[test]
fn config_prints_defaults() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(&dir, "c.json", r#"{"spacetime":"kappa_minkowski","kappa":1,"d":3}"#);
    let o = qstkit(&["config", "--config", &cfg]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["grid"], 256);
    assert_eq!(v["dim"], 4);
    assert_eq!(v["output"]["format"], "json");
}
