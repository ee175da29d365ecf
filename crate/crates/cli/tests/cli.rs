use std::fs;
use std::process::{Command, Output};

use serde_json::Value;

fn shellmodes(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_shellmodes"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn without_timestamp(text: &str) -> String {
    text.lines()
        .filter(|l| !l.starts_with("# generated"))
        .collect::<Vec<_>>()
        .join("\n")
}

#[test]
fn classify_presets() {
    let h = json(&shellmodes(&["classify", "--model", "H"]));
    assert_eq!(h["class"], "GaussElliptic");
    assert_eq!(h["z0"].as_f64().unwrap(), 0.0);
    let a = json(&shellmodes(&["classify", "--model", "A"]));
    assert_eq!(a["class"], "Cylinder");
    let l = json(&shellmodes(&["classify", "--model", "L"]));
    assert_eq!(l["class"], "AiryElliptic");
    assert!((l["z0"].as_f64().unwrap() - 0.5).abs() < 1e-12);
}

#[test]
fn asymptotics_reports() {
    let b = json(&shellmodes(&["asymptotics", "--model", "B"]));
    assert_eq!(b["gamma"].as_f64().unwrap(), 2.1247);
    assert_eq!(b["beta"], "1/4");
    let a = json(&shellmodes(&["asymptotics", "--model", "A", "--eps", "0.0001"]));
    assert_eq!(a["a0"].as_f64().unwrap(), 0.0);
    assert_eq!(a["ratio"].as_f64().unwrap(), 0.5);
    assert!((a["predictions"][0]["k_real"].as_f64().unwrap() - 29.3).abs() < 0.05);
    let d = json(&shellmodes(&["asymptotics", "--model", "D"]));
    assert_eq!(d["a0"].as_f64().unwrap(), 0.25);
    assert!(d["lambda2"].as_f64().unwrap() > 0.0);
}

#[test]
fn sweep2d_reference_wavenumbers_and_files() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    for (model, eps, k) in [("B", "0.01", 6), ("D", "0.1", 2), ("L", "0.02", 3)] {
        let run = shellmodes(&["sweep2d", "--model", model, "--eps", eps, "--out", out]);
        assert!(run.status.success(), "{}", String::from_utf8_lossy(&run.stderr));
        let mut rdr = csv::Reader::from_reader(run.stdout.as_slice());
        let row: Vec<String> = rdr.records().next().unwrap().unwrap().iter().map(String::from).collect();
        assert_eq!(row[1].parse::<i64>().unwrap(), k, "{model} at {eps}");
        assert_eq!(row[8], "ok");
        let records = fs::read_to_string(dir.path().join(format!("sweep2d_{model}_eps{eps}.csv"))).unwrap();
        assert!(records.lines().any(|l| l == "eps,k,lambda1,dofs,residual"));
        let mode = fs::read_to_string(dir.path().join(format!("mode_{model}_eps{eps}.csv"))).unwrap();
        assert!(mode.lines().any(|l| l == "z,u_r"));
    }
}

#[test]
fn sweep2d_output_is_reproducible() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    for d in [&a, &b] {
        let run = shellmodes(&["sweep2d", "--model", "A", "--eps", "0.1", "--mesh", "8x2", "--degree", "4", "--out", d.path().to_str().unwrap()]);
        assert!(run.status.success());
    }
    for name in ["sweep2d_A_eps0.1.csv", "mode_A_eps0.1.csv"] {
        let x = fs::read_to_string(a.path().join(name)).unwrap();
        let y = fs::read_to_string(b.path().join(name)).unwrap();
        assert_eq!(without_timestamp(&x), without_timestamp(&y));
    }
}

#[test]
fn torus_sweep_table() {
    let run = shellmodes(&["torus-sweep", "--r-min", "-1.5", "--r-max", "-0.5", "--step", "0.25"]);
    assert!(run.status.success());
    let text = String::from_utf8(run.stdout).unwrap();
    let mut rdr = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(text.as_bytes());
    assert_eq!(rdr.headers().unwrap().iter().take(4).collect::<Vec<_>>(), ["r_circ", "Lambda2", "gamma_min", "a1"]);
    let rows: Vec<csv::StringRecord> = rdr.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 5);
    let d = json(&shellmodes(&["asymptotics", "--model", "D"]));
    let at_d = rows.iter().find(|r| r[0].parse::<f64>().unwrap() == -1.0).unwrap();
    assert!((at_d[2].parse::<f64>().unwrap() - d["gamma"].as_f64().unwrap()).abs() < 1e-5);
    assert!((at_d[3].parse::<f64>().unwrap() - d["a1"].as_f64().unwrap()).abs() < 1e-5);
    for r in rows.iter().filter(|r| &r[4] == "ok") {
        assert!(r[1].parse::<f64>().unwrap() > 0.0);
    }
}

#[test]
fn verify_is_deterministic_and_checks_torus_positivity() {
    let a = shellmodes(&["verify", "--seed", "7"]);
    let b = shellmodes(&["verify", "--seed", "7"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let d = shellmodes(&["verify", "--model", "D"]);
    assert!(d.status.success());
    assert!(String::from_utf8(d.stdout).unwrap().contains("PASS lambda2_positive[D]"));
}

#[test]
fn profile_files() {
    let dir = tempfile::tempdir().unwrap();
    let cone = dir.path().join("cone.json");
    fs::write(&cone, r#"{"shape": {"kind": "polynomial", "coeffs": [1.5, -0.5]}, "interval": [-1, 1]}"#).unwrap();
    let b = json(&shellmodes(&["asymptotics", "--profile", cone.to_str().unwrap()]));
    assert_eq!(b["class"], "Cone");
    assert_eq!(b["gamma"].as_f64().unwrap(), 2.1247);

    let bad = dir.path().join("bad.json");
    fs::write(&bad, "{\n  \"shape\": 3\n}").unwrap();
    let run = shellmodes(&["classify", "--profile", bad.to_str().unwrap()]);
    assert_eq!(run.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&run.stderr).contains("line 2"));

    let saddle = dir.path().join("saddle.json");
    fs::write(&saddle, r#"{"shape": {"kind": "polynomial", "coeffs": [1.0, 0.0, 0.25]}, "interval": [-1, 1]}"#).unwrap();
    let run = shellmodes(&["asymptotics", "--profile", saddle.to_str().unwrap()]);
    assert_eq!(run.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&run.stderr).contains("hyperbolic"));
}

#[test]
fn usage_errors_exit_with_two() {
    for args in [
        vec!["classify"],
        vec!["sweep2d", "--model", "H", "--mesh", "16y2"],
        vec!["sweep2d", "--model", "H", "--eps", "0.5"],
        vec!["torus-sweep", "--r-min", "-0.5", "--r-max", "-1"],
        vec!["asymptotics", "--model", "Q"],
        vec!["sweep1d", "--model", "H"],
    ] {
        assert_eq!(shellmodes(&args).status.code(), Some(2), "{args:?}");
    }
}
