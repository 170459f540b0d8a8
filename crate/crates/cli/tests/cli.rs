use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn fbms(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fbms"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("valid JSON on stdout")
}

fn all_eigenvalues(v: &Value) -> Vec<f64> {
    v["results"]
        .as_array()
        .unwrap()
        .iter()
        .flat_map(|r| {
            let mult = r["multiplicity"].as_array().unwrap().clone();
            r["eigenvalues"]
                .as_array()
                .unwrap()
                .iter()
                .zip(mult)
                .flat_map(|(x, k)| std::iter::repeat(x.as_f64().unwrap()).take(k.as_u64().unwrap() as usize))
                .collect::<Vec<_>>()
        })
        .collect()
}

#[test]
fn catenoid_robin_spectrum() {
    let out = fbms(&["spectrum", "--n", "256,512,1024", "--modes", "0..6"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    let values = all_eigenvalues(&v);
    assert_eq!(values.iter().filter(|&&x| x < 0.0 && x.abs() > 1e-6).count(), 4);
    assert_eq!(values.iter().filter(|&&x| x < -2.0).count(), 4);
    assert_eq!(v["config"]["surface"], "catenoid");
    assert!(v["timestamp"].is_string());
}

#[test]
fn disk_single_grid() {
    let out = fbms(&["spectrum", "--surface", "disk", "--n", "512", "--modes", "0..4"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let values = all_eigenvalues(&json(&out));
    assert_eq!(values.iter().filter(|&&x| x < -1e-6).count(), 1);
}

#[test]
fn dirichlet_ground_state_vanishes() {
    let out = fbms(&["spectrum", "--problem", "dirichlet", "--n", "256,512,1024", "--modes", "0", "--keep", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let lambda0 = v["results"][0]["extrapolated"][0].as_f64().unwrap();
    assert!(lambda0.abs() < 1e-6, "{lambda0}");
    assert!(v["results"][0]["certified"].is_null());
}

#[test]
fn index_subcommand() {
    let out = fbms(&["index", "--n", "256,512,1024", "--max-mode", "8"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    assert_eq!(v["summary"]["count"], 4);
    assert_eq!(v["summary"]["certified"], true);
}

#[test]
fn guard_band_failure_exits_three() {
    let out = fbms(&["index", "--n", "256,512,1024", "--max-mode", "8", "--threshold", "-2", "--guard", "0.3"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn bad_configuration_exits_two() {
    for args in [
        &["spectrum", "--n", "512,256"][..],
        &["spectrum", "--n", "4"],
        &["spectrum", "--guard", "-1"],
        &["convergence", "--n", "256"],
        &["spectrum", "--modes", "5..2"],
    ] {
        let out = fbms(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    }
}

#[test]
fn thread_variable_is_validated() {
    let out = Command::new(env!("CARGO_BIN_EXE_fbms"))
        .args(["spectrum", "--n", "64", "--modes", "0"])
        .env("FBMS_THREADS", "0")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let out = Command::new(env!("CARGO_BIN_EXE_fbms"))
        .args(["spectrum", "--n", "64", "--modes", "0"])
        .env("FBMS_THREADS", "2")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
}

fn without_timestamp(path: &Path) -> Value {
    let mut v: Value = serde_json::from_slice(&std::fs::read(path).unwrap()).unwrap();
    v.as_object_mut().unwrap().remove("timestamp");
    v
}

#[test]
fn files_and_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b, c) = (dir.path().join("a.json"), dir.path().join("b.json"), dir.path().join("a.csv"));
    let run = |json: &Path, threads: &str| {
        let out = Command::new(env!("CARGO_BIN_EXE_fbms"))
            .args(["spectrum", "--n", "128,256", "--modes", "0..3", "-o"])
            .arg(json)
            .arg("--csv")
            .arg(&c)
            .env("FBMS_THREADS", threads)
            .output()
            .unwrap();
        assert_eq!(out.status.code(), Some(0));
        assert!(out.stdout.is_empty());
    };
    run(&a, "1");
    run(&b, "4");
    assert_eq!(without_timestamp(&a), without_timestamp(&b));

    let text = std::fs::read_to_string(&c).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("problem,mode,index,value,extrapolated,order"));
    assert_eq!(lines.count(), 4 * 4);

    // seventeen significant digits in scientific form
    let raw = std::fs::read_to_string(&a).unwrap();
    assert!(raw.contains("e0") || raw.contains("e1") || raw.contains("e-"));
}

#[test]
fn nonlocal_subcommand() {
    let out = fbms(&["nonlocal", "--n", "1024", "--max-mode", "8"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    let first = v["results"][0]["eigenvalues"][0].as_f64().unwrap();
    assert!((first + 2.0).abs() < 1e-6, "{first}");
}
