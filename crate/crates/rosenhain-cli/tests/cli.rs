use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn run(args: &[&str], envs: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_rosenhain"));
    cmd.args(args).env_remove("ROSENHAIN_THREADS");
    for (k, v) in envs {
        cmd.env(k, v);
    }
    cmd.output().unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

fn write(dir: &TempDir, name: &str, text: &str) -> String {
    let p = dir.path().join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

fn curve(dir: &TempDir, name: &str, e: &[f64]) -> String {
    let g = (e.len() - 1) / 2;
    write(dir, name, &serde_json::json!({ "genus": g, "branch_points": e }).to_string())
}

fn stdout_json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn verify_all_on_reference_curves() {
    let dir = TempDir::new().unwrap();
    for e in [vec![0.0, 1.0, 2.0, 3.0, 4.0], vec![0.0, 1.0, 2.0, 3.0, 4.0, 5.0, 6.0]] {
        let f = curve(&dir, "c.json", &e);
        let out = run(&["verify", "all", &f], &[]);
        assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
        let v = stdout_json(&out);
        assert!(v["suites"].as_array().unwrap().len() >= 6);
        let stderr = String::from_utf8_lossy(&out.stderr);
        assert!(stderr.contains("thomae1: "), "{stderr}");
    }
}

#[test]
fn identity_failure_exits_one() {
    let dir = TempDir::new().unwrap();
    let f = curve(&dir, "c.json", &[0.0, 1.0, 2.0, 3.0, 4.0]);
    let out = run(&["verify", "thomae1", &f, "--tol", "1e-30"], &[]);
    assert_eq!(code(&out), 1);
}

#[test]
fn input_errors_exit_two() {
    let dir = TempDir::new().unwrap();
    let bad_json = write(&dir, "bad.json", "{ not json");
    let unsorted = curve(&dir, "u.json", &[0.0, 2.0, 1.0, 3.0, 4.0]);
    let g3 = curve(&dir, "g3.json", &[0.0, 1.0, 2.0, 3.0, 4.0, 5.0, 6.0]);
    let good = curve(&dir, "g2.json", &[0.0, 1.0, 2.0, 3.0, 4.0]);
    let missing = dir.path().join("nope.json");
    let cases: Vec<Vec<&str>> = vec![
        vec!["periods", &bad_json],
        vec!["periods", &unsorted],
        vec!["periods", missing.to_str().unwrap()],
        vec!["verify", "thomae3", &good],
        vec!["verify", "rosenhain3", &g3],
        vec!["reconstruct", &g3, "--genus3"],
        vec!["theta", &good, "-c", "[1;0]"],
        vec!["bogus"],
    ];
    for args in cases {
        let out = run(&args, &[]);
        assert_eq!(code(&out), 2, "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    }
    let out = run(&["periods", &good], &[("ROSENHAIN_THREADS", "0")]);
    assert_eq!(code(&out), 2);
}

#[test]
fn non_siegel_tau_exits_three() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "t.json", r#"{"genus": 2, "tau": [[[0, 1], [0, 0]], [[0, 0], [0, -1]]]}"#);
    let out = run(&["verify", "appendix-a", &f], &[]);
    assert_eq!(code(&out), 3, "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn periods_feed_reconstruction_and_recovery() {
    let dir = TempDir::new().unwrap();
    let e = [0.0, 1.0, 2.5, 3.5, 7.0];
    let f = curve(&dir, "c.json", &e);
    let out = run(&["periods", &f], &[]);
    assert_eq!(code(&out), 0);
    let tau_file = write(&dir, "tau.json", std::str::from_utf8(&out.stdout).unwrap());
    assert!(Path::new(&tau_file).exists());

    let out = run(&["reconstruct", &tau_file, "--genus2", "1", "2"], &[]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));

    let out = run(&["recover-branch-points", &tau_file, "--genus2", "1", "2"], &[]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8_lossy(&out.stdout);
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    let found: Vec<f64> = v["recovered"]["branch_points"]
        .as_array()
        .unwrap_or_else(|| panic!("no branch_points in {text}"))
        .iter()
        .map(|z| z[0].as_f64().unwrap())
        .collect();
    for (a, b) in found.iter().zip(&e) {
        assert!((a - b).abs() < 1e-8 * (1.0 + b.abs()), "{found:?}");
    }

    let out = run(&["verify", "riemann-jacobi", &tau_file], &[]);
    assert_eq!(code(&out), 0);
}

#[test]
fn output_is_deterministic() {
    let dir = TempDir::new().unwrap();
    let f = curve(&dir, "c.json", &[0.0, 1.0, 2.0, 3.0, 4.0, 5.0, 6.0]);
    let a = run(&["verify", "all", &f], &[]);
    let b = run(&["verify", "all", &f], &[("ROSENHAIN_THREADS", "1")]);
    let c = run(&["verify", "all", &f], &[("ROSENHAIN_THREADS", "3")]);
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(a.stdout, c.stdout);
    let t1 = run(&["theta", &f], &[]);
    let t2 = run(&["theta", &f], &[("ROSENHAIN_THREADS", "2")]);
    assert_eq!(code(&t1), 0);
    assert_eq!(t1.stdout, t2.stdout);
}
