use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

const CHSH: &str = r#"{"kind":"exact","a":["0","0"],"b":["0","0"],"c":[["1","1"],["1","-1"]]}"#;

fn tsirelson(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tsirelson")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    fs::write(&p, text).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

/// The exact octagon summit on the positive `r0` axis.
fn beta_t_file(dir: &TempDir) -> PathBuf {
    let out = tsirelson(&["slice-expr", "--r0", "1/1-1/2*s2", "--r1", "0", "--exact"]);
    assert_eq!(code(&out), 0);
    write(dir, "beta_t.json", &stdout(&out))
}

#[test]
fn local_bound_of_chsh_is_two() {
    let dir = TempDir::new().unwrap();
    let chsh = write(&dir, "chsh.json", CHSH);
    let out = tsirelson(&["local-bound", s(&chsh)]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout(&out), "2\n");
}

#[test]
fn verify_w3_reports_exact_identity() {
    let out = tsirelson(&["verify-w3"]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout(&out), "identity exact; PSD; rank 4\n");
}

#[test]
fn octagon_csv_rows() {
    let out = tsirelson(&["octagon", "--format", "csv"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "k,r0,r1");
    assert_eq!(lines.len(), 9);
    assert_eq!(lines[1], "0,1/1-1/2*s2,0/1");
}

#[test]
fn octagon_svg_uses_fixed_viewbox() {
    let out = tsirelson(&["octagon", "--format", "svg"]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("viewBox=\"0 0 1000 1000\""));
}

#[test]
fn beta_t_bounds_and_pairing() {
    let dir = TempDir::new().unwrap();
    let bt = beta_t_file(&dir);
    assert_eq!(stdout(&tsirelson(&["local-bound", s(&bt)])), "1\n");

    let npa: f64 = stdout(&tsirelson(&["npa-bound", s(&bt), "--level", "L1AB"])).trim().parse().unwrap();
    assert!(npa > 1.001, "{npa}");

    let behavior = tsirelson(&["qubit-stats", "--theta", "0.7853981633974483", "--a0", "0", "--a1", "1.5707963267948966", "--b0", "0.7853981633974483", "--b1", "-0.7853981633974483"]);
    assert_eq!(code(&behavior), 0);
    let chsh = write(&dir, "chsh.json", CHSH);
    let p = write(&dir, "p.json", &stdout(&behavior));
    let v: f64 = stdout(&tsirelson(&["pair", s(&chsh), s(&p)])).trim().parse().unwrap();
    assert!((v - 2.0 * std::f64::consts::SQRT_2).abs() < 1e-12, "{v}");
}

#[test]
fn certificate_round_trip_and_tamper() {
    let dir = TempDir::new().unwrap();
    let bt = beta_t_file(&dir);
    let found = tsirelson(&["sos-search", s(&bt), "--level", "L1AB_ABB"]);
    assert_eq!(code(&found), 0);
    let cert = write(&dir, "cert.json", &stdout(&found));
    assert_eq!(code(&tsirelson(&["verify-cert", s(&cert)])), 0);

    let mut v: Value = serde_json::from_str(&stdout(&found)).unwrap();
    let w00 = v["W"][0][0].as_f64().unwrap();
    v["W"][0][0] = Value::from(w00 + 0.5);
    let bad = write(&dir, "bad_cert.json", &serde_json::to_string(&v).unwrap());
    assert_eq!(code(&tsirelson(&["verify-cert", s(&bad)])), 1);

    assert_eq!(code(&tsirelson(&["sos-search", s(&bt), "--level", "L1AB"])), 1);
}

#[test]
fn emitted_json_reparses_identically() {
    let dir = TempDir::new().unwrap();
    let bt = beta_t_file(&dir);
    let orbit = stdout(&tsirelson(&["orbit", s(&bt)]));
    let list: Value = serde_json::from_str(&orbit).unwrap();
    assert_eq!(list.as_array().unwrap().len(), 8);
    for (k, entry) in list.as_array().unwrap().iter().enumerate() {
        let e = write(&dir, &format!("o{k}.json"), &entry["expression"].to_string());
        assert_eq!(stdout(&tsirelson(&["local-bound", s(&e)])), "1\n");
        let again = stdout(&tsirelson(&["orbit", s(&e)]));
        let again: Value = serde_json::from_str(&again).unwrap();
        assert_eq!(again[0]["expression"], entry["expression"]);
    }
}

#[test]
fn face_scan_is_deterministic_per_seed() {
    let dir = TempDir::new().unwrap();
    let bt = beta_t_file(&dir);
    let args = |seed: &'static str| ["face-scan", "--restarts", "40", "--seed", seed];
    let mut a = args("3").to_vec();
    a.push(s(&bt));
    let first = tsirelson(&a);
    let second = tsirelson(&a);
    assert_eq!(code(&first), 0);
    assert_eq!(first.stdout, second.stdout);
    let text = stdout(&first);
    assert!(text.starts_with("cluster,value,mA0,mA1,mB0,mB1,K00,K01,K10,K11\n"));
    assert_eq!(text.lines().count(), 4);
}

#[test]
fn checks_pass() {
    assert_eq!(code(&tsirelson(&["chsh-decompose"])), 0);
    let out = tsirelson(&["expose-check"]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("octagon dimension: 2"));
    let out = tsirelson(&["nullifiers", "--level", "L1AB_ABB"]);
    assert!(stdout(&out).starts_with("level L1AB_ABB: dimension 9\n"));
}

#[test]
fn membership_verdicts() {
    let dir = TempDir::new().unwrap();
    let outside = stdout(&tsirelson(&["slice-expr", "--r0", "0.3", "--r1", "0"]));
    let outside = write(&dir, "outside.json", &outside);
    let out = tsirelson(&["dual-membership", s(&outside)]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).starts_with("outside: value"), "{}", stdout(&out));
    assert!(stdout(&out).contains("local vertex"));

    let bt = beta_t_file(&dir);
    let out = tsirelson(&["dual-membership", s(&bt), "--levels", "L1AB_ABB"]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).starts_with("inside: certificate at L1AB_ABB\n"));
}

#[test]
fn hessian_radius_both_sources() {
    for source in ["paper", "fd"] {
        let out = tsirelson(&["hessian-rmax", "--gamma", "0", "--source", source]);
        assert_eq!(code(&out), 0);
        let r: f64 = stdout(&out).trim().parse().unwrap();
        assert!((r - 0.5).abs() < 1e-3, "{source}: {r}");
    }
}

#[test]
fn plot_data_outputs() {
    let dir = TempDir::new().unwrap();
    let target = dir.path().join("fig.csv");
    let out = tsirelson(&["fig-slice-data", "--output", s(&target)]);
    assert_eq!(code(&out), 0);
    assert!(out.stdout.is_empty());
    let text = fs::read_to_string(&target).unwrap();
    for layer in ["octagon", "hessian_circle", "npa_disk"] {
        assert!(text.lines().any(|l| l.starts_with(&format!("{layer},"))), "{layer}");
    }

    let a = tsirelson(&["proj3d-data", "--axes", "K00,K11,mA0", "--samples", "5", "--seed", "9"]);
    let b = tsirelson(&["proj3d-data", "--axes", "K00,K11,mA0", "--samples", "5", "--seed", "9"]);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(stdout(&a).lines().count(), 1 + 16 + 1 + 5);
}

#[test]
fn malformed_input_exits_two() {
    let dir = TempDir::new().unwrap();
    let cases = [
        ("missing_field.json", r#"{"kind":"exact","a":["0","0"],"b":["0","0"]}"#),
        ("bad_kind.json", r#"{"kind":"complex","a":[0,0],"b":[0,0],"c":[[1,1],[1,-1]]}"#),
        ("bad_scalar.json", r#"{"kind":"exact","a":["0","x"],"b":["0","0"],"c":[["1","1"],["1","-1"]]}"#),
        ("extra_field.json", r#"{"kind":"float","a":[0,0],"b":[0,0],"c":[[1,1],[1,-1]],"d":1}"#),
        ("not_json.json", "{"),
    ];
    for (name, text) in cases {
        let p = write(&dir, name, text);
        assert_eq!(code(&tsirelson(&["local-bound", s(&p)])), 2, "{name}");
    }
    assert_eq!(code(&tsirelson(&["local-bound", "/nonexistent/expr.json"])), 2);
    assert_eq!(code(&tsirelson(&["nullifiers", "--level", "L9"])), 2);
    assert_eq!(code(&tsirelson(&["proj3d-data", "--axes", "K00,K00,mA0"])), 2);
    assert_eq!(code(&tsirelson(&["octagon", "--bogus"])), 2);
    assert_eq!(code(&tsirelson(&["slice-expr", "--r0", "1/0", "--r1", "0", "--exact"])), 2);
}
