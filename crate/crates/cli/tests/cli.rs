use std::path::Path;
use std::process::{Command, Output};

fn ksol(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ksol")).args(args).output().expect("spawn ksol")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn data(rel: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/data").join(rel).display().to_string()
}

#[test]
fn certify_exit_codes() {
    assert_eq!(code(&ksol(&["certify", "dp/13"])), 2);
    assert_eq!(code(&ksol(&["certify", "dp/1"])), 0);
    assert_eq!(code(&ksol(&["certify", "dp/16"])), 4);
    assert_eq!(code(&ksol(&["certify", "no/such/entry"])), 1);
}

#[test]
fn unstable_verdict_names_destabilizer() {
    let out = ksol(&["certify", "dp/13"]);
    let text = stdout(&out);
    assert!(text.contains("Unstable"), "{text}");
    assert!(text.contains("(∞, 0, 1)"), "{text}");
}

#[test]
fn validate_rejects_broken_piece() {
    let dir = tempfile::tempdir().unwrap();
    let good = std::fs::read_to_string(data("surfaces/dp-01.toml")).unwrap();
    let bad = good.replace(r#""c" = [{ a = "-1/2", b = ["1/2"] }]"#, r#""c" = [{ a = "1", b = ["1"] }]"#);
    assert_ne!(good, bad);
    let path = dir.path().join("bad.toml");
    std::fs::write(&path, bad).unwrap();
    let out = ksol(&["validate", path.to_str().unwrap()]);
    assert_eq!(code(&out), 1);
    assert!(stdout(&out).contains("(iv) FAIL"));
    assert_eq!(code(&ksol(&["validate", "dp/1"])), 0);
}

#[test]
fn table_matches_every_row() {
    let out = ksol(&["table"]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("34/34 rows match"));
}

#[test]
fn structured_output_is_deterministic() {
    let a = ksol(&["--format", "structured", "certify", "dp/13"]);
    let b = ksol(&["--format", "structured", "--jobs", "1", "certify", "dp/13"]);
    assert_eq!(code(&a), 2);
    assert_eq!(a.stdout, b.stdout);
    let v: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(v["cases"][0]["status"], "Unstable");
}

#[test]
fn report_verifies_and_tampering_is_caught() {
    let dir = tempfile::tempdir().unwrap();
    let out = ksol(&["--format", "structured", "certify", "dp/13"]);
    let path = dir.path().join("report.json");
    std::fs::write(&path, &out.stdout).unwrap();
    let check = ksol(&["verify", path.to_str().unwrap()]);
    assert_eq!(code(&check), 0);
    assert!(stdout(&check).contains("dp/13: verified"));

    let mut v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    v["cases"][0]["candidate"]["bounds"][0][0] = "-1".into();
    v["cases"][0]["candidate"]["evidence"]["lower"] = "-1".into();
    std::fs::write(&path, serde_json::to_string(&v).unwrap()).unwrap();
    assert_eq!(code(&ksol(&["verify", path.to_str().unwrap()])), 1);
}

#[test]
fn export_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cubic.toml");
    assert_eq!(code(&ksol(&["export", "dp/13", path.to_str().unwrap()])), 0);
    let p = path.to_str().unwrap();
    assert_eq!(code(&ksol(&["validate", p])), 0);
    assert_eq!(code(&ksol(&["certify", p])), 2);
    let info = stdout(&ksol(&["info", p]));
    assert!(info.contains("T1*T2 + T3^4 + T4^2"), "{info}");
}
