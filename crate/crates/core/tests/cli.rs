use std::process::Command;

use locald::harness::TrialReport;

fn locald() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_locald"));
    c.env_remove("LOCALD_SEED");
    c
}

const VERTEX_COVER_P4: &str = r#"{"sense":"covering","n":4,"weights":[1,1,1,1],
  "constraints":[{"vars":[0,1],"coeffs":[1,1],"bound":1},{"vars":[1,2],"coeffs":[1,1],"bound":1},{"vars":[2,3],"coeffs":[1,1],"bound":1}]}"#;

#[test]
fn ldd_writes_a_valid_report_and_csv() {
    let dir = tempfile::tempdir().unwrap();
    let (json, csv) = (dir.path().join("r.json"), dir.path().join("r.csv"));
    let status = locald()
        .args(["ldd", "--algo", "whp", "--family", "grid:6x6", "--eps", "0.3", "--trials", "3", "--seed", "9"])
        .arg("--out")
        .arg(&json)
        .arg("--csv")
        .arg(&csv)
        .status()
        .unwrap();
    assert!(status.success());
    let report = TrialReport::from_json(&std::fs::read_to_string(&json).unwrap()).unwrap();
    report.validate().unwrap();
    assert_eq!(report.records.len(), 3);
    assert_eq!(report.records[2].seed, 11);
    let rows = std::fs::read_to_string(&csv).unwrap();
    assert!(rows.starts_with("trial,seed,metric,value\n"));
}

#[test]
fn runs_are_reproducible_from_the_seed() {
    let run = || {
        locald()
            .args(["ldd", "--algo", "expclock", "--family", "cycle:40", "--eps", "0.3", "--trials", "2"])
            .env("LOCALD_SEED", "5")
            .output()
            .unwrap()
            .stdout
    };
    assert_eq!(run(), run());
}

#[test]
fn cover_accepts_covering_and_rejects_the_wrong_sense() {
    let dir = tempfile::tempdir().unwrap();
    let ilp = dir.path().join("vc.json");
    std::fs::write(&ilp, VERTEX_COVER_P4).unwrap();
    let ok = locald().args(["cover", "--eps", "0.5", "--ilp"]).arg(&ilp).output().unwrap();
    assert!(ok.status.success(), "{}", String::from_utf8_lossy(&ok.stderr));
    let wrong = locald().args(["pack", "--eps", "0.5", "--ilp"]).arg(&ilp).status().unwrap();
    assert_eq!(wrong.code(), Some(2));
}

#[test]
fn verify_tails_passes() {
    let out = locald().args(["verify", "--suite", "tails"]).output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().all(|l| l.starts_with("PASS")));
}

#[test]
fn bad_arguments_fail() {
    let out = locald().args(["ldd", "--algo", "whp", "--family", "cycle:10", "--eps", "1.5"]).status().unwrap();
    assert_eq!(out.code(), Some(2));
}
