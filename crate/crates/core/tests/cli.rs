use std::process::{Command, Output};

fn ghzv(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ghzv")).args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

#[test]
fn gap_of_omega1() {
    let out = ghzv(&["gap", "--strategy", "omega1", "--n", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("nu=0.666666666667"), "{text}");
    assert!(text.contains("homogeneous=true"), "{text}");
}

#[test]
fn gap_json_for_ghz_like() {
    let out = ghzv(&["--json", "gap", "--strategy", "omega6", "--n", "3", "--lambdas", "0.7,0.3"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    // amplitudes are normalised: λ² = (49/58, 9/58)
    let (a, b) = (49.0 / 58.0, 9.0 / 58.0);
    let nu = 3.0 / (3.0 + 2.0 * a + b);
    assert!((v["nu"].as_f64().unwrap() - nu).abs() < 1e-9);
}

#[test]
fn ntests_and_gme() {
    let out = ghzv(&["ntests", "--nu", "0.6667", "--eps", "0.01", "--delta", "0.01"]);
    assert_eq!(stdout(&out).trim(), "689");
    let out = ghzv(&["ntests", "--strategy", "omega1", "--n", "3", "--eps", "0.01", "--delta", "0.01"]);
    assert_eq!(stdout(&out).trim(), "689");
    let out = ghzv(&["gme", "--d", "199", "--delta", "0.01"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains('1'));
}

#[test]
fn exit_codes() {
    assert_eq!(ghzv(&["gap", "--strategy", "omega42"]).status.code(), Some(1));
    assert_eq!(ghzv(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(ghzv(&["ntests"]).status.code(), Some(1));
    let bad_d = ghzv(&["gap", "--strategy", "omega2", "--n", "2", "--d", "9"]);
    assert_eq!(bad_d.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&bad_d.stderr).contains("omega3"));
    assert_eq!(ghzv(&["--help"]).status.code(), Some(0));
}

#[test]
fn dimension_cap_from_env() {
    let out = Command::new(env!("CARGO_BIN_EXE_ghzv"))
        .args(["gap", "--strategy", "omega1", "--n", "4"])
        .env("GHZV_DIM_CAP", "8")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("dimension 16 exceeds the configured cap of 8"));
}

#[test]
fn simulate_writes_log() {
    let dir = tempfile::tempdir().unwrap();
    let log = dir.path().join("trials.jsonl");
    let out = ghzv(&[
        "--json", "simulate", "--strategy", "omega2", "--n", "2", "--d", "3", "--trials", "200", "--seed", "5",
        "--out", log.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let summary: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(summary["passes"], 200);
    assert_eq!(summary["decision"], "accept");
    let lines = std::fs::read_to_string(&log).unwrap();
    assert_eq!(lines.lines().count(), 200);
    let first: serde_json::Value = serde_json::from_str(lines.lines().next().unwrap()).unwrap();
    assert_eq!(first["trial"], 0);
}

#[test]
fn simulate_from_file_source() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("rho.json");
    // |00><00| fails the X-basis tests of Ω_I half of the time
    let rho = "[[1,0,0,0],[0,0,0,0],[0,0,0,0],[0,0,0,0]]";
    std::fs::write(&path, rho).unwrap();
    let src = format!("file:{}", path.display());
    let out = ghzv(&["--json", "simulate", "--strategy", "omega1", "--n", "2", "--trials", "4000", "--source", &src]);
    assert_eq!(out.status.code(), Some(0));
    let summary: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    // tr(Ω|00><00|) = (1 + 2·1/2)/3
    let rate = summary["pass_rate"].as_f64().unwrap();
    assert!((rate - 2.0 / 3.0).abs() < 4.0 * (2.0f64 / 9.0 / 4000.0).sqrt(), "{rate}");
}

#[test]
fn figdata_and_table1_files() {
    let dir = tempfile::tempdir().unwrap();
    let out = ghzv(&["figdata", "--out", dir.path().to_str().unwrap(), "--steps", "10", "--d-max", "20", "--n", "3,4"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let fig1 = std::fs::read_to_string(dir.path().join("fig1.csv")).unwrap();
    assert_eq!(fig1.lines().count(), 1 + 2 * 19);
    let fig2 = std::fs::read_to_string(dir.path().join("fig2.csv")).unwrap();
    assert!(fig2.starts_with("theta,n,N_IV,N_V',N_VI,N_VIII,N_IX"));
    assert_eq!(fig2.lines().count(), 1 + 2 * 10);

    let table = dir.path().join("table1.csv");
    let out = ghzv(&["table1", "--out", table.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(table).unwrap();
    assert!(text.lines().any(|l| l.starts_with("omega1,") && l.contains(",689,")), "{text}");
}

#[test]
fn check_passes() {
    let out = ghzv(&["check"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(!stdout(&out).contains("FAIL"));
}
