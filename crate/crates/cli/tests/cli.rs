use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("configs")
}

fn qht(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qht")).args(args).env("QHT_THREADS", "2").output().expect("spawn qht")
}

fn json(bytes: &[u8]) -> Value {
    serde_json::from_slice(bytes).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(bytes)))
}

fn cfg(name: &str) -> String {
    configs().join(name).display().to_string()
}

#[test]
fn gallery_parses() {
    let mut names: Vec<_> = std::fs::read_dir(configs()).unwrap().map(|e| e.unwrap().path()).collect();
    names.sort();
    assert_eq!(names.len(), 14);
    for p in names {
        let c = qht_cli::load_config(&p).unwrap();
        let canonical = c.to_canonical_json();
        assert_eq!(qht_cli::parse_config(&canonical, "c").unwrap().to_canonical_json(), canonical);
    }
    let fig7 = qht_cli::load_config(&configs().join("fig7_t35.json")).unwrap().spec();
    assert_eq!(fig7.energies(), vec![1.0, 2.0, 3.0, 2.0]);
    assert_eq!(fig7.qubits[3].bath.alpha, 1e-2);
    assert_eq!(fig7.qubits[3].bath.cutoff, 1e3);
}

#[test]
fn run_writes_csv_json_and_svg() {
    let dir = tempfile::tempdir().unwrap();
    let out = qht(&["run", "--config", &cfg("fig2_p1.json"), "--t-final", "200", "--out", dir.path().to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let summary = json(&out.stdout);
    assert_eq!(summary["report"]["t_f"], 200.0);

    let csv = std::fs::read_to_string(dir.path().join("fig2_p1.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), "t,T1,T2,T3,dTp,dTs,diff");
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 5000);
    let first: Vec<f64> = rows[0].split(',').map(|x| x.parse().unwrap()).collect();
    assert!((first[4] - 1.0).abs() < 1e-12 && (first[5] - 1.0).abs() < 1e-12);
    // 17 significant digits in every field
    assert!(rows[1].split(',').all(|f| f.split('e').next().unwrap().trim_start_matches('-').len() == 18));

    let metrics = json(&std::fs::read(dir.path().join("fig2_p1.metrics.json")).unwrap());
    assert_eq!(metrics["report"]["mode"], "StepDown");
    assert!(metrics["diagnostics"]["max_trace_drift"].as_f64().unwrap() < 1e-9);
    let svg = std::fs::read_to_string(dir.path().join("fig2_p1.svg")).unwrap();
    assert!(svg.starts_with("<svg") && svg.trim_end().ends_with("</svg>"));
}

#[test]
fn fig5_classifies_as_transient_step_down() {
    let out = qht(&["classify", "--config", &cfg("fig5.json")]);
    assert!(out.status.success());
    let c = json(&out.stdout);
    assert_eq!(c["mode"], "StepUp");
    assert!(c["transient_window"]["t_end"].as_f64().unwrap() > 0.0);
}

#[test]
fn steady_reports_capacity() {
    let dir = tempfile::tempdir().unwrap();
    let out = qht(&["steady", "--config", &cfg("fig4_p3.json"), "--out", dir.path().to_str().unwrap()]);
    assert!(out.status.success());
    let s = json(&out.stdout);
    assert!(s["capacity"].as_f64().unwrap() > 0.0);
    assert_eq!(s["unique"], true);
    assert!(dir.path().join("fig4_p3.steady.json").exists());
}

#[test]
fn sweep_rows_follow_values() {
    let dir = tempfile::tempdir().unwrap();
    let out = qht(&[
        "sweep", "--config", &cfg("fig3_sweep.json"), "--t-final", "500", "--steps", "3",
        "--out", dir.path().to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], qht_cli::commands::SWEEP_HEADER);
    assert_eq!(lines.len(), 4);
    assert!(lines[2].starts_with("tau3,2.5000000000000000e0,"));
    assert_eq!(std::fs::read_to_string(dir.path().join("fig3_sweep.csv")).unwrap(), text);
}

#[test]
fn plot_two_rows() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("two.csv");
    std::fs::write(&csv, "t,T1,T2,T3,dTp,dTs,diff\n0,1,2,3,1,1,0\n1,1.5,2,3,0.5,1,-0.5\n").unwrap();
    let svg = dir.path().join("two.svg");
    let out = qht(&["plot", csv.to_str().unwrap(), "--out", svg.to_str().unwrap()]);
    assert!(out.status.success());
    let text = std::fs::read_to_string(&svg).unwrap();
    assert_eq!(text.matches("<polyline").count(), 2);
    assert!(text.contains(r#"stroke="red""#) && text.contains(r#"stroke="black""#));
    let again = dir.path().join("again.svg");
    qht(&["plot", csv.to_str().unwrap(), "--out", again.to_str().unwrap()]);
    assert_eq!(std::fs::read(&svg).unwrap(), std::fs::read(&again).unwrap());
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    let text = std::fs::read_to_string(configs().join("fig2_p1.json")).unwrap().replace("-3.0", "3.0");
    std::fs::write(&bad, text).unwrap();
    let out = qht(&["run", "--config", bad.to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = json(&out.stderr);
    assert_eq!(err["error"], "validation");
    assert!(err["violations"][0]["constraint"].as_str().unwrap().contains("e3 = -e2 - e1"));

    std::fs::write(&bad, "{ \"system\": ").unwrap();
    let out = qht(&["classify", "--config", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(json(&out.stderr)["line"].as_u64().is_some());

    let out = qht(&["run", "--config", &cfg("fig2_p1.json"), "--dt", "0.5", "--propagator", "rk4", "--t-final", "10"]);
    assert_eq!(out.status.code(), Some(3));

    let out = qht(&["plot", "/nonexistent/x.csv", "--out", dir.path().join("x.svg").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));

    // RK4 far outside its stability region drives the state non-positive
    let text = std::fs::read_to_string(configs().join("fig2_p1.json")).unwrap().replace("\"alpha\": 0.001", "\"alpha\": 50.0");
    std::fs::write(&bad, text).unwrap();
    let out = qht(&[
        "run", "--config", bad.to_str().unwrap(), "--propagator", "rk4", "--dt", "0.05", "--t-final", "5",
        "--out", dir.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(4));
    assert_eq!(json(&out.stderr.split(|&b| b == b'\n').filter(|l| !l.is_empty()).last().unwrap())["error"], "physicality");
}

#[test]
fn unwritable_output_fails_before_running() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    std::fs::write(&blocker, "").unwrap();
    // a regular file where the output directory should be
    let out = qht(&["run", "--config", &cfg("fig7_t40.json"), "--out", blocker.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
    assert!(json(&out.stderr)["message"].as_str().unwrap().contains("file"));
}
