use std::path::Path;
use std::process::{Command, Output};

fn sbt(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sbt"))
        .args(args)
        .current_dir(dir)
        .env("SBT_THREADS", "2")
        .output()
        .unwrap()
}

fn write(dir: &Path, name: &str, text: &str) {
    std::fs::write(dir.join(name), text).unwrap();
}

fn setup() -> tempfile::TempDir {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "circle.json", r#""circle""#);
    write(
        dir.path(),
        "loop.json",
        r#"{"modes": [{"k": 1, "cos": [1, 0, 0], "sin": [0, 1, 0.2]}, {"k": 2, "cos": [0, 0.1, 0.3], "sin": [0.2, 0, 0]}]}"#,
    );
    write(dir.path(), "force.json", r#"{"constant": [1, 0.5, 1]}"#);
    write(dir.path(), "points.csv", "x,y,z\n0,0,0.5\n0.2,0.1,0.05\n3,4,0\n");
    dir
}

#[test]
fn frame_writes_header_and_samples() {
    let dir = setup();
    let out = sbt(&["frame", "loop.json"], dir.path());
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("# kappa3="));
    assert_eq!(lines.next().unwrap(), "s,etx,ety,etz,en1x,en1y,en1z,en2x,en2y,en2z,kappa1,kappa2");
    assert_eq!(lines.count(), 512);
}

#[test]
fn eval_writes_velocity_and_pressure() {
    let dir = setup();
    let out = sbt(&["eval", "circle.json", "force.json", "points.csv", "--eps", "0.01", "-o", "u.csv"], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let mut reader = csv::Reader::from_path(dir.path().join("u.csv")).unwrap();
    assert_eq!(reader.headers().unwrap().iter().collect::<Vec<_>>(), ["x", "y", "z", "ux", "uy", "uz", "p"]);
    assert_eq!(reader.records().count(), 3);
}

#[test]
fn validation_errors_exit_with_2() {
    let dir = setup();
    let out = sbt(&["eval", "circle.json", "force.json", "points.csv", "--eps", "0.05"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    write(dir.path(), "short.json", r#"{"centerline": "circle", "force": "constant", "eps_list": [0.01, 0.005]}"#);
    assert_eq!(sbt(&["sweep", "short.json"], dir.path()).status.code(), Some(2));
    write(dir.path(), "bad.json", r#"{"centerline": "spiral", "force": "constant"}"#);
    assert_eq!(sbt(&["sweep", "bad.json"], dir.path()).status.code(), Some(2));
    write(dir.path(), "near.csv", "0.159,0,0\n");
    assert_eq!(sbt(&["eval", "circle.json", "force.json", "near.csv", "--eps", "0.01"], dir.path()).status.code(), Some(2));
}

#[test]
fn unreachable_tolerance_exits_with_3() {
    let dir = setup();
    write(
        dir.path(),
        "strict.json",
        r#"{"centerline": "circle", "force": "harmonic", "eps_list": [0.01, 0.005, 0.0025], "n_s": 2, "n_theta": 32,
            "quadrature": {"base_nodes": 64, "near_window": 0.125, "near_refinement_levels": 1, "target_rel_tol": 1e-18}}"#,
    );
    let out = sbt(&["sweep", "strict.json", "--out-dir", "out"], dir.path());
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
    let report: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("out/report.json")).unwrap()).unwrap();
    assert_eq!(report["failures"].as_array().unwrap().len(), 3);
}

#[test]
fn residuals_write_json_and_summary() {
    let dir = setup();
    let out = sbt(
        &["residuals", "circle.json", "force.json", "--eps", "0.005", "--ntheta", "32", "--ns", "4", "--out-dir", "res"],
        dir.path(),
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let json: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("res/cross_sections.json")).unwrap()).unwrap();
    let sections = json.as_array().unwrap();
    assert_eq!(sections.len(), 4);
    assert_eq!(sections[0]["n_theta"], 32);
    let summary = std::fs::read_to_string(dir.path().join("res/summary.csv")).unwrap();
    assert!(summary.starts_with("s,force_residual,ur_max,centerline_residual_max"));
    assert_eq!(summary.lines().count(), 5);
}

#[test]
fn verify_lemmas_succeeds() {
    let dir = setup();
    let out = sbt(&["verify-lemmas"], dir.path());
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().filter(|l| l.ends_with("ok")).count(), 13);
}
