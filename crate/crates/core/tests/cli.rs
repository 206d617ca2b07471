use std::path::Path;
use std::process::Command;

const BIN: &str = env!("CARGO_BIN_EXE_projhull");

fn configs() -> std::path::PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn run(args: &[&str], cwd: &Path) -> (i32, String) {
    let out = Command::new(BIN).args(args).current_dir(cwd).output().unwrap();
    (out.status.code().unwrap_or(-1), String::from_utf8_lossy(&out.stdout).into_owned())
}

fn write_config(dir: &Path, name: &str, body: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p.to_string_lossy().into_owned()
}

#[test]
fn scan_writes_one_row_per_cell_and_degree() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        "scan.json",
        r#"{
  "geometry": {"generator": {"kind": "circle_in_line", "radius": 1.0}, "samples": 64},
  "task": {"kind": "scan", "line": {"chart": 0, "origin": [[0.0, 0.0]], "direction": [[1.0, 0.0]]},
           "grid": {"kind": "rect", "re_min": -2.0, "re_max": 2.0, "im_min": -1.0, "im_max": 1.0, "nx": 5, "ny": 3},
           "degrees": [1, 2, 4]},
  "seed": 1
}"#,
    );
    let out = tmp.path().join("out");
    let (code, _) = run(&["scan", "--config", &cfg, "--out", out.to_str().unwrap()], tmp.path());
    assert_eq!(code, 0);
    let text = std::fs::read_to_string(out.join("scan.csv")).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "re_z1,im_z1,d,lam_lo,lam_hi,status");
    assert_eq!(lines.count(), 15 * 3);
    let manifest: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(out.join("manifest.json")).unwrap()).unwrap();
    let list = manifest["artifact_list"].as_array().unwrap();
    assert_eq!(list.len(), 2);
    assert_eq!(manifest["command"], "scan");
    assert_eq!(manifest["seed"], 1);
}

#[test]
fn jensen_scene_passes() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = configs().join("circle_jensen.json");
    let out = tmp.path().join("j");
    let (code, _) = run(&["jensen", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()], tmp.path());
    assert_eq!(code, 0);
    let j: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(out.join("jensen.json")).unwrap()).unwrap();
    assert_eq!(j["pass"], true);
    assert!(out.join("green.csv").exists());
}

#[test]
fn malformed_config_writes_nothing() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("never");
    let bad = [
        r#"{"geometry": {"generator": {"kind": "circle_in_line", "radius": 1.0}, "samples": 64}, "task": {"kind": "extremal", "points": [[[0.0, 0.0]]], "degrees": [2, 1]}}"#,
        r#"{"geometry": {"generator": {"kind": "circle_in_line", "radius": 1.0}, "samples": 64}, "task": {"kind": "extremal", "points": [[[0.0, 0.0]]], "degrees": [1]}, "colour": 3}"#,
        r#"{"geometry": {"generator": {"kind": "circle_in_line", "radius": -1.0}, "samples": 64}, "task": {"kind": "extremal", "points": [[[0.0, 0.0]]], "degrees": [1]}}"#,
        r#"{"geometry": "#,
    ];
    for (i, body) in bad.iter().enumerate() {
        let cfg = write_config(tmp.path(), &format!("bad{i}.json"), body);
        let (code, _) = run(&["extremal", "--config", &cfg, "--out", out.to_str().unwrap()], tmp.path());
        assert_eq!(code, 1, "config {i}");
        assert!(!out.exists(), "config {i} wrote output");
    }
    // a valid config for the wrong command
    let cfg = configs().join("norms.json");
    let (code, _) = run(&["scan", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()], tmp.path());
    assert_eq!(code, 1);
    assert!(!out.exists());
}

#[test]
fn selftest_list_names_all_criteria() {
    let tmp = tempfile::tempdir().unwrap();
    let (code, stdout) = run(&["selftest", "--list"], tmp.path());
    assert_eq!(code, 0);
    assert_eq!(stdout.lines().filter(|l| l.starts_with('C')).count(), 8);
}

#[test]
fn perturbed_tolerance_fails_selftest() {
    let tmp = tempfile::tempdir().unwrap();
    let out = Command::new(BIN)
        .args(["selftest"])
        .env("PROJHULL_TOL_C3", "1e-30")
        .current_dir(tmp.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.lines().any(|l| l.starts_with("C3") && l.contains("FAIL")), "{stdout}");
}

#[test]
fn runs_are_deterministic() {
    let tmp = tempfile::tempdir().unwrap();
    let mut hashes = Vec::new();
    for (i, threads) in ["1", "4"].iter().enumerate() {
        let out = tmp.path().join(format!("run{i}"));
        let (code, _) = run(&["example", "exp_graph", "--out", out.to_str().unwrap(), "--threads", threads], tmp.path());
        assert_eq!(code, 0);
        let m: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(out.join("manifest.json")).unwrap()).unwrap();
        hashes.push((m["config_hash"].clone(), m["artifact_list"].clone()));
    }
    assert_eq!(hashes[0], hashes[1]);
}

#[test]
fn shipped_configs_run() {
    let tmp = tempfile::tempdir().unwrap();
    for (cmd, file) in [
        (vec!["extremal"], "circle_extremal.json"),
        (vec!["norms"], "norms.json"),
        (vec!["spectrum"], "circle_spectrum.json"),
        (vec!["example", "torus_exp_curve"], "torus_exp_curve.json"),
    ] {
        let cfg = configs().join(file);
        let out = tmp.path().join(file);
        let mut args = cmd.clone();
        args.extend(["--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
        let (code, _) = run(&args, tmp.path());
        assert_eq!(code, 0, "{file}");
        assert!(out.join("manifest.json").exists());
    }
}
