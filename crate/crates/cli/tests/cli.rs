use std::fs;
use std::path::Path;
use std::process::{Command, Output};

const POWER: &str = "phi.family = \"power\"\nphi.p = 3.0\np = 2.5\nq = 1.5\nmesh.dim = 1\nmesh.n = 100\nsolver.seed = 2\n";

fn orlicz_mp(dir: &Path, sub: &str, config: &str, extra: &[&str]) -> Output {
    let cfg = dir.join("run.toml");
    fs::write(&cfg, config).unwrap();
    Command::new(env!("CARGO_BIN_EXE_orlicz-mp"))
        .arg(sub)
        .arg("--config")
        .arg(&cfg)
        .arg("--out")
        .arg(dir.join("out"))
        .args(extra)
        .output()
        .unwrap()
}

#[test]
fn solve_writes_fields_and_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = orlicz_mp(dir.path(), "solve", &format!("{POWER}lambda = 500.0\n"), &["--verbosity", "1"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    for f in ["report.json", "u1.csv", "u2.csv", "path_energies.csv", "mesh_nodes.csv", "mesh_elements.csv", "run.log"] {
        assert!(dir.path().join("out").join(f).is_file(), "missing {f}");
    }
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("out/report.json")).unwrap()).unwrap();
    assert_eq!(report["status"], "certificate");
    assert!(report["wall_time"].is_number());
    let u1 = fs::read_to_string(dir.path().join("out/u1.csv")).unwrap();
    assert_eq!(u1.lines().count(), 102);
}

#[test]
fn sub_threshold_exit_code() {
    let dir = tempfile::tempdir().unwrap();
    let out = orlicz_mp(dir.path(), "solve", &format!("{POWER}lambda = 40.0\n"), &[]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn config_errors_exit_with_4() {
    let dir = tempfile::tempdir().unwrap();
    let out = orlicz_mp(dir.path(), "solve", &format!("{POWER}lambda = 40.0\nbogus = 1\n"), &[]);
    assert_eq!(out.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&out.stderr).contains("bogus"));
    let out = orlicz_mp(dir.path(), "solve", "phi.family = \"power\"\nphi.p = 3.0\np = 3.5\nq = 1.5\nlambda = 1.0\n", &[]);
    assert_eq!(out.status.code(), Some(4));
    let missing = Command::new(env!("CARGO_BIN_EXE_orlicz-mp"))
        .args(["indices", "--config", "/nonexistent/run.toml"])
        .output()
        .unwrap();
    assert_eq!(missing.status.code(), Some(4));
}

#[test]
fn deterministic_reports_are_identical() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let cfg = format!("{POWER}lambda = 500.0\n");
    for d in [&a, &b] {
        let out = orlicz_mp(d.path(), "solve", &cfg, &["--deterministic", "--seed", "11"]);
        assert_eq!(out.status.code(), Some(0));
    }
    let ra = fs::read(a.path().join("out/report.json")).unwrap();
    let rb = fs::read(b.path().join("out/report.json")).unwrap();
    assert_eq!(ra, rb);
    assert!(String::from_utf8_lossy(&ra).contains("\"seed\": 11"));
}

#[test]
fn sweep_and_indices_and_verify() {
    let dir = tempfile::tempdir().unwrap();
    let sweep = format!("{POWER}sweep.lo = 100.0\nsweep.hi = 450.0\nsweep.count = 8\nsweep.bisect = 1.0\n");
    let out = orlicz_mp(dir.path(), "sweep", &sweep, &[]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    let csv = fs::read_to_string(dir.path().join("out/sweep.csv")).unwrap();
    assert_eq!(csv.lines().next(), Some("lambda,min_I,c,certificate"));
    assert_eq!(csv.lines().count(), 9);

    let out = orlicz_mp(dir.path(), "indices", &format!("{POWER}lambda = 300.0\n"), &[]);
    assert_eq!(out.status.code(), Some(0));
    assert!(dir.path().join("out/report.json").is_file());

    let out = orlicz_mp(dir.path(), "verify", &format!("{POWER}lambda = 300.0\n"), &[]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    assert!(dir.path().join("out/verify.json").is_file());
}
