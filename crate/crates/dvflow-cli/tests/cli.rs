use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn config(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs").join(format!("{name}.json"))
}

fn dvflow(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dvflow")).args(args).output().unwrap()
}

fn cmd(sub: &[&str], cfg: &Path, out: &Path) -> Output {
    let mut args: Vec<&str> = sub.to_vec();
    args.extend(["--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    dvflow(&args)
}

#[test]
fn list_checks_prints_inventory() {
    let o = dvflow(&["--list-checks"]);
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    for name in ["mesh_valid", "mass_drift", "centred_order", "witness_fraction", "bridge_decay[k]", "chain_boundary"] {
        assert!(text.contains(name), "{name} missing");
    }
}

#[test]
fn mesh_gen_writes_mesh_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let o = cmd(&["mesh", "gen"], &config("mesh"), dir.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    for f in ["mesh.json", "manifest.json", "report.json", "checks.txt"] {
        assert!(dir.path().join(f).exists(), "{f}");
    }
    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("manifest.json")).unwrap()).unwrap();
    assert!(manifest.get("config_hash").is_some());
    assert!(String::from_utf8(o.stdout).unwrap().contains("PASS mesh_valid"));
}

#[test]
fn run_is_deterministic() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    for d in [&a, &b] {
        let o = cmd(&["run"], &config("run_df"), d.path());
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stdout));
    }
    let read = |d: &tempfile::TempDir| std::fs::read(d.path().join("invariants.csv")).unwrap();
    let csv = read(&a);
    assert!(csv.len() > 100);
    assert_eq!(csv, read(&b));
}

#[test]
fn failing_check_sets_exit_code() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(config("run_dw")).unwrap()).unwrap();
    // RK4 drifts by ~1e-8 over this run.
    cfg["outputs"]["energy_tol"] = serde_json::json!(1e-14);
    cfg["t_end"] = serde_json::json!(0.1);
    let path = dir.path().join("strict.json");
    std::fs::write(&path, serde_json::to_string(&cfg).unwrap()).unwrap();
    let o = cmd(&["run"], &path, &dir.path().join("out"));
    assert!(!o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.contains("FAIL energy_drift"), "{text}");
    assert!(text.contains("PASS mass_drift"));
}

#[test]
fn bad_config_is_an_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(&path, r#"{"mesh": {"n": 8}, "bogus": 1}"#).unwrap();
    let o = cmd(&["run"], &path, &dir.path().join("out"));
    assert!(!o.status.success());
    assert!(!String::from_utf8(o.stderr).unwrap().is_empty());
}
