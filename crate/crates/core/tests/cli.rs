use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use kcs_core::grid::PhaseGrid;
use kcs_core::io::snapshot::{write_snapshot, Snapshot};

fn kcs(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kcs")).args(args).output().unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn default_config() -> String {
    fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("configs/default.kcs")).unwrap()
}

fn write_variant(dir: &Path, name: &str, from: &str, to: &str) -> String {
    let text = default_config();
    assert!(text.contains(from));
    let path = dir.join(name);
    fs::write(&path, text.replacen(from, to, 1)).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn missing_config_is_a_usage_error() {
    let o = kcs(&["simulate", "/nonexistent/run.kcs"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("/nonexistent/run.kcs"));
}

#[test]
fn out_of_range_sigma_names_the_constraint() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_variant(dir.path(), "s.kcs", "sigma = 0", "sigma = 1.5");
    let o = kcs(&["simulate", &cfg]);
    assert_eq!(o.status.code(), Some(2));
    let err = stderr(&o);
    assert!(err.contains("0 ≤ σ ≤ 1"), "{err}");
    assert!(err.contains("line 16"), "{err}");
}

#[test]
fn small_alpha_names_the_constraint() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_variant(dir.path(), "a.kcs", "alpha = 4", "alpha = 2");
    let o = kcs(&["verify", &cfg]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("α > 3"), "{}", stderr(&o));
}

#[test]
fn unknown_section_reports_position() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_variant(dir.path(), "u.kcs", "[weight]", "[weights]");
    let o = kcs(&["simulate", &cfg]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line 26"), "{}", stderr(&o));
}

#[test]
fn inspect_prints_header() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("g.kcs1");
    let mut f = PhaseGrid::zeros(6, 4, 2.0, 1.5);
    f.set(2, 1, 3.0);
    f.set_t(0.75);
    write_snapshot(&Snapshot::grid(f, 0.1), &path).unwrap();
    let o = kcs(&["inspect", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let out = String::from_utf8_lossy(&o.stdout);
    assert!(out.contains("grid"), "{out}");
    assert!(out.contains('6') && out.contains('4') && out.contains("0.75"), "{out}");
}

#[test]
fn corrupt_snapshot_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.kcs1");
    fs::write(&path, b"KCS1\x01\x01\x00\x00garbage").unwrap();
    let o = kcs(&["inspect", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("corrupt snapshot"));
}

#[test]
fn default_config_verifies() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = Path::new(env!("CARGO_MANIFEST_DIR")).join("configs/default.kcs");
    let o = kcs(&["verify", cfg.to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
    let out = String::from_utf8_lossy(&o.stdout);
    assert_eq!(o.status.code(), Some(0), "{out}\n{}", stderr(&o));
    assert!(!out.contains("FAIL"));
    for file in ["summary.json", "grid.csv", "particles.csv", "grid_final.kcs"] {
        assert!(dir.path().join(file).exists(), "missing {file}");
    }
    let summary: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("summary.json")).unwrap()).unwrap();
    assert!(summary.is_object());
}
