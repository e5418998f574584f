use std::path::{Path, PathBuf};
use std::process::Command;

const BURGERS: &str = r#"
[model]
name = "burgers"

[initial_data]
window = [0.0, 2.0]
breaks = [0.3]
states = [[1.0], [0.0]]

[scheme]
id = "godunov"
dx = 0.004
dt = 0.002
t_final = 0.4

[postprocess]
sigma_flag = 0.0063
k_flag = 25.0
kappa_prime = 0.1
sigma_min = 0.4
tv_cap = TVCAP

[output]
dir = "unused"
reference_refinement = 4
"#;

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("shockcert-cli-{}-{name}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn write_config(dir: &Path, tv_cap: f64) -> PathBuf {
    let path = dir.join("run.toml");
    std::fs::write(&path, BURGERS.replace("TVCAP", &format!("{tv_cap:?}"))).unwrap();
    path
}

fn shockcert(out: &Path, args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_shockcert"))
        .args(args)
        .env("SHOCKCERT_OUTPUT_DIR", out)
        .output()
        .unwrap()
}

#[test]
fn run_writes_a_certificate_and_exits_zero() {
    let dir = scratch("run");
    let cfg = write_config(&dir, 10.0);
    let out = dir.join("out");
    let o = shockcert(&out, &["run", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let cert: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("certificate.json")).unwrap()).unwrap();
    assert_eq!(cert["status"], "ok");
    let bound = cert["bound"].as_f64().unwrap();
    let err = cert["true_error"].as_f64().unwrap();
    assert!(bound > 0.0 && err >= 0.0);
    for f in ["flags.csv", "traces.csv", "covers.csv", "kappa.csv", "residuals.csv", "run_manifest.txt"] {
        assert!(out.join(f).is_file(), "missing {f}");
    }
}

#[test]
fn tv_gate_failure_exits_two_with_no_estimate() {
    let dir = scratch("gate");
    let cfg = write_config(&dir, 0.5);
    let out = dir.join("out");
    let o = shockcert(&out, &["run", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let cert: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("certificate.json")).unwrap()).unwrap();
    assert_eq!(cert["status"], "no estimate");
    assert!(cert["bound"].is_null());
}

#[test]
fn sweep_tabulates_one_row_per_mesh() {
    let dir = scratch("sweep");
    let cfg = write_config(&dir, 10.0);
    let out = dir.join("out");
    let o = shockcert(&out, &["sweep", "--config", cfg.to_str().unwrap(), "--dx", "0.004,0.002"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let table = std::fs::read_to_string(out.join("sweep.csv")).unwrap();
    let lines: Vec<&str> = table.lines().collect();
    assert_eq!(lines[0], "dx,dt,eps,true_error,term_smooth,term_shock,bound,ratio");
    assert_eq!(lines.len(), 3);
}

#[test]
fn verify_prints_residuals() {
    let dir = scratch("verify");
    let cfg = write_config(&dir, 10.0);
    let o = shockcert(&dir.join("out"), &["verify", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let stdout = String::from_utf8_lossy(&o.stdout);
    assert!(stdout.contains("lipschitz constant"));
    assert!(stdout.lines().filter(|l| l.contains("residual")).count() >= 6);
}

#[test]
fn bad_config_is_an_error() {
    let dir = scratch("bad");
    let path = dir.join("bad.toml");
    std::fs::write(&path, "[model]\nname = \"euler\"\n").unwrap();
    let o = shockcert(&dir.join("out"), &["run", "--config", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).starts_with("error:"));
}
