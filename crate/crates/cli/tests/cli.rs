use std::fs;
use std::process::Command;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_ns-halfline"));
    c.env_remove("NS_HALFLINE_OUT");
    c
}

const SHORT: &str = r#"
name = "cli-short"
[gas]
gamma = 2.0
[shock]
v_plus = 1.0
u_plus = -0.1
[grid]
dx = 0.25
beta = 100.0
length = 200.0
[time]
t_end = 0.5
output_stride = 20
"#;

#[test]
fn test_run_writes_artifacts_and_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("s.toml");
    fs::write(&config, SHORT).unwrap();
    let out = dir.path().join("out");
    let status = bin()
        .args(["run", "--config"])
        .arg(&config)
        .arg("--out")
        .arg(&out)
        .output()
        .unwrap();
    assert!(
        status.status.success(),
        "{}",
        String::from_utf8_lossy(&status.stderr)
    );
    for f in ["metadata.json", "diagnostics.csv", "shift.csv", "plot.csv"] {
        assert!(out.join(f).exists(), "{f}");
    }
    let report: serde_json::Value = serde_json::from_slice(&status.stdout).unwrap();
    assert_eq!(report["name"], "cli-short");
}

#[test]
fn test_output_directory_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("s.toml");
    fs::write(&config, SHORT.replace("t_end = 0.5", "t_end = 0.0")).unwrap();
    let out = dir.path().join("env-out");
    let status = bin()
        .args(["run", "--config"])
        .arg(&config)
        .env("NS_HALFLINE_OUT", &out)
        .output()
        .unwrap();
    assert!(status.status.success());
    assert_eq!(
        fs::read_to_string(out.join("diagnostics.csv"))
            .unwrap()
            .lines()
            .count(),
        2
    );
}

#[test]
fn test_invalid_config_fails_with_a_message() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("bad.toml");
    fs::write(&config, SHORT.replace("u_plus = -0.1", "u_plus = 0.1")).unwrap();
    let status = bin()
        .args(["run", "--config"])
        .arg(&config)
        .arg("--out")
        .arg(dir.path())
        .output()
        .unwrap();
    assert!(!status.status.success());
    assert!(String::from_utf8_lossy(&status.stderr).contains("entropy condition"));
}

#[test]
fn test_unknown_preset_is_rejected() {
    let status = bin().args(["run", "--preset", "nope"]).output().unwrap();
    assert!(!status.status.success());
    assert!(String::from_utf8_lossy(&status.stderr).contains("impermeable-weak-shock"));
}

#[test]
fn test_profile_subcommand_exports_csv() {
    let dir = tempfile::tempdir().unwrap();
    let status = bin()
        .args(["profile", "--preset", "impermeable-weak-shock", "--out"])
        .arg(dir.path())
        .output()
        .unwrap();
    assert!(
        status.status.success(),
        "{}",
        String::from_utf8_lossy(&status.stderr)
    );
    let text = fs::read_to_string(dir.path().join("profile.csv")).unwrap();
    assert_eq!(text.lines().next(), Some("zeta,v,u"));
}

#[test]
fn test_sweep_runs_every_value() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("s.toml");
    fs::write(&config, SHORT.replace("t_end = 0.5", "t_end = 0.1")).unwrap();
    let out = dir.path().join("sweep");
    let status = bin()
        .args([
            "sweep", "--key", "time.cfl", "--values", "0.2,0.4", "--config",
        ])
        .arg(&config)
        .arg("--out")
        .arg(&out)
        .output()
        .unwrap();
    assert!(
        status.status.success(),
        "{}",
        String::from_utf8_lossy(&status.stdout)
    );
    assert!(out.join("time.cfl=0.2/diagnostics.csv").exists());
    assert!(out.join("time.cfl=0.4/diagnostics.csv").exists());
}

#[test]
fn test_check_suites_pass() {
    let status = bin().args(["check", "--seed", "3"]).output().unwrap();
    assert!(
        status.status.success(),
        "{}",
        String::from_utf8_lossy(&status.stdout)
    );
    let report: serde_json::Value = serde_json::from_slice(&status.stdout).unwrap();
    assert_eq!(report["poincare"]["violations"], 0);
}
