use std::path::PathBuf;
use std::process::{Command, Output};

fn config(name: &str) -> String {
    format!("{}/configs/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn gaugefree(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gaugefree"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn scratch(name: &str) -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR"));
    dir.join(name)
}

#[test]
fn passing_run_exits_zero() {
    let out = gaugefree(&["verify", "--config", &config("so2_harmonic.toml")]);
    assert_eq!(out.status.code(), Some(0));
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["passed"], true);
    assert_eq!(report["command"], "verify");
    assert_eq!(report["fingerprint"].as_str().unwrap().len(), 64);
}

#[test]
fn broken_generators_exit_one() {
    let out = gaugefree(&["verify", "--config", &config("broken_generators.toml")]);
    assert_eq!(out.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("generators.closure"), "{stderr}");
}

#[test]
fn config_errors_exit_two() {
    let missing = gaugefree(&["basis", "--config", "/nonexistent/run.toml"]);
    assert_eq!(missing.status.code(), Some(2));

    let bad = scratch("bad.toml");
    std::fs::write(&bad, "cutoff = 4\nunknown_key = 1\n").unwrap();
    assert_eq!(gaugefree(&["basis", "--config", bad.to_str().unwrap()]).status.code(), Some(2));

    std::fs::write(&bad, "cutoff = 4\n[model]\ntype = \"so_n_vector\"\nn = 1\n").unwrap();
    let out = gaugefree(&["basis", "--config", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("model.n"));
}

#[test]
fn csv_output_to_file() {
    let path = scratch("spectrum.csv");
    let out = gaugefree(&[
        "spectrum",
        "--cutoff",
        "6",
        "--format",
        "csv",
        "--output",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("path,value\n"));
    assert!(text.contains("config.cutoff,6\n"));
    assert!(text.contains("\npassed,true\n"));
}

#[test]
fn seed_changes_monte_carlo_report() {
    let cfg = config("so4_montecarlo.toml");
    let a = gaugefree(&["projector", "--config", &cfg, "--seed", "1"]);
    let b = gaugefree(&["projector", "--config", &cfg, "--seed", "2"]);
    let c = gaugefree(&["projector", "--config", &cfg, "--seed", "1"]);
    assert_eq!(a.stdout, c.stdout);
    assert_ne!(a.stdout, b.stdout);
}

#[test]
fn every_subcommand_runs() {
    for cmd in ["basis", "projector", "spectrum", "evolve"] {
        let out = gaugefree(&[cmd, "--config", &config("so3_harmonic.toml")]);
        assert_eq!(out.status.code(), Some(0), "{cmd}: {}", String::from_utf8_lossy(&out.stderr));
    }
}
