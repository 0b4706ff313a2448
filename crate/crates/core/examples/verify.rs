//! Runs the full check suite from code instead of the binary and lists every
//! check with its value. The same report is what `gaugefree verify` prints.

use gaugefree::cli::{run, Command, RunConfig};

fn main() {
    let cfg = RunConfig::from_toml_str(
        r#"
cutoff = 6
seed = 5

[model]
type = "so_n_vector"
n = 3
"#,
    )
    .expect("valid config");
    let report = run(Command::Verify, &cfg, false);
    for check in &report.checks {
        let value = check.value.map_or("-".to_string(), |v| format!("{v:.3e}"));
        println!("{} {:<48} {value}", if check.passed { "ok  " } else { "FAIL" }, check.name);
    }
    println!("passed: {}  fingerprint: {}", report.passed, report.fingerprint);
}
