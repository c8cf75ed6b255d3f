//! Drive the `solve` and `probe` commands from a JSON config, as the binary does.
//!
//! `cargo run --example run_config -- configs/lasso_probe.json`

use std::path::{Path, PathBuf};

use vbpg::cli::{cmd_probe, cmd_solve, load_config, CliError};

fn default_config() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("configs/lasso_probe.json")
}

pub fn run_example() -> Result<(), CliError> {
    run_with(&default_config())
}

fn run_with(path: &Path) -> Result<(), CliError> {
    let cfg = load_config(path)?;
    let out = std::env::temp_dir().join(format!("vbpg_run_config_{}", std::process::id()));

    let trace = cmd_solve(&cfg, 0, &out, true)?;
    println!("solve: {} iterations, F = {:.12}", trace.iterations(), trace.final_value());
    let report = cmd_probe(&cfg, 0, &out, true)?;
    println!("probe: {} samples above F = {:.12}", report.samples, report.f_bar);
    for (name, check) in &report.checks {
        println!("  {name}: {}", check.to_string().chars().take(100).collect::<String>());
    }
    for entry in std::fs::read_dir(&out).map_err(|e| CliError::Invariant(e.to_string()))? {
        println!("wrote {}", entry.map_err(|e| CliError::Invariant(e.to_string()))?.path().display());
    }
    let _ = std::fs::remove_dir_all(&out);
    Ok(())
}

fn main() {
    let path = std::env::args().nth(1).map(PathBuf::from).unwrap_or_else(default_config);
    if let Err(e) = run_with(&path) {
        eprintln!("{e}");
        std::process::exit(e.exit_code());
    }
}
