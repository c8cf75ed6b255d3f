//! Command-line front end: `solve`, `probe`, `check`, `compare`.
//!
//! Exit codes: 0 ok, 1 parse error, 2 validation failure, 3 empty slice, 4 invariant failure.
//! `VBPG_THREADS` sets the size of the worker pool.

pub mod commands;
pub mod config_file;
pub mod suite;

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

pub use commands::{check_failures, cmd_check, cmd_compare, cmd_probe, cmd_solve, load_config, CliError};
pub use config_file::RunConfig;

#[derive(Debug, Parser)]
#[command(name = "vbpg", about = "Variable Bregman proximal gradient solver and error-bound probes")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// JSON run configuration.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
    /// Refuse to run when the step-size conditions fail.
    #[arg(long)]
    pub strict: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    Solve(CommonArgs),
    Probe(CommonArgs),
    Check(CommonArgs),
    Compare(CommonArgs),
}

fn configure_threads() {
    if let Some(n) = std::env::var("VBPG_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        // A second initialization (e.g. in tests) is harmless.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
}

/// Runs a parsed command line and returns the process exit code.
pub fn run(cli: Cli) -> i32 {
    configure_threads();
    let (args, cmd) = match &cli.command {
        Command::Solve(a) => (a, "solve"),
        Command::Probe(a) => (a, "probe"),
        Command::Check(a) => (a, "check"),
        Command::Compare(a) => (a, "compare"),
    };
    let cfg = match &args.config {
        Some(path) => match load_config(path) {
            Ok(c) => c,
            Err(e) => {
                eprintln!("{e}");
                return e.exit_code();
            }
        },
        None if cmd == "check" => RunConfig::default(),
        None => {
            let e = CliError::Parse("--config is required".into());
            eprintln!("{e}");
            return e.exit_code();
        }
    };
    let result = match cmd {
        "solve" => cmd_solve(&cfg, args.seed, &args.out, args.strict).map(|t| {
            println!("{} iterations, F = {}, {:?}", t.iterations(), t.final_value(), t.termination);
        }),
        "probe" => cmd_probe(&cfg, args.seed, &args.out, args.strict).map(|r| {
            println!("{} samples on the slice around F = {}", r.samples, r.f_bar);
        }),
        "check" => cmd_check(&cfg, args.seed, &args.out, args.strict).and_then(|rs| {
            for r in &rs {
                let tag = if r.passed { "PASS" } else { "FAIL" };
                let _ = writeln!(std::io::stdout(), "{tag} {}/{} ({} samples, worst slack {:e})", r.problem, r.name, r.checked, r.worst);
            }
            check_failures(&rs).map_or(Ok(()), Err)
        }),
        _ => cmd_compare(&cfg, args.seed, &args.out, args.strict).map(|rows| {
            for r in rows {
                println!("{}: {} iterations, F = {}", r.schedule, r.iterations, r.final_value);
            }
        }),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("{e}");
            e.exit_code()
        }
    }
}
