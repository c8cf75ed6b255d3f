//! A function with an isolated dip: a level-set error bound holds, the KL inequality fails.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use vbpg::diagnostics::{fit_error_bound, kl_refutation, probe_slice, BoundKind, LevelSlice, ProbeOptions};
use vbpg::prelude::*;

pub fn run_example() -> Result<()> {
    // (x - c)^2/2 away from c, and -1 at c.
    let c = 0.5;
    let problem = build_problem(&zoo::punctured(c))?;
    let slice = LevelSlice::new(&problem, Vector::from_element(1, c), 1.0, 2.0)?;
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let samples = probe_slice(&problem, &slice, &KernelSpec::euclidean(), 0.9, 400, &mut rng, &ProbeOptions::default())?;

    let lvl = fit_error_bound(&samples, BoundKind::LevelSubdiff)?;
    println!("dist_level <= {:.6} dist(0, dF)^{:.6}", lvl.constant, lvl.exponent);

    // The value gap stays above 1 near c, so no power of it is dominated by |F'| -> 0.
    let alphas: Vec<f64> = (1..20).map(|i| i as f64 * 0.05).collect();
    for (alpha, frac) in kl_refutation(&samples, &alphas)?.iter().step_by(4) {
        println!("alpha {alpha:.2}: KL inequality fails on {:.0}% of samples", 100.0 * frac);
    }
    assert!((lvl.exponent - 1.0).abs() < 1e-6);
    Ok(())
}

fn main() {
    if let Err(e) = run_example() {
        eprintln!("{e}");
        std::process::exit(1);
    }
}
