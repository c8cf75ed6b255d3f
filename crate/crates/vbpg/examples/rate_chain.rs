//! Certified versus observed linear rates on LASSO, through level-set error bounds.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use vbpg::diagnostics::{
    check_level_set_rates, check_rate_chain, check_bregman_bound, envelope_constant, estimate_level_set_rate, fit_error_bound_with_exponent,
    probe_slice, BoundKind, EBFit, LevelSlice, Moduli, ProbeOptions, ProjectionOptions, RadialSampling, RateOptions,
};
use vbpg::prelude::*;

pub fn run_example() -> Result<()> {
    let problem = build_problem(&zoo::lasso(0.3))?;
    let eps = 0.9 / problem.lipschitz();
    let kernel = KernelSpec::euclidean();
    let config = SolverConfig::new(eps, kernel.clone()).with_step_tol(1e-15).with_max_iters(5000);
    let moduli = Moduli::new(&problem, &config);
    let run = vbpg_run(&problem, &config, &Vector::from_vec(vec![2.0, -2.0, 1.5]))?;
    let center = run.final_point.clone();

    let slice = LevelSlice::new(&problem, center.clone(), 0.15, 1.0)?;
    let opts = ProbeOptions { radial: RadialSampling::LogUniform { min_fraction: 1e-4 }, ..Default::default() };
    let samples = probe_slice(&problem, &slice, &kernel, eps, 200, &mut ChaCha8Rng::seed_from_u64(8), &opts)?;

    // Function values: level-set bound -> Bregman bound -> Q-linear rate.
    let unit = fit_error_bound_with_exponent(&samples, BoundKind::LevelSubdiff, 1.0)?;
    let fit = EBFit { constant: envelope_constant(&samples, BoundKind::LevelSubdiff, 1.0)?, ..unit };
    let implied = check_bregman_bound(&samples, &slice, &moduli, &fit)?;
    let chain = check_rate_chain(&moduli, &implied, &run.f_values, slice.f_bar, &RateOptions::default())?;
    println!(
        "theta {:.3}: certified rate {:.4}, observed {:?}, holds {:?}",
        chain.theta, chain.beta_certified, chain.beta_observed, chain.holds
    );

    // Distances to the level set: observed contraction -> strong level-set constant.
    let beta_trace = estimate_level_set_rate(&problem, &run, slice.f_bar, &center, &ProjectionOptions::default(), &RateOptions::default())
        .ok()
        .map(|r| r.beta_hat);
    let k = descent_constants(ConvexityCase::of(&problem), moduli.m, moduli.big_m, moduli.l, moduli.eps_lo, moduli.eps_hi);
    let lvl = check_level_set_rates(&samples, &moduli, &k, beta_trace);
    println!(
        "level-set contraction: band {:?}, trace {:?}; strong constant {:.4} <= {:?}",
        lvl.beta_band, lvl.beta_trace, lvl.strong_constant, lvl.strong_constant_bound
    );
    Ok(())
}

fn main() {
    if let Err(e) = run_example() {
        eprintln!("{e}");
        std::process::exit(1);
    }
}
