//! Fitted KL and level-set exponents of |x|^p against the exact values.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use vbpg::diagnostics::{check_exponent_relations, fit_error_bound, probe_slice, BoundKind, LevelSlice, ProbeOptions, RadialSampling};
use vbpg::prelude::*;

pub fn run_example() -> Result<()> {
    for p in [1.5, 2.0, 4.0] {
        let problem = build_problem(&zoo::power_profile(p))?;
        let slice = LevelSlice::new(&problem, Vector::zeros(1), 1.0, 10.0)?;
        let opts = ProbeOptions { radial: RadialSampling::LogUniform { min_fraction: 1e-3 }, ..Default::default() };
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let samples = probe_slice(&problem, &slice, &KernelSpec::euclidean(), 0.5, 300, &mut rng, &opts)?;
        let kl = fit_error_bound(&samples, BoundKind::Kl)?;
        let lvl = fit_error_bound(&samples, BoundKind::LevelSubdiff)?;
        let sharp = fit_error_bound(&samples, BoundKind::Sharpness)?;
        let alpha = 1.0 - 1.0 / p;
        println!("p {p}: KL exponent {:.4} (exact {alpha:.4}), level-set exponent {:.4} (exact {:.4})", kl.exponent, lvl.exponent, alpha / (1.0 - alpha));
        let link = check_exponent_relations(&kl, &lvl, &sharp, 0.05)?;
        println!("      predicted from alpha: level-set {}, sharpness {}", link.gamma_ok, link.beta_ok);
        assert!((kl.exponent - alpha).abs() < 0.05);
    }
    Ok(())
}

fn main() {
    if let Err(e) = run_example() {
        eprintln!("{e}");
        std::process::exit(1);
    }
}
