//! Sampled growth conditions around a critical point of x^2 + 3 sin^2 x.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use vbpg::diagnostics::{approximate_critical_set, certify_conditions, check_critical_values, LevelSlice};
use vbpg::prelude::*;

pub fn run_example() -> Result<()> {
    let problem = build_problem(&zoo::square_plus_sine(1))?;
    let kernel = KernelSpec::euclidean();
    let eps = 0.9 / problem.lipschitz();
    let center = Vector::zeros(1);
    let critical = approximate_critical_set(&problem, &kernel, eps, &center, 2.0, 9)?;
    println!("critical points: {:?}", critical.points.iter().map(|p| p[0]).collect::<Vec<_>>());

    let slice = LevelSlice::new(&problem, center.clone(), 1.0, 2.0)?;
    let report = certify_conditions(&problem, &slice, &critical, 300, &mut ChaCha8Rng::seed_from_u64(3))?;
    for c in &report.conditions {
        println!("{:<28} holds {:<5} modulus {:?}  {}", c.name, c.holds, c.modulus, c.note);
    }
    let critical_values = check_critical_values(&problem, &center, &critical, 1.0);
    println!("{critical_values:?}");
    Ok(())
}

fn main() {
    if let Err(e) = run_example() {
        eprintln!("{e}");
        std::process::exit(1);
    }
}
