//! Constants of the three-point descent inequality, and sampled slacks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use vbpg::prelude::*;

pub fn run_example() -> Result<()> {
    let cases = [ConvexityCase::General, ConvexityCase::SmoothConvex, ConvexityCase::RegularizerConvex, ConvexityCase::BothConvex];
    let (m, big_m, l, eps) = (1.0, 2.0, 1.0, 0.5);
    println!("m {m}, M {big_m}, L {l}, eps {eps}");
    for case in cases {
        let k = descent_constants(case, m, big_m, l, eps, eps);
        println!("{case:?}: a {:.3}, b {:.3}, c {:.3}", k.a, k.b, k.c);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for spec in [zoo::lasso(0.3), zoo::box_quadratic(), zoo::quadratic_mcp()] {
        let problem = build_problem(&spec)?;
        let kernel = KernelSpec::euclidean();
        let eps = 0.5 / problem.lipschitz();
        let mut worst = f64::INFINITY;
        for _ in 0..200 {
            let x = Vector::from_fn(problem.dim(), |_, _| rng.gen_range(-1.0..1.0));
            let u = Vector::from_fn(problem.dim(), |_, _| rng.gen_range(-1.0..1.0));
            worst = worst.min(check_descent_inequality(&problem, &kernel, eps, eps, eps, &x, &u)?);
        }
        println!("{:<14} {:?}: worst slack over 200 pairs {worst:.4}", problem.name, ConvexityCase::of(&problem));
        assert!(worst >= -1e-10);
    }
    Ok(())
}

fn main() {
    if let Err(e) = run_example() {
        eprintln!("{e}");
        std::process::exit(1);
    }
}
