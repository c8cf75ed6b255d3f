//! Kernel and step-size schedules on a coupled quadratic with an l1 term.

use vbpg::prelude::*;

pub fn run_example() -> Result<()> {
    let spec = ProblemSpec::new(
        "coupled",
        SmoothSpec::Quadratic {
            q: vec![vec![10.0, 1.0, 0.0, 0.0], vec![1.0, 8.0, 0.0, 0.0], vec![0.0, 0.0, 1.0, 0.2], vec![0.0, 0.0, 0.2, 0.5]],
            b: Some(vec![1.0, -2.0, 0.5, 0.3]),
        },
        Penalty::L1 { lambda: 0.1 },
    );
    let problem = build_problem(&spec)?;
    let l = problem.lipschitz();
    let x0 = Vector::from_element(4, 1.0);

    let euclid = KernelSpec::euclidean();
    let diag = KernelSpec::diagonal(Vector::from_vec(vec![1.0, 1.0, 0.5, 0.5]))?;
    let jacobi = kernel_schedule_jacobi(&problem, &[vec![0, 1], vec![2, 3]], &[0.5, 0.5])?;
    let jacobi_m = jacobi.m();
    let runs = [
        ("euclidean", SolverConfig::new(0.9 / l, euclid.clone())),
        (
            "cyclic",
            SolverConfig {
                epsilon: EpsilonSchedule::Cyclic(vec![0.45 / l, 0.9 * 0.5 / l]),
                kernel: KernelSchedule::Cyclic(vec![euclid, diag]),
                ..SolverConfig::new(0.9 / l, KernelSpec::euclidean())
            },
        ),
        // Block-Jacobi: the kernel holds the diagonal blocks of Q plus a shift.
        ("block_jacobi", SolverConfig { kernel: jacobi, ..SolverConfig::new(0.9 * jacobi_m / l, KernelSpec::euclidean()) }),
    ];
    for (name, config) in runs {
        let config = config.with_step_tol(1e-12).with_max_iters(20_000);
        validate_config(&problem, &config).into_result()?;
        let t = vbpg_run(&problem, &config, &x0)?;
        println!("{name:<13} {:>5} iterations  F = {:.12}  {:?}", t.iterations(), t.final_value(), t.termination);
        assert!(t.f_values.windows(2).all(|w| w[1] <= w[0] + 1e-12));
    }
    Ok(())
}

fn main() {
    if let Err(e) = run_example() {
        eprintln!("{e}");
        std::process::exit(1);
    }
}
