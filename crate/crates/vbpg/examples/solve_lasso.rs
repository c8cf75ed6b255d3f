//! Solve a small LASSO problem and read the linear rate off the trace.

use vbpg::diagnostics::{estimate_q_linear_rate, RateOptions};
use vbpg::prelude::*;

pub fn run_example() -> Result<()> {
    let problem = build_problem(&zoo::lasso(0.3))?;
    let eps = 0.9 / problem.lipschitz();
    let config = SolverConfig::new(eps, KernelSpec::euclidean()).with_step_tol(1e-13).with_strict(true);
    validate_config(&problem, &config).into_result()?;

    let trace = vbpg_run(&problem, &config, &Vector::from_vec(vec![2.0, -2.0, 1.5]))?;
    println!("{:?} after {} iterations", trace.termination, trace.iterations());
    println!("F(x0) = {:.6}, F(x*) = {:.12}", trace.f_values[0], trace.final_value());
    println!("x* = {:?}", trace.final_point.as_slice());

    let rate = estimate_q_linear_rate(&trace.f_values, trace.final_value(), &RateOptions::default())?;
    println!("q-linear rate over iterations {:?}: {:.4}", rate.window, rate.beta_hat);
    assert!(rate.beta_hat < 1.0);
    assert!(trace.min_descent_slack >= -1e-12);
    Ok(())
}

fn main() {
    if let Err(e) = run_example() {
        eprintln!("{e}");
        std::process::exit(1);
    }
}
