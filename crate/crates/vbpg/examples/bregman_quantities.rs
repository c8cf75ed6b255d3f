//! Prox point, envelope and gap for two kernels on a nonconvex problem.

use vbpg::prelude::*;

pub fn run_example() -> Result<()> {
    let problem = build_problem(&zoo::quadratic_mcp())?;
    let x = Vector::from_vec(vec![0.8, -0.4, 1.1]);
    let fx = problem.value(&x);
    let kernels = [
        ("euclidean", KernelSpec::euclidean()),
        ("diagonal", KernelSpec::diagonal(Vector::from_vec(vec![1.0, 1.5, 2.0]))?),
    ];
    for (name, kernel) in &kernels {
        // Stay inside both step limits: m/L and m/rho.
        let rho = problem.rho().unwrap_or(0.0);
        let eps = 0.9 * (kernel.m() / problem.lipschitz()).min(if rho > 0.0 { kernel.m() / rho } else { f64::INFINITY });
        let p = prox_map(&problem, kernel, eps, &x)?;
        let defect = fx - p.envelope - eps * p.gap;
        println!(
            "{name:<9} eps {eps:.4}  T(x) {:?}  E {:.6}  G {:.6}  F - E - eps G = {defect:.1e}",
            p.minimizer.as_slice(),
            p.envelope,
            p.gap
        );
        assert!(p.gap >= 0.0 && p.envelope <= fx + 1e-12);
        assert!(defect.abs() <= 1e-10 * fx.abs().max(1.0));
        let d = kernel.distance(&x, &p.minimizer);
        println!("          D(x, T(x)) = {d:.6}");
    }
    Ok(())
}

fn main() {
    if let Err(e) = run_example() {
        eprintln!("{e}");
        std::process::exit(1);
    }
}
