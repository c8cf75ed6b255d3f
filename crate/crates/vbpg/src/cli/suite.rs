//! Invariant suite behind the `check` subcommand.

use rand::Rng;
use serde::Serialize;

use crate::bregman::{check_descent_inequality, descent_modulus, prox_map, prox_subgradient};
use crate::config::SolverConfig;
use crate::diagnostics::theorems::prox_gap_slacks;
use crate::error::Result;
use crate::linalg::check_gradient;
use crate::model::{Problem, Vector};
use crate::solver::{vbpg_run, Termination};

#[derive(Clone, Debug, Serialize)]
pub struct InvariantResult {
    pub problem: String,
    pub name: String,
    pub passed: bool,
    pub checked: usize,
    /// Worst normalized slack; negative values are violations.
    pub worst: f64,
}

fn sample_point<R: Rng>(problem: &Problem, rng: &mut R, half: f64) -> Vector {
    let n = problem.dim();
    for _ in 0..10_000 {
        let x = Vector::from_fn(n, |_, _| rng.gen_range(-half..half));
        if problem.value(&x).is_finite() {
            return x;
        }
    }
    Vector::zeros(n)
}

struct Tally {
    name: &'static str,
    checked: usize,
    worst: f64,
}

impl Tally {
    fn new(name: &'static str) -> Self {
        Tally { name, checked: 0, worst: f64::INFINITY }
    }
    fn add(&mut self, slack: f64) {
        self.checked += 1;
        self.worst = self.worst.min(slack);
    }
    fn finish(self, problem: &Problem) -> InvariantResult {
        InvariantResult {
            problem: problem.name.clone(),
            name: self.name.into(),
            passed: self.worst >= 0.0,
            checked: self.checked,
            worst: self.worst,
        }
    }
}

/// Runs every invariant on `problem` with the first kernel and step of `config`.
/// Solver-level invariants are skipped for problems that are not level bounded.
pub fn run_invariants<R: Rng>(problem: &Problem, config: &SolverConfig, samples: usize, rng: &mut R) -> Result<Vec<InvariantResult>> {
    let kernel = config.kernel.at(0);
    let eps = config.epsilon.at(0);
    let l = problem.lipschitz();
    let (m, big_m) = (kernel.m(), kernel.big_m());
    let eps_hi = config.epsilon.hi();
    let eps_lo = config.epsilon.lo();
    let mut out = Vec::new();

    let mut grad = Tally::new("gradient_check");
    for _ in 0..5 {
        let x = sample_point(problem, rng, 2.0);
        let err = check_gradient(problem.f.as_ref(), &x, f64::INFINITY)?;
        grad.add(1e-5 - err);
    }
    out.push(grad.finish(problem));

    let mut lip = Tally::new("gradient_lipschitz");
    let mut gap_id = Tally::new("gap_identity");
    let mut decrease = Tally::new("sufficient_decrease");
    let mut resid = Tally::new("residual_bound");
    let mut descent = Tally::new("descent_inequality");
    let mut pgap = Tally::new("prox_gap_bounds");
    let a = descent_modulus(m, l, eps_hi);
    let anchor = if problem.level_bounded {
        let cfg = SolverConfig { max_iters: 5000, ..config.clone() };
        Some(vbpg_run(problem, &cfg, &sample_point(problem, rng, 1.0))?.final_point)
    } else {
        None
    };
    let gap_bounds_apply = problem.rho().is_some_and(|rho| m - eps * rho > 0.0) && problem.subdiff_dist(&Vector::zeros(problem.dim())).is_some();
    for i in 0..samples {
        let x = sample_point(problem, rng, 2.0);
        let y = sample_point(problem, rng, 2.0);
        let dx = (&x - &y).norm();
        if dx > 0.0 {
            let dg = (problem.gradient(&x) - problem.gradient(&y)).norm();
            lip.add(l * dx * (1.0 + 1e-9) - dg);
        }
        let p = prox_map(problem, kernel, eps, &x)?;
        let fx = problem.value(&x);
        let scale = 1.0 + fx.abs();
        gap_id.add(1e-10 - (fx - p.envelope - eps * p.gap).abs() / scale);
        gap_id.add(p.gap / scale + 1e-12);
        let t = &p.minimizer;
        let step = (&x - t).norm();
        decrease.add((p.envelope - a * step * step - problem.value(t)) / scale + 1e-10);
        let xi = prox_subgradient(problem, kernel, eps, &x, t);
        resid.add((l + big_m / eps_lo) * step * (1.0 + 1e-9) - xi.norm() + 1e-14);
        let u = match (&anchor, i % 4) {
            (Some(a), 0) => a.clone(),
            (_, 1) => prox_map(problem, kernel, eps, &y)?.minimizer,
            _ => y,
        };
        let s = check_descent_inequality(problem, kernel, eps_hi, eps_hi, eps_hi, &x, &u)?;
        descent.add(s / (1.0 + (&u - &x).norm_squared() + problem.value(&u).abs()) + 1e-8);
        if gap_bounds_apply {
            for s in prox_gap_slacks(problem, kernel, eps, &x)? {
                pgap.add(s / scale + 1e-8);
            }
        }
    }
    out.push(lip.finish(problem));
    out.push(gap_id.finish(problem));
    out.push(decrease.finish(problem));
    out.push(resid.finish(problem));
    out.push(descent.finish(problem));
    if gap_bounds_apply {
        out.push(pgap.finish(problem));
    }

    if problem.level_bounded {
        let x0 = sample_point(problem, rng, 2.0);
        let trace = vbpg_run(problem, config, &x0)?;
        let mut mono = Tally::new("solver_monotone");
        mono.add(trace.min_descent_slack / (1.0 + trace.f_values[0].abs()) + 1e-9);
        out.push(mono.finish(problem));
        if trace.termination != Termination::MaxIters {
            if let Some(d) = problem.subdiff_dist(&trace.final_point) {
                let mut crit = Tally::new("final_criticality");
                crit.add((l + big_m / eps_lo) * trace.step_tol * 10.0 - d);
                out.push(crit.finish(problem));
            }
        }
    }
    Ok(out)
}
