//! The variable Bregman proximal gradient iteration.

use std::io::Write;

use serde::Serialize;

use crate::bregman::{descent_modulus, prox_map, prox_subgradient, KernelSpec};
use crate::config::{validate_config, KernelSchedule, SolverConfig};
use crate::error::{Result, VbpgError};
use crate::model::{Matrix, Problem, Vector};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    /// The prox returned the current point exactly.
    CriticalPoint,
    StepTol,
    MaxIters,
}

/// Per-iteration record of a run. Index `k` of the step arrays refers to the move `x_k -> x_{k+1}`.
#[derive(Clone, Debug)]
pub struct Trace {
    /// `(k, x_k)`, thinned by `trace_every`.
    pub iterates: Vec<(usize, Vector)>,
    /// `F(x_k)` for `k = 0..=K`.
    pub f_values: Vec<f64>,
    pub step_norms: Vec<f64>,
    /// `G(x_k)` for the step size and kernel used at iteration `k`.
    pub gaps: Vec<f64>,
    /// Norm of the proximal subgradient at `x_{k+1}`.
    pub residuals: Vec<f64>,
    pub multivalued_steps: usize,
    pub termination: Termination,
    pub final_point: Vector,
    pub step_tol: f64,
    /// `min_k F(x_k) - F(x_{k+1}) - a |x_k - x_{k+1}|^2`.
    pub min_descent_slack: f64,
}

impl Trace {
    pub fn iterations(&self) -> usize {
        self.step_norms.len()
    }

    pub fn final_value(&self) -> f64 {
        *self.f_values.last().expect("trace always holds F(x0)")
    }

    /// CSV with header `iter,F,step_norm,gap,residual`; floats carry 17 significant digits.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "iter,F,step_norm,gap,residual")?;
        for k in 0..self.iterations() {
            writeln!(
                w,
                "{},{},{},{},{}",
                k,
                fmt17(self.f_values[k]),
                fmt17(self.step_norms[k]),
                fmt17(self.gaps[k]),
                fmt17(self.residuals[k])
            )?;
        }
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("csv is ascii")
    }
}

/// Round-trippable float formatting with 17 significant digits.
pub fn fmt17(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        format!("{v}")
    }
}

/// One step `x -> argmin <grad f(x), y - x> + g(y) + D(x, y)/eps`.
pub fn vbpg_step(problem: &Problem, kernel: &KernelSpec, eps: f64, x: &Vector) -> Result<Vector> {
    Ok(prox_map(problem, kernel, eps, x)?.minimizer)
}

/// Runs the iteration from `x0` until the step tolerance, an exact fixed point, or `max_iters`.
pub fn vbpg_run(problem: &Problem, config: &SolverConfig, x0: &Vector) -> Result<Trace> {
    let n = problem.dim();
    if x0.len() != n {
        return Err(VbpgError::DimensionMismatch { expected: n, got: x0.len() });
    }
    if x0.iter().any(|v| !v.is_finite()) {
        return Err(VbpgError::InvalidParameter("starting point is not finite".into()));
    }
    let report = validate_config(problem, config);
    if config.strict {
        report.into_result()?;
    } else if let Some(v) = report.violations.iter().find(|v| {
        matches!(v.condition.as_str(), "epsilon_positive" | "epsilon_schedule" | "kernel_schedule" | "kernel_dimension" | "step_tol_positive" | "trace_every_positive")
    }) {
        return Err(VbpgError::InvalidParameter(format!("{}: {}", v.condition, v.detail)));
    }
    let step_tol = config.step_tol.unwrap_or(1e-10 * (1.0 + x0.norm()));
    let a = descent_modulus(config.kernel.m(), problem.lipschitz(), config.epsilon.hi());

    let f0 = problem.value(x0);
    if !f0.is_finite() {
        return Err(VbpgError::NonFiniteObjective(0));
    }
    let mut trace = Trace {
        iterates: vec![(0, x0.clone())],
        f_values: vec![f0],
        step_norms: Vec::new(),
        gaps: Vec::new(),
        residuals: Vec::new(),
        multivalued_steps: 0,
        termination: Termination::MaxIters,
        final_point: x0.clone(),
        step_tol,
        min_descent_slack: f64::INFINITY,
    };
    let mut x = x0.clone();
    for k in 0..config.max_iters {
        let eps = config.epsilon.at(k);
        let kernel = config.kernel.at(k);
        let p = prox_map(problem, kernel, eps, &x)?;
        let t = p.minimizer;
        let step = (&x - &t).norm();
        let ft = problem.value(&t);
        if !ft.is_finite() {
            return Err(VbpgError::NonFiniteObjective(k + 1));
        }
        let xi = prox_subgradient(problem, kernel, eps, &x, &t);
        trace.step_norms.push(step);
        trace.gaps.push(p.gap);
        trace.residuals.push(xi.norm());
        trace.multivalued_steps += p.multivalued_flag as usize;
        let fk = *trace.f_values.last().unwrap();
        trace.min_descent_slack = trace.min_descent_slack.min(fk - ft - a * step * step);
        trace.f_values.push(ft);
        let exact = t == x;
        x = t;
        if (k + 1) % config.trace_every == 0 {
            trace.iterates.push((k + 1, x.clone()));
        }
        if exact {
            trace.termination = Termination::CriticalPoint;
            break;
        }
        if step <= step_tol {
            trace.termination = Termination::StepTol;
            break;
        }
    }
    let last = trace.iterations();
    if trace.iterates.last().map(|(k, _)| *k) != Some(last) {
        trace.iterates.push((last, x.clone()));
    }
    trace.final_point = x;
    Ok(trace)
}

/// Block-Jacobi kernel for a quadratic smooth part: `A = blockdiag(Q_BB) + c_B I`.
/// With `eps = 1` each step minimizes `f` over one block at a time from the same base point,
/// plus `c_B/2 |x_B - x_B^k|^2`. For quadratic `f` the kernel does not depend on `k`.
pub fn kernel_schedule_jacobi(problem: &Problem, blocks: &[Vec<usize>], c: &[f64]) -> Result<KernelSchedule> {
    let (q, _) = problem
        .f
        .quadratic_form()
        .ok_or_else(|| VbpgError::InvalidParameter("block-Jacobi kernels need a quadratic smooth part".into()))?;
    let n = problem.dim();
    if blocks.len() != c.len() {
        return Err(VbpgError::DimensionMismatch { expected: blocks.len(), got: c.len() });
    }
    let mut seen = vec![false; n];
    for b in blocks {
        for &i in b {
            if i >= n || seen[i] {
                return Err(VbpgError::InvalidParameter("blocks must partition the coordinates".into()));
            }
            seen[i] = true;
        }
    }
    if seen.iter().any(|s| !s) {
        return Err(VbpgError::InvalidParameter("blocks must partition the coordinates".into()));
    }
    let mut a = Matrix::zeros(n, n);
    for (b, &cb) in blocks.iter().zip(c) {
        for &i in b {
            for &j in b {
                a[(i, j)] = q[(i, j)];
            }
            a[(i, i)] += cb;
        }
    }
    let kernel = if blocks.iter().all(|b| b.len() == 1) {
        KernelSpec::diagonal(a.diagonal())?
    } else {
        KernelSpec::quadratic(a)?
    };
    Ok(KernelSchedule::Fixed(kernel))
}
