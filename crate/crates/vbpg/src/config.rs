//! Solver configuration: step-size and kernel schedules, tolerances, and validation.

use serde::Serialize;

use crate::bregman::KernelSpec;
use crate::error::{Result, VbpgError};
use crate::model::Problem;

/// Step sizes `eps_k`; all values lie in `[lo, hi]`.
#[derive(Clone, Debug, PartialEq)]
pub enum EpsilonSchedule {
    Constant(f64),
    /// Repeats the listed values.
    Cyclic(Vec<f64>),
}

impl EpsilonSchedule {
    pub fn at(&self, k: usize) -> f64 {
        match self {
            EpsilonSchedule::Constant(e) => *e,
            EpsilonSchedule::Cyclic(v) => v[k % v.len()],
        }
    }

    pub fn lo(&self) -> f64 {
        match self {
            EpsilonSchedule::Constant(e) => *e,
            EpsilonSchedule::Cyclic(v) => v.iter().cloned().fold(f64::INFINITY, f64::min),
        }
    }

    pub fn hi(&self) -> f64 {
        match self {
            EpsilonSchedule::Constant(e) => *e,
            EpsilonSchedule::Cyclic(v) => v.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
        }
    }
}

/// Kernels `K_k`; `m` and `M` are the extreme moduli over the schedule.
#[derive(Clone, Debug, PartialEq)]
pub enum KernelSchedule {
    Fixed(KernelSpec),
    Cyclic(Vec<KernelSpec>),
}

impl KernelSchedule {
    pub fn at(&self, k: usize) -> &KernelSpec {
        match self {
            KernelSchedule::Fixed(kern) => kern,
            KernelSchedule::Cyclic(v) => &v[k % v.len()],
        }
    }

    fn all(&self) -> &[KernelSpec] {
        match self {
            KernelSchedule::Fixed(kern) => std::slice::from_ref(kern),
            KernelSchedule::Cyclic(v) => v,
        }
    }

    pub fn m(&self) -> f64 {
        self.all().iter().map(|k| k.m()).fold(f64::INFINITY, f64::min)
    }

    pub fn big_m(&self) -> f64 {
        self.all().iter().map(|k| k.big_m()).fold(f64::NEG_INFINITY, f64::max)
    }
}

#[derive(Clone, Debug)]
pub struct SolverConfig {
    pub epsilon: EpsilonSchedule,
    pub kernel: KernelSchedule,
    pub max_iters: usize,
    /// Stop once `|x_k - x_{k+1}| <= step_tol`. Defaults to `1e-10 (1 + |x0|)`.
    pub step_tol: Option<f64>,
    /// Record every `trace_every`-th iterate (first and last are always kept).
    pub trace_every: usize,
    /// Refuse to run when the step-size conditions fail.
    pub strict: bool,
}

impl SolverConfig {
    pub fn new(eps: f64, kernel: KernelSpec) -> Self {
        SolverConfig {
            epsilon: EpsilonSchedule::Constant(eps),
            kernel: KernelSchedule::Fixed(kernel),
            max_iters: 10_000,
            step_tol: None,
            trace_every: 1,
            strict: false,
        }
    }

    pub fn with_max_iters(mut self, n: usize) -> Self {
        self.max_iters = n;
        self
    }

    pub fn with_step_tol(mut self, tol: f64) -> Self {
        self.step_tol = Some(tol);
        self
    }

    pub fn with_strict(mut self, strict: bool) -> Self {
        self.strict = strict;
        self
    }
}

/// Largest admissible step bound `min(m/L, m/rho)` for a kernel modulus `m`.
pub fn max_step(problem: &Problem, m: f64) -> f64 {
    let l = problem.lipschitz();
    let mut bound = if l > 0.0 { m / l } else { f64::INFINITY };
    if let Some(rho) = problem.rho() {
        if rho > 0.0 {
            bound = bound.min(m / rho);
        }
    }
    bound
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConditionViolation {
    pub condition: String,
    pub detail: String,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<ConditionViolation>,
}

impl ValidationReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }

    fn push(&mut self, condition: &str, detail: String) {
        self.violations.push(ConditionViolation { condition: condition.into(), detail });
    }

    pub fn into_result(self) -> Result<()> {
        if self.ok() {
            return Ok(());
        }
        let msg = self.violations.iter().map(|v| format!("{}: {}", v.condition, v.detail)).collect::<Vec<_>>().join("; ");
        Err(VbpgError::StepSizeViolation(msg))
    }
}

/// Checks the step-size conditions `eps_hi < m/L` and, for semiconvex `g`, `eps_hi < m/rho`.
/// Each condition is reported on its own.
pub fn validate_config(problem: &Problem, config: &SolverConfig) -> ValidationReport {
    let mut report = ValidationReport::default();
    let n = problem.dim();
    let (lo, hi) = (config.epsilon.lo(), config.epsilon.hi());
    if let EpsilonSchedule::Cyclic(v) = &config.epsilon {
        if v.is_empty() {
            report.push("epsilon_schedule", "schedule is empty".into());
            return report;
        }
    }
    if !(lo > 0.0 && hi.is_finite()) {
        report.push("epsilon_positive", format!("step sizes must lie in (0, inf), got [{lo}, {hi}]"));
    }
    if let KernelSchedule::Cyclic(v) = &config.kernel {
        if v.is_empty() {
            report.push("kernel_schedule", "schedule is empty".into());
            return report;
        }
    }
    for k in match &config.kernel {
        KernelSchedule::Fixed(k) => vec![k.clone()],
        KernelSchedule::Cyclic(v) => v.clone(),
    } {
        if let Err(e) = k.check_dim(n) {
            report.push("kernel_dimension", e.to_string());
        }
    }
    let m = config.kernel.m();
    let l = problem.lipschitz();
    if l > 0.0 && hi >= m / l {
        report.push("eps_below_m_over_l", format!("eps_hi = {hi} must be < m/L = {}", m / l));
    }
    if let Some(rho) = problem.rho() {
        if rho > 0.0 && hi >= m / rho {
            report.push("eps_below_m_over_rho", format!("eps_hi = {hi} must be < m/rho = {}", m / rho));
        }
    }
    if let Some(tol) = config.step_tol {
        if !(tol > 0.0) {
            report.push("step_tol_positive", format!("step_tol must be positive, got {tol}"));
        }
    }
    if config.trace_every == 0 {
        report.push("trace_every_positive", "trace_every must be at least 1".into());
    }
    report
}
