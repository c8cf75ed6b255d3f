//! JSON run configuration.

use serde::{Deserialize, Serialize};

use crate::bregman::KernelSpec;
use crate::config::{max_step, EpsilonSchedule, KernelSchedule, SolverConfig};
use crate::diagnostics::RadialSampling;
use crate::error::{Result, VbpgError};
use crate::model::{Matrix, Problem, Vector};
use crate::problems::ProblemSpec;
use crate::solver::kernel_schedule_jacobi;

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub problem: Option<ProblemSpec>,
    #[serde(default)]
    pub solver: SolverSpec,
    #[serde(default)]
    pub probe: ProbeSpec,
    #[serde(default)]
    pub compare: Option<CompareSpec>,
}

/// Step size: a number, a cyclic list, or a fraction of `min(m/L, m/rho)` (of `m` when both are infinite).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum EpsilonSpec {
    Value(f64),
    Cyclic(Vec<f64>),
    Fraction { fraction_of_max: f64 },
}

impl Default for EpsilonSpec {
    fn default() -> Self {
        EpsilonSpec::Fraction { fraction_of_max: 0.9 }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KernelJson {
    #[default]
    Euclidean,
    Diagonal(Vec<f64>),
    Quadratic(Vec<Vec<f64>>),
    /// Block-Jacobi kernel for quadratic `f`.
    Jacobi { blocks: Vec<Vec<usize>>, c: Vec<f64> },
    Cyclic(Vec<KernelJson>),
}

fn default_max_iters() -> usize {
    10_000
}

fn one() -> usize {
    1
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverSpec {
    #[serde(default)]
    pub epsilon: EpsilonSpec,
    #[serde(default)]
    pub kernel: KernelJson,
    #[serde(default = "default_max_iters")]
    pub max_iters: usize,
    #[serde(default)]
    pub step_tol: Option<f64>,
    #[serde(default = "one")]
    pub trace_every: usize,
    #[serde(default)]
    pub x0: Option<Vec<f64>>,
}

impl Default for SolverSpec {
    fn default() -> Self {
        SolverSpec {
            epsilon: EpsilonSpec::default(),
            kernel: KernelJson::default(),
            max_iters: default_max_iters(),
            step_tol: None,
            trace_every: 1,
            x0: None,
        }
    }
}

fn default_eta() -> f64 {
    0.5
}

fn default_samples() -> usize {
    200
}

fn default_grid() -> usize {
    5
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProbeSpec {
    #[serde(default = "default_eta")]
    pub eta: f64,
    /// Defaults to a tenth of the objective range over the ball.
    #[serde(default)]
    pub nu: Option<f64>,
    #[serde(default = "default_samples")]
    pub samples: usize,
    /// Defaults to the solver's limit point.
    #[serde(default)]
    pub center: Option<Vec<f64>>,
    /// Seeds per axis for the critical-set search.
    #[serde(default = "default_grid")]
    pub critical_grid: usize,
    #[serde(default)]
    pub alpha_grid: Option<Vec<f64>>,
    #[serde(default)]
    pub radial: RadialSampling,
}

impl Default for ProbeSpec {
    fn default() -> Self {
        ProbeSpec {
            eta: default_eta(),
            nu: None,
            samples: default_samples(),
            center: None,
            critical_grid: default_grid(),
            alpha_grid: None,
            radial: RadialSampling::Uniform,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScheduleSpec {
    pub name: String,
    #[serde(default)]
    pub epsilon: EpsilonSpec,
    #[serde(default)]
    pub kernel: KernelJson,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CompareSpec {
    pub schedules: Vec<ScheduleSpec>,
}

fn matrix(rows: &[Vec<f64>]) -> Result<Matrix> {
    let n = rows.len();
    if rows.iter().any(|r| r.len() != n) {
        return Err(VbpgError::Config("kernel matrix must be square".into()));
    }
    Ok(Matrix::from_fn(n, n, |i, j| rows[i][j]))
}

pub fn build_kernel(problem: &Problem, spec: &KernelJson) -> Result<KernelSchedule> {
    Ok(match spec {
        KernelJson::Euclidean => KernelSchedule::Fixed(KernelSpec::euclidean()),
        KernelJson::Diagonal(d) => KernelSchedule::Fixed(KernelSpec::diagonal(Vector::from_vec(d.clone()))?),
        KernelJson::Quadratic(a) => KernelSchedule::Fixed(KernelSpec::quadratic(matrix(a)?)?),
        KernelJson::Jacobi { blocks, c } => kernel_schedule_jacobi(problem, blocks, c)?,
        KernelJson::Cyclic(list) => {
            let mut out = Vec::new();
            for k in list {
                match build_kernel(problem, k)? {
                    KernelSchedule::Fixed(k) => out.push(k),
                    KernelSchedule::Cyclic(v) => out.extend(v),
                }
            }
            KernelSchedule::Cyclic(out)
        }
    })
}

pub fn build_epsilon(problem: &Problem, kernel: &KernelSchedule, spec: &EpsilonSpec) -> Result<EpsilonSchedule> {
    Ok(match spec {
        EpsilonSpec::Value(e) => EpsilonSchedule::Constant(*e),
        EpsilonSpec::Cyclic(v) => EpsilonSchedule::Cyclic(v.clone()),
        EpsilonSpec::Fraction { fraction_of_max } => {
            // With no smoothness or semiconvexity limit the step is measured against `m`.
            let bound = max_step(problem, kernel.m());
            let bound = if bound.is_finite() { bound } else { kernel.m() };
            EpsilonSchedule::Constant(fraction_of_max * bound)
        }
    })
}

/// Solver configuration for one schedule.
pub fn build_solver_config(
    problem: &Problem,
    spec: &SolverSpec,
    epsilon: &EpsilonSpec,
    kernel: &KernelJson,
    strict: bool,
) -> Result<SolverConfig> {
    let kernel = build_kernel(problem, kernel)?;
    let epsilon = build_epsilon(problem, &kernel, epsilon)?;
    Ok(SolverConfig {
        epsilon,
        kernel,
        max_iters: spec.max_iters,
        step_tol: spec.step_tol,
        trace_every: spec.trace_every,
        strict,
    })
}
