//! JSON-facing problem description and the factory that builds a [`Problem`] from it.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::penalty::Penalty;
use super::smooth::{Logistic, ProfileKind, Quadratic, ScalarProfile};
use crate::error::{Result, VbpgError};
use crate::model::{Matrix, Problem, Regularizer, SmoothObjective, Vector};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "params", rename_all = "snake_case")]
pub enum SmoothSpec {
    /// `x'Qx/2 - b'x`
    Quadratic {
        q: Vec<Vec<f64>>,
        #[serde(default)]
        b: Option<Vec<f64>>,
    },
    /// `|Ax - y|^2 / 2`
    LeastSquares { a: Vec<Vec<f64>>, y: Vec<f64> },
    /// Either explicit data, or a seeded synthetic design.
    Logistic {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        a: Option<Vec<Vec<f64>>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        labels: Option<Vec<f64>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        samples: Option<usize>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        dimension: Option<usize>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        data_seed: Option<u64>,
    },
    ScalarProfile { profile: ProfileKind, dimension: usize },
    Zero { dimension: usize },
}

fn default_regularizer() -> Penalty {
    Penalty::Zero
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProblemSpec {
    #[serde(default)]
    pub name: String,
    #[serde(flatten)]
    pub smooth: SmoothSpec,
    #[serde(default = "default_regularizer")]
    pub regularizer: Penalty,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub optimal_value: Option<f64>,
    /// Multiplies the reported Lipschitz constant. Only meant for fault injection.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lipschitz_scale: Option<f64>,
}

fn matrix_from_rows(rows: &[Vec<f64>]) -> Result<Matrix> {
    let nr = rows.len();
    let nc = rows.first().map(|r| r.len()).unwrap_or(0);
    if nr == 0 || nc == 0 {
        return Err(VbpgError::Config("matrix must be nonempty".into()));
    }
    if let Some(r) = rows.iter().find(|r| r.len() != nc) {
        return Err(VbpgError::DimensionMismatch { expected: nc, got: r.len() });
    }
    Ok(Matrix::from_fn(nr, nc, |i, j| rows[i][j]))
}

fn rows_from_matrix(m: &Matrix) -> Vec<Vec<f64>> {
    (0..m.nrows()).map(|i| m.row(i).iter().cloned().collect()).collect()
}

impl ProblemSpec {
    pub fn new(name: &str, smooth: SmoothSpec, regularizer: Penalty) -> Self {
        ProblemSpec { name: name.into(), smooth, regularizer, optimal_value: None, lipschitz_scale: None }
    }

    /// Replaces generated data by the concrete arrays so the spec reproduces without the seed.
    pub fn materialize(&self) -> Result<ProblemSpec> {
        let mut out = self.clone();
        if let SmoothSpec::Logistic { a: None, .. } = &self.smooth {
            let lg = build_logistic(&self.smooth)?;
            out.smooth = SmoothSpec::Logistic {
                a: Some(rows_from_matrix(lg.design())),
                labels: Some(lg.labels().iter().cloned().collect()),
                samples: None,
                dimension: None,
                data_seed: None,
            };
        }
        Ok(out)
    }
}

fn build_logistic(spec: &SmoothSpec) -> Result<Logistic> {
    match spec {
        SmoothSpec::Logistic { a: Some(a), labels: Some(y), .. } => {
            Logistic::new(matrix_from_rows(a)?, Vector::from_vec(y.clone()))
        }
        SmoothSpec::Logistic { a: None, samples, dimension, data_seed, .. } => {
            let samples = samples.ok_or_else(|| VbpgError::Config("logistic needs samples".into()))?;
            let dim = dimension.ok_or_else(|| VbpgError::Config("logistic needs dimension".into()))?;
            Logistic::synthetic(samples, dim, data_seed.unwrap_or(0))
        }
        SmoothSpec::Logistic { .. } => Err(VbpgError::Config("logistic needs both a and labels".into())),
        _ => unreachable!("build_logistic called with a non-logistic spec"),
    }
}

/// Builds the problem described by `spec`.
pub fn build_problem(spec: &ProblemSpec) -> Result<Problem> {
    spec.regularizer.validate()?;
    let mut coercive_f = false;
    let mut bounded_below_f = true;
    let f: Arc<dyn SmoothObjective> = match &spec.smooth {
        SmoothSpec::Quadratic { q, b } => {
            let q = matrix_from_rows(q)?;
            let b = match b {
                Some(b) => Vector::from_vec(b.clone()),
                None => Vector::zeros(q.nrows()),
            };
            let quad = Quadratic::new(q, b)?;
            coercive_f = quad.min_eigenvalue() > 1e-12;
            bounded_below_f = coercive_f;
            Arc::new(quad)
        }
        SmoothSpec::LeastSquares { a, y } => {
            let a = matrix_from_rows(a)?;
            if a.nrows() != y.len() {
                return Err(VbpgError::DimensionMismatch { expected: a.nrows(), got: y.len() });
            }
            let quad = Quadratic::least_squares(&a, &Vector::from_vec(y.clone()))?;
            coercive_f = quad.min_eigenvalue() > 1e-12;
            Arc::new(quad)
        }
        SmoothSpec::Logistic { .. } => Arc::new(build_logistic(&spec.smooth)?),
        SmoothSpec::ScalarProfile { profile, dimension } => {
            if *dimension == 0 {
                return Err(VbpgError::Config("dimension must be positive".into()));
            }
            coercive_f = *profile == ProfileKind::SquarePlusSine;
            Arc::new(ScalarProfile::new(*profile, *dimension))
        }
        SmoothSpec::Zero { dimension } => {
            if *dimension == 0 {
                return Err(VbpgError::Config("dimension must be positive".into()));
            }
            Arc::new(Quadratic::zero(*dimension))
        }
    };
    let coercive_g = match spec.regularizer {
        Penalty::L1 { lambda } | Penalty::SqL2 { lambda } => lambda > 0.0,
        Penalty::Box { .. } | Penalty::Power { .. } | Penalty::PuncturedQuadratic { .. } => true,
        _ => false,
    };
    let name = if spec.name.is_empty() { format!("{}+{}", f.name(), spec.regularizer.name()) } else { spec.name.clone() };
    let bounded_domain = matches!(spec.regularizer, Penalty::Box { .. });
    let level_bounded = bounded_domain || coercive_f || (bounded_below_f && coercive_g);
    let mut problem = Problem::new(name, f, Arc::new(spec.regularizer.clone())).with_level_bounded(level_bounded);
    if let Some(v) = spec.optimal_value {
        problem = problem.with_optimal_value(v);
    }
    if let Some(scale) = spec.lipschitz_scale {
        if !(scale > 0.0 && scale.is_finite()) {
            return Err(VbpgError::Config("lipschitz_scale must be positive".into()));
        }
        let l = problem.lipschitz() * scale;
        problem = problem.with_lipschitz(l);
    }
    Ok(problem)
}
