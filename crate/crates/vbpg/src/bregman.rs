//! Quadratic Bregman kernels, the Bregman proximal map, the envelope and the gap function.

use serde::{Deserialize, Serialize};

use crate::error::{Result, VbpgError};
use crate::linalg::{eigen_bounds, is_symmetric};
use crate::model::{Matrix, Problem, Vector};

pub const INNER_MAX: usize = 10_000;

#[derive(Clone, Debug, PartialEq)]
enum Shape {
    Euclidean,
    Diagonal(Vector),
    Quadratic(Matrix),
}

/// Kernel `K(x) = x'Ax/2` with `A` symmetric positive definite.
/// `m` and `M` are its strong convexity and smoothness moduli.
#[derive(Clone, Debug, PartialEq)]
pub struct KernelSpec {
    shape: Shape,
    m: f64,
    big_m: f64,
}

impl KernelSpec {
    pub fn euclidean() -> Self {
        KernelSpec { shape: Shape::Euclidean, m: 1.0, big_m: 1.0 }
    }

    pub fn diagonal(d: Vector) -> Result<Self> {
        if d.iter().any(|v| !v.is_finite()) {
            return Err(VbpgError::InvalidParameter("kernel weights must be finite".into()));
        }
        let m = d.min();
        if d.is_empty() || m <= 0.0 {
            return Err(VbpgError::KernelNotStronglyConvex(if d.is_empty() { 0.0 } else { m }));
        }
        let big_m = d.max();
        Ok(KernelSpec { shape: Shape::Diagonal(d), m, big_m })
    }

    pub fn quadratic(a: Matrix) -> Result<Self> {
        if !is_symmetric(&a, 1e-12) || a.iter().any(|v| !v.is_finite()) {
            return Err(VbpgError::InvalidParameter("kernel matrix must be finite and symmetric".into()));
        }
        let (m, big_m) = eigen_bounds(&a);
        if m <= 0.0 {
            return Err(VbpgError::KernelNotStronglyConvex(m));
        }
        Ok(KernelSpec { shape: Shape::Quadratic(a), m, big_m })
    }

    pub fn m(&self) -> f64 {
        self.m
    }

    pub fn big_m(&self) -> f64 {
        self.big_m
    }

    /// `None` for the Euclidean kernel, which adapts to any dimension.
    pub fn dim(&self) -> Option<usize> {
        match &self.shape {
            Shape::Euclidean => None,
            Shape::Diagonal(d) => Some(d.len()),
            Shape::Quadratic(a) => Some(a.nrows()),
        }
    }

    pub fn check_dim(&self, n: usize) -> Result<()> {
        match self.dim() {
            Some(k) if k != n => Err(VbpgError::DimensionMismatch { expected: n, got: k }),
            _ => Ok(()),
        }
    }

    /// Diagonal of `A` when `A` is diagonal.
    pub fn diagonal_weights(&self, n: usize) -> Option<Vector> {
        match &self.shape {
            Shape::Euclidean => Some(Vector::from_element(n, 1.0)),
            Shape::Diagonal(d) => Some(d.clone()),
            Shape::Quadratic(_) => None,
        }
    }

    /// Dense copy of `A`.
    pub fn matrix(&self, n: usize) -> Matrix {
        match &self.shape {
            Shape::Euclidean => Matrix::identity(n, n),
            Shape::Diagonal(d) => Matrix::from_diagonal(d),
            Shape::Quadratic(a) => a.clone(),
        }
    }

    pub fn apply(&self, v: &Vector) -> Vector {
        match &self.shape {
            Shape::Euclidean => v.clone(),
            Shape::Diagonal(d) => d.component_mul(v),
            Shape::Quadratic(a) => a * v,
        }
    }

    pub fn value(&self, x: &Vector) -> f64 {
        0.5 * x.dot(&self.apply(x))
    }

    pub fn gradient(&self, x: &Vector) -> Vector {
        self.apply(x)
    }

    /// `D(x, y) = K(y) - K(x) - <grad K(x), y - x>`, evaluated as `(y-x)'A(y-x)/2`.
    pub fn distance(&self, x: &Vector, y: &Vector) -> f64 {
        let d = y - x;
        0.5 * d.dot(&self.apply(&d))
    }

    /// Gradient of `D(x, .)` at `y`.
    pub fn distance_grad_y(&self, x: &Vector, y: &Vector) -> Vector {
        self.apply(&(y - x))
    }
}

/// Output of one Bregman proximal evaluation at `x`.
#[derive(Clone, Debug)]
pub struct ProxResult {
    pub minimizer: Vector,
    /// `<grad f(x), t - x> + g(t) + D(x, t)/eps` at the minimizer `t`.
    pub subproblem_value: f64,
    /// Envelope value `f(x) + subproblem_value`.
    pub envelope: f64,
    /// Gap `(g(x) - subproblem_value)/eps`; nonnegative, zero exactly at fixed points.
    pub gap: f64,
    pub multivalued_flag: bool,
    pub inner_iters: usize,
}

fn check_eps(eps: f64) -> Result<()> {
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(VbpgError::InvalidParameter(format!("step size must be positive, got {eps}")));
    }
    Ok(())
}

/// Bregman proximal map of `g` around the linearization of `f` at `x`.
pub fn prox_map(problem: &Problem, kernel: &KernelSpec, eps: f64, x: &Vector) -> Result<ProxResult> {
    prox_map_warm(problem, kernel, eps, x, x)
}

/// As [`prox_map`], starting the inner solver (general quadratic kernels only) at `warm`.
pub fn prox_map_warm(problem: &Problem, kernel: &KernelSpec, eps: f64, x: &Vector, warm: &Vector) -> Result<ProxResult> {
    check_eps(eps)?;
    let n = problem.dim();
    if x.len() != n {
        return Err(VbpgError::DimensionMismatch { expected: n, got: x.len() });
    }
    kernel.check_dim(n)?;
    let grad = problem.gradient(x);
    let (t, tie, iters) = match kernel.diagonal_weights(n) {
        Some(w) => {
            let p = problem.g.scaled_prox(x, &grad, &w, eps);
            (p.point, p.tie, 0)
        }
        None => inner_solve(problem, kernel, eps, x, &grad, warm)?,
    };
    let gx = problem.g.value(x);
    let gt = problem.g.value(&t);
    if gt == f64::INFINITY {
        return Err(VbpgError::ProxUnbounded("prox landed outside dom g".into()));
    }
    let phi = grad.dot(&(&t - x)) + gt + kernel.distance(x, &t) / eps;
    if !phi.is_finite() {
        return Err(VbpgError::ProxUnbounded("subproblem value is not finite".into()));
    }
    let fx = problem.f.value(x);
    Ok(ProxResult {
        minimizer: t,
        subproblem_value: phi,
        envelope: fx + phi,
        gap: (gx - phi) / eps,
        multivalued_flag: tie,
        inner_iters: iters,
    })
}

/// Proximal gradient on the subproblem `y -> <grad, y> + g(y) + D(x, y)/eps`.
fn inner_solve(
    problem: &Problem,
    kernel: &KernelSpec,
    eps: f64,
    x: &Vector,
    grad: &Vector,
    warm: &Vector,
) -> Result<(Vector, bool, usize)> {
    let n = x.len();
    let tau = 1.0 / (kernel.big_m() / eps + problem.lipschitz());
    let tol = 1e-10 * (1.0 + x.norm());
    let ones = Vector::from_element(n, 1.0);
    let mut y = warm.clone();
    let mut last = f64::INFINITY;
    for k in 1..=INNER_MAX {
        let lin = grad + kernel.distance_grad_y(x, &y) / eps;
        let p = problem.g.scaled_prox(&y, &lin, &ones, tau);
        last = (&p.point - &y).norm();
        let tie = p.tie;
        y = p.point;
        if last <= tol {
            return Ok((y, tie, k));
        }
    }
    Err(VbpgError::InnerSolverNotConverged { iters: INNER_MAX, residual: last })
}

/// Envelope value `E(x)`.
pub fn envelope(problem: &Problem, kernel: &KernelSpec, eps: f64, x: &Vector) -> Result<f64> {
    Ok(prox_map(problem, kernel, eps, x)?.envelope)
}

/// Gap value `G(x)`.
pub fn gap(problem: &Problem, kernel: &KernelSpec, eps: f64, x: &Vector) -> Result<f64> {
    Ok(prox_map(problem, kernel, eps, x)?.gap)
}

/// Element of the proximal subdifferential of `F` at the prox point `t` of `x`:
/// `grad f(t) - grad f(x) - grad_y D(x, t)/eps`.
pub fn prox_subgradient(problem: &Problem, kernel: &KernelSpec, eps: f64, x: &Vector, t: &Vector) -> Vector {
    problem.gradient(t) - problem.gradient(x) - kernel.distance_grad_y(x, t) / eps
}

/// Which parts of the objective are convex; selects the descent constants.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConvexityCase {
    General,
    SmoothConvex,
    RegularizerConvex,
    BothConvex,
}

impl ConvexityCase {
    pub fn of(problem: &Problem) -> Self {
        match (problem.f.is_convex(), problem.g.curvature().is_convex()) {
            (false, false) => ConvexityCase::General,
            (true, false) => ConvexityCase::SmoothConvex,
            (false, true) => ConvexityCase::RegularizerConvex,
            (true, true) => ConvexityCase::BothConvex,
        }
    }
}

/// Constants `(a, b, c)` of the three-point descent inequality
/// `a [F(t) - F(u)] <= b |u-x|^2 - |u-t|^2 - c |x-t|^2`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DescentConstants {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

/// The two convex-`g` cases assume a constant step (`eps_lo == eps_hi`).
pub fn descent_constants(case: ConvexityCase, m: f64, big_m: f64, l: f64, eps_lo: f64, eps_hi: f64) -> DescentConstants {
    match case {
        ConvexityCase::General => DescentConstants { a: 2.0, b: big_m / eps_lo + 2.0 + 3.0 * l, c: m / eps_hi - (l + 2.0) },
        ConvexityCase::SmoothConvex => DescentConstants { a: 2.0, b: big_m / eps_lo + 2.0, c: m / eps_hi - (l + 2.0) },
        ConvexityCase::RegularizerConvex => DescentConstants {
            a: 2.0 * eps_hi / m,
            b: big_m / m + 3.0 * l * eps_hi / m,
            c: 1.0 - l * eps_hi / m,
        },
        ConvexityCase::BothConvex => DescentConstants { a: 2.0 * eps_hi / m, b: big_m / m, c: 1.0 - l * eps_hi / m },
    }
}

/// Slack of the descent inequality for the pair `(x, u)`; nonnegative when it holds.
#[allow(clippy::too_many_arguments)]
pub fn check_descent_inequality(
    problem: &Problem,
    kernel: &KernelSpec,
    eps: f64,
    eps_lo: f64,
    eps_hi: f64,
    x: &Vector,
    u: &Vector,
) -> Result<f64> {
    let case = ConvexityCase::of(problem);
    let k = descent_constants(case, kernel.m(), kernel.big_m(), problem.lipschitz(), eps_lo, eps_hi);
    let t = prox_map(problem, kernel, eps, x)?.minimizer;
    let fu = problem.value(u);
    if fu == f64::INFINITY {
        return Ok(f64::INFINITY);
    }
    let ft = problem.value(&t);
    Ok(k.b * (u - x).norm_squared() - (u - &t).norm_squared() - k.c * (x - &t).norm_squared() - k.a * (ft - fu))
}

/// Sufficient-decrease modulus `(m/eps_hi - L)/2`.
pub fn descent_modulus(m: f64, l: f64, eps_hi: f64) -> f64 {
    0.5 * (m / eps_hi - l)
}
