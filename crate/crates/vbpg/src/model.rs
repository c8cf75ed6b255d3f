//! Problem model: the smooth part `f`, the nonsmooth part `g`, and their sum.
//!
//! `g` may take the value `f64::INFINITY` (indicator functions); `F = f + g`
//! inherits that sentinel. Everything else is plain `f64`.

use std::fmt::Debug;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

pub type Vector = DVector<f64>;
pub type Matrix = DMatrix<f64>;

/// How much convexity the nonsmooth part has.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Curvature {
    Convex,
    /// `g + (rho/2)|x|^2` is convex.
    Semiconvex(f64),
    General,
}

impl Curvature {
    /// Semiconvexity modulus; `0` for convex, `None` when unknown.
    pub fn modulus(&self) -> Option<f64> {
        match *self {
            Curvature::Convex => Some(0.0),
            Curvature::Semiconvex(r) => Some(r),
            Curvature::General => None,
        }
    }

    pub fn is_convex(&self) -> bool {
        matches!(self, Curvature::Convex) || matches!(self, Curvature::Semiconvex(r) if *r <= 0.0)
    }
}

/// Differentiable part with a globally Lipschitz gradient.
pub trait SmoothObjective: Send + Sync + Debug {
    fn dim(&self) -> usize;
    fn value(&self, x: &Vector) -> f64;
    fn gradient(&self, x: &Vector) -> Vector;
    /// Lipschitz constant of the gradient.
    fn lipschitz(&self) -> f64;
    fn is_convex(&self) -> bool;
    /// `(Q, b)` when `f(x) = x'Qx/2 - b'x`.
    fn quadratic_form(&self) -> Option<(&Matrix, &Vector)> {
        None
    }
    fn name(&self) -> String;
}

/// Minimizer returned by a proximal evaluation.
#[derive(Clone, Debug, PartialEq)]
pub struct ProxPoint {
    pub point: Vector,
    /// Two candidates tied within `1e-10`; the smaller-magnitude one was kept.
    pub tie: bool,
}

/// Proper lower semicontinuous nonsmooth part.
pub trait Regularizer: Send + Sync + Debug {
    fn value(&self, x: &Vector) -> f64;
    fn curvature(&self) -> Curvature;

    /// Global minimizer of
    /// `<linear, y - anchor> + g(y) + sum_i weights_i/(2 eps) (y_i - anchor_i)^2`.
    fn scaled_prox(&self, anchor: &Vector, linear: &Vector, weights: &Vector, eps: f64) -> ProxPoint;

    /// `dist(0, shift + dg(x))` for the proximal subdifferential, if it is known in closed form.
    /// `+inf` means the subdifferential is empty.
    fn subdiff_dist(&self, x: &Vector, shift: &Vector) -> Option<f64>;

    /// True when `g(x) = sum_i h(x_i)`, so a diagonal kernel gives a coordinatewise prox.
    fn is_separable(&self) -> bool {
        false
    }

    fn name(&self) -> String;
}

/// `F = f + g` together with bookkeeping used by the diagnostics.
#[derive(Clone, Debug)]
pub struct Problem {
    pub name: String,
    pub f: Arc<dyn SmoothObjective>,
    pub g: Arc<dyn Regularizer>,
    /// Known optimal value, if any.
    pub optimal_value_hint: Option<f64>,
    /// `F` has bounded sublevel sets.
    pub level_bounded: bool,
    lipschitz_override: Option<f64>,
}

impl Problem {
    pub fn new(name: impl Into<String>, f: Arc<dyn SmoothObjective>, g: Arc<dyn Regularizer>) -> Self {
        Problem {
            name: name.into(),
            f,
            g,
            optimal_value_hint: None,
            level_bounded: true,
            lipschitz_override: None,
        }
    }

    pub fn with_level_bounded(mut self, flag: bool) -> Self {
        self.level_bounded = flag;
        self
    }

    pub fn with_optimal_value(mut self, value: f64) -> Self {
        self.optimal_value_hint = Some(value);
        self
    }

    /// Replace the reported Lipschitz constant. Used to inject faults in checks.
    pub fn with_lipschitz(mut self, l: f64) -> Self {
        self.lipschitz_override = Some(l);
        self
    }

    pub fn dim(&self) -> usize {
        self.f.dim()
    }

    pub fn lipschitz(&self) -> f64 {
        self.lipschitz_override.unwrap_or_else(|| self.f.lipschitz())
    }

    /// Semiconvexity modulus of `g` (`0` if convex).
    pub fn rho(&self) -> Option<f64> {
        self.g.curvature().modulus()
    }

    pub fn value(&self, x: &Vector) -> f64 {
        let gv = self.g.value(x);
        if gv == f64::INFINITY {
            return f64::INFINITY;
        }
        self.f.value(x) + gv
    }

    pub fn gradient(&self, x: &Vector) -> Vector {
        self.f.gradient(x)
    }

    /// `dist(0, grad f(x) + dg(x))`, when `g` has a closed-form subdifferential.
    pub fn subdiff_dist(&self, x: &Vector) -> Option<f64> {
        self.g.subdiff_dist(x, &self.f.gradient(x))
    }
}
