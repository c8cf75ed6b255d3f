//! Smooth parts shipped with the crate.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Result, VbpgError};
use crate::linalg::{eigen_bounds, is_symmetric, spectral_radius};
use crate::model::{Matrix, SmoothObjective, Vector};

/// `f(x) = x'Qx/2 - b'x` with symmetric, possibly indefinite `Q`.
#[derive(Clone, Debug)]
pub struct Quadratic {
    q: Matrix,
    b: Vector,
    lipschitz: f64,
    min_eig: f64,
}

impl Quadratic {
    pub fn new(q: Matrix, b: Vector) -> Result<Self> {
        if !q.is_square() || q.nrows() != b.len() {
            return Err(VbpgError::DimensionMismatch { expected: q.nrows(), got: b.len() });
        }
        if !is_symmetric(&q, 1e-12) {
            return Err(VbpgError::InvalidParameter("quadratic matrix is not symmetric".into()));
        }
        if q.iter().chain(b.iter()).any(|v| !v.is_finite()) {
            return Err(VbpgError::InvalidParameter("quadratic data is not finite".into()));
        }
        let (min_eig, _) = eigen_bounds(&q);
        let lipschitz = spectral_radius(&q);
        Ok(Quadratic { q, b, lipschitz, min_eig })
    }

    /// `|Ax - y|^2 / 2`.
    pub fn least_squares(a: &Matrix, y: &Vector) -> Result<Self> {
        Quadratic::new(a.transpose() * a, a.transpose() * y)
    }

    pub fn zero(n: usize) -> Self {
        Quadratic::new(Matrix::zeros(n, n), Vector::zeros(n)).expect("zero quadratic")
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.min_eig
    }
}

impl SmoothObjective for Quadratic {
    fn dim(&self) -> usize {
        self.b.len()
    }
    fn value(&self, x: &Vector) -> f64 {
        0.5 * x.dot(&(&self.q * x)) - self.b.dot(x)
    }
    fn gradient(&self, x: &Vector) -> Vector {
        &self.q * x - &self.b
    }
    fn lipschitz(&self) -> f64 {
        self.lipschitz
    }
    fn is_convex(&self) -> bool {
        self.min_eig >= -1e-12
    }
    fn quadratic_form(&self) -> Option<(&Matrix, &Vector)> {
        Some((&self.q, &self.b))
    }
    fn name(&self) -> String {
        if self.q.amax() == 0.0 && self.b.amax() == 0.0 {
            "zero".into()
        } else {
            "quadratic".into()
        }
    }
}

/// `f(x) = sum_i log(1 + exp(-y_i a_i'x))` with labels `y_i = +-1`.
#[derive(Clone, Debug)]
pub struct Logistic {
    a: Matrix,
    labels: Vector,
    lipschitz: f64,
}

/// `log(1 + exp(z))` without overflow.
fn softplus(z: f64) -> f64 {
    if z > 0.0 {
        z + (-z).exp().ln_1p()
    } else {
        z.exp().ln_1p()
    }
}

fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

impl Logistic {
    pub fn new(a: Matrix, labels: Vector) -> Result<Self> {
        if a.nrows() != labels.len() {
            return Err(VbpgError::DimensionMismatch { expected: a.nrows(), got: labels.len() });
        }
        if labels.iter().any(|&y| y != 1.0 && y != -1.0) {
            return Err(VbpgError::InvalidParameter("logistic labels must be +1 or -1".into()));
        }
        let (_, hi) = eigen_bounds(&(a.transpose() * &a));
        Ok(Logistic { a, labels, lipschitz: 0.25 * hi.max(0.0) })
    }

    /// Gaussian design with labels from a random planted direction; label noise flips 10%.
    pub fn synthetic(samples: usize, dim: usize, seed: u64) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = Matrix::from_fn(samples, dim, |_, _| rng.gen_range(-1.0..1.0));
        let w = Vector::from_fn(dim, |_, _| rng.gen_range(-1.0..1.0));
        let labels = Vector::from_fn(samples, |i, _| {
            let s = a.row(i).transpose().dot(&w);
            let flip = rng.gen::<f64>() < 0.1;
            if (s >= 0.0) != flip {
                1.0
            } else {
                -1.0
            }
        });
        Logistic::new(a, labels)
    }

    pub fn design(&self) -> &Matrix {
        &self.a
    }
    pub fn labels(&self) -> &Vector {
        &self.labels
    }
}

impl SmoothObjective for Logistic {
    fn dim(&self) -> usize {
        self.a.ncols()
    }
    fn value(&self, x: &Vector) -> f64 {
        let z = &self.a * x;
        z.iter().zip(self.labels.iter()).map(|(zi, yi)| softplus(-yi * zi)).sum()
    }
    fn gradient(&self, x: &Vector) -> Vector {
        let z = &self.a * x;
        let w = Vector::from_fn(z.len(), |i, _| -self.labels[i] * sigmoid(-self.labels[i] * z[i]));
        self.a.transpose() * w
    }
    fn lipschitz(&self) -> f64 {
        self.lipschitz
    }
    fn is_convex(&self) -> bool {
        true
    }
    fn name(&self) -> String {
        "logistic".into()
    }
}

/// Separable one-dimensional profiles `f(x) = sum_i h(x_i)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProfileKind {
    /// `h(t) = t^2 + 3 sin^2 t`: nonconvex with a unique critical point.
    SquarePlusSine,
    /// `h(t) = log(1 + e^t)`.
    Softplus,
}

#[derive(Clone, Debug)]
pub struct ScalarProfile {
    kind: ProfileKind,
    dim: usize,
}

impl ScalarProfile {
    pub fn new(kind: ProfileKind, dim: usize) -> Self {
        ScalarProfile { kind, dim }
    }

    fn h(&self, t: f64) -> f64 {
        match self.kind {
            ProfileKind::SquarePlusSine => t * t + 3.0 * t.sin().powi(2),
            ProfileKind::Softplus => softplus(t),
        }
    }

    fn dh(&self, t: f64) -> f64 {
        match self.kind {
            ProfileKind::SquarePlusSine => 2.0 * t + 3.0 * (2.0 * t).sin(),
            ProfileKind::Softplus => sigmoid(t),
        }
    }
}

impl SmoothObjective for ScalarProfile {
    fn dim(&self) -> usize {
        self.dim
    }
    fn value(&self, x: &Vector) -> f64 {
        x.iter().map(|&t| self.h(t)).sum()
    }
    fn gradient(&self, x: &Vector) -> Vector {
        x.map(|t| self.dh(t))
    }
    fn lipschitz(&self) -> f64 {
        match self.kind {
            // h'' = 2 + 6 cos 2t
            ProfileKind::SquarePlusSine => 8.0,
            ProfileKind::Softplus => 0.25,
        }
    }
    fn is_convex(&self) -> bool {
        matches!(self.kind, ProfileKind::Softplus)
    }
    fn name(&self) -> String {
        match self.kind {
            ProfileKind::SquarePlusSine => "square_plus_sine".into(),
            ProfileKind::Softplus => "softplus".into(),
        }
    }
}
