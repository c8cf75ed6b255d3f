//! Small dense linear-algebra helpers.

use nalgebra::SymmetricEigen;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Result, VbpgError};
use crate::model::{Matrix, SmoothObjective, Vector};

/// Smallest and largest eigenvalue of a symmetric matrix.
pub fn eigen_bounds(a: &Matrix) -> (f64, f64) {
    let eig = SymmetricEigen::new(a.clone());
    let lo = eig.eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = eig.eigenvalues.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    (lo, hi)
}

/// Largest `|lambda|` of a symmetric matrix.
pub fn spectral_radius(a: &Matrix) -> f64 {
    let (lo, hi) = eigen_bounds(a);
    lo.abs().max(hi.abs())
}

pub fn is_symmetric(a: &Matrix, tol: f64) -> bool {
    a.is_square() && (a - a.transpose()).amax() <= tol * (1.0 + a.amax())
}

/// Power iteration on `A'A`; returns an estimate of the spectral norm of `A`.
pub fn power_iteration(a: &Matrix, iters: usize, seed: u64) -> f64 {
    let n = a.ncols();
    if n == 0 {
        return 0.0;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut v = Vector::from_fn(n, |_, _| rng.gen_range(-1.0..1.0));
    let mut est = 0.0;
    for _ in 0..iters {
        let norm = v.norm();
        if norm == 0.0 {
            return 0.0;
        }
        v /= norm;
        let w = a.transpose() * (a * &v);
        est = w.dot(&v).max(0.0).sqrt();
        v = w;
    }
    est
}

/// Compares the analytic gradient with central differences at `x`.
/// Returns the largest relative error, or an error above `tol`.
pub fn check_gradient(f: &dyn SmoothObjective, x: &Vector, tol: f64) -> Result<f64> {
    let g = f.gradient(x);
    let mut worst: f64 = 0.0;
    for i in 0..x.len() {
        let h = 1e-6 * (1.0 + x[i].abs());
        let mut xp = x.clone();
        let mut xm = x.clone();
        xp[i] += h;
        xm[i] -= h;
        let fd = (f.value(&xp) - f.value(&xm)) / (2.0 * h);
        let err = (fd - g[i]).abs() / (1.0 + g[i].abs());
        worst = worst.max(err);
    }
    if worst > tol {
        return Err(VbpgError::GradientCheckFailed(worst));
    }
    Ok(worst)
}
