//! Error type shared by every module.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum VbpgError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("step-size condition violated: {0}")]
    StepSizeViolation(String),

    #[error("kernel is not strongly convex on the region (smallest eigenvalue {0:e})")]
    KernelNotStronglyConvex(f64),

    #[error("proximal subproblem has no minimizer: {0}")]
    ProxUnbounded(String),

    #[error("inner solver did not reach tolerance after {iters} iterations (residual {residual:e})")]
    InnerSolverNotConverged { iters: usize, residual: f64 },

    #[error("objective is not finite at iteration {0}")]
    NonFiniteObjective(usize),

    #[error("slice is empty: {0}")]
    SliceEmpty(String),

    #[error("sublevel set is empty in the search region")]
    SublevelEmpty,

    #[error("not enough usable samples for a fit: {0}")]
    InsufficientSamples(String),

    #[error("gradient check failed: relative error {0:e}")]
    GradientCheckFailed(f64),

    #[error("problem configuration error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, VbpgError>;
