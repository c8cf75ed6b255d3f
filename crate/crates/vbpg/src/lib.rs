//! Variable Bregman proximal gradient for `F = f + g`, with diagnostics that probe
//! level-set error bounds, KL exponents and linear rates on small problems.
//!
//! ```
//! use vbpg::prelude::*;
//!
//! let problem = build_problem(&zoo::lasso(0.3)).unwrap();
//! let eps = 0.9 / problem.lipschitz();
//! let config = SolverConfig::new(eps, KernelSpec::euclidean());
//! let trace = vbpg_run(&problem, &config, &Vector::zeros(3)).unwrap();
//! assert!(trace.final_value() <= trace.f_values[0]);
//! ```

pub mod bregman;
pub mod cli;
pub mod config;
pub mod diagnostics;
pub mod error;
pub mod linalg;
pub mod model;
pub mod problems;
pub mod solver;

pub mod prelude {
    pub use crate::bregman::{
        check_descent_inequality, descent_constants, envelope, gap, prox_map, prox_map_warm, prox_subgradient,
        ConvexityCase, DescentConstants, KernelSpec, ProxResult,
    };
    pub use crate::config::{validate_config, EpsilonSchedule, KernelSchedule, SolverConfig, ValidationReport};
    pub use crate::error::{Result, VbpgError};
    pub use crate::model::{Curvature, Matrix, Problem, Regularizer, SmoothObjective, Vector};
    pub use crate::problems::{build_problem, prox_1d, zoo, Penalty, ProblemSpec, SmoothSpec};
    pub use crate::solver::{kernel_schedule_jacobi, vbpg_run, vbpg_step, Termination, Trace};
}
