//! Problem zoo: smooth parts, separable penalties, JSON specs.

pub mod penalty;
pub mod smooth;
pub mod spec;
pub mod zoo;

pub use penalty::{interval_dist, prox_1d, soft_threshold, Penalty, Prox1d};
pub use smooth::{Logistic, ProfileKind, Quadratic, ScalarProfile};
pub use spec::{build_problem, ProblemSpec, SmoothSpec};
