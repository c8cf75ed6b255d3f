//! Fixed problem instances used by the checks, examples and tests.

use super::penalty::Penalty;
use super::smooth::ProfileKind;
use super::spec::{ProblemSpec, SmoothSpec};

pub fn lasso_design() -> (Vec<Vec<f64>>, Vec<f64>) {
    let a = vec![
        vec![1.0, 0.5, 0.0],
        vec![0.2, 1.0, 0.3],
        vec![0.0, 0.4, 1.0],
        vec![0.7, 0.0, 0.2],
        vec![0.1, 0.9, 0.5],
        vec![0.3, 0.2, 0.8],
    ];
    let y = vec![1.0, -0.5, 0.8, 0.3, -0.2, 0.6];
    (a, y)
}

fn pd_quadratic() -> SmoothSpec {
    SmoothSpec::Quadratic {
        q: vec![vec![3.0, 1.0, 0.0], vec![1.0, 2.0, 0.5], vec![0.0, 0.5, 1.5]],
        b: Some(vec![1.0, -1.0, 0.5]),
    }
}

fn indefinite_quadratic() -> SmoothSpec {
    SmoothSpec::Quadratic {
        q: vec![vec![2.0, 0.5, 0.0], vec![0.5, -1.0, 0.3], vec![0.0, 0.3, 1.0]],
        b: Some(vec![0.5, 0.2, -0.4]),
    }
}

pub fn lasso(lambda: f64) -> ProblemSpec {
    let (a, y) = lasso_design();
    ProblemSpec::new("lasso", SmoothSpec::LeastSquares { a, y }, Penalty::L1 { lambda })
}

pub fn logistic_l1() -> ProblemSpec {
    ProblemSpec::new(
        "logistic_l1",
        SmoothSpec::Logistic { a: None, labels: None, samples: Some(20), dimension: Some(3), data_seed: Some(7) },
        Penalty::L1 { lambda: 0.5 },
    )
}

pub fn quadratic_mcp() -> ProblemSpec {
    ProblemSpec::new("quadratic_mcp", pd_quadratic(), Penalty::Mcp { lambda: 0.5, gamma: 3.0 })
}

pub fn quadratic_scad() -> ProblemSpec {
    ProblemSpec::new("quadratic_scad", pd_quadratic(), Penalty::Scad { lambda: 0.5, a: 3.7 })
}

/// Indefinite quadratic on a box: nonconvex smooth part, level bounded.
pub fn box_quadratic() -> ProblemSpec {
    ProblemSpec::new("box_quadratic", indefinite_quadratic(), Penalty::Box { lo: -1.0, hi: 1.0 })
}

pub fn square_plus_sine(dim: usize) -> ProblemSpec {
    ProblemSpec::new(
        "square_plus_sine",
        SmoothSpec::ScalarProfile { profile: ProfileKind::SquarePlusSine, dimension: dim },
        Penalty::Zero,
    )
}

pub fn softplus_ridge() -> ProblemSpec {
    ProblemSpec::new(
        "softplus_ridge",
        SmoothSpec::ScalarProfile { profile: ProfileKind::Softplus, dimension: 2 },
        Penalty::SqL2 { lambda: 1.0 },
    )
}

/// One-dimensional function that satisfies a level-set error bound but not the KL inequality.
pub fn punctured(center: f64) -> ProblemSpec {
    ProblemSpec::new("punctured", SmoothSpec::Zero { dimension: 1 }, Penalty::PuncturedQuadratic { center })
}

/// `coef |x|^p` in one dimension: KL exponent `1 - 1/p`.
pub fn power_profile(exponent: f64) -> ProblemSpec {
    ProblemSpec::new(
        &format!("power_{exponent}"),
        SmoothSpec::Zero { dimension: 1 },
        Penalty::Power { coef: 1.0, exponent },
    )
}

pub fn indefinite_l1() -> ProblemSpec {
    ProblemSpec::new("indefinite_l1", indefinite_quadratic(), Penalty::L1 { lambda: 0.3 })
}

pub fn indefinite_mcp() -> ProblemSpec {
    ProblemSpec::new("indefinite_mcp", indefinite_quadratic(), Penalty::Mcp { lambda: 0.5, gamma: 3.0 })
}

/// Level-bounded problems for solver-level checks.
pub fn level_bounded() -> Vec<ProblemSpec> {
    vec![
        lasso(0.3),
        logistic_l1(),
        quadratic_mcp(),
        quadratic_scad(),
        box_quadratic(),
        square_plus_sine(2),
        softplus_ridge(),
        punctured(0.5),
    ]
}

/// Problems used only by pointwise inequality checks (not level bounded).
pub fn pointwise_only() -> Vec<ProblemSpec> {
    vec![indefinite_l1(), indefinite_mcp()]
}
