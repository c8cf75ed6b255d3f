mod common;

use common::{bregman_by_definition, Lcg, M, V};
use proptest::prelude::*;
use vbpg::linalg::{check_gradient, eigen_bounds, power_iteration};
use vbpg::prelude::*;

fn spd() -> M {
    M::from_row_slice(3, 3, &[2.0, 0.5, 0.0, 0.5, 1.5, 0.3, 0.0, 0.3, 1.0])
}

fn vec3() -> impl Strategy<Value = V> {
    prop::collection::vec(-5.0..5.0f64, 3).prop_map(V::from_vec)
}

proptest! {
    #[test]
    fn distance_matches_definition_and_moduli(x in vec3(), y in vec3()) {
        for k in [KernelSpec::euclidean(), KernelSpec::diagonal(V::from_vec(vec![1.0, 3.0, 0.5])).unwrap(), KernelSpec::quadratic(spd()).unwrap()] {
            let a = k.matrix(3);
            let d = k.distance(&x, &y);
            let r2 = (&y - &x).norm_squared();
            prop_assert!((d - bregman_by_definition(&a, &x, &y)).abs() <= 1e-9 * (1.0 + d));
            prop_assert!(d >= 0.5 * k.m() * r2 - 1e-9);
            prop_assert!(d <= 0.5 * k.big_m() * r2 + 1e-9);
            prop_assert!((k.distance(&y, &x) - d).abs() <= 1e-9 * (1.0 + d));
        }
    }

    #[test]
    fn gap_is_nonnegative_and_envelope_below_objective(x in vec3()) {
        for spec in [zoo::lasso(0.3), zoo::quadratic_scad(), zoo::indefinite_mcp()] {
            let p = build_problem(&spec).unwrap();
            let eps = 0.9 / p.lipschitz();
            let r = prox_map(&p, &KernelSpec::euclidean(), eps, &x).unwrap();
            prop_assert!(r.gap >= -1e-12);
            prop_assert!(r.envelope <= p.value(&x) + 1e-12);
        }
    }
}

#[test]
fn gap_vanishes_exactly_at_fixed_points() {
    let p = build_problem(&zoo::lasso(0.3)).unwrap();
    let k = KernelSpec::euclidean();
    let eps = 0.9 / p.lipschitz();
    let trace = vbpg_run(&p, &SolverConfig::new(eps, k.clone()).with_step_tol(1e-15).with_max_iters(100_000), &V::zeros(3)).unwrap();
    let r = prox_map(&p, &k, eps, &trace.final_point).unwrap();
    assert!(r.gap.abs() < 1e-12, "gap {} at limit", r.gap);
    let away = prox_map(&p, &k, eps, &V::from_element(3, 1.0)).unwrap();
    assert!(away.gap > 1e-3);
}

#[test]
fn kernels_reject_bad_matrices() {
    assert!(KernelSpec::diagonal(V::from_vec(vec![1.0, 0.0])).is_err());
    assert!(KernelSpec::quadratic(M::from_row_slice(2, 2, &[1.0, 2.0, 0.0, 1.0])).is_err());
    assert!(KernelSpec::quadratic(M::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 1.0])).is_err());
    let k = KernelSpec::quadratic(spd()).unwrap();
    let (lo, hi) = eigen_bounds(&spd());
    assert!((k.m() - lo).abs() < 1e-12 && (k.big_m() - hi).abs() < 1e-12);
    assert!(k.check_dim(2).is_err());
}

#[test]
fn prox_rejects_bad_inputs() {
    let p = build_problem(&zoo::lasso(0.3)).unwrap();
    let k = KernelSpec::euclidean();
    assert!(matches!(prox_map(&p, &k, 0.0, &V::zeros(3)), Err(VbpgError::InvalidParameter(_))));
    assert!(matches!(prox_map(&p, &k, 0.1, &V::zeros(2)), Err(VbpgError::DimensionMismatch { .. })));
}

#[test]
fn descent_constants_table() {
    let (m, big_m, l, e) = (1.0, 2.0, 3.0, 0.25);
    let k = descent_constants(ConvexityCase::General, m, big_m, l, e, e);
    assert_eq!((k.a, k.b, k.c), (2.0, 8.0 + 2.0 + 9.0, 4.0 - 5.0));
    let k = descent_constants(ConvexityCase::BothConvex, m, big_m, l, e, e);
    assert_eq!((k.a, k.b, k.c), (0.5, 2.0, 0.25));
}

#[test]
fn descent_inequality_holds_on_random_pairs() {
    let mut rng = Lcg(21);
    for spec in [zoo::quadratic_scad(), zoo::box_quadratic(), zoo::logistic_l1()] {
        let p = build_problem(&spec).unwrap();
        let k = KernelSpec::diagonal(V::from_vec(vec![1.0, 1.5, 2.0])).unwrap();
        let eps = 0.8 * vbpg::config::max_step(&p, k.m());
        for _ in 0..200 {
            let x = rng.vector(3, -1.0, 1.0);
            let u = rng.vector(3, -1.0, 1.0);
            let s = check_descent_inequality(&p, &k, eps, eps, eps, &x, &u).unwrap();
            assert!(s >= -1e-8, "{}: slack {s}", p.name);
        }
    }
}

#[test]
fn gradients_and_lipschitz_constants() {
    let mut rng = Lcg(22);
    for spec in zoo::level_bounded().into_iter().chain(zoo::pointwise_only()) {
        let p = build_problem(&spec).unwrap();
        for _ in 0..20 {
            let x = rng.vector(p.dim(), -2.0, 2.0);
            check_gradient(p.f.as_ref(), &x, 1e-5).unwrap();
            let y = rng.vector(p.dim(), -2.0, 2.0);
            let lhs = (p.gradient(&x) - p.gradient(&y)).norm();
            assert!(lhs <= p.lipschitz() * (&x - &y).norm() * (1.0 + 1e-9) + 1e-12, "{}", p.name);
        }
    }
    let a = spd();
    let (_, hi) = eigen_bounds(&a);
    assert!((power_iteration(&a, 200, 1) - hi).abs() < 1e-8);
}

#[test]
fn quadratic_kernel_prox_is_warm_start_independent() {
    let p = build_problem(&zoo::quadratic_mcp()).unwrap();
    let k = KernelSpec::quadratic(spd()).unwrap();
    let eps = 0.9 * vbpg::config::max_step(&p, k.m());
    let x = V::from_vec(vec![0.4, -1.2, 0.8]);
    let a = prox_map_warm(&p, &k, eps, &x, &x).unwrap();
    let b = prox_map_warm(&p, &k, eps, &x, &V::from_element(3, 7.0)).unwrap();
    assert!((a.minimizer - b.minimizer).norm() < 1e-8);
    assert!(a.inner_iters > 0);
}
