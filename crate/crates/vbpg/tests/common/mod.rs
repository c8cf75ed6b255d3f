//! Independent reference computations used by the integration tests.
#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use vbpg::problems::Penalty;

pub type V = DVector<f64>;
pub type M = DMatrix<f64>;

/// Penalty values written out from their definitions, independent of the library.
pub fn penalty_value(p: &Penalty, t: f64) -> f64 {
    let r = t.abs();
    match *p {
        Penalty::Zero => 0.0,
        Penalty::L1 { lambda } => lambda * r,
        Penalty::SqL2 { lambda } => lambda * t * t / 2.0,
        Penalty::Box { lo, hi } => {
            if (lo..=hi).contains(&t) {
                0.0
            } else {
                f64::INFINITY
            }
        }
        Penalty::Scad { lambda: l, a } => {
            if r <= l {
                l * r
            } else if r <= a * l {
                -(r * r - 2.0 * a * l * r + l * l) / (2.0 * (a - 1.0))
            } else {
                (a + 1.0) * l * l / 2.0
            }
        }
        Penalty::Mcp { lambda: l, gamma: g } => {
            if r <= g * l {
                l * r - r * r / (2.0 * g)
            } else {
                g * l * l / 2.0
            }
        }
        Penalty::Power { coef, exponent } => coef * r.powf(exponent),
        Penalty::PuncturedQuadratic { center } => {
            if t == center {
                -1.0
            } else {
                (t - center).powi(2) / 2.0
            }
        }
    }
}

/// `dist(0, s + dh(t))` for the proximal subdifferential, from first principles.
pub fn subdiff_dist_1d(p: &Penalty, t: f64, s: f64) -> f64 {
    let interval = |lo: f64, hi: f64| {
        let z = -s;
        if z < lo {
            lo - z
        } else if z > hi {
            z - hi
        } else {
            0.0
        }
    };
    let point = |d: f64| (s + d).abs();
    match *p {
        Penalty::Zero => point(0.0),
        Penalty::L1 { lambda } => {
            if t == 0.0 {
                interval(-lambda, lambda)
            } else {
                point(lambda * t.signum())
            }
        }
        Penalty::SqL2 { lambda } => point(lambda * t),
        Penalty::Box { lo, hi } => {
            if t < lo || t > hi {
                f64::INFINITY
            } else if t == lo {
                interval(f64::NEG_INFINITY, 0.0)
            } else if t == hi {
                interval(0.0, f64::INFINITY)
            } else {
                point(0.0)
            }
        }
        Penalty::Scad { lambda: l, a } => {
            let r = t.abs();
            if t == 0.0 {
                interval(-l, l)
            } else if r <= l {
                point(l * t.signum())
            } else if r <= a * l {
                point((a * l - r) / (a - 1.0) * t.signum())
            } else {
                point(0.0)
            }
        }
        Penalty::Mcp { lambda: l, gamma: g } => {
            let r = t.abs();
            if t == 0.0 {
                interval(-l, l)
            } else if r <= g * l {
                point((l - r / g) * t.signum())
            } else {
                point(0.0)
            }
        }
        Penalty::Power { coef, exponent } => {
            if t != 0.0 {
                point(coef * exponent * t.abs().powf(exponent - 1.0) * t.signum())
            } else if exponent > 1.0 {
                point(0.0)
            } else if exponent == 1.0 {
                interval(-coef, coef)
            } else {
                0.0
            }
        }
        Penalty::PuncturedQuadratic { center } => {
            if t == center {
                0.0
            } else {
                point(t - center)
            }
        }
    }
}

/// Vector version: coordinatewise distances combined in the Euclidean norm.
pub fn subdiff_dist(p: &Penalty, x: &V, grad: &V) -> f64 {
    let mut sq = 0.0;
    for i in 0..x.len() {
        let d = subdiff_dist_1d(p, x[i], grad[i]);
        if d.is_infinite() {
            return f64::INFINITY;
        }
        sq += d * d;
    }
    sq.sqrt()
}

pub struct GridProx {
    pub t: f64,
    pub value: f64,
}

/// Brute-force minimizer of `h(t) + weight/(2 eps)(t - v)^2` over the grid
/// `lo + k res`. Grid points that provably cannot beat the grid point nearest to `v`
/// (because the quadratic alone exceeds its value, given `h >= h_min`) are skipped.
#[allow(clippy::too_many_arguments)]
pub fn grid_prox(h: impl Fn(f64) -> f64, h_min: f64, v: f64, weight: f64, eps: f64, lo: f64, hi: f64, res: f64) -> GridProx {
    let s = eps / weight;
    let n = ((hi - lo) / res).round() as i64;
    let obj = |t: f64| h(t) + (t - v) * (t - v) / (2.0 * s);
    let k0 = (((v - lo) / res).round() as i64).clamp(0, n);
    let mut ref_val = obj(lo + k0 as f64 * res);
    if !ref_val.is_finite() {
        // v outside dom h: scan everything.
        ref_val = f64::INFINITY;
    }
    let (k_lo, k_hi) = if ref_val.is_finite() {
        let w = (2.0 * s * (ref_val - h_min)).max(0.0).sqrt();
        ((((v - w - lo) / res).floor() as i64).max(0), (((v + w - lo) / res).ceil() as i64).min(n))
    } else {
        (0, n)
    };
    let mut best = GridProx { t: f64::NAN, value: f64::INFINITY };
    for k in k_lo..=k_hi {
        let t = lo + k as f64 * res;
        let val = obj(t);
        if val < best.value {
            best = GridProx { t, value: val };
        }
    }
    best
}

/// `K(y) - K(x) - <grad K(x), y - x>` for `K(z) = z'Az/2`.
pub fn bregman_by_definition(a: &M, x: &V, y: &V) -> f64 {
    let k = |z: &V| 0.5 * z.dot(&(a * z));
    k(y) - k(x) - (a * x).dot(&(y - x))
}

/// One block-Jacobi sweep for `f = x'Qx/2 - b'x` and `g = lambda |.|_1` (scalar blocks)
/// or `g = 0` (any blocks): each block minimizes `f` with the other blocks frozen at `x`,
/// plus `c_B/2 |z - x_B|^2`.
pub fn jacobi_sweep(q: &M, b: &V, blocks: &[Vec<usize>], c: &[f64], lambda: f64, x: &V) -> V {
    let mut out = x.clone();
    for (blk, &cb) in blocks.iter().zip(c) {
        let k = blk.len();
        let mut h = M::zeros(k, k);
        let mut rhs = V::zeros(k);
        for (r, &i) in blk.iter().enumerate() {
            let mut off = b[i] + cb * x[i];
            for j in 0..x.len() {
                if !blk.contains(&j) {
                    off -= q[(i, j)] * x[j];
                }
            }
            rhs[r] = off;
            for (s, &j) in blk.iter().enumerate() {
                h[(r, s)] = q[(i, j)];
            }
            h[(r, r)] += cb;
        }
        if lambda > 0.0 {
            assert_eq!(k, 1, "l1 oracle needs scalar blocks");
            let z = rhs[0];
            let shrunk = z.signum() * (z.abs() - lambda).max(0.0);
            out[blk[0]] = shrunk / h[(0, 0)];
        } else {
            let z = h.lu().solve(&rhs).expect("block system is nonsingular");
            for (r, &i) in blk.iter().enumerate() {
                out[i] = z[r];
            }
        }
    }
    out
}

/// Minimum of `f` over the grid `[lo, hi]^n` with `per_axis` points per axis.
pub fn grid_min(f: impl Fn(&V) -> f64, n: usize, lo: f64, hi: f64, per_axis: usize) -> f64 {
    let mut best = f64::INFINITY;
    let total = per_axis.pow(n as u32);
    for idx in 0..total {
        let mut rem = idx;
        let x = V::from_fn(n, |_, _| {
            let k = rem % per_axis;
            rem /= per_axis;
            lo + (hi - lo) * k as f64 / (per_axis - 1) as f64
        });
        best = best.min(f(&x));
    }
    best
}

/// Distance from `x` to `{t : F(t) <= level}` in one dimension by a dense scan.
pub fn sublevel_distance_1d(f: impl Fn(f64) -> f64, level: f64, x: f64, lo: f64, hi: f64, res: f64) -> f64 {
    let n = ((hi - lo) / res).round() as i64;
    let mut best = f64::INFINITY;
    for k in 0..=n {
        let t = lo + k as f64 * res;
        if f(t) <= level {
            best = best.min((t - x).abs());
        }
    }
    best
}

/// Deterministic pseudo-random stream for tests that do not need `rand` types.
pub struct Lcg(pub u64);

impl Lcg {
    pub fn next_f64(&mut self) -> f64 {
        self.0 = self.0.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        (self.0 >> 11) as f64 / (1u64 << 53) as f64
    }
    pub fn range(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.next_f64()
    }
    pub fn vector(&mut self, n: usize, lo: f64, hi: f64) -> V {
        V::from_fn(n, |_, _| self.range(lo, hi))
    }
}
