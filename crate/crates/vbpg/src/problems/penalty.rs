//! Separable nonsmooth parts `g(x) = sum_i h(x_i)` and their one-dimensional prox.

use serde::{Deserialize, Serialize};

use crate::error::{Result, VbpgError};
use crate::model::{Curvature, ProxPoint, Regularizer, Vector};

/// Candidates whose subproblem values differ by less than this are a tie.
pub const TIE_TOL: f64 = 1e-10;

/// Scalar penalty `h`; as a [`Regularizer`] it acts coordinatewise.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Penalty {
    Zero,
    /// `lambda |t|`
    L1 { lambda: f64 },
    /// `(lambda/2) t^2`
    SqL2 { lambda: f64 },
    /// Indicator of `[lo, hi]`.
    Box { lo: f64, hi: f64 },
    Scad { lambda: f64, a: f64 },
    Mcp { lambda: f64, gamma: f64 },
    /// `coef |t|^exponent`, `exponent >= 1`.
    Power { coef: f64, exponent: f64 },
    /// `(t - center)^2 / 2` away from `center`, and `-1` at `center`.
    PuncturedQuadratic { center: f64 },
}

/// Result of a scalar prox evaluation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Prox1d {
    pub t: f64,
    pub tie: bool,
}

impl Penalty {
    pub fn validate(&self) -> Result<()> {
        let bad = |s: &str| Err(VbpgError::InvalidParameter(s.to_string()));
        let finite = |v: f64| v.is_finite();
        match *self {
            Penalty::Zero => Ok(()),
            Penalty::L1 { lambda } | Penalty::SqL2 { lambda } => {
                if !finite(lambda) || lambda < 0.0 {
                    return bad("lambda must be finite and nonnegative");
                }
                Ok(())
            }
            Penalty::Box { lo, hi } => {
                if lo.is_nan() || hi.is_nan() || lo > hi {
                    return bad("box needs lo <= hi");
                }
                Ok(())
            }
            Penalty::Scad { lambda, a } => {
                if !finite(lambda) || lambda <= 0.0 {
                    return bad("scad lambda must be positive");
                }
                if !finite(a) || a <= 2.0 {
                    return bad("scad needs a > 2");
                }
                Ok(())
            }
            Penalty::Mcp { lambda, gamma } => {
                if !finite(lambda) || lambda <= 0.0 {
                    return bad("mcp lambda must be positive");
                }
                if !finite(gamma) || gamma <= 1.0 {
                    return bad("mcp needs gamma > 1");
                }
                Ok(())
            }
            Penalty::Power { coef, exponent } => {
                if !finite(coef) || coef <= 0.0 || !finite(exponent) || exponent < 1.0 {
                    return bad("power needs coef > 0 and exponent >= 1");
                }
                Ok(())
            }
            Penalty::PuncturedQuadratic { center } => {
                if !finite(center) {
                    return bad("center must be finite");
                }
                Ok(())
            }
        }
    }

    pub fn scalar_value(&self, t: f64) -> f64 {
        match *self {
            Penalty::Zero => 0.0,
            Penalty::L1 { lambda } => lambda * t.abs(),
            Penalty::SqL2 { lambda } => 0.5 * lambda * t * t,
            Penalty::Box { lo, hi } => {
                if t >= lo && t <= hi {
                    0.0
                } else {
                    f64::INFINITY
                }
            }
            Penalty::Scad { lambda, a } => {
                let r = t.abs();
                if r <= lambda {
                    lambda * r
                } else if r <= a * lambda {
                    (2.0 * a * lambda * r - r * r - lambda * lambda) / (2.0 * (a - 1.0))
                } else {
                    0.5 * lambda * lambda * (a + 1.0)
                }
            }
            Penalty::Mcp { lambda, gamma } => {
                let r = t.abs();
                if r <= gamma * lambda {
                    lambda * r - r * r / (2.0 * gamma)
                } else {
                    0.5 * gamma * lambda * lambda
                }
            }
            Penalty::Power { coef, exponent } => coef * t.abs().powf(exponent),
            Penalty::PuncturedQuadratic { center } => {
                if t == center {
                    -1.0
                } else {
                    0.5 * (t - center) * (t - center)
                }
            }
        }
    }

    pub fn curvature_kind(&self) -> Curvature {
        match *self {
            Penalty::Scad { a, .. } => Curvature::Semiconvex(1.0 / (a - 1.0)),
            Penalty::Mcp { gamma, .. } => Curvature::Semiconvex(1.0 / gamma),
            Penalty::PuncturedQuadratic { .. } => Curvature::General,
            _ => Curvature::Convex,
        }
    }

    /// Proximal subdifferential of `h` at `t` as a closed interval; `None` if empty.
    pub fn subdifferential(&self, t: f64) -> Option<(f64, f64)> {
        let sgn = |lam: f64| if t > 0.0 { (lam, lam) } else if t < 0.0 { (-lam, -lam) } else { (-lam, lam) };
        match *self {
            Penalty::Zero => Some((0.0, 0.0)),
            Penalty::L1 { lambda } => Some(sgn(lambda)),
            Penalty::SqL2 { lambda } => Some((lambda * t, lambda * t)),
            Penalty::Box { lo, hi } => {
                if t < lo || t > hi {
                    None
                } else if lo == hi {
                    Some((f64::NEG_INFINITY, f64::INFINITY))
                } else if t == lo {
                    Some((f64::NEG_INFINITY, 0.0))
                } else if t == hi {
                    Some((0.0, f64::INFINITY))
                } else {
                    Some((0.0, 0.0))
                }
            }
            Penalty::Scad { lambda, a } => {
                let r = t.abs();
                if r <= lambda {
                    Some(sgn(lambda))
                } else if r <= a * lambda {
                    let d = t.signum() * (a * lambda - r) / (a - 1.0);
                    Some((d, d))
                } else {
                    Some((0.0, 0.0))
                }
            }
            Penalty::Mcp { lambda, gamma } => {
                let r = t.abs();
                if t == 0.0 {
                    Some((-lambda, lambda))
                } else if r <= gamma * lambda {
                    let d = t.signum() * (lambda - r / gamma);
                    Some((d, d))
                } else {
                    Some((0.0, 0.0))
                }
            }
            Penalty::Power { coef, exponent } => {
                if exponent == 1.0 {
                    Some(sgn(coef))
                } else {
                    let d = coef * exponent * t.abs().powf(exponent - 1.0) * t.signum();
                    let d = if t == 0.0 { 0.0 } else { d };
                    Some((d, d))
                }
            }
            Penalty::PuncturedQuadratic { center } => {
                if t == center {
                    Some((f64::NEG_INFINITY, f64::INFINITY))
                } else {
                    Some((t - center, t - center))
                }
            }
        }
    }

    /// Global minimizer of `h(t) + weight/(2 eps) (t - v)^2`.
    pub fn prox_1d(&self, v: f64, weight: f64, eps: f64) -> Prox1d {
        let s = eps / weight;
        let plain = |t: f64| Prox1d { t, tie: false };
        match *self {
            Penalty::Zero => plain(v),
            Penalty::L1 { lambda } => plain(soft_threshold(v, lambda * s)),
            Penalty::SqL2 { lambda } => plain(v / (1.0 + lambda * s)),
            Penalty::Box { lo, hi } => plain(v.clamp(lo, hi)),
            Penalty::Scad { lambda, a } => {
                let c = 1.0 / (2.0 * (a - 1.0));
                let pieces = [
                    Piece { lo: 0.0, hi: lambda, c2: 0.0, c1: lambda },
                    Piece { lo: lambda, hi: a * lambda, c2: -c, c1: a * lambda / (a - 1.0) },
                    Piece { lo: a * lambda, hi: f64::INFINITY, c2: 0.0, c1: 0.0 },
                ];
                self.enumerate(&pieces, v, s)
            }
            Penalty::Mcp { lambda, gamma } => {
                let pieces = [
                    Piece { lo: 0.0, hi: gamma * lambda, c2: -0.5 / gamma, c1: lambda },
                    Piece { lo: gamma * lambda, hi: f64::INFINITY, c2: 0.0, c1: 0.0 },
                ];
                self.enumerate(&pieces, v, s)
            }
            Penalty::Power { coef, exponent } => plain(power_prox(coef, exponent, v, s)),
            Penalty::PuncturedQuadratic { center } => {
                let smooth = (s * center + v) / (s + 1.0);
                let cands = [center, smooth];
                self.pick(&cands, v, s)
            }
        }
    }

    fn objective(&self, t: f64, v: f64, s: f64) -> f64 {
        self.scalar_value(t) + (t - v) * (t - v) / (2.0 * s)
    }

    /// Minimizes over stationary points and breakpoints of a symmetric piecewise quadratic.
    fn enumerate(&self, pieces: &[Piece], v: f64, s: f64) -> Prox1d {
        let mut cands = Vec::with_capacity(4 * pieces.len());
        for sign in [1.0, -1.0] {
            let u = sign * v;
            for p in pieces {
                cands.push(sign * p.lo);
                if p.hi.is_finite() {
                    cands.push(sign * p.hi);
                }
                let curv = 2.0 * p.c2 + 1.0 / s;
                if curv > 0.0 {
                    let r = ((u / s - p.c1) / curv).clamp(p.lo, p.hi);
                    cands.push(sign * r);
                }
            }
        }
        self.pick(&cands, v, s)
    }

    fn pick(&self, cands: &[f64], v: f64, s: f64) -> Prox1d {
        let vals: Vec<f64> = cands.iter().map(|&t| self.objective(t, v, s)).collect();
        let best = vals.iter().cloned().fold(f64::INFINITY, f64::min);
        let tol = TIE_TOL * (1.0 + best.abs());
        let mut chosen: Option<f64> = None;
        let mut tie = false;
        for (&t, &h) in cands.iter().zip(vals.iter()) {
            if h > best + tol {
                continue;
            }
            match chosen {
                None => chosen = Some(t),
                Some(c) => {
                    if (c - t).abs() > 1e-9 * (1.0 + c.abs()) {
                        tie = true;
                    }
                    if t.abs() < c.abs() {
                        chosen = Some(t);
                    }
                }
            }
        }
        let t = chosen.unwrap_or(v);
        Prox1d { t, tie: tie && !matches!(self, Penalty::Zero) }
    }
}

/// `c2 r^2 + c1 r + const` on `[lo, hi]`, `r >= 0`.
#[derive(Clone, Copy, Debug)]
struct Piece {
    lo: f64,
    hi: f64,
    c2: f64,
    c1: f64,
}

pub fn soft_threshold(v: f64, tau: f64) -> f64 {
    if v > tau {
        v - tau
    } else if v < -tau {
        v + tau
    } else {
        0.0
    }
}

/// Minimizer of `coef |t|^p + (t - v)^2 / (2 s)` by bisection on the monotone optimality condition.
fn power_prox(coef: f64, p: f64, v: f64, s: f64) -> f64 {
    if p == 1.0 {
        return soft_threshold(v, coef * s);
    }
    if p == 2.0 {
        return v / (1.0 + 2.0 * coef * s);
    }
    let target = v.abs();
    if target == 0.0 {
        return 0.0;
    }
    let phi = |r: f64| coef * p * r.powf(p - 1.0) + (r - target) / s;
    let (mut lo, mut hi) = (0.0_f64, target);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if phi(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    v.signum() * 0.5 * (lo + hi)
}

/// Scalar prox used by the separable fast path.
pub fn prox_1d(g: &Penalty, v: f64, weight: f64, eps: f64) -> Prox1d {
    g.prox_1d(v, weight, eps)
}

/// Distance from `0` to `shift + [lo, hi]`.
pub fn interval_dist(shift: f64, interval: Option<(f64, f64)>) -> f64 {
    match interval {
        None => f64::INFINITY,
        Some((lo, hi)) => {
            let target = -shift;
            if target < lo {
                lo - target
            } else if target > hi {
                target - hi
            } else {
                0.0
            }
        }
    }
}

impl Regularizer for Penalty {
    fn value(&self, x: &Vector) -> f64 {
        let mut total = 0.0;
        for &t in x.iter() {
            let v = self.scalar_value(t);
            if v == f64::INFINITY {
                return f64::INFINITY;
            }
            total += v;
        }
        total
    }

    fn curvature(&self) -> Curvature {
        self.curvature_kind()
    }

    fn scaled_prox(&self, anchor: &Vector, linear: &Vector, weights: &Vector, eps: f64) -> ProxPoint {
        let mut tie = false;
        let point = Vector::from_fn(anchor.len(), |i, _| {
            let v = anchor[i] - eps * linear[i] / weights[i];
            let r = self.prox_1d(v, weights[i], eps);
            tie |= r.tie;
            r.t
        });
        ProxPoint { point, tie }
    }

    fn subdiff_dist(&self, x: &Vector, shift: &Vector) -> Option<f64> {
        let mut sq = 0.0;
        for i in 0..x.len() {
            let d = interval_dist(shift[i], self.subdifferential(x[i]));
            if d == f64::INFINITY {
                return Some(f64::INFINITY);
            }
            sq += d * d;
        }
        Some(sq.sqrt())
    }

    fn is_separable(&self) -> bool {
        true
    }

    fn name(&self) -> String {
        match self {
            Penalty::Zero => "zero",
            Penalty::L1 { .. } => "l1",
            Penalty::SqL2 { .. } => "sq_l2",
            Penalty::Box { .. } => "box",
            Penalty::Scad { .. } => "scad",
            Penalty::Mcp { .. } => "mcp",
            Penalty::Power { .. } => "power",
            Penalty::PuncturedQuadratic { .. } => "punctured_quadratic",
        }
        .into()
    }
}
