//! Level slices, sublevel-set projections, and slice probes.

use std::io::Write;

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::conditions::CriticalSet;
use crate::bregman::{prox_map, prox_subgradient, KernelSpec};
use crate::error::{Result, VbpgError};
use crate::model::{Problem, Vector};
use crate::solver::fmt17;

/// Rejection sampling gives up after this many draws.
pub const MAX_DRAWS: usize = 1_000_000;

/// `{x : |x - center| < eta, f_bar < F(x) < f_bar + nu}` with `f_bar = F(center)`.
#[derive(Clone, Debug, Serialize)]
pub struct LevelSlice {
    pub center: Vector,
    pub f_bar: f64,
    pub eta: f64,
    pub nu: f64,
}

impl LevelSlice {
    pub fn new(problem: &Problem, center: Vector, eta: f64, nu: f64) -> Result<Self> {
        if !(eta > 0.0 && nu > 0.0) {
            return Err(VbpgError::InvalidParameter("slice needs eta > 0 and nu > 0".into()));
        }
        let f_bar = problem.value(&center);
        if !f_bar.is_finite() {
            return Err(VbpgError::InvalidParameter("slice center must have finite objective".into()));
        }
        Ok(LevelSlice { center, f_bar, eta, nu })
    }

    pub fn contains(&self, problem: &Problem, x: &Vector) -> bool {
        if (x - &self.center).norm() >= self.eta {
            return false;
        }
        let v = problem.value(x);
        v > self.f_bar && v < self.f_bar + self.nu
    }
}

/// Uniform point in the open ball of radius `r` around `c`.
pub fn sample_ball<R: Rng>(rng: &mut R, c: &Vector, r: f64) -> Vector {
    loop {
        let u = Vector::from_fn(c.len(), |_, _| rng.gen_range(-1.0..1.0));
        let nu = u.norm();
        if nu < 1.0 {
            return c + u * r;
        }
    }
}

/// How sample radii are drawn inside the ball.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RadialSampling {
    /// Uniform in the ball.
    #[default]
    Uniform,
    /// Uniform direction, `log r` uniform on `[log(min_fraction eta), log eta]`.
    /// Spreads samples over several scales, which stabilizes exponent fits.
    LogUniform { min_fraction: f64 },
}

/// Point of the ball `B(c, r)` drawn according to `scheme`.
pub fn sample_radial<R: Rng>(rng: &mut R, c: &Vector, r: f64, scheme: RadialSampling) -> Vector {
    match scheme {
        RadialSampling::Uniform => sample_ball(rng, c, r),
        RadialSampling::LogUniform { min_fraction } => loop {
            let u = Vector::from_fn(c.len(), |_, _| rng.gen_range(-1.0..1.0));
            let nu = u.norm();
            if nu < 1.0 && nu > 1e-3 {
                let rad = r * min_fraction.powf(rng.gen::<f64>());
                return c + u * (rad / nu);
            }
        },
    }
}

/// `0.1 * (max F - min F)` over 1000 points of the ball `B(center, eta)`.
pub fn default_nu<R: Rng>(problem: &Problem, center: &Vector, eta: f64, rng: &mut R) -> f64 {
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for _ in 0..1000 {
        let v = problem.value(&sample_ball(rng, center, eta));
        if v.is_finite() {
            lo = lo.min(v);
            hi = hi.max(v);
        }
    }
    0.1 * (hi - lo).max(0.0)
}

#[derive(Clone, Debug)]
pub struct ProjectionOptions {
    /// Absolute grid resolution at which refinement stops.
    pub resolution: f64,
    /// Refinement also stops at `relative * search radius`.
    pub relative: f64,
    /// Grid points per axis on the coarse level.
    pub coarse: usize,
    /// Search radius when no anchor is given.
    pub radius: f64,
}

impl Default for ProjectionOptions {
    fn default() -> Self {
        ProjectionOptions { resolution: 1e-9, relative: 1e-7, coarse: 21, radius: 10.0 }
    }
}

#[derive(Clone, Debug)]
pub struct Projection {
    /// A point with `F(point) <= f_bar`.
    pub point: Vector,
    pub distance: f64,
}

/// Largest dimension handled by the grid search.
pub const GRID_MAX_DIM: usize = 3;

fn for_each_grid_point(center: &Vector, half: f64, per_axis: usize, mut visit: impl FnMut(&Vector)) {
    let n = center.len();
    let step = 2.0 * half / (per_axis - 1) as f64;
    let mut idx = vec![0usize; n];
    let mut p = center.clone();
    loop {
        for i in 0..n {
            p[i] = center[i] - half + step * idx[i] as f64;
        }
        visit(&p);
        let mut d = 0;
        loop {
            if d == n {
                return;
            }
            idx[d] += 1;
            if idx[d] < per_axis {
                break;
            }
            idx[d] = 0;
            d += 1;
        }
    }
}

/// Approximate projection of `x` onto `[F <= f_bar]`: coarse grid, local refinement,
/// then bisection along the segment towards `x`. The returned point is always feasible, so
/// the distance is an upper estimate within the grid resolution.
/// `anchor` must be a known point of the sublevel set; it bounds the search radius.
pub fn sublevel_projection(
    problem: &Problem,
    f_bar: f64,
    x: &Vector,
    anchor: Option<&Vector>,
    opts: &ProjectionOptions,
) -> Result<Projection> {
    let inside = |p: &Vector| problem.value(p) <= f_bar;
    if inside(x) {
        return Ok(Projection { point: x.clone(), distance: 0.0 });
    }
    let mut best: Option<(f64, Vector)> = None;
    let radius = match anchor {
        Some(a) => {
            if inside(a) {
                best = Some(((a - x).norm(), a.clone()));
            }
            (a - x).norm()
        }
        None => opts.radius,
    };
    let n = x.len();
    if n <= GRID_MAX_DIM && radius > 0.0 {
        let consider = |p: &Vector, best: &mut Option<(f64, Vector)>| {
            let d = (p - x).norm();
            if best.as_ref().is_none_or(|(bd, _)| d < *bd) && inside(p) {
                *best = Some((d, p.clone()));
            }
        };
        let coarse = opts.coarse.max(3);
        for_each_grid_point(x, radius, coarse, |p| consider(p, &mut best));
        let mut h = 2.0 * radius / (coarse - 1) as f64;
        let target = opts.resolution.max(opts.relative * radius);
        while h > target {
            let c = match &best {
                Some((_, b)) => b.clone(),
                None => break,
            };
            for_each_grid_point(&c, 2.0 * h, 17, |p| consider(p, &mut best));
            h /= 4.0;
        }
    }
    let (_, far) = best.ok_or(VbpgError::SublevelEmpty)?;
    let mut point = boundary_between(&inside, x, &far);
    let mut dist = (&point - x).norm();
    // Pattern search over boundary points. Grid points carry a normal-direction slack of one
    // spacing, which hides tangential errors on curved boundaries; pulling every trial point
    // onto the boundary first makes those errors visible.
    let target = opts.resolution.max(opts.relative * radius);
    let mut step = 1e-2 * radius.max(dist);
    while step > target && dist > 0.0 {
        let mut improved = false;
        for i in 0..n {
            for sign in [1.0, -1.0] {
                let mut q = point.clone();
                q[i] += sign * step;
                let pulled = if inside(&q) {
                    Some(boundary_between(&inside, x, &q))
                } else {
                    anchor.filter(|a| inside(a)).map(|a| boundary_between(&inside, &q, a))
                };
                if let Some(p) = pulled {
                    let d = (&p - x).norm();
                    if d < dist {
                        point = p;
                        dist = d;
                        improved = true;
                    }
                }
            }
        }
        if !improved {
            step /= 2.0;
        }
    }
    Ok(Projection { point, distance: dist })
}

/// Feasible point near the crossing on the segment `from -> to`, where `to` is feasible.
/// Bisection keeps the feasible end, so the result is always in the sublevel set.
fn boundary_between(inside: &impl Fn(&Vector) -> bool, from: &Vector, to: &Vector) -> Vector {
    if inside(from) {
        return from.clone();
    }
    let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if inside(&(from + (to - from) * mid)) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    if hi < 1.0 {
        from + (to - from) * hi
    } else {
        to.clone()
    }
}

/// Quantities recorded at one slice point.
#[derive(Clone, Debug, Serialize)]
pub struct ProbeSample {
    pub x: Vector,
    /// `|x - center|`
    pub radius: f64,
    pub value: f64,
    /// `F(x) - f_bar`
    pub value_gap: f64,
    /// Distance to `[F <= f_bar]`.
    pub dist_level: f64,
    /// `dist(0, dF(x))`.
    pub dist_subdiff: f64,
    /// `|x - T(x)|`.
    pub dist_prox: f64,
    /// Distance to the approximate critical set (`NaN` when none was supplied).
    pub dist_crit: f64,
    /// `F(T(x)) >= f_bar`.
    pub property_a: bool,
    pub gap: f64,
    pub envelope: f64,
    /// `F(T(x))`.
    pub prox_value: f64,
    pub prox_point: Vector,
    /// Distance from `T(x)` to `[F <= f_bar]`.
    pub prox_dist_level: f64,
}

#[derive(Clone, Debug, Default)]
pub struct ProbeOptions {
    pub projection: ProjectionOptions,
    pub critical_set: Option<CriticalSet>,
    pub radial: RadialSampling,
}

/// Draws `n` points of the slice (rejection from the ball, uniform unless `opts.radial` says
/// otherwise) and evaluates every
/// diagnostic quantity at each. Sampling is sequential; evaluation runs in parallel and
/// keeps the sampling order.
pub fn probe_slice<R: Rng>(
    problem: &Problem,
    slice: &LevelSlice,
    kernel: &KernelSpec,
    eps: f64,
    n: usize,
    rng: &mut R,
    opts: &ProbeOptions,
) -> Result<Vec<ProbeSample>> {
    let mut points = Vec::with_capacity(n);
    let mut draws = 0usize;
    while points.len() < n {
        if draws >= MAX_DRAWS {
            return Err(VbpgError::SliceEmpty(format!(
                "accepted {} of {} requested points after {} draws",
                points.len(),
                n,
                MAX_DRAWS
            )));
        }
        draws += 1;
        let x = sample_radial(rng, &slice.center, slice.eta, opts.radial);
        if slice.contains(problem, &x) {
            points.push(x);
        }
    }
    points.into_par_iter().map(|x| evaluate_sample(problem, slice, kernel, eps, x, opts)).collect()
}

/// Evaluates all probe quantities at one point.
pub fn evaluate_sample(
    problem: &Problem,
    slice: &LevelSlice,
    kernel: &KernelSpec,
    eps: f64,
    x: Vector,
    opts: &ProbeOptions,
) -> Result<ProbeSample> {
    let value = problem.value(&x);
    let proj = sublevel_projection(problem, slice.f_bar, &x, Some(&slice.center), &opts.projection)?;
    let p = prox_map(problem, kernel, eps, &x)?;
    let t = p.minimizer;
    let prox_value = problem.value(&t);
    let dist_subdiff = match problem.subdiff_dist(&x) {
        Some(d) => d,
        None => prox_subgradient(problem, kernel, eps, &x, &t).norm(),
    };
    let prox_dist_level = sublevel_projection(problem, slice.f_bar, &t, Some(&slice.center), &opts.projection)?.distance;
    let dist_crit = opts.critical_set.as_ref().map_or(f64::NAN, |c| c.distance(&x));
    Ok(ProbeSample {
        radius: (&x - &slice.center).norm(),
        value,
        value_gap: value - slice.f_bar,
        dist_level: proj.distance,
        dist_subdiff,
        dist_prox: (&x - &t).norm(),
        dist_crit,
        property_a: prox_value >= slice.f_bar,
        gap: p.gap,
        envelope: p.envelope,
        prox_value,
        prox_point: t,
        prox_dist_level,
        x,
    })
}

/// CSV with columns `x0..,dist_level,dist_subdiff,value_gap,dist_prox,dist_crit,property_A`.
pub fn write_probe_csv<W: Write>(samples: &[ProbeSample], mut w: W) -> std::io::Result<()> {
    let n = samples.first().map_or(0, |s| s.x.len());
    let mut header: Vec<String> = (0..n).map(|i| format!("x{i}")).collect();
    header.extend(["dist_level", "dist_subdiff", "value_gap", "dist_prox", "dist_crit", "property_A"].map(String::from));
    writeln!(w, "{}", header.join(","))?;
    for s in samples {
        let mut row: Vec<String> = s.x.iter().map(|v| fmt17(*v)).collect();
        for v in [s.dist_level, s.dist_subdiff, s.value_gap, s.dist_prox, s.dist_crit] {
            row.push(fmt17(v));
        }
        row.push(s.property_a.to_string());
        writeln!(w, "{}", row.join(","))?;
    }
    Ok(())
}
