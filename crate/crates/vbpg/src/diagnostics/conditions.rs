//! Critical-set approximation and the growth / regularity conditions on the smooth part.

use rand::Rng;
use serde::Serialize;

use super::slice::{sample_ball, LevelSlice, MAX_DRAWS};
use crate::bregman::{prox_map, KernelSpec};
use crate::config::SolverConfig;
use crate::error::{Result, VbpgError};
use crate::model::{Problem, Vector};
use crate::solver::vbpg_run;

/// Fixed-point residual below which a point counts as critical.
pub const FIXED_POINT_TOL: f64 = 1e-8;

/// Finite approximation of the set of fixed points of the prox map.
#[derive(Clone, Debug, Default, Serialize)]
pub struct CriticalSet {
    pub points: Vec<Vector>,
}

impl CriticalSet {
    pub fn distance(&self, x: &Vector) -> f64 {
        self.points.iter().map(|p| (x - p).norm()).fold(f64::INFINITY, f64::min)
    }

    pub fn nearest(&self, x: &Vector) -> Option<&Vector> {
        self.points.iter().min_by(|a, b| (x - *a).norm().total_cmp(&(x - *b).norm()))
    }
}

/// Runs the solver from every node of a `per_axis^n` grid over the cube `center +- half_width`
/// and keeps the distinct limits that pass `|x - T(x)| <= 1e-8`. Desk scale only (`n <= 3`).
pub fn approximate_critical_set(
    problem: &Problem,
    kernel: &KernelSpec,
    eps: f64,
    center: &Vector,
    half_width: f64,
    per_axis: usize,
) -> Result<CriticalSet> {
    let n = problem.dim();
    if n > 3 {
        return Err(VbpgError::InvalidParameter("critical-set grid is limited to dimension 3".into()));
    }
    let config = SolverConfig::new(eps, kernel.clone()).with_max_iters(50_000).with_step_tol(1e-13);
    let per_axis = per_axis.max(2);
    let mut set = CriticalSet::default();
    let total = per_axis.pow(n as u32);
    for idx in 0..total {
        let mut rem = idx;
        let x0 = Vector::from_fn(n, |i, _| {
            let k = rem % per_axis;
            rem /= per_axis;
            center[i] - half_width + 2.0 * half_width * k as f64 / (per_axis - 1) as f64
        });
        let trace = vbpg_run(problem, &config, &x0)?;
        let x = trace.final_point;
        let t = prox_map(problem, kernel, eps, &x)?.minimizer;
        if (&x - &t).norm() > FIXED_POINT_TOL {
            continue;
        }
        if set.points.iter().all(|p| (p - &x).norm() > 1e-6) {
            set.points.push(x);
        }
    }
    Ok(set)
}

/// Largest modulus for which a sampled inequality held, and whether it is positive.
#[derive(Clone, Debug, Serialize)]
pub struct ConditionCertificate {
    pub name: String,
    /// `min` over samples of the ratio defining the modulus; `None` when nothing was sampled.
    pub modulus: Option<f64>,
    pub holds: bool,
    pub samples: usize,
    pub note: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct GrowthReport {
    pub conditions: Vec<ConditionCertificate>,
    pub subregularity: Option<SubregularityReport>,
}

impl GrowthReport {
    pub fn get(&self, name: &str) -> Option<&ConditionCertificate> {
        self.conditions.iter().find(|c| c.name == name)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SubregularityReport {
    pub used_condition: String,
    pub mu: f64,
    pub rho: f64,
    pub checked: usize,
    pub violations: usize,
    pub min_slack: f64,
}

fn certificate(name: &str, ratios: &[f64], note: &str) -> ConditionCertificate {
    let modulus = ratios.iter().cloned().filter(|r| r.is_finite()).reduce(f64::min);
    ConditionCertificate {
        name: name.into(),
        modulus,
        holds: modulus.is_some_and(|m| m > 0.0),
        samples: ratios.len(),
        note: note.into(),
    }
}

/// Draws `n` points of the slice.
pub fn sample_slice<R: Rng>(problem: &Problem, slice: &LevelSlice, n: usize, rng: &mut R) -> Result<Vec<Vector>> {
    let mut out = Vec::with_capacity(n);
    let mut draws = 0;
    while out.len() < n {
        if draws >= MAX_DRAWS {
            return Err(VbpgError::SliceEmpty(format!("only {} points accepted", out.len())));
        }
        draws += 1;
        let x = sample_ball(rng, &slice.center, slice.eta);
        if slice.contains(problem, &x) {
            out.push(x);
        }
    }
    Ok(out)
}

/// Samples the defining inequality of each growth condition over the slice and reports the
/// largest modulus consistent with every sample. `x_p` is the nearest approximate critical point.
pub fn certify_conditions<R: Rng>(
    problem: &Problem,
    slice: &LevelSlice,
    critical: &CriticalSet,
    n: usize,
    rng: &mut R,
) -> Result<GrowthReport> {
    if critical.points.is_empty() {
        return Err(VbpgError::InvalidParameter("critical set is empty".into()));
    }
    let f = &problem.f;
    let pts = sample_slice(problem, slice, n, rng)?;
    let tiny = 1e-12;
    let (mut lsc, mut lesc, mut lwsc, mut lqgg, mut lrsi, mut lpl) = (vec![], vec![], vec![], vec![], vec![], vec![]);
    let fbar_smooth = f.value(&slice.center);
    for (i, x) in pts.iter().enumerate() {
        let gx = f.gradient(x);
        let fx = f.value(x);
        let xp = critical.nearest(x).expect("nonempty");
        let dp = x - xp;
        let r2 = dp.norm_squared();
        if r2 > tiny {
            lwsc.push(2.0 * (f.value(xp) - fx - gx.dot(&(xp - x))) / r2);
            lqgg.push((&gx - f.gradient(xp)).dot(&dp) / r2);
            lrsi.push(gx.dot(&dp) / r2);
        }
        let excess = fx - fbar_smooth;
        if excess > tiny {
            lpl.push(0.5 * gx.norm_squared() / excess);
        }
        let y = &pts[(i + 1) % pts.len()];
        let d2 = (y - x).norm_squared();
        if d2 > tiny {
            let r = 2.0 * (f.value(y) - fx - gx.dot(&(y - x))) / d2;
            lsc.push(r);
            if critical.nearest(y).map(|q| (q - xp).norm() < 1e-9).unwrap_or(false) {
                lesc.push(r);
            }
        }
    }
    let g_is_zero = matches!(problem.g.name().as_str(), "zero");
    let conditions = vec![
        certificate("LSC", &lsc, "pairs of slice points"),
        certificate("LESC", &lesc, "pairs sharing the nearest critical point"),
        certificate("LWSC", &lwsc, "point against its nearest critical point"),
        certificate("LQGG", &lqgg, "gradient growth towards the nearest critical point"),
        certificate("LRSI", &lrsi, if g_is_zero { "restricted secant inequality" } else { "only meaningful when g = 0" }),
        certificate("LPL", &lpl, "gradient norm against excess of f over f(center)"),
    ];
    let mut report = GrowthReport { conditions, subregularity: None };
    report.subregularity = check_subregularity_from_growth(problem, &report, critical, &pts);
    Ok(report)
}

/// Checks `dist(0, dF(x)) >= ((mu - rho)/2) dist(x, crit)` on the samples when LWSC or LQGG
/// certified `mu > rho`.
pub fn check_subregularity_from_growth(problem: &Problem, report: &GrowthReport, critical: &CriticalSet, pts: &[Vector]) -> Option<SubregularityReport> {
    let rho = problem.rho()?;
    let (name, mu) = ["LWSC", "LQGG"]
        .iter()
        .filter_map(|n| report.get(n).and_then(|c| c.modulus.map(|m| (n.to_string(), m))))
        .filter(|(_, m)| *m > rho)
        .max_by(|a, b| a.1.total_cmp(&b.1))?;
    let mut min_slack = f64::INFINITY;
    let mut violations = 0;
    let mut checked = 0;
    for x in pts {
        let Some(ds) = problem.subdiff_dist(x) else { continue };
        let bound = 0.5 * (mu - rho) * critical.distance(x);
        let slack = ds - bound;
        checked += 1;
        if slack < -1e-9 * (1.0 + bound) {
            violations += 1;
        }
        min_slack = min_slack.min(slack);
    }
    Some(SubregularityReport { used_condition: name, mu, rho, checked, violations, min_slack })
}

#[derive(Clone, Debug, Serialize)]
pub struct LuoTsengReport {
    /// Envelope of `dist(x, crit) / r(x)` over samples with `r(x) <= sigma`.
    pub c6: f64,
    pub sigma: f64,
    pub checked: usize,
    /// Samples where `dist(x, crit) > c6 |x - T(x)|` for the configured kernel.
    pub bregman_violations: usize,
    pub max_bregman_ratio: f64,
}

/// Fits the Luo-Tseng constant from the Euclidean prox residual
/// `r(x) = |x - prox_g^eps(x - eps grad f(x))|`, then checks the Bregman version with the
/// configured kernel and the same constant.
pub fn check_luo_tseng(
    problem: &Problem,
    points: &[Vector],
    critical: &CriticalSet,
    kernel: &KernelSpec,
    eps: f64,
    sigma: f64,
) -> Result<LuoTsengReport> {
    if !problem.g.curvature().is_convex() {
        return Err(VbpgError::InvalidParameter("the Luo-Tseng check needs a convex g".into()));
    }
    let euclid = KernelSpec::euclidean();
    let mut c6: f64 = 0.0;
    let mut used = Vec::new();
    for x in points {
        let r = (x - prox_map(problem, &euclid, eps, x)?.minimizer).norm();
        if r <= sigma && r > 0.0 {
            c6 = c6.max(critical.distance(x) / r);
            used.push(x);
        }
    }
    let mut bregman_violations = 0;
    let mut max_ratio: f64 = 0.0;
    for x in &used {
        let d = (*x - prox_map(problem, kernel, eps, x)?.minimizer).norm();
        let ratio = critical.distance(x) / d;
        max_ratio = max_ratio.max(ratio);
        if critical.distance(x) > c6 * d * (1.0 + 1e-9) {
            bregman_violations += 1;
        }
    }
    Ok(LuoTsengReport { c6, sigma, checked: used.len(), bregman_violations, max_bregman_ratio: max_ratio })
}

#[derive(Clone, Debug, Serialize)]
pub struct CriticalValueReport {
    pub delta: f64,
    pub checked: usize,
    pub violations: usize,
}

/// Empirical check that critical points within `delta` of `center` have `F <= F(center)`.
pub fn check_critical_values(problem: &Problem, center: &Vector, critical: &CriticalSet, delta: f64) -> CriticalValueReport {
    let fc = problem.value(center);
    let near: Vec<&Vector> = critical.points.iter().filter(|p| (*p - center).norm() <= delta).collect();
    let violations = near.iter().filter(|p| problem.value(p) > fc + 1e-9 * (1.0 + fc.abs())).count();
    CriticalValueReport { delta, checked: near.len(), violations }
}
