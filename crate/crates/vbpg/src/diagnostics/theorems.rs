//! Checks of the implications between error bounds, evaluated on probe samples.

use serde::Serialize;

use super::fit::{BoundKind, EBFit, VIOLATION_TOL};
use super::slice::{LevelSlice, ProbeSample};
use crate::bregman::{descent_modulus, prox_map, KernelSpec};
use crate::config::SolverConfig;
use crate::error::{Result, VbpgError};
use crate::model::{Problem, Vector};

/// Kernel, smoothness and step-size moduli of a run.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct Moduli {
    pub m: f64,
    pub big_m: f64,
    pub l: f64,
    pub eps_lo: f64,
    pub eps_hi: f64,
    /// Semiconvexity modulus of `g` (`0` when convex).
    pub rho: f64,
}

impl Moduli {
    pub fn new(problem: &Problem, config: &SolverConfig) -> Self {
        Moduli {
            m: config.kernel.m(),
            big_m: config.kernel.big_m(),
            l: problem.lipschitz(),
            eps_lo: config.epsilon.lo(),
            eps_hi: config.epsilon.hi(),
            rho: problem.rho().unwrap_or(f64::NAN),
        }
    }

    /// Sufficient-decrease modulus `(m/eps_hi - L)/2`.
    pub fn descent(&self) -> f64 {
        descent_modulus(self.m, self.l, self.eps_hi)
    }

    /// `3L/2 + M/(2 eps_lo)`.
    pub fn value_proximity(&self) -> f64 {
        1.5 * self.l + self.big_m / (2.0 * self.eps_lo)
    }

    /// `L + M/eps_lo`.
    pub fn residual_factor(&self) -> f64 {
        self.l + self.big_m / self.eps_lo
    }

    /// `m - eps_hi rho`, positive under the step-size condition.
    pub fn prox_strong(&self) -> f64 {
        self.m - self.eps_hi * self.rho
    }
}

fn require(fit: &EBFit, kind: BoundKind) -> Result<()> {
    if fit.kind != kind {
        return Err(VbpgError::InvalidParameter(format!("expected a {} fit, got {}", kind.label(), fit.kind.label())));
    }
    Ok(())
}

#[derive(Clone, Debug, Serialize)]
pub struct BregmanBoundReport {
    pub gamma: f64,
    pub c3: f64,
    pub p: f64,
    pub theta1: f64,
    pub theta2: f64,
    pub theta: f64,
    /// Shrink factor for the value band on the inner slice.
    pub band_divisor: f64,
    pub checked: usize,
    pub violations: usize,
    pub property_a_failures: usize,
    /// Smallest constant that would make the checked samples pass.
    pub envelope_theta: f64,
}

/// Level-set subdifferential bound with `(gamma, c3)` implies
/// `dist_level^p <= theta dist_prox` on the inner slice `|x - center| < eta/2`,
/// `value_gap < nu/N`, with `p = max(gamma, 1)` and `theta = max(theta1, theta2)`.
pub fn check_bregman_bound(samples: &[ProbeSample], slice: &LevelSlice, moduli: &Moduli, fit: &EBFit) -> Result<BregmanBoundReport> {
    require(fit, BoundKind::LevelSubdiff)?;
    let (gamma, c3) = (fit.exponent, fit.constant);
    if !(gamma > 0.0 && c3.is_finite() && c3 > 0.0) {
        return Err(VbpgError::InvalidParameter(format!("unusable fit: gamma = {gamma}, c3 = {c3}")));
    }
    let p = 1.0 / (1.0 / gamma).min(1.0);
    let half = slice.eta / 2.0;
    let lead = c3.powf(1.0 / gamma) * moduli.residual_factor().powf(1.0 / gamma);
    let theta1 = 1.0 + lead * half.powf(1.0 / gamma - 1.0);
    let theta2 = half.powf(1.0 - 1.0 / gamma) + lead;
    let theta = theta1.max(theta2);
    let denom = moduli.m - moduli.eps_hi * moduli.l;
    let band_divisor = if denom > 0.0 { (2.0 * moduli.eps_hi * slice.nu / denom / (half * half)).max(1.0) } else { f64::INFINITY };
    let inner: Vec<&ProbeSample> =
        samples.iter().filter(|s| s.radius < half && s.value_gap < slice.nu / band_divisor).collect();
    let mut violations = 0;
    let mut envelope_theta: f64 = 0.0;
    for s in &inner {
        let lhs = s.dist_level.powf(p);
        if s.dist_prox > 0.0 {
            envelope_theta = envelope_theta.max(lhs / s.dist_prox);
        }
        if lhs > theta * s.dist_prox * (1.0 + VIOLATION_TOL) {
            violations += 1;
        }
    }
    Ok(BregmanBoundReport {
        gamma,
        c3,
        p,
        theta1,
        theta2,
        theta,
        band_divisor,
        checked: inner.len(),
        violations,
        property_a_failures: inner.iter().filter(|s| !s.property_a).count(),
        envelope_theta,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct ValueProximityReport {
    pub c0: f64,
    pub checked: usize,
    /// Samples with `F(T x) > E(x)`.
    pub left_violations: usize,
    /// Samples with `E(x) - f_bar > c0 dist_level^2`.
    pub right_violations: usize,
    pub max_ratio: f64,
}

/// `F(T x) - f_bar <= E(x) - f_bar <= c0 dist_level^2`.
pub fn check_value_proximity(samples: &[ProbeSample], slice: &LevelSlice, moduli: &Moduli) -> ValueProximityReport {
    let c0 = moduli.value_proximity();
    let mut left = 0;
    let mut right = 0;
    let mut max_ratio: f64 = 0.0;
    for s in samples {
        let scale = 1e-10 * (1.0 + s.envelope.abs());
        if s.prox_value > s.envelope + scale {
            left += 1;
        }
        let excess = s.envelope - slice.f_bar;
        let bound = c0 * s.dist_level * s.dist_level;
        if excess > bound + scale {
            right += 1;
        }
        if bound > 0.0 {
            max_ratio = max_ratio.max(excess / bound);
        }
    }
    ValueProximityReport { c0, checked: samples.len(), left_violations: left, right_violations: right, max_ratio }
}

#[derive(Clone, Debug, Serialize)]
pub struct ExponentRelationReport {
    pub alpha: f64,
    pub gamma: f64,
    pub beta: f64,
    pub gamma_expected: f64,
    pub beta_expected: f64,
    pub gamma_ok: bool,
    pub beta_ok: bool,
}

/// The KL exponent `alpha` predicts sharpness exponent `1 - alpha`
/// and level-set exponent `alpha/(1 - alpha)`.
pub fn check_exponent_relations(kl: &EBFit, level: &EBFit, sharp: &EBFit, tol: f64) -> Result<ExponentRelationReport> {
    require(kl, BoundKind::Kl)?;
    require(level, BoundKind::LevelSubdiff)?;
    require(sharp, BoundKind::Sharpness)?;
    let alpha = kl.exponent;
    let gamma_expected = alpha / (1.0 - alpha);
    let beta_expected = 1.0 - alpha;
    Ok(ExponentRelationReport {
        alpha,
        gamma: level.exponent,
        beta: sharp.exponent,
        gamma_expected,
        beta_expected,
        gamma_ok: (level.exponent - gamma_expected).abs() <= 2.0 * tol,
        beta_ok: (sharp.exponent - beta_expected).abs() <= tol,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct GapConditionReport {
    pub p: f64,
    pub q: f64,
    /// Gap-condition constant implied by the level-set Bregman bound.
    pub mu_implied: f64,
    pub part_i_checked: usize,
    pub part_i_violations: usize,
    pub q_fit: f64,
    pub mu_fit: f64,
    /// `sqrt(2 (m - eps rho) mu_fit)`.
    pub kl_constant: f64,
    pub part_ii_checked: usize,
    pub part_ii_violations: usize,
}

/// (i) the level-set Bregman bound `(p, theta)` yields `G >= mu value_gap^q`, `q = max(p, 1)`;
/// (ii) a gap condition `(q, mu)` yields `dist_subdiff >= sqrt(2 (m - eps rho) mu) value_gap^(q/2)`.
pub fn check_gap_condition(samples: &[ProbeSample], moduli: &Moduli, bregman: &EBFit, gap: &EBFit) -> Result<GapConditionReport> {
    require(bregman, BoundKind::LevelBregman)?;
    require(gap, BoundKind::GapCondition)?;
    let strong = moduli.prox_strong();
    if !(strong > 0.0) {
        return Err(VbpgError::InvalidParameter("needs semiconvex g with eps_hi < m/rho".into()));
    }
    let (p, theta) = (bregman.exponent, bregman.constant);
    let c0 = moduli.value_proximity();
    let pr = 2.0 * moduli.eps_hi * moduli.eps_hi / strong;
    let eps = moduli.eps_hi;
    let (q, mu_implied, valid): (f64, f64, Box<dyn Fn(&ProbeSample) -> bool>) = if p >= 1.0 {
        let k = c0 * theta.powf(2.0 / p) * pr.powf(1.0 / p);
        (p, (eps + k).powf(-p), Box::new(move |s: &ProbeSample| p == 1.0 || s.gap <= 1.0))
    } else {
        let k = c0 * theta.powf(2.0 / p) * pr;
        (1.0, 1.0 / (eps + k), Box::new(|s: &ProbeSample| s.dist_prox <= 1.0))
    };
    let mut i_checked = 0;
    let mut i_viol = 0;
    for s in samples.iter().filter(|s| valid(s)) {
        i_checked += 1;
        if s.gap < mu_implied * s.value_gap.powf(q) * (1.0 - VIOLATION_TOL) {
            i_viol += 1;
        }
    }
    let (q_fit, mu_fit) = (gap.exponent, gap.constant);
    let kl_constant = (2.0 * strong * mu_fit).sqrt();
    let mut ii_viol = 0;
    for s in samples {
        if s.dist_subdiff < kl_constant * s.value_gap.powf(q_fit / 2.0) * (1.0 - VIOLATION_TOL) {
            ii_viol += 1;
        }
    }
    Ok(GapConditionReport {
        p,
        q,
        mu_implied,
        part_i_checked: i_checked,
        part_i_violations: i_viol,
        q_fit,
        mu_fit,
        kl_constant,
        part_ii_checked: samples.len(),
        part_ii_violations: ii_viol,
    })
}

/// Slacks of the four prox-gap inequalities at `x` (nonnegative when they hold), for a
/// constant step `eps` and semiconvexity modulus `rho`:
/// (i) `E <= F - (m/eps - rho)/2 |x - T|^2`,
/// (ii) `(m - eps rho)/(2 eps^2) |x - T|^2 <= G`,
/// (iii) `G <= dist(0, dF)^2 / (2 (m - eps rho))`,
/// (iv) `|x - T| <= eps/(m - eps rho) dist(0, dF)`.
pub fn prox_gap_slacks(problem: &Problem, kernel: &KernelSpec, eps: f64, x: &Vector) -> Result<[f64; 4]> {
    let rho = problem
        .rho()
        .ok_or_else(|| VbpgError::InvalidParameter("prox-gap bounds need a semiconvex g".into()))?;
    let m = kernel.m();
    let strong = m - eps * rho;
    if !(strong > 0.0) {
        return Err(VbpgError::StepSizeViolation(format!("eps = {eps} must be < m/rho")));
    }
    let p = prox_map(problem, kernel, eps, x)?;
    let fx = problem.value(x);
    let r2 = (x - &p.minimizer).norm_squared();
    let ds = problem
        .subdiff_dist(x)
        .ok_or_else(|| VbpgError::InvalidParameter("prox-gap bounds need a closed-form subdifferential".into()))?;
    Ok([
        fx - 0.5 * (m / eps - rho) * r2 - p.envelope,
        p.gap - strong / (2.0 * eps * eps) * r2,
        ds * ds / (2.0 * strong) - p.gap,
        eps / strong * ds - r2.sqrt(),
    ])
}
