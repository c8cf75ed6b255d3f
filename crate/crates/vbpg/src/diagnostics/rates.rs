//! Empirical and certified linear rates.

use serde::Serialize;

use super::slice::{sublevel_projection, ProbeSample, ProjectionOptions};
use super::theorems::{Moduli, BregmanBoundReport};
use crate::bregman::DescentConstants;
use crate::error::{Result, VbpgError};
use crate::model::{Problem, Vector};
use crate::solver::Trace;

#[derive(Clone, Debug)]
pub struct RateOptions {
    /// Gaps below `gap_floor * max(1, |f_bar|)` are float noise and end the window.
    pub gap_floor: f64,
    /// The window starts at this fraction of the usable iterations.
    pub tail_start: f64,
    pub min_ratios: usize,
}

impl Default for RateOptions {
    fn default() -> Self {
        RateOptions { gap_floor: 1e-14, tail_start: 0.5, min_ratios: 3 }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct RateEstimate {
    /// Largest successive ratio in the window.
    pub beta_hat: f64,
    /// Iteration range `[start, end]` of the window.
    pub window: (usize, usize),
    pub ratios: Vec<f64>,
}

fn tail_ratios(values: &[f64], opts: &RateOptions, offset: usize) -> Result<RateEstimate> {
    let usable = values.iter().take_while(|v| **v > 0.0).count();
    if usable < 2 {
        return Err(VbpgError::InsufficientSamples("fewer than two usable iterations".into()));
    }
    let last = usable - 1;
    let start = ((last as f64) * opts.tail_start).floor() as usize;
    let ratios: Vec<f64> = (start..last).map(|k| values[k + 1] / values[k]).collect();
    if ratios.len() < opts.min_ratios {
        return Err(VbpgError::InsufficientSamples(format!("only {} ratios in the tail window", ratios.len())));
    }
    let beta_hat = ratios.iter().cloned().fold(0.0, f64::max);
    Ok(RateEstimate { beta_hat, window: (offset + start, offset + last), ratios })
}

/// Q-linear rate of `F(x_k) - f_bar` over the tail of the run.
pub fn estimate_q_linear_rate(f_values: &[f64], f_bar: f64, opts: &RateOptions) -> Result<RateEstimate> {
    let floor = opts.gap_floor * f_bar.abs().max(1.0);
    let gaps: Vec<f64> = f_values.iter().map(|v| v - f_bar).map(|g| if g > floor { g } else { 0.0 }).collect();
    tail_ratios(&gaps, opts, 0)
}

/// `1/(1 + a/kappa)` with `kappa = c0 theta^2` for a level-set Bregman constant `theta` (`p = 1`).
pub fn certified_q_linear_rate(moduli: &Moduli, theta: f64) -> f64 {
    let kappa = moduli.value_proximity() * theta * theta;
    1.0 / (1.0 + moduli.descent() / kappa)
}

/// Ratios `dist(x_{k+1}, [F <= f_bar]) / dist(x_k, [F <= f_bar])` along a fully recorded trace.
pub fn estimate_level_set_rate(
    problem: &Problem,
    trace: &Trace,
    f_bar: f64,
    anchor: &Vector,
    proj: &ProjectionOptions,
    opts: &RateOptions,
) -> Result<RateEstimate> {
    if trace.iterates.len() != trace.iterations() + 1 {
        return Err(VbpgError::InvalidParameter("level-set rate needs every iterate (trace_every = 1)".into()));
    }
    let floor = opts.gap_floor * f_bar.abs().max(1.0);
    let mut dists = Vec::new();
    for ((_, x), fv) in trace.iterates.iter().zip(&trace.f_values) {
        if fv - f_bar <= floor {
            break;
        }
        dists.push(sublevel_projection(problem, f_bar, x, Some(anchor), proj)?.distance);
    }
    tail_ratios(&dists, opts, 0)
}

/// Largest `dist(T x, S) / dist(x, S)` over probe samples.
pub fn level_set_rate_band(samples: &[ProbeSample]) -> Option<f64> {
    samples
        .iter()
        .filter(|s| s.dist_level > 0.0)
        .map(|s| s.prox_dist_level / s.dist_level)
        .reduce(f64::max)
}

/// `sqrt(b - c/theta'^2)` when `b > 1` and `theta'^2` lies in `(c/b, c/(b - 1))`.
pub fn level_set_rate_bound(k: &DescentConstants, theta_prime: f64) -> Option<f64> {
    if !(k.b > 1.0 && k.c > 0.0) {
        return None;
    }
    let t2 = theta_prime * theta_prime;
    if t2 > k.c / k.b && t2 < k.c / (k.b - 1.0) {
        Some((k.b - k.c / t2).sqrt())
    } else {
        None
    }
}

/// `1 + c3' (L + M/eps_lo)` for a strong level-set subdifferential constant `c3'`.
pub fn strong_theta(moduli: &Moduli, c3_strong: f64) -> f64 {
    1.0 + c3_strong * moduli.residual_factor()
}

/// Upper bound `eps_hi / ((1 - beta)(m - eps_hi rho))` on the strong level-set constant
/// implied by a level-set contraction factor `beta < 1`.
pub fn strong_constant_bound(moduli: &Moduli, beta: f64) -> f64 {
    moduli.eps_hi / ((1.0 - beta) * moduli.prox_strong())
}

/// Smallest `C` with `|x_k - x_{k+1}| <= C sqrt(beta)^(k - k0)` for `k >= k0`.
pub fn r_linear_constant(step_norms: &[f64], beta: f64, k0: usize) -> f64 {
    let r = beta.sqrt();
    step_norms.iter().enumerate().skip(k0).map(|(k, s)| s / r.powi((k - k0) as i32)).fold(0.0, f64::max)
}

/// Certified rate from the level-set Bregman bound against the rate observed on a run.
#[derive(Clone, Debug, Serialize)]
pub struct RateChainReport {
    pub theta: f64,
    /// `c0 theta^2`
    pub kappa: f64,
    pub beta_certified: f64,
    pub beta_observed: Option<f64>,
    /// `beta_observed <= 1.05 beta_certified`, when a rate could be observed.
    pub holds: Option<bool>,
}

/// Needs `p = 1` in the level-set Bregman bound (a subdifferential exponent `gamma <= 1`).
pub fn check_rate_chain(moduli: &Moduli, implied: &BregmanBoundReport, f_values: &[f64], f_bar: f64, opts: &RateOptions) -> Result<RateChainReport> {
    if implied.p != 1.0 {
        return Err(VbpgError::InvalidParameter(format!("certified linear rate needs gamma <= 1, fit gave {}", implied.gamma)));
    }
    let beta_certified = certified_q_linear_rate(moduli, implied.theta);
    let beta_observed = estimate_q_linear_rate(f_values, f_bar, opts).ok().map(|r| r.beta_hat);
    Ok(RateChainReport {
        theta: implied.theta,
        kappa: moduli.value_proximity() * implied.theta * implied.theta,
        beta_certified,
        beta_observed,
        holds: beta_observed.map(|b| b <= 1.05 * beta_certified),
    })
}

/// Level-set contraction factors and the strong level-set constant they imply.
#[derive(Clone, Debug, Serialize)]
pub struct LevelSetRateReport {
    pub beta_band: Option<f64>,
    pub beta_trace: Option<f64>,
    /// Larger of the two.
    pub beta: Option<f64>,
    /// `max dist_level / dist_subdiff` over the samples.
    pub strong_constant: f64,
    /// `eps_hi / ((1 - beta)(m - eps_hi rho))` when `beta < 1`.
    pub strong_constant_bound: Option<f64>,
    /// `strong_constant <= 1.05 strong_constant_bound`.
    pub holds: Option<bool>,
    /// Contraction factor implied by the strong constant, when available.
    pub contraction_bound: Option<f64>,
}

pub fn check_level_set_rates(
    samples: &[ProbeSample],
    moduli: &Moduli,
    k: &DescentConstants,
    beta_trace: Option<f64>,
) -> LevelSetRateReport {
    let beta_band = level_set_rate_band(samples);
    let beta = match (beta_band, beta_trace) {
        (Some(a), Some(b)) => Some(a.max(b)),
        (a, b) => a.or(b),
    };
    let strong_constant = samples
        .iter()
        .filter(|s| s.dist_subdiff > 0.0 && s.dist_subdiff.is_finite())
        .map(|s| s.dist_level / s.dist_subdiff)
        .fold(0.0, f64::max);
    let bound = beta.filter(|b| *b < 1.0 && moduli.prox_strong() > 0.0).map(|b| strong_constant_bound(moduli, b));
    LevelSetRateReport {
        beta_band,
        beta_trace,
        beta,
        strong_constant,
        strong_constant_bound: bound,
        holds: bound.map(|b| strong_constant <= 1.05 * b),
        contraction_bound: level_set_rate_bound(k, strong_theta(moduli, strong_constant)),
    }
}
