//! Empirical exponent and constant fits for error-bound inequalities.
//!
//! Every bound relates a residual-type quantity `Y` to a distance-type quantity `X`,
//! either `Y >= k X^e` (lower) or `Y <= C X^e` (upper). The exponent is the log-log least
//! squares slope; the constant is the tightest envelope over the training half. Bounds are
//! local, so the split is radial: the outer half trains and the inner half (closest to the
//! slice center) is held out.

use serde::{Deserialize, Serialize};

use super::slice::ProbeSample;
use crate::error::{Result, VbpgError};

/// Relative slack used when counting violations.
pub const VIOLATION_TOL: f64 = 1e-9;

/// Largest held-out violation rate for which a fit counts as certified.
pub const STABILITY_GATE: f64 = 0.02;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundKind {
    /// `dist_level^gamma <= c3 dist_subdiff`
    LevelSubdiff,
    /// `dist_level^p <= theta dist_prox`
    LevelBregman,
    /// `dist_subdiff >= c1 value_gap^alpha`
    Kl,
    /// `dist_level <= c2 value_gap^beta`
    Sharpness,
    /// `gap >= mu value_gap^q`
    GapCondition,
    /// `dist_subdiff >= c5 dist_crit^e`
    WeakSubregularity,
    /// `dist_crit <= c6 dist_prox^e`
    LuoTseng,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Side {
    Lower,
    Upper,
}

impl BoundKind {
    fn side(self) -> Side {
        match self {
            BoundKind::Sharpness | BoundKind::LuoTseng => Side::Upper,
            _ => Side::Lower,
        }
    }

    /// `(X, Y)` for a sample.
    fn pair(self, s: &ProbeSample) -> (f64, f64) {
        match self {
            BoundKind::LevelSubdiff => (s.dist_level, s.dist_subdiff),
            BoundKind::LevelBregman => (s.dist_level, s.dist_prox),
            BoundKind::Kl => (s.value_gap, s.dist_subdiff),
            BoundKind::Sharpness => (s.value_gap, s.dist_level),
            BoundKind::GapCondition => (s.value_gap, s.gap),
            BoundKind::WeakSubregularity => (s.dist_crit, s.dist_subdiff),
            BoundKind::LuoTseng => (s.dist_prox, s.dist_crit),
        }
    }

    /// Converts the envelope `k` into the constant in the bound's own convention.
    fn report_constant(self, k: f64) -> f64 {
        match self {
            BoundKind::LevelSubdiff | BoundKind::LevelBregman => 1.0 / k,
            _ => k,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            BoundKind::LevelSubdiff => "level_subdiff",
            BoundKind::LevelBregman => "level_bregman",
            BoundKind::Kl => "kl",
            BoundKind::Sharpness => "sharpness",
            BoundKind::GapCondition => "gap_condition",
            BoundKind::WeakSubregularity => "weak_subregularity",
            BoundKind::LuoTseng => "luo_tseng",
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct EBFit {
    pub kind: BoundKind,
    pub exponent: f64,
    pub constant: f64,
    /// Fraction of held-out samples violating the bound with the fitted constant.
    pub violated_fraction: f64,
    pub train_violated_fraction: f64,
    pub n_train: usize,
    pub n_test: usize,
    /// Coefficient of determination of the log-log regression (`NaN` for a fixed exponent).
    pub r_squared: f64,
}

impl EBFit {
    /// No training violations and at most [`STABILITY_GATE`] held-out violations.
    pub fn is_certified(&self) -> bool {
        self.train_violated_fraction == 0.0 && self.violated_fraction <= STABILITY_GATE
    }
}

/// Least-squares slope and `R^2` of `ys` on `xs`.
pub fn ols_slope(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my) * (y - my)).sum();
    if sxx == 0.0 {
        return (f64::NAN, f64::NAN);
    }
    let slope = sxy / sxx;
    let r2 = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    (slope, r2)
}

/// Samples whose `X` is positive and finite, split radially into (train, test).
fn split(samples: &[ProbeSample], kind: BoundKind) -> (Vec<(f64, f64)>, Vec<(f64, f64)>) {
    let mut usable: Vec<(f64, f64, f64)> = samples
        .iter()
        .map(|s| {
            let (x, y) = kind.pair(s);
            (s.radius, x, y)
        })
        .filter(|(_, x, y)| x.is_finite() && *x > 0.0 && y.is_finite() && *y >= 0.0)
        .collect();
    usable.sort_by(|a, b| b.0.total_cmp(&a.0));
    let half = usable.len().div_ceil(2);
    let test = usable.split_off(half);
    let strip = |v: Vec<(f64, f64, f64)>| v.into_iter().map(|(_, x, y)| (x, y)).collect::<Vec<_>>();
    (strip(usable), strip(test))
}

fn violates(side: Side, k: f64, e: f64, x: f64, y: f64) -> bool {
    let b = k * x.powf(e);
    match side {
        Side::Lower => y < b * (1.0 - VIOLATION_TOL),
        Side::Upper => y > b * (1.0 + VIOLATION_TOL),
    }
}

fn envelope(side: Side, e: f64, data: &[(f64, f64)]) -> f64 {
    let ratios = data.iter().map(|(x, y)| y / x.powf(e));
    match side {
        Side::Lower => ratios.fold(f64::INFINITY, f64::min),
        Side::Upper => ratios.fold(0.0, f64::max),
    }
}

fn finish(kind: BoundKind, e: f64, r2: f64, train: &[(f64, f64)], test: &[(f64, f64)]) -> EBFit {
    let side = kind.side();
    let k = envelope(side, e, train);
    let frac = |d: &[(f64, f64)]| {
        if d.is_empty() {
            0.0
        } else {
            d.iter().filter(|(x, y)| violates(side, k, e, *x, *y)).count() as f64 / d.len() as f64
        }
    };
    EBFit {
        kind,
        exponent: e,
        constant: kind.report_constant(k),
        violated_fraction: frac(test),
        train_violated_fraction: frac(train),
        n_train: train.len(),
        n_test: test.len(),
        r_squared: r2,
    }
}

/// Fits exponent (log-log slope) and constant (envelope) for `kind`.
pub fn fit_error_bound(samples: &[ProbeSample], kind: BoundKind) -> Result<EBFit> {
    let (train, test) = split(samples, kind);
    let logs: Vec<(f64, f64)> = train.iter().filter(|(_, y)| *y > 0.0).map(|(x, y)| (x.ln(), y.ln())).collect();
    if logs.len() < 4 {
        return Err(VbpgError::InsufficientSamples(format!("{} usable training samples for {}", logs.len(), kind.label())));
    }
    let (lx, ly): (Vec<f64>, Vec<f64>) = logs.into_iter().unzip();
    let (e, r2) = ols_slope(&lx, &ly);
    if !e.is_finite() {
        return Err(VbpgError::InsufficientSamples(format!("degenerate spread in {}", kind.label())));
    }
    Ok(finish(kind, e, r2, &train, &test))
}

/// Constant-only fit with the exponent held at `exponent`.
pub fn fit_error_bound_with_exponent(samples: &[ProbeSample], kind: BoundKind, exponent: f64) -> Result<EBFit> {
    let (train, test) = split(samples, kind);
    if train.is_empty() {
        return Err(VbpgError::InsufficientSamples(format!("no usable samples for {}", kind.label())));
    }
    Ok(finish(kind, exponent, f64::NAN, &train, &test))
}

/// Constant with `exponent` fixed, taken as the envelope over every usable sample, so no
/// sample violates it. Used once a fit has passed [`EBFit::is_certified`].
pub fn envelope_constant(samples: &[ProbeSample], kind: BoundKind, exponent: f64) -> Result<f64> {
    let (mut train, test) = split(samples, kind);
    train.extend(test);
    if train.is_empty() {
        return Err(VbpgError::InsufficientSamples(format!("no usable samples for {}", kind.label())));
    }
    Ok(kind.report_constant(envelope(kind.side(), exponent, &train)))
}

/// Held-out violation fraction of the KL inequality for each trial exponent.
pub fn kl_refutation(samples: &[ProbeSample], alphas: &[f64]) -> Result<Vec<(f64, f64)>> {
    alphas
        .iter()
        .map(|&a| Ok((a, fit_error_bound_with_exponent(samples, BoundKind::Kl, a)?.violated_fraction)))
        .collect()
}
