//! Subcommand implementations. Each writes its artifacts under the output directory.

use std::collections::BTreeMap;
use std::fs;
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use super::config_file::{build_solver_config, RunConfig};
use super::suite::{run_invariants, InvariantResult};
use crate::config::{validate_config, SolverConfig, ValidationReport};
use crate::diagnostics::conditions::{check_critical_values, CriticalValueReport};
use crate::diagnostics::{
    approximate_critical_set, certify_conditions, check_level_set_rates, check_luo_tseng, check_rate_chain,
    check_bregman_bound, check_exponent_relations, check_gap_condition, check_value_proximity, default_nu, estimate_level_set_rate,
    estimate_q_linear_rate, envelope_constant, fit_error_bound, fit_error_bound_with_exponent, kl_refutation, probe_slice, write_probe_csv, BoundKind, EBFit,
    GrowthReport, LevelSlice, Moduli, ProbeOptions, ProjectionOptions, RateOptions, GRID_MAX_DIM,
};
use crate::bregman::{descent_constants, ConvexityCase};
use crate::error::VbpgError;
use crate::model::{Problem, Vector};
use crate::problems::{build_problem, zoo, ProblemSpec, SmoothSpec};
use crate::solver::{fmt17, vbpg_run, Termination, Trace};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("validation failure: {0}")]
    Validation(String),
    #[error("empty slice: {0}")]
    EmptySlice(String),
    #[error("invariant failure: {0}")]
    Invariant(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse(_) => 1,
            CliError::Validation(_) => 2,
            CliError::EmptySlice(_) => 3,
            CliError::Invariant(_) => 4,
        }
    }
}

impl From<VbpgError> for CliError {
    fn from(e: VbpgError) -> Self {
        match e {
            VbpgError::DimensionMismatch { .. }
            | VbpgError::InvalidParameter(_)
            | VbpgError::StepSizeViolation(_)
            | VbpgError::KernelNotStronglyConvex(_)
            | VbpgError::Config(_) => CliError::Validation(e.to_string()),
            VbpgError::SliceEmpty(_) | VbpgError::SublevelEmpty => CliError::EmptySlice(e.to_string()),
            _ => CliError::Invariant(e.to_string()),
        }
    }
}

fn io_err(path: &Path, e: std::io::Error) -> CliError {
    CliError::Invariant(format!("cannot write {}: {e}", path.display()))
}

pub fn load_config(path: &Path) -> Result<RunConfig, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Parse(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))
}

fn write_json<T: Serialize>(dir: &Path, name: &str, value: &T) -> Result<PathBuf, CliError> {
    let path = dir.join(name);
    let mut text = serde_json::to_string_pretty(value).map_err(|e| CliError::Invariant(e.to_string()))?;
    text.push('\n');
    fs::write(&path, text).map_err(|e| io_err(&path, e))?;
    Ok(path)
}

fn create_out(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|e| io_err(dir, e))
}

fn problem_of(cfg: &RunConfig) -> Result<(ProblemSpec, Problem), CliError> {
    let spec = cfg.problem.clone().ok_or_else(|| CliError::Validation("config has no problem".into()))?;
    let problem = build_problem(&spec)?;
    Ok((spec, problem))
}

/// Generated data is written next to the outputs so the run can be replayed without the seed.
fn store_generated_data(spec: &ProblemSpec, out: &Path) -> Result<(), CliError> {
    if let SmoothSpec::Logistic { a: None, .. } = spec.smooth {
        write_json(out, "problem_data.json", &spec.materialize()?)?;
    }
    Ok(())
}

fn starting_point(cfg: &RunConfig, n: usize, rng: &mut ChaCha8Rng) -> Result<Vector, CliError> {
    match &cfg.solver.x0 {
        Some(v) if v.len() == n => Ok(Vector::from_vec(v.clone())),
        Some(v) => Err(CliError::Validation(format!("x0 has length {}, problem has dimension {n}", v.len()))),
        None => Ok(Vector::from_fn(n, |_, _| rng.gen_range(-1.0..1.0))),
    }
}

fn solver_config(cfg: &RunConfig, problem: &Problem, strict: bool) -> Result<SolverConfig, CliError> {
    Ok(build_solver_config(problem, &cfg.solver, &cfg.solver.epsilon, &cfg.solver.kernel, strict)?)
}

fn write_trace(trace: &Trace, path: &Path) -> Result<(), CliError> {
    let file = fs::File::create(path).map_err(|e| io_err(path, e))?;
    trace.write_csv(BufWriter::new(file)).map_err(|e| io_err(path, e))
}

#[derive(Serialize)]
struct SolveSummary {
    problem: String,
    dimension: usize,
    iterations: usize,
    terminated_reason: Termination,
    initial_value: f64,
    final_value: f64,
    /// Norm of the last proximal subgradient.
    final_residual: Option<f64>,
    /// Q-linear rate of `F(x_k) - F(x_K)` over the tail, when enough iterations remain above float noise.
    beta_hat: Option<f64>,
    final_point: Vec<f64>,
    step_tol: f64,
    min_descent_slack: f64,
    multivalued_steps: usize,
    lipschitz: f64,
    eps_lo: f64,
    eps_hi: f64,
    kernel_m: f64,
    kernel_big_m: f64,
    validation: ValidationReport,
}

/// `solve`: runs the solver and writes `trace.csv` and `summary.json`.
pub fn cmd_solve(cfg: &RunConfig, seed: u64, out: &Path, strict: bool) -> Result<Trace, CliError> {
    let (spec, problem) = problem_of(cfg)?;
    let config = solver_config(cfg, &problem, strict)?;
    let validation = validate_config(&problem, &config);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let x0 = starting_point(cfg, problem.dim(), &mut rng)?;
    let trace = vbpg_run(&problem, &config, &x0)?;
    create_out(out)?;
    store_generated_data(&spec, out)?;
    write_trace(&trace, &out.join("trace.csv"))?;
    let summary = SolveSummary {
        problem: problem.name.clone(),
        dimension: problem.dim(),
        iterations: trace.iterations(),
        terminated_reason: trace.termination,
        initial_value: trace.f_values[0],
        final_value: trace.final_value(),
        final_residual: trace.residuals.last().copied(),
        beta_hat: estimate_q_linear_rate(&trace.f_values, trace.final_value(), &RateOptions::default()).ok().map(|r| r.beta_hat),
        final_point: trace.final_point.iter().cloned().collect(),
        step_tol: trace.step_tol,
        min_descent_slack: trace.min_descent_slack,
        multivalued_steps: trace.multivalued_steps,
        lipschitz: problem.lipschitz(),
        eps_lo: config.epsilon.lo(),
        eps_hi: config.epsilon.hi(),
        kernel_m: config.kernel.m(),
        kernel_big_m: config.kernel.big_m(),
        validation,
    };
    write_json(out, "summary.json", &summary)?;
    Ok(trace)
}

#[derive(Serialize)]
pub struct EbReport {
    pub problem: String,
    pub center: Vec<f64>,
    pub f_bar: f64,
    pub eta: f64,
    pub nu: f64,
    pub eps: f64,
    pub samples: usize,
    pub moduli: Moduli,
    pub critical_points: Vec<Vec<f64>>,
    pub fits: BTreeMap<String, EBFit>,
    pub fit_errors: BTreeMap<String, String>,
    pub checks: BTreeMap<String, serde_json::Value>,
    pub kl_refutation: Vec<(f64, f64)>,
    pub growth: Option<GrowthReport>,
    pub critical_values: Option<CriticalValueReport>,
}

fn to_value<T: Serialize>(v: &T) -> serde_json::Value {
    serde_json::to_value(v).expect("reports are plain data")
}

/// `probe`: samples a level slice around a limit point and writes `probe.csv` and `eb_report.json`.
pub fn cmd_probe(cfg: &RunConfig, seed: u64, out: &Path, strict: bool) -> Result<EbReport, CliError> {
    let (spec, problem) = problem_of(cfg)?;
    let config = solver_config(cfg, &problem, strict)?;
    if strict {
        validate_config(&problem, &config).into_result()?;
    }
    let eps = config.epsilon.hi();
    let kernel = config.kernel.at(0).clone();
    let moduli = Moduli::new(&problem, &config);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = problem.dim();
    if n > GRID_MAX_DIM {
        return Err(CliError::Validation(format!(
            "projection oracle unavailable: dimension {n} exceeds {GRID_MAX_DIM}"
        )));
    }
    let x0 = starting_point(cfg, n, &mut rng)?;
    let run = vbpg_run(&problem, &config, &x0)?;
    let center = match &cfg.probe.center {
        Some(c) if c.len() == n => Vector::from_vec(c.clone()),
        Some(c) => return Err(CliError::Validation(format!("center has length {}, expected {n}", c.len()))),
        None => run.final_point.clone(),
    };
    let eta = cfg.probe.eta;
    let nu = match cfg.probe.nu {
        Some(v) => v,
        None => default_nu(&problem, &center, eta, &mut rng),
    };
    let slice = LevelSlice::new(&problem, center.clone(), eta, nu)?;
    let critical = approximate_critical_set(&problem, &kernel, eps, &center, 2.0 * eta, cfg.probe.critical_grid)?;
    let opts = ProbeOptions { critical_set: Some(critical.clone()), radial: cfg.probe.radial, ..Default::default() };
    let samples = probe_slice(&problem, &slice, &kernel, eps, cfg.probe.samples, &mut rng, &opts)?;

    let mut fits = BTreeMap::new();
    let mut fit_errors = BTreeMap::new();
    let kinds = [
        BoundKind::LevelSubdiff,
        BoundKind::LevelBregman,
        BoundKind::Kl,
        BoundKind::Sharpness,
        BoundKind::GapCondition,
        BoundKind::WeakSubregularity,
        BoundKind::LuoTseng,
    ];
    for kind in kinds {
        match fit_error_bound(&samples, kind) {
            Ok(f) => {
                fits.insert(kind.label().to_string(), f);
            }
            Err(e) => {
                fit_errors.insert(kind.label().to_string(), e.to_string());
            }
        }
    }
    let mut checks = BTreeMap::new();
    let mut note = |name: &str, r: Result<serde_json::Value, VbpgError>| {
        let v = r.unwrap_or_else(|e| serde_json::json!({ "skipped": e.to_string() }));
        checks.insert(name.to_string(), v);
    };
    let get = |k: BoundKind| fits.get(k.label()).ok_or_else(|| VbpgError::InsufficientSamples(format!("no {} fit", k.label())));
    let implied = get(BoundKind::LevelSubdiff).and_then(|f| check_bregman_bound(&samples, &slice, &moduli, f));
    let rate_opts = RateOptions::default();
    // The certified rate needs gamma <= 1; a fitted slope slightly above 1 is retried with
    // the exponent held at 1, used only if it passes the stability gate.
    let unit = fit_error_bound_with_exponent(&samples, BoundKind::LevelSubdiff, 1.0)
        .ok()
        .filter(|f| f.is_certified())
        .and_then(|f| Some(EBFit { constant: envelope_constant(&samples, BoundKind::LevelSubdiff, 1.0).ok()?, ..f }));
    let chain_bound = match (&implied, &unit) {
        (Ok(t), _) if t.p == 1.0 => Ok(t.clone()),
        (_, Some(u)) => check_bregman_bound(&samples, &slice, &moduli, u),
        (Ok(t), None) => Ok(t.clone()),
        (Err(e), None) => Err(VbpgError::InsufficientSamples(e.to_string())),
    };
    note(
        "rate_chain",
        chain_bound.and_then(|t| check_rate_chain(&moduli, &t, &run.f_values, slice.f_bar, &rate_opts)).map(|r| to_value(&r)),
    );
    note("theorem_level_bregman", implied.map(|r| to_value(&r)));
    let beta_trace =
        estimate_level_set_rate(&problem, &run, slice.f_bar, &center, &ProjectionOptions::default(), &rate_opts).ok().map(|r| r.beta_hat);
    let k = descent_constants(ConvexityCase::of(&problem), moduli.m, moduli.big_m, moduli.l, moduli.eps_lo, moduli.eps_hi);
    note("level_set_rates", Ok(to_value(&check_level_set_rates(&samples, &moduli, &k, beta_trace))));
    note("value_proximity", Ok(to_value(&check_value_proximity(&samples, &slice, &moduli))));
    note(
        "theorem_kl_exponents",
        (|| check_exponent_relations(get(BoundKind::Kl)?, get(BoundKind::LevelSubdiff)?, get(BoundKind::Sharpness)?, 0.05))().map(|r| to_value(&r)),
    );
    note(
        "theorem_gap_condition",
        (|| check_gap_condition(&samples, &moduli, get(BoundKind::LevelBregman)?, get(BoundKind::GapCondition)?))().map(|r| to_value(&r)),
    );
    let alphas: Vec<f64> = cfg.probe.alpha_grid.clone().unwrap_or_else(|| (1..20).map(|i| i as f64 * 0.05).collect());
    let kl = kl_refutation(&samples, &alphas).unwrap_or_default();
    if !critical.points.is_empty() {
        let c = &critical;
        let pts: Vec<Vector> = samples.iter().map(|s| s.x.clone()).collect();
        let sigma = samples.iter().map(|s| s.dist_prox).fold(0.0, f64::max);
        note("luo_tseng", check_luo_tseng(&problem, &pts, c, &kernel, eps, sigma).map(|r| to_value(&r)));
    }
    let (growth, critical_values) = if critical.points.is_empty() {
        (None, None)
    } else {
        (
            certify_conditions(&problem, &slice, &critical, cfg.probe.samples, &mut rng).ok(),
            Some(check_critical_values(&problem, &center, &critical, eta)),
        )
    };
    create_out(out)?;
    store_generated_data(&spec, out)?;
    let path = out.join("probe.csv");
    let file = fs::File::create(&path).map_err(|e| io_err(&path, e))?;
    write_probe_csv(&samples, BufWriter::new(file)).map_err(|e| io_err(&path, e))?;
    let report = EbReport {
        problem: problem.name.clone(),
        center: center.iter().cloned().collect(),
        f_bar: slice.f_bar,
        eta,
        nu,
        eps,
        samples: samples.len(),
        moduli,
        critical_points: critical.points.iter().map(|p| p.iter().cloned().collect()).collect(),
        fits,
        fit_errors,
        checks,
        kl_refutation: kl,
        growth,
        critical_values,
    };
    write_json(out, "eb_report.json", &report)?;
    Ok(report)
}

/// `check`: runs the invariant suite on the configured problem, or on every shipped problem,
/// and writes `check_report.json`. Failed invariants are reported by [`check_failures`].
pub fn cmd_check(cfg: &RunConfig, seed: u64, out: &Path, strict: bool) -> Result<Vec<InvariantResult>, CliError> {
    let specs = match &cfg.problem {
        Some(p) => vec![p.clone()],
        None => zoo::level_bounded().into_iter().chain(zoo::pointwise_only()).collect(),
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut results = Vec::new();
    for spec in specs {
        let problem = build_problem(&spec)?;
        let config = solver_config(cfg, &problem, strict)?;
        if strict {
            validate_config(&problem, &config).into_result()?;
        }
        results.extend(run_invariants(&problem, &config, 200, &mut rng)?);
    }
    create_out(out)?;
    write_json(out, "check_report.json", &results)?;
    Ok(results)
}

/// The invariant-failure error for a check run, if anything failed.
pub fn check_failures(results: &[InvariantResult]) -> Option<CliError> {
    let failed: Vec<String> = results.iter().filter(|r| !r.passed).map(|r| format!("{}/{}", r.problem, r.name)).collect();
    if failed.is_empty() {
        None
    } else {
        Some(CliError::Invariant(failed.join(", ")))
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ComparisonRow {
    pub schedule: String,
    pub iterations: usize,
    pub termination: Termination,
    pub final_value: f64,
    pub q_rate: Option<f64>,
    pub min_descent_slack: f64,
}

/// `compare`: runs every schedule from the same start and writes `comparison.csv`.
pub fn cmd_compare(cfg: &RunConfig, seed: u64, out: &Path, strict: bool) -> Result<Vec<ComparisonRow>, CliError> {
    let (spec, problem) = problem_of(cfg)?;
    let compare = cfg.compare.clone().ok_or_else(|| CliError::Validation("config has no compare section".into()))?;
    if compare.schedules.len() < 2 {
        return Err(CliError::Validation(format!("compare needs at least two schedules, got {}", compare.schedules.len())));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let x0 = starting_point(cfg, problem.dim(), &mut rng)?;
    let mut traces = Vec::new();
    for s in &compare.schedules {
        if s.name.is_empty() || !s.name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-') {
            return Err(CliError::Validation(format!("schedule name {:?} must be alphanumeric", s.name)));
        }
        let config = build_solver_config(&problem, &cfg.solver, &s.epsilon, &s.kernel, strict)?;
        traces.push((s.name.clone(), vbpg_run(&problem, &config, &x0)?));
    }
    let f_bar = traces.iter().map(|(_, t)| t.final_value()).fold(f64::INFINITY, f64::min);
    create_out(out)?;
    store_generated_data(&spec, out)?;
    let mut rows = Vec::new();
    let mut csv = String::from("schedule,iterations,termination,final_value,q_rate,min_descent_slack\n");
    for (name, trace) in &traces {
        write_trace(trace, &out.join(format!("trace_{name}.csv")))?;
        let q = estimate_q_linear_rate(&trace.f_values, f_bar, &RateOptions::default()).ok().map(|r| r.beta_hat);
        let row = ComparisonRow {
            schedule: name.clone(),
            iterations: trace.iterations(),
            termination: trace.termination,
            final_value: trace.final_value(),
            q_rate: q,
            min_descent_slack: trace.min_descent_slack,
        };
        csv.push_str(&format!(
            "{},{},{},{},{},{}\n",
            row.schedule,
            row.iterations,
            serde_json::to_value(row.termination).unwrap().as_str().unwrap_or(""),
            fmt17(row.final_value),
            row.q_rate.map(fmt17).unwrap_or_else(|| "NaN".into()),
            fmt17(row.min_descent_slack)
        ));
        rows.push(row);
    }
    let path = out.join("comparison.csv");
    fs::write(&path, csv).map_err(|e| io_err(&path, e))?;
    Ok(rows)
}
