//! Level slices, error-bound fits and the checks built on them.

pub mod conditions;
pub mod fit;
pub mod rates;
pub mod slice;
pub mod theorems;

pub use conditions::{
    approximate_critical_set, certify_conditions, check_critical_values, check_luo_tseng, check_subregularity_from_growth, CriticalSet, GrowthReport,
};
pub use fit::{
    envelope_constant, fit_error_bound, fit_error_bound_with_exponent, kl_refutation, ols_slope, BoundKind, EBFit,
    STABILITY_GATE,
};
pub use rates::{
    certified_q_linear_rate, check_level_set_rates, check_rate_chain, estimate_level_set_rate, estimate_q_linear_rate, level_set_rate_band, level_set_rate_bound,
    r_linear_constant, strong_constant_bound, strong_theta, LevelSetRateReport, RateChainReport, RateEstimate, RateOptions,
};
pub use slice::{
    default_nu, probe_slice, sample_ball, sample_radial, sublevel_projection, write_probe_csv, LevelSlice, ProbeOptions, ProbeSample, Projection,
    ProjectionOptions, RadialSampling, GRID_MAX_DIM,
};
pub use theorems::{check_bregman_bound, check_exponent_relations, check_gap_condition, check_value_proximity, Moduli};
