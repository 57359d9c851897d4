//! Discrete goodness-of-fit tests against fully specified multinomial nulls,
//! with a Monte Carlo engine for estimating their power.
//!
//! The crate is split into three layers:
//!
//! * [`distributions`]: validated cell-probability vectors, the zig-zag
//!   classifier, the Beta-Binomial trend family and the built-in catalog of
//!   null and alternative distributions.
//! * [`statistics`]: Pearson's chi-square, the discrete and nominal
//!   Kolmogorov-Smirnov statistics, and the ordinal Cramér-von Mises, Watson
//!   and Anderson-Darling statistics.
//! * [`power`]: seeded multinomial sampling, empirical null distributions,
//!   critical-value bracketing, interpolated power, the study grid runner and
//!   an exact enumeration oracle.

pub mod distributions;
pub mod error;
pub mod power;
pub mod statistics;

pub use distributions::{
    beta_binomial, catalog, classify_zigzag, cumulative_probabilities, expected_frequencies,
    make_cell_probabilities, BetaBinomialParams, CatalogEntry, CatalogName, CellProbabilities,
    ZigzagPattern, ZigzagReport,
};
pub use error::{Error, Result};
pub use power::{
    bracket_critical_values, estimate_power, exact_power_oracle, exact_power_oracle_with,
    interpolated_power, outcome_space_size, multinomial_sample,
    run_study, simulate_distribution, tail_probability, CriticalBracket, Cutoff,
    EmpiricalDistribution, OracleOptions, PowerEstimate, SimulationPlan, StreamKey, StreamRole,
    StudyRecord, StudyResult,
};
pub use statistics::{
    compute, compute_all, deviation_profile, discrete_ks, nominal_ks, ordinal_ad, ordinal_cvm,
    ordinal_watson, pearson_chi_square, DeviationProfile, ObservedCounts, StatisticKind,
};
