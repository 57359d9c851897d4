//! Monte Carlo power estimation.
//!
//! Null and alternative distributions of a statistic are simulated from
//! seeded multinomial draws. The target level usually falls between two
//! achievable levels of the discrete null distribution; power is linearly
//! interpolated between the alternative tail probabilities at the two
//! surrounding critical values.

mod empirical;
mod oracle;
mod sampling;
mod study;

pub use empirical::{
    bracket_critical_values, interpolated_power, tail_probability, CriticalBracket, Cutoff,
    EmpiricalDistribution, PowerEstimate,
};
pub use oracle::{exact_power_oracle, exact_power_oracle_with, outcome_space_size, OracleOptions};
pub use sampling::{distribution_id, draw_samples, multinomial_sample, StreamKey, StreamRole};
pub use study::{estimate_power, run_study, simulate_distribution, SimulationPlan, StudyRecord, StudyResult};
