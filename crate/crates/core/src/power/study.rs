use std::collections::HashSet;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::empirical::{
    bracket_critical_values, check_alpha, interpolated_power, CriticalBracket,
    EmpiricalDistribution, PowerEstimate,
};
use super::sampling::{distribution_id, multinomial_sample, StreamKey, StreamRole};
use crate::distributions::CellProbabilities;
use crate::error::{Error, Result};
use crate::statistics::{compute, compute_all, StatisticKind};

/// Replicate count, target level, sample sizes, seed and statistics of a
/// power study.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationPlan {
    pub replicates: usize,
    pub alpha: f64,
    pub sample_sizes: Vec<u64>,
    pub seed: u64,
    pub statistics: Vec<StatisticKind>,
}

impl SimulationPlan {
    pub const DEFAULT_REPLICATES: usize = 10_000;
    pub const DEFAULT_ALPHA: f64 = 0.01;
    pub const DEFAULT_SAMPLE_SIZES: [u64; 6] = [10, 20, 30, 50, 100, 200];
    pub const DEFAULT_SEED: u64 = 1;
    pub const MIN_REPLICATES: usize = 100;

    pub fn validate(&self) -> Result<()> {
        if self.replicates < Self::MIN_REPLICATES {
            return Err(Error::InvalidParameter(format!(
                "replicates must be at least {}, got {}",
                Self::MIN_REPLICATES,
                self.replicates
            )));
        }
        check_alpha(self.alpha)?;
        if self.sample_sizes.is_empty() {
            return Err(Error::InvalidParameter("no sample sizes".into()));
        }
        if self.sample_sizes.contains(&0) {
            return Err(Error::InvalidParameter("sample sizes must be at least 1".into()));
        }
        if has_duplicates(&self.sample_sizes) {
            return Err(Error::InvalidParameter("duplicate sample size".into()));
        }
        if self.statistics.is_empty() {
            return Err(Error::InvalidParameter("no statistics selected".into()));
        }
        if has_duplicates(&self.statistics) {
            return Err(Error::InvalidParameter("duplicate statistic".into()));
        }
        Ok(())
    }
}

impl Default for SimulationPlan {
    fn default() -> Self {
        Self {
            replicates: Self::DEFAULT_REPLICATES,
            alpha: Self::DEFAULT_ALPHA,
            sample_sizes: Self::DEFAULT_SAMPLE_SIZES.to_vec(),
            seed: Self::DEFAULT_SEED,
            statistics: StatisticKind::ALL.to_vec(),
        }
    }
}

fn has_duplicates<T: Eq + std::hash::Hash>(items: &[T]) -> bool {
    let mut seen = HashSet::new();
    !items.iter().all(|x| seen.insert(x))
}

/// One grid cell of a study.
#[derive(Debug, Clone, PartialEq)]
pub struct StudyRecord {
    pub alternative: String,
    pub statistic: StatisticKind,
    pub sample_size: u64,
    pub replicates: usize,
    pub seed: u64,
    pub outcome: Result<PowerEstimate>,
}

/// Records ordered by alternative, then statistic, then sample size, each in
/// the order requested.
#[derive(Debug, Clone, PartialEq)]
pub struct StudyResult {
    pub alpha: f64,
    pub records: Vec<StudyRecord>,
}

impl StudyResult {
    pub fn get(&self, alternative: &str, statistic: StatisticKind, sample_size: u64) -> Option<&StudyRecord> {
        self.records.iter().find(|r| {
            r.alternative == alternative && r.statistic == statistic && r.sample_size == sample_size
        })
    }

    pub fn power(&self, alternative: &str, statistic: StatisticKind, sample_size: u64) -> Option<f64> {
        self.get(alternative, statistic, sample_size)
            .and_then(|r| r.outcome.as_ref().ok())
            .map(|e| e.power)
    }

    pub fn failures(&self) -> impl Iterator<Item = &StudyRecord> {
        self.records.iter().filter(|r| r.outcome.is_err())
    }

    pub fn has_failures(&self) -> bool {
        self.failures().next().is_some()
    }
}

/// Simulates the distribution of one statistic when samples are drawn from
/// `sampling` and compared against `null`.
pub fn simulate_distribution(
    kind: StatisticKind,
    sampling: &CellProbabilities,
    null: &CellProbabilities,
    n: u64,
    replicates: usize,
    key: StreamKey,
) -> Result<EmpiricalDistribution> {
    if sampling.k() != null.k() {
        return Err(Error::DimensionMismatch {
            expected: null.k(),
            found: sampling.k(),
        });
    }
    if replicates == 0 {
        return Err(Error::EmptyDistribution);
    }
    let values = (0..replicates as u64)
        .into_par_iter()
        .map(|i| {
            let obs = multinomial_sample(sampling.probs(), n, &mut key.rng(n, i));
            compute(kind, &obs, null)
        })
        .collect::<Result<Vec<f64>>>()?;
    EmpiricalDistribution::new(values)
}

/// Monte Carlo power of one statistic at one sample size, using the same
/// streams as [`run_study`] so the result matches the corresponding grid
/// cell.
pub fn estimate_power(
    kind: StatisticKind,
    null: &CellProbabilities,
    alt: &CellProbabilities,
    n: u64,
    alpha: f64,
    replicates: usize,
    seed: u64,
) -> Result<PowerEstimate> {
    let null_key = StreamKey::new(seed, StreamRole::Null, distribution_id(null.label()));
    let alt_key = StreamKey::new(seed, StreamRole::Alternative, distribution_id(alt.label()));
    let null_dist = simulate_distribution(kind, null, null, n, replicates, null_key)?;
    let bracket = bracket_critical_values(&null_dist, alpha)?;
    let alt_dist = simulate_distribution(kind, alt, null, n, replicates, alt_key)?;
    interpolated_power(&bracket, alpha, &alt_dist)
}

/// Simulates every requested statistic on one shared set of draws.
fn simulate_all(
    kinds: &[StatisticKind],
    sampling: &CellProbabilities,
    null: &CellProbabilities,
    n: u64,
    replicates: usize,
    key: StreamKey,
) -> Vec<Result<EmpiricalDistribution>> {
    let rows: Vec<Vec<Result<f64>>> = (0..replicates as u64)
        .into_par_iter()
        .map(|i| {
            let obs = multinomial_sample(sampling.probs(), n, &mut key.rng(n, i));
            compute_all(kinds, &obs, null)
        })
        .collect();
    (0..kinds.len())
        .map(|s| {
            let values = rows
                .iter()
                .map(|row| row[s].clone())
                .collect::<Result<Vec<f64>>>()?;
            EmpiricalDistribution::new(values)
        })
        .collect()
}

/// Runs the full power grid.
///
/// For each sample size one null replicate set is drawn and each statistic's
/// bracket is reused across all alternatives. Each alternative gets its own
/// replicate set per sample size, shared by all statistics. Cells that fail
/// (for example Pearson's statistic with an empty null cell) are recorded as
/// errors without stopping the grid. The result depends only on the plan and
/// the distributions, never on the thread count.
pub fn run_study(
    plan: &SimulationPlan,
    null: &CellProbabilities,
    alternatives: &[CellProbabilities],
) -> Result<StudyResult> {
    plan.validate()?;
    for alt in alternatives {
        if alt.k() != null.k() {
            return Err(Error::DimensionMismatch {
                expected: null.k(),
                found: alt.k(),
            });
        }
    }
    let labels: Vec<&str> = alternatives.iter().map(|a| a.label()).collect();
    if has_duplicates(&labels) {
        return Err(Error::InvalidParameter("duplicate alternative label".into()));
    }

    let kinds = &plan.statistics;
    let null_key = StreamKey::new(plan.seed, StreamRole::Null, distribution_id(null.label()));
    // brackets[n_index][kind_index]
    let brackets: Vec<Vec<Result<CriticalBracket>>> = plan
        .sample_sizes
        .iter()
        .map(|&n| {
            simulate_all(kinds, null, null, n, plan.replicates, null_key)
                .into_iter()
                .map(|d| d.and_then(|d| bracket_critical_values(&d, plan.alpha)))
                .collect()
        })
        .collect();

    // estimates[alt_index][n_index][kind_index]
    let estimates: Vec<Vec<Vec<Result<PowerEstimate>>>> = alternatives
        .iter()
        .map(|alt| {
            let key = StreamKey::new(plan.seed, StreamRole::Alternative, distribution_id(alt.label()));
            plan.sample_sizes
                .iter()
                .enumerate()
                .map(|(ni, &n)| {
                    simulate_all(kinds, alt, null, n, plan.replicates, key)
                        .into_iter()
                        .zip(&brackets[ni])
                        .map(|(dist, bracket)| {
                            let bracket = bracket.as_ref().map_err(Clone::clone)?;
                            interpolated_power(bracket, plan.alpha, &dist?)
                        })
                        .collect()
                })
                .collect()
        })
        .collect();

    let mut records = Vec::with_capacity(alternatives.len() * kinds.len() * plan.sample_sizes.len());
    for (ai, alt) in alternatives.iter().enumerate() {
        for (si, &kind) in kinds.iter().enumerate() {
            for (ni, &n) in plan.sample_sizes.iter().enumerate() {
                records.push(StudyRecord {
                    alternative: alt.label().to_string(),
                    statistic: kind,
                    sample_size: n,
                    replicates: plan.replicates,
                    seed: plan.seed,
                    outcome: estimates[ai][ni][si].clone(),
                });
            }
        }
    }
    Ok(StudyResult {
        alpha: plan.alpha,
        records,
    })
}
