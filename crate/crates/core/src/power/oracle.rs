//! Exact power by enumerating every multinomial outcome.

use super::empirical::{bracket_from_atoms, check_alpha, interpolate, Cutoff, PowerEstimate};
use crate::distributions::CellProbabilities;
use crate::error::{Error, Result};
use crate::statistics::{compute, ObservedCounts, StatisticKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleOptions {
    /// Largest number of outcomes the oracle will enumerate.
    pub cap: u64,
}

impl OracleOptions {
    pub const DEFAULT_CAP: u64 = 2_000_000;
}

impl Default for OracleOptions {
    fn default() -> Self {
        Self {
            cap: Self::DEFAULT_CAP,
        }
    }
}

/// Number of ways to place `n` draws in `k` cells, `C(n + k − 1, k − 1)`,
/// as a float so that huge spaces do not overflow.
pub fn outcome_space_size(n: u64, k: usize) -> f64 {
    if k == 0 {
        return 0.0;
    }
    let n = n as f64;
    // Multiplicative form; exact below 2^53.
    (1..k).fold(1.0, |acc, j| acc * (n + j as f64) / j as f64).round()
}

pub fn exact_power_oracle(
    kind: StatisticKind,
    null: &CellProbabilities,
    alt: &CellProbabilities,
    n: u64,
    alpha: f64,
) -> Result<PowerEstimate> {
    exact_power_oracle_with(kind, null, alt, n, alpha, OracleOptions::default())
}

/// Exact interpolated power from the full outcome space.
///
/// Uses the same atom merging, bracketing and interpolation rules as the
/// Monte Carlo path, with exact multinomial probabilities in place of
/// simulated frequencies.
pub fn exact_power_oracle_with(
    kind: StatisticKind,
    null: &CellProbabilities,
    alt: &CellProbabilities,
    n: u64,
    alpha: f64,
    options: OracleOptions,
) -> Result<PowerEstimate> {
    check_alpha(alpha)?;
    if alt.k() != null.k() {
        return Err(Error::DimensionMismatch {
            expected: null.k(),
            found: alt.k(),
        });
    }
    let k = null.k();
    let size = outcome_space_size(n, k);
    if size > options.cap as f64 {
        return Err(Error::OutcomeSpaceTooLarge {
            size,
            cap: options.cap,
        });
    }

    let ln_fact = ln_factorials(n);
    let ln_null: Vec<f64> = null.probs().iter().map(|p| p.ln()).collect();
    let ln_alt: Vec<f64> = alt.probs().iter().map(|p| p.ln()).collect();

    // (value, null probability, alternative probability)
    let mut outcomes = Vec::with_capacity(size as usize);
    let mut counts = vec![0u64; k];
    counts[k - 1] = n;
    loop {
        let obs = ObservedCounts::new(counts.clone());
        let value = compute(kind, &obs, null)?;
        let ln_coef = ln_fact[n as usize] - counts.iter().map(|&c| ln_fact[c as usize]).sum::<f64>();
        outcomes.push((
            value,
            outcome_probability(ln_coef, &counts, &ln_null),
            outcome_probability(ln_coef, &counts, &ln_alt),
        ));
        if !next_composition(&mut counts) {
            break;
        }
    }
    outcomes.sort_by(|a, b| a.0.total_cmp(&b.0));

    // Null support atoms, merged with the same tolerance as simulated values.
    let support: Vec<(f64, f64)> = outcomes
        .iter()
        .filter(|o| o.1 > 0.0)
        .map(|o| (o.0, o.1))
        .collect();
    let max = support.last().map(|s| s.0).ok_or(Error::EmptyDistribution)?;
    let mut atoms: Vec<(f64, f64)> = Vec::new();
    for &(value, mass) in &support {
        match atoms.last_mut() {
            Some(last) if value <= last.0 + tol(last.0) => last.1 += mass,
            _ => atoms.push((value, mass)),
        }
    }
    // Convert per-atom mass to upper tail mass.
    let mut acc = 0.0;
    for atom in atoms.iter_mut().rev() {
        acc += atom.1;
        atom.1 = acc;
    }

    let bracket = bracket_from_atoms(&atoms, max, alpha)?;
    let alt_tail = |cutoff: Cutoff| -> f64 {
        outcomes
            .iter()
            .filter(|o| match cutoff {
                Cutoff::AtLeast(t) => o.0 >= t - tol(t),
                Cutoff::Above(t) => o.0 > t + tol(t),
            })
            .map(|o| o.2)
            .sum()
    };
    interpolate(&bracket, alpha, alt_tail(bracket.x1), alt_tail(bracket.x2))
}

fn tol(t: f64) -> f64 {
    1e-9 * t.abs().max(1.0)
}

fn ln_factorials(n: u64) -> Vec<f64> {
    let mut out = Vec::with_capacity(n as usize + 1);
    let mut acc = 0.0;
    out.push(0.0);
    for j in 1..=n {
        acc += (j as f64).ln();
        out.push(acc);
    }
    out
}

fn outcome_probability(ln_coef: f64, counts: &[u64], ln_p: &[f64]) -> f64 {
    let mut log = ln_coef;
    for (&c, &lp) in counts.iter().zip(ln_p) {
        if c > 0 {
            if lp == f64::NEG_INFINITY {
                return 0.0;
            }
            log += c as f64 * lp;
        }
    }
    log.exp()
}

/// Steps through all compositions of `n` into `counts.len()` parts.
/// Starts from `(0, …, 0, n)` and ends at `(n, 0, …, 0)`.
fn next_composition(counts: &mut [u64]) -> bool {
    let k = counts.len();
    // Find the rightmost non-zero cell that is not the first.
    let Some(j) = (1..k).rev().find(|&j| counts[j] > 0) else {
        return false;
    };
    let moved = counts[j];
    counts[j] = 0;
    counts[j - 1] += 1;
    counts[k - 1] += moved - 1;
    true
}
