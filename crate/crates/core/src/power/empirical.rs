use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative tolerance under which two statistic values are the same atom.
///
/// Mathematically equal values reached through different count vectors can
/// differ in the last few bits; distinct atoms of the statistics in this
/// crate are separated by many orders of magnitude more.
const ATOM_TOLERANCE: f64 = 1e-9;

/// Tolerance for deciding that an achievable level equals the target level.
const LEVEL_TOLERANCE: f64 = 1e-12;

fn atom_tol(t: f64) -> f64 {
    ATOM_TOLERANCE * t.abs().max(1.0)
}

/// Sorted simulated values of a statistic under one hypothesis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalDistribution {
    values: Vec<f64>,
}

impl EmpiricalDistribution {
    pub fn new(mut values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptyDistribution);
        }
        if values.iter().any(|v| v.is_nan()) {
            return Err(Error::InvalidParameter("statistic value is NaN".into()));
        }
        values.sort_by(f64::total_cmp);
        Ok(Self { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn r(&self) -> usize {
        self.values.len()
    }

    pub fn max(&self) -> f64 {
        self.values[self.values.len() - 1]
    }

    /// Fraction of values at or above `t`.
    pub fn tail(&self, t: f64) -> f64 {
        let below = self.values.partition_point(|&v| v < t - atom_tol(t));
        (self.values.len() - below) as f64 / self.values.len() as f64
    }

    /// Fraction of values strictly above `t`.
    pub fn exceedance(&self, t: f64) -> f64 {
        let at_or_below = self.values.partition_point(|&v| v <= t + atom_tol(t));
        (self.values.len() - at_or_below) as f64 / self.values.len() as f64
    }

    pub fn tail_at(&self, cutoff: Cutoff) -> f64 {
        match cutoff {
            Cutoff::AtLeast(t) => self.tail(t),
            Cutoff::Above(t) => self.exceedance(t),
        }
    }

    /// Distinct values (merged within tolerance) in increasing order, each
    /// with its tail fraction `P(T ≥ value)`.
    fn atoms(&self) -> Vec<(f64, f64)> {
        let r = self.values.len() as f64;
        let mut atoms = Vec::new();
        let mut i = 0;
        while i < self.values.len() {
            let rep = self.values[i];
            atoms.push((rep, (self.values.len() - i) as f64 / r));
            let limit = rep + atom_tol(rep);
            while i < self.values.len() && self.values[i] <= limit {
                i += 1;
            }
        }
        atoms
    }
}

/// A rejection region for a statistic `T`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "kebab-case")]
pub enum Cutoff {
    /// Reject when `T ≥ t`.
    AtLeast(f64),
    /// Reject when `T > t`. Used as the cutoff above the largest null value,
    /// whose achieved level is zero.
    Above(f64),
}

impl Cutoff {
    pub fn value(self) -> f64 {
        match self {
            Cutoff::AtLeast(t) | Cutoff::Above(t) => t,
        }
    }

    pub fn is_sentinel(self) -> bool {
        matches!(self, Cutoff::Above(_))
    }
}

impl fmt::Display for Cutoff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cutoff::AtLeast(t) => write!(f, "{t}"),
            Cutoff::Above(t) => write!(f, ">{t}"),
        }
    }
}

/// Achievable levels on either side of a target level.
///
/// `alpha1 ≤ alpha ≤ alpha2`, and `x1` is the stricter cutoff.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CriticalBracket {
    pub x1: Cutoff,
    pub alpha1: f64,
    pub x2: Cutoff,
    pub alpha2: f64,
    pub exact_hit: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerEstimate {
    pub power: f64,
    /// Probability of failing to detect the alternative, `1 − power`.
    pub sensitivity: f64,
    pub power_at_x1: f64,
    pub power_at_x2: f64,
    pub bracket: CriticalBracket,
}

pub fn tail_probability(dist: &EmpiricalDistribution, t: f64) -> Result<f64> {
    if dist.values.is_empty() {
        return Err(Error::EmptyDistribution);
    }
    Ok(dist.tail(t))
}

pub(crate) fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "significance level {alpha} is outside (0, 1)"
        )))
    }
}

/// Brackets `alpha` between the achievable levels of `atoms`.
///
/// `atoms` lists candidate cutoffs in increasing order with their null tail
/// levels; `max` is the largest null value, above which the level is zero.
pub(crate) fn bracket_from_atoms(atoms: &[(f64, f64)], max: f64, alpha: f64) -> Result<CriticalBracket> {
    check_alpha(alpha)?;
    let candidates: Vec<(Cutoff, f64)> = atoms
        .iter()
        .map(|&(x, level)| (Cutoff::AtLeast(x), level))
        .chain(std::iter::once((Cutoff::Above(max), 0.0)))
        .collect();
    let j = candidates
        .iter()
        .position(|&(_, level)| level <= alpha + LEVEL_TOLERANCE)
        .expect("the sentinel level 0 is below any valid alpha");
    let (x1, alpha1) = candidates[j];
    if (alpha1 - alpha).abs() <= LEVEL_TOLERANCE {
        return Ok(CriticalBracket {
            x1,
            alpha1,
            x2: x1,
            alpha2: alpha1,
            exact_hit: true,
        });
    }
    if j == 0 {
        // Every achievable level is at most alpha; only reachable when the
        // null mass itself is below alpha.
        return Err(Error::DegenerateBracket { alpha1 });
    }
    let (x2, alpha2) = candidates[j - 1];
    Ok(CriticalBracket {
        x1,
        alpha1,
        x2,
        alpha2,
        exact_hit: false,
    })
}

/// Finds the achievable levels surrounding `alpha` on a simulated null
/// distribution.
///
/// Candidate cutoffs are the distinct simulated values plus one sentinel
/// above the maximum. `alpha1` is the largest achievable level not above
/// `alpha`; `alpha2` is the smallest one above it.
pub fn bracket_critical_values(null_dist: &EmpiricalDistribution, alpha: f64) -> Result<CriticalBracket> {
    if null_dist.values.is_empty() {
        return Err(Error::EmptyDistribution);
    }
    bracket_from_atoms(&null_dist.atoms(), null_dist.max(), alpha)
}

/// Interpolates the power at `alpha` from the alternative tail probabilities
/// at the two bracketing cutoffs:
///
/// `power = [(α − α1)·P(T ≥ X2 | H1) + (α2 − α)·P(T ≥ X1 | H1)] / (α2 − α1)`.
pub fn interpolated_power(
    bracket: &CriticalBracket,
    alpha: f64,
    alt_dist: &EmpiricalDistribution,
) -> Result<PowerEstimate> {
    if alt_dist.values.is_empty() {
        return Err(Error::EmptyDistribution);
    }
    interpolate(
        bracket,
        alpha,
        alt_dist.tail_at(bracket.x1),
        alt_dist.tail_at(bracket.x2),
    )
}

pub(crate) fn interpolate(
    bracket: &CriticalBracket,
    alpha: f64,
    power_at_x1: f64,
    power_at_x2: f64,
) -> Result<PowerEstimate> {
    let power = if bracket.exact_hit {
        power_at_x1
    } else {
        let width = bracket.alpha2 - bracket.alpha1;
        if width <= 0.0 {
            return Err(Error::DegenerateBracket {
                alpha1: bracket.alpha1,
            });
        }
        let raw = ((alpha - bracket.alpha1) * power_at_x2 + (bracket.alpha2 - alpha) * power_at_x1)
            / width;
        // A convex combination; clamp away last-bit rounding.
        raw.clamp(power_at_x1.min(power_at_x2), power_at_x1.max(power_at_x2))
    };
    Ok(PowerEstimate {
        power,
        sensitivity: 1.0 - power,
        power_at_x1,
        power_at_x2,
        bracket: *bracket,
    })
}
