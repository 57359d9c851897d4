//! The six goodness-of-fit statistics for multinomial counts against a fully
//! specified null.
//!
//! With `E_i = N p_i` and cumulative deviations
//! `Z_i = Σ_{j≤i} (O_j − E_j)`, `Z̄ = Σ_j Z_j p_j` and the cumulative null
//! probability `H_i = Σ_{j≤i} p_j`:
//!
//! | kind               | value                                        |
//! |--------------------|----------------------------------------------|
//! | pearson-chi-square | `Σ (O_i − E_i)² / E_i`                       |
//! | discrete-ks        | `max_i |Z_i|`                                |
//! | ordinal-cvm        | `N⁻¹ Σ Z_i² p_i`                             |
//! | ordinal-watson     | `N⁻¹ Σ (Z_i − Z̄)² p_i`                       |
//! | ordinal-ad         | `N⁻¹ Σ_{i<k} Z_i² p_i / (H_i (1 − H_i))`     |
//! | nominal-ks         | `½ Σ |O_i − E_i|`                            |
//!
//! The last Anderson-Darling term is `0/0` (`Z_k = 0`, `H_k = 1`) and is
//! taken as zero.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::distributions::{cumulative_probabilities, CellProbabilities};
use crate::error::{Error, Result};

/// One multinomial sample.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ObservedCounts {
    counts: Vec<u64>,
    n: u64,
}

impl ObservedCounts {
    pub fn new(counts: Vec<u64>) -> Self {
        let n = counts.iter().sum();
        Self { counts, n }
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn k(&self) -> usize {
        self.counts.len()
    }
}

impl From<Vec<u64>> for ObservedCounts {
    fn from(counts: Vec<u64>) -> Self {
        Self::new(counts)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StatisticKind {
    PearsonChiSquare,
    DiscreteKs,
    OrdinalCvm,
    OrdinalWatson,
    OrdinalAd,
    NominalKs,
}

impl StatisticKind {
    pub const ALL: [StatisticKind; 6] = [
        StatisticKind::PearsonChiSquare,
        StatisticKind::DiscreteKs,
        StatisticKind::OrdinalCvm,
        StatisticKind::OrdinalWatson,
        StatisticKind::OrdinalAd,
        StatisticKind::NominalKs,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            StatisticKind::PearsonChiSquare => "pearson-chi-square",
            StatisticKind::DiscreteKs => "discrete-ks",
            StatisticKind::OrdinalCvm => "ordinal-cvm",
            StatisticKind::OrdinalWatson => "ordinal-watson",
            StatisticKind::OrdinalAd => "ordinal-ad",
            StatisticKind::NominalKs => "nominal-ks",
        }
    }

    /// Whether the statistic depends on the ordering of the cells.
    pub fn is_ordinal(self) -> bool {
        !matches!(
            self,
            StatisticKind::PearsonChiSquare | StatisticKind::NominalKs
        )
    }
}

impl fmt::Display for StatisticKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for StatisticKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        StatisticKind::ALL
            .into_iter()
            .find(|kind| kind.as_str() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown statistic `{s}`")))
    }
}

/// Cumulative observed-minus-expected deviations, in count units.
#[derive(Debug, Clone, PartialEq)]
pub struct DeviationProfile {
    pub z: Vec<f64>,
    pub z_bar: f64,
}

fn check_dims(obs: &ObservedCounts, null: &CellProbabilities) -> Result<()> {
    if obs.k() != null.k() {
        return Err(Error::DimensionMismatch {
            expected: null.k(),
            found: obs.k(),
        });
    }
    Ok(())
}

fn require_positive_cells(null: &CellProbabilities) -> Result<()> {
    match null.probs().iter().position(|&p| p <= 0.0) {
        Some(index) => Err(Error::ZeroExpectedCell { index }),
        None => Ok(()),
    }
}

fn require_nonempty(obs: &ObservedCounts) -> Result<()> {
    if obs.n() == 0 {
        Err(Error::EmptySample)
    } else {
        Ok(())
    }
}

pub fn deviation_profile(obs: &ObservedCounts, null: &CellProbabilities) -> Result<DeviationProfile> {
    check_dims(obs, null)?;
    Ok(profile_unchecked(obs, null.probs()))
}

fn profile_unchecked(obs: &ObservedCounts, p: &[f64]) -> DeviationProfile {
    let n = obs.n() as f64;
    let mut acc = 0.0;
    let z: Vec<f64> = obs
        .counts()
        .iter()
        .zip(p)
        .map(|(&o, &pi)| {
            acc += o as f64 - n * pi;
            acc
        })
        .collect();
    let z_bar = z.iter().zip(p).map(|(zi, pi)| zi * pi).sum();
    DeviationProfile { z, z_bar }
}

pub fn pearson_chi_square(obs: &ObservedCounts, null: &CellProbabilities) -> Result<f64> {
    check_dims(obs, null)?;
    require_positive_cells(null)?;
    if obs.n() == 0 {
        return Ok(0.0);
    }
    let n = obs.n() as f64;
    Ok(obs
        .counts()
        .iter()
        .zip(null.probs())
        .map(|(&o, &p)| {
            let e = n * p;
            let d = o as f64 - e;
            d * d / e
        })
        .sum())
}

pub fn discrete_ks(obs: &ObservedCounts, null: &CellProbabilities) -> Result<f64> {
    let profile = deviation_profile(obs, null)?;
    Ok(profile.z.iter().fold(0.0_f64, |m, z| m.max(z.abs())))
}

pub fn ordinal_cvm(obs: &ObservedCounts, null: &CellProbabilities) -> Result<f64> {
    check_dims(obs, null)?;
    require_nonempty(obs)?;
    let profile = profile_unchecked(obs, null.probs());
    Ok(weighted_square_mean(&profile.z, 0.0, null.probs(), obs.n()))
}

pub fn ordinal_watson(obs: &ObservedCounts, null: &CellProbabilities) -> Result<f64> {
    check_dims(obs, null)?;
    require_nonempty(obs)?;
    let profile = profile_unchecked(obs, null.probs());
    Ok(weighted_square_mean(
        &profile.z,
        profile.z_bar,
        null.probs(),
        obs.n(),
    ))
}

fn weighted_square_mean(z: &[f64], shift: f64, p: &[f64], n: u64) -> f64 {
    let s: f64 = z
        .iter()
        .zip(p)
        .map(|(zi, pi)| {
            let d = zi - shift;
            d * d * pi
        })
        .sum();
    s / n as f64
}

pub fn ordinal_ad(obs: &ObservedCounts, null: &CellProbabilities) -> Result<f64> {
    check_dims(obs, null)?;
    require_nonempty(obs)?;
    require_positive_cells(null)?;
    let profile = profile_unchecked(obs, null.probs());
    let h = cumulative_probabilities(null);
    let k = null.k();
    let mut s = 0.0;
    for i in 0..k - 1 {
        let denom = h[i] * (1.0 - h[i]);
        if denom <= 0.0 {
            return Err(Error::InteriorDegenerateH { index: i });
        }
        s += profile.z[i] * profile.z[i] * null.probs()[i] / denom;
    }
    Ok(s / obs.n() as f64)
}

pub fn nominal_ks(obs: &ObservedCounts, null: &CellProbabilities) -> Result<f64> {
    check_dims(obs, null)?;
    let n = obs.n() as f64;
    let total: f64 = obs
        .counts()
        .iter()
        .zip(null.probs())
        .map(|(&o, &p)| (o as f64 - n * p).abs())
        .sum();
    Ok(0.5 * total)
}

pub fn compute(kind: StatisticKind, obs: &ObservedCounts, null: &CellProbabilities) -> Result<f64> {
    match kind {
        StatisticKind::PearsonChiSquare => pearson_chi_square(obs, null),
        StatisticKind::DiscreteKs => discrete_ks(obs, null),
        StatisticKind::OrdinalCvm => ordinal_cvm(obs, null),
        StatisticKind::OrdinalWatson => ordinal_watson(obs, null),
        StatisticKind::OrdinalAd => ordinal_ad(obs, null),
        StatisticKind::NominalKs => nominal_ks(obs, null),
    }
}

/// Evaluates several statistics on one sample, in the order given.
pub fn compute_all(
    kinds: &[StatisticKind],
    obs: &ObservedCounts,
    null: &CellProbabilities,
) -> Vec<Result<f64>> {
    kinds.iter().map(|&kind| compute(kind, obs, null)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn uniform3() -> CellProbabilities {
        CellProbabilities::uniform(3).unwrap()
    }

    fn half() -> CellProbabilities {
        CellProbabilities::new(vec![0.5, 0.5], "half").unwrap()
    }

    fn obs(c: &[u64]) -> ObservedCounts {
        ObservedCounts::new(c.to_vec())
    }

    fn close(a: f64, b: f64) {
        assert!((a - b).abs() < 1e-12, "{a} vs {b}");
    }

    #[test]
    fn profile_examples() {
        let p = deviation_profile(&obs(&[4, 1, 1]), &uniform3()).unwrap();
        close(p.z[0], 2.0);
        close(p.z[1], 1.0);
        close(p.z[2], 0.0);
        close(p.z_bar, 1.0);

        let p = deviation_profile(&obs(&[2, 2, 2]), &uniform3()).unwrap();
        assert!(p.z.iter().all(|z| z.abs() < 1e-12));
        close(p.z_bar, 0.0);

        assert!(matches!(
            deviation_profile(&obs(&[1, 2]), &uniform3()),
            Err(Error::DimensionMismatch { expected: 3, found: 2 })
        ));
    }

    #[test]
    fn hand_evaluated_fixtures() {
        let o = obs(&[4, 1, 1]);
        let u = uniform3();
        close(pearson_chi_square(&o, &u).unwrap(), 3.0);
        close(discrete_ks(&o, &u).unwrap(), 2.0);
        close(ordinal_cvm(&o, &u).unwrap(), 5.0 / 18.0);
        close(ordinal_watson(&o, &u).unwrap(), 1.0 / 9.0);
        close(ordinal_ad(&o, &u).unwrap(), 1.25);
        close(nominal_ks(&o, &u).unwrap(), 2.0);

        let o = obs(&[3, 1]);
        let h = half();
        close(pearson_chi_square(&o, &h).unwrap(), 1.0);
        close(ordinal_cvm(&o, &h).unwrap(), 0.125);
        close(ordinal_watson(&o, &h).unwrap(), 0.0625);
        close(ordinal_ad(&o, &h).unwrap(), 0.5);
        close(nominal_ks(&o, &h).unwrap(), 1.0);

        close(discrete_ks(&obs(&[0, 6, 0]), &u).unwrap(), 2.0);
    }

    #[test]
    fn exact_fit_is_zero_for_every_statistic() {
        let o = obs(&[2, 2, 2]);
        for kind in StatisticKind::ALL {
            assert!(compute(kind, &o, &uniform3()).unwrap().abs() < 1e-12, "{kind}");
        }
    }

    #[test]
    fn dispatch_matches_direct_calls() {
        let o = obs(&[4, 1, 1]);
        let u = uniform3();
        assert_eq!(
            compute(StatisticKind::PearsonChiSquare, &o, &u).unwrap(),
            pearson_chi_square(&o, &u).unwrap()
        );
        assert_eq!(
            compute(StatisticKind::OrdinalAd, &o, &u).unwrap(),
            ordinal_ad(&o, &u).unwrap()
        );
        let all = compute_all(&StatisticKind::ALL, &o, &u);
        assert_eq!(all.len(), 6);
        close(*all[5].as_ref().unwrap(), 2.0);
    }

    #[test]
    fn error_paths() {
        let zero_cell = CellProbabilities::new(vec![0.5, 0.0, 0.5], "z").unwrap();
        let o = obs(&[1, 0, 1]);
        assert!(matches!(
            pearson_chi_square(&o, &zero_cell),
            Err(Error::ZeroExpectedCell { index: 1 })
        ));
        assert!(matches!(
            ordinal_ad(&o, &zero_cell),
            Err(Error::ZeroExpectedCell { index: 1 })
        ));
        // The remaining statistics tolerate empty cells.
        assert!(discrete_ks(&o, &zero_cell).is_ok());
        assert!(ordinal_cvm(&o, &zero_cell).is_ok());
        assert!(ordinal_watson(&o, &zero_cell).is_ok());
        assert!(nominal_ks(&o, &zero_cell).is_ok());

        let empty = obs(&[0, 0, 0]);
        for kind in [
            StatisticKind::OrdinalCvm,
            StatisticKind::OrdinalWatson,
            StatisticKind::OrdinalAd,
        ] {
            assert!(matches!(
                compute(kind, &empty, &uniform3()),
                Err(Error::EmptySample)
            ));
        }
        assert_eq!(pearson_chi_square(&empty, &uniform3()).unwrap(), 0.0);
    }

    #[test]
    fn interior_degenerate_h_is_reported() {
        // The tail mass is below the resolution of the cumulative sum.
        let p = CellProbabilities::new(vec![0.5, 0.5, 1e-17], "tiny").unwrap();
        assert!(matches!(
            ordinal_ad(&obs(&[1, 1, 0]), &p),
            Err(Error::InteriorDegenerateH { index: 1 })
        ));
    }

    #[test]
    fn kind_tokens_round_trip() {
        for kind in StatisticKind::ALL {
            assert_eq!(kind.as_str().parse::<StatisticKind>().unwrap(), kind);
        }
        assert!("ks".parse::<StatisticKind>().is_err());
        assert!(StatisticKind::OrdinalAd.is_ordinal());
        assert!(!StatisticKind::NominalKs.is_ordinal());
    }
}
