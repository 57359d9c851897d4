//! Fully specified discrete distributions: construction, the zig-zag
//! classifier, the Beta-Binomial trend family and the built-in catalog.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};

/// Tolerance on `|Σ p_i − 1|` accepted at construction.
pub const SUM_TOLERANCE: f64 = 1e-9;

/// A validated vector of cell probabilities over `k ≥ 2` ordered categories.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellProbabilities {
    probs: Vec<f64>,
    label: String,
}

impl CellProbabilities {
    pub fn new(values: Vec<f64>, label: impl Into<String>) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::TooFewCategories { k: values.len() });
        }
        for (index, &value) in values.iter().enumerate() {
            if !(0.0..=1.0).contains(&value) {
                return Err(Error::NegativeOrOversizedProbability { index, value });
            }
        }
        let sum: f64 = values.iter().sum();
        if (sum - 1.0).abs() > SUM_TOLERANCE {
            return Err(Error::SumNotOne { sum });
        }
        Ok(Self {
            probs: values,
            label: label.into(),
        })
    }

    /// Uniform distribution over `k` cells.
    pub fn uniform(k: usize) -> Result<Self> {
        if k < 2 {
            return Err(Error::TooFewCategories { k });
        }
        Self::new(vec![1.0 / k as f64; k], format!("uniform-{k}"))
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn k(&self) -> usize {
        self.probs.len()
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn has_zero_cell(&self) -> bool {
        self.probs.iter().any(|&p| p == 0.0)
    }
}

impl AsRef<[f64]> for CellProbabilities {
    fn as_ref(&self) -> &[f64] {
        &self.probs
    }
}

pub fn make_cell_probabilities(values: Vec<f64>, label: &str) -> Result<CellProbabilities> {
    CellProbabilities::new(values, label)
}

/// Direction of the first adjacent comparison of a zig-zag sequence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ZigzagPattern {
    /// `p_1 < p_2 > p_3 < ...`
    RisingStart,
    /// `p_1 > p_2 < p_3 > ...`
    FallingStart,
    None,
}

impl ZigzagPattern {
    pub fn as_str(self) -> &'static str {
        match self {
            ZigzagPattern::RisingStart => "rising-start",
            ZigzagPattern::FallingStart => "falling-start",
            ZigzagPattern::None => "none",
        }
    }
}

impl fmt::Display for ZigzagPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ZigzagReport {
    pub is_zigzag: bool,
    pub pattern: ZigzagPattern,
    /// 1-based index `i` of the first adjacent pair `(p_i, p_{i+1})` that
    /// breaks strict alternation.
    pub first_violation: Option<usize>,
}

/// Checks whether adjacent cell probabilities strictly alternate up and
/// down. Ties are never alternating.
///
/// The end direction of a strictly alternating sequence is fixed by its start
/// direction and `k`, so only the start direction is reported.
pub fn classify_zigzag(cp: &CellProbabilities) -> ZigzagReport {
    classify_slice(cp.probs())
}

fn classify_slice(p: &[f64]) -> ZigzagReport {
    let rising = match p[0].partial_cmp(&p[1]) {
        Some(std::cmp::Ordering::Less) => true,
        Some(std::cmp::Ordering::Greater) => false,
        _ => return not_zigzag(1),
    };
    for (offset, pair) in p.windows(2).enumerate().skip(1) {
        // pair index `offset + 1` must go up when it has the same parity as a
        // rising first pair.
        let want_up = rising == (offset % 2 == 0);
        let ok = if want_up {
            pair[0] < pair[1]
        } else {
            pair[0] > pair[1]
        };
        if !ok {
            return not_zigzag(offset + 1);
        }
    }
    ZigzagReport {
        is_zigzag: true,
        pattern: if rising {
            ZigzagPattern::RisingStart
        } else {
            ZigzagPattern::FallingStart
        },
        first_violation: None,
    }
}

fn not_zigzag(pair: usize) -> ZigzagReport {
    ZigzagReport {
        is_zigzag: false,
        pattern: ZigzagPattern::None,
        first_violation: Some(pair),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BetaBinomialParams {
    pub a: f64,
    pub b: f64,
    pub k: usize,
}

impl BetaBinomialParams {
    pub fn new(a: f64, b: f64, k: usize) -> Result<Self> {
        if !(a > 0.0 && b > 0.0 && a.is_finite() && b.is_finite()) {
            return Err(Error::NonpositiveShape { a, b });
        }
        if k < 2 {
            return Err(Error::TooFewCategories { k });
        }
        Ok(Self { a, b, k })
    }
}

/// Beta-Binomial trend probabilities over `k` cells.
///
/// Cell `i` (1-based) gets
/// `C(k−1, i−1) Γ(a+i−1) Γ(k+b−i) Γ(a+b) / (Γ(a+b+k−1) Γ(a) Γ(b))`,
/// evaluated as a sum of log-gamma terms. `BB(1, 1)` is uniform; `a = b > 1`
/// gives a symmetric unimodal shape and `0 < a = b < 1` a U shape.
pub fn beta_binomial(params: BetaBinomialParams) -> Result<CellProbabilities> {
    let BetaBinomialParams { a, b, k } = BetaBinomialParams::new(params.a, params.b, params.k)?;
    let m = (k - 1) as f64;
    let log_norm = ln_gamma(a + b) - ln_gamma(a + b + m) - ln_gamma(a) - ln_gamma(b);
    let log_m_fact = ln_gamma(m + 1.0);
    let mut probs: Vec<f64> = (0..k)
        .map(|j| {
            let j = j as f64;
            let log_choose = log_m_fact - ln_gamma(j + 1.0) - ln_gamma(m - j + 1.0);
            (log_choose + ln_gamma(a + j) + ln_gamma(b + m - j) + log_norm).exp()
        })
        .collect();
    // Removes the accumulated log-gamma rounding so the row sums to 1 at
    // machine precision. The correction is O(1e-15) relative.
    let total: f64 = probs.iter().sum();
    for p in &mut probs {
        *p /= total;
    }
    if a == b {
        // Symmetric family: mirror so the palindrome holds bit-for-bit.
        for i in 0..k / 2 {
            let mean = 0.5 * (probs[i] + probs[k - 1 - i]);
            probs[i] = mean;
            probs[k - 1 - i] = mean;
        }
    }
    CellProbabilities::new(probs, format!("bb({a},{b})"))
}

/// `E_i = n · p_i`.
pub fn expected_frequencies(cp: &CellProbabilities, n: u64) -> Vec<f64> {
    let n = n as f64;
    cp.probs().iter().map(|p| n * p).collect()
}

/// Cumulative null probabilities `H_i = Σ_{j≤i} p_j`, with `H_k` pinned to 1.
pub fn cumulative_probabilities(cp: &CellProbabilities) -> Vec<f64> {
    let mut acc = 0.0;
    let mut h: Vec<f64> = cp
        .probs()
        .iter()
        .map(|p| {
            acc += p;
            acc.min(1.0)
        })
        .collect();
    if let Some(last) = h.last_mut() {
        *last = 1.0;
    }
    h
}

/// Names of the built-in distributions: the zig-zag null plus seven
/// alternatives over ten ordered cells.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CatalogName {
    ZigzagNull,
    Decreasing,
    Increasing,
    Unimodal,
    Bimodal,
    Leptokurtic,
    Platykurtic,
    Bathtub,
}

impl CatalogName {
    pub const ALL: [CatalogName; 8] = [
        CatalogName::ZigzagNull,
        CatalogName::Decreasing,
        CatalogName::Increasing,
        CatalogName::Unimodal,
        CatalogName::Bimodal,
        CatalogName::Leptokurtic,
        CatalogName::Platykurtic,
        CatalogName::Bathtub,
    ];

    /// Every entry except the null, in catalog order.
    pub const ALTERNATIVES: [CatalogName; 7] = [
        CatalogName::Decreasing,
        CatalogName::Increasing,
        CatalogName::Unimodal,
        CatalogName::Bimodal,
        CatalogName::Leptokurtic,
        CatalogName::Platykurtic,
        CatalogName::Bathtub,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            CatalogName::ZigzagNull => "zigzag-null",
            CatalogName::Decreasing => "decreasing",
            CatalogName::Increasing => "increasing",
            CatalogName::Unimodal => "unimodal",
            CatalogName::Bimodal => "bimodal",
            CatalogName::Leptokurtic => "leptokurtic",
            CatalogName::Platykurtic => "platykurtic",
            CatalogName::Bathtub => "bathtub",
        }
    }

    fn raw_row(self) -> [f64; 10] {
        match self {
            CatalogName::ZigzagNull => [0.20, 0.05, 0.10, 0.05, 0.10, 0.02, 0.20, 0.10, 0.08, 0.10],
            CatalogName::Decreasing => [0.32, 0.13, 0.10, 0.08, 0.07, 0.07, 0.06, 0.06, 0.05, 0.05],
            CatalogName::Increasing => [0.03, 0.04, 0.05, 0.06, 0.10, 0.11, 0.12, 0.14, 0.16, 0.19],
            CatalogName::Unimodal => [0.06, 0.09, 0.17, 0.17, 0.12, 0.12, 0.12, 0.17, 0.09, 0.06],
            CatalogName::Bimodal => [0.05, 0.11, 0.17, 0.11, 0.06, 0.06, 0.11, 0.17, 0.11, 0.05],
            CatalogName::Leptokurtic => [0.05, 0.05, 0.05, 0.05, 0.30, 0.30, 0.05, 0.05, 0.05, 0.05],
            CatalogName::Platykurtic => [0.04, 0.11, 0.11, 0.12, 0.12, 0.12, 0.12, 0.11, 0.11, 0.04],
            CatalogName::Bathtub => [0.11, 0.10, 0.10, 0.01, 0.09, 0.09, 0.10, 0.10, 0.10, 0.11],
        }
    }
}

impl fmt::Display for CatalogName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for CatalogName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        CatalogName::ALL
            .into_iter()
            .find(|name| name.as_str() == s)
            .ok_or_else(|| Error::UnknownCatalogName(s.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CatalogEntry {
    pub name: CatalogName,
    /// The row exactly as tabulated, even where it does not sum to one.
    pub raw: Vec<f64>,
    pub resolved: CellProbabilities,
    /// Empty when `resolved` is the raw row unchanged.
    pub provenance_note: String,
}

/// Returns a catalog entry with its raw row and the distribution actually
/// used in studies.
///
/// Rows that already sum to one are used as is. The unimodal and bath-tub
/// rows are regenerated from `BB(1.5, 1.5)` and `BB(0.9, 0.9)` because the
/// tabulated values do not sum to one; the decreasing row is rescaled by its
/// sum.
pub fn catalog(name: CatalogName) -> CatalogEntry {
    let raw = name.raw_row().to_vec();
    let raw_sum: f64 = raw.iter().sum();
    let (resolved, provenance_note) = match name {
        CatalogName::Unimodal | CatalogName::Bathtub => {
            let shape = if name == CatalogName::Unimodal { 1.5 } else { 0.9 };
            let params = BetaBinomialParams::new(shape, shape, raw.len()).expect("valid shape");
            let cp = beta_binomial(params).expect("valid Beta-Binomial row");
            let note = format!(
                "tabulated row sums to {raw_sum:.2}; regenerated from BB({shape}, {shape}) with k = {}",
                raw.len()
            );
            (cp, note)
        }
        CatalogName::Decreasing => {
            let scaled = raw.iter().map(|p| p / raw_sum).collect();
            let cp = CellProbabilities::new(scaled, name.as_str()).expect("rescaled row is valid");
            let note = format!(
                "tabulated row sums to {raw_sum:.2}; every cell divided by {raw_sum:.2}"
            );
            (cp, note)
        }
        _ => {
            let cp = CellProbabilities::new(raw.clone(), name.as_str()).expect("row sums to one");
            (cp, String::new())
        }
    };
    CatalogEntry {
        name,
        raw,
        resolved: resolved.with_label(name.as_str()),
        provenance_note,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cp(values: &[f64]) -> CellProbabilities {
        CellProbabilities::new(values.to_vec(), "t").unwrap()
    }

    #[test]
    fn construction_accepts_and_rejects() {
        assert_eq!(cp(&[0.5, 0.5]).k(), 2);
        let null = make_cell_probabilities(
            vec![0.20, 0.05, 0.10, 0.05, 0.10, 0.02, 0.20, 0.10, 0.08, 0.10],
            "zigzag",
        )
        .unwrap();
        assert_eq!(null.k(), 10);

        match CellProbabilities::new(vec![0.6, 0.6], "x") {
            Err(Error::SumNotOne { sum }) => assert!((sum - 1.2).abs() < 1e-12),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(
            CellProbabilities::new(vec![1.0], "x"),
            Err(Error::TooFewCategories { k: 1 })
        ));
        assert!(matches!(
            CellProbabilities::new(vec![-0.1, 1.1], "x"),
            Err(Error::NegativeOrOversizedProbability { index: 0, .. })
        ));
        assert!(matches!(
            CellProbabilities::new(vec![f64::NAN, 1.0], "x"),
            Err(Error::NegativeOrOversizedProbability { index: 0, .. })
        ));
    }

    #[test]
    fn zigzag_examples() {
        let r = classify_zigzag(&cp(&[0.3, 0.1, 0.3, 0.1, 0.2]));
        assert!(r.is_zigzag);
        assert_eq!(r.pattern, ZigzagPattern::FallingStart);
        assert_eq!(r.first_violation, None);

        let r = classify_zigzag(&cp(&[0.1, 0.1, 0.8]));
        assert!(!r.is_zigzag);
        assert_eq!(r.pattern, ZigzagPattern::None);
        assert_eq!(r.first_violation, Some(1));

        let r = classify_zigzag(&cp(&[0.2, 0.3, 0.1, 0.4]));
        assert_eq!(r.pattern, ZigzagPattern::RisingStart);

        // 0.10 > 0.08 at cells 8-9 where a rise is required.
        let r = classify_zigzag(&catalog(CatalogName::ZigzagNull).resolved);
        assert!(!r.is_zigzag);
        assert_eq!(r.first_violation, Some(8));
    }

    #[test]
    fn zigzag_violation_in_middle() {
        let r = classify_zigzag(&cp(&[0.1, 0.3, 0.2, 0.25, 0.15]));
        assert!(r.is_zigzag);
        let r = classify_zigzag(&cp(&[0.1, 0.3, 0.2, 0.15, 0.25]));
        assert_eq!(r.first_violation, Some(3));
    }

    #[test]
    fn beta_binomial_uniform_case() {
        let p = beta_binomial(BetaBinomialParams::new(1.0, 1.0, 10).unwrap()).unwrap();
        for &x in p.probs() {
            assert!((x - 0.1).abs() < 1e-12);
        }
    }

    #[test]
    fn beta_binomial_matches_high_precision_values() {
        // Reference values from a 40-digit evaluation of the gamma form.
        let p = beta_binomial(BetaBinomialParams::new(1.5, 1.5, 10).unwrap()).unwrap();
        let expected = [
            0.0640716552734375,
            0.0910491943359375,
            0.10711669921875,
            0.11663818359375,
            0.121124267578125,
        ];
        for (i, e) in expected.iter().enumerate() {
            assert!((p.probs()[i] - e).abs() < 1e-13, "cell {}", i + 1);
            assert!((p.probs()[9 - i] - e).abs() < 1e-13);
        }
        assert_eq!(format!("{:.2}", p.probs()[0]), "0.06");

        let p = beta_binomial(BetaBinomialParams::new(0.9, 0.9, 10).unwrap()).unwrap();
        assert!((p.probs()[0] - 0.111_218_585_778_594_1).abs() < 1e-13);
        assert!((p.probs()[4] - 0.094_686_579_576_788_1).abs() < 1e-13);
        assert_eq!(format!("{:.2}", p.probs()[0]), "0.11");

        let p = beta_binomial(BetaBinomialParams::new(2.0, 5.0, 7).unwrap()).unwrap();
        let expected = [5.0 / 22.0, 3.0 / 11.0, 5.0 / 22.0, 5.0 / 33.0];
        for (i, e) in expected.iter().enumerate() {
            assert!((p.probs()[i] - e).abs() < 1e-13);
        }
    }

    #[test]
    fn beta_binomial_rejects_bad_shapes() {
        assert!(matches!(
            BetaBinomialParams::new(0.0, 1.0, 10),
            Err(Error::NonpositiveShape { .. })
        ));
        assert!(matches!(
            beta_binomial(BetaBinomialParams { a: 1.0, b: -2.0, k: 10 }),
            Err(Error::NonpositiveShape { .. })
        ));
        assert!(matches!(
            BetaBinomialParams::new(1.0, 1.0, 1),
            Err(Error::TooFewCategories { .. })
        ));
    }

    #[test]
    fn beta_binomial_large_k_is_stable() {
        let p = beta_binomial(BetaBinomialParams::new(3.0, 0.5, 200).unwrap()).unwrap();
        assert!(p.probs().iter().all(|x| x.is_finite() && *x >= 0.0));
        assert!((p.probs().iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn expected_and_cumulative() {
        let null = catalog(CatalogName::ZigzagNull).resolved;
        assert_eq!(expected_frequencies(&null, 10)[0], 2.0);
        assert!((expected_frequencies(&null, 200)[5] - 4.0).abs() < 1e-12);
        assert!(expected_frequencies(&null, 0).iter().all(|&e| e == 0.0));
        assert!((expected_frequencies(&null, 37).iter().sum::<f64>() - 37.0).abs() < 1e-9);

        assert_eq!(cumulative_probabilities(&cp(&[0.5, 0.5])), vec![0.5, 1.0]);
        let h = cumulative_probabilities(&CellProbabilities::uniform(10).unwrap());
        for (i, x) in h.iter().enumerate() {
            assert!((x - (i + 1) as f64 / 10.0).abs() < 1e-12);
        }
        assert!((cumulative_probabilities(&null)[1] - 0.25).abs() < 1e-12);
    }

    #[test]
    fn catalog_resolution() {
        let lepto = catalog(CatalogName::Leptokurtic);
        assert_eq!(
            lepto.raw,
            vec![0.05, 0.05, 0.05, 0.05, 0.30, 0.30, 0.05, 0.05, 0.05, 0.05]
        );
        assert_eq!(lepto.resolved.probs(), lepto.raw.as_slice());
        assert!(lepto.provenance_note.is_empty());

        let dec = catalog(CatalogName::Decreasing);
        assert!((dec.raw.iter().sum::<f64>() - 0.99).abs() < 1e-12);
        for (r, p) in dec.raw.iter().zip(dec.resolved.probs()) {
            assert!((r / 0.99 - p).abs() < 1e-12);
        }
        assert!(dec.provenance_note.contains("0.99"));

        let uni = catalog(CatalogName::Unimodal);
        assert!((uni.raw.iter().sum::<f64>() - 1.17).abs() < 1e-12);
        assert!(uni.provenance_note.contains("1.17"));
        let bb = beta_binomial(BetaBinomialParams::new(1.5, 1.5, 10).unwrap()).unwrap();
        assert_eq!(uni.resolved.probs(), bb.probs());

        let bath = catalog(CatalogName::Bathtub);
        assert!((bath.raw.iter().sum::<f64>() - 0.91).abs() < 1e-12);
        assert!(bath.provenance_note.contains("0.91"));

        for name in CatalogName::ALL {
            let entry = catalog(name);
            assert_eq!(entry.resolved.label(), name.as_str());
            assert!((entry.resolved.probs().iter().sum::<f64>() - 1.0).abs() < 1e-9);
            assert_eq!(name.as_str().parse::<CatalogName>().unwrap(), name);
        }
        assert!(matches!(
            "uniform".parse::<CatalogName>(),
            Err(Error::UnknownCatalogName(_))
        ));
    }
}
