use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("probability {value} at cell {index} is outside [0, 1]")]
    NegativeOrOversizedProbability { index: usize, value: f64 },

    #[error("cell probabilities sum to {sum}, expected 1")]
    SumNotOne { sum: f64 },

    #[error("need at least 2 categories, got {k}")]
    TooFewCategories { k: usize },

    #[error("Beta-Binomial shape parameters must be positive and finite (a = {a}, b = {b})")]
    NonpositiveShape { a: f64, b: f64 },

    #[error("unknown catalog distribution `{0}`")]
    UnknownCatalogName(String),

    #[error("dimension mismatch: expected {expected} cells, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("cell {index} has zero null probability, the statistic is undefined")]
    ZeroExpectedCell { index: usize },

    #[error("sample size is zero, the statistic is undefined")]
    EmptySample,

    #[error("cumulative null probability at interior cell {index} is 0 or 1")]
    InteriorDegenerateH { index: usize },

    #[error("empirical distribution has no values")]
    EmptyDistribution,

    #[error("bracket levels coincide ({alpha1}) without an exact hit")]
    DegenerateBracket { alpha1: f64 },

    #[error("outcome space has {size} outcomes, above the cap of {cap}")]
    OutcomeSpaceTooLarge { size: f64, cap: u64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}
