//! Study configuration files.
//!
//! A config is a TOML document. Every key is optional; an empty file is the
//! default study (zig-zag null against the seven catalog alternatives).
//!
//! ```toml
//! replicates = 10000
//! alpha = 0.01
//! sample_sizes = [10, 20, 30, 50, 100, 200]
//! seed = 1
//! statistics = ["pearson-chi-square", "discrete-ks"]
//! null = "zigzag-null"
//! alternatives = ["decreasing", { label = "spike", probs = [0.5, 0.5, 0, 0, 0, 0, 0, 0, 0, 0] }]
//! output = "results"
//! formats = ["csv", "json"]
//! ```
//!
//! `seed` may also be given as a decimal string, for values above
//! `i64::MAX`.

use std::collections::HashSet;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use discretegof_core::{catalog, CatalogName, CellProbabilities, SimulationPlan, StatisticKind};

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("unknown distribution name `{0}`")]
    UnknownDistributionName(String),
    #[error("distribution `{label}` has {found} cells, expected {expected}")]
    DimensionMismatch {
        label: String,
        expected: usize,
        found: usize,
    },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
}

/// A distribution named in a config: a catalog entry or an inline vector.
#[derive(Debug, Clone, PartialEq)]
pub enum DistributionSpec {
    Catalog(CatalogName),
    Explicit { label: String, probs: Vec<f64> },
}

impl DistributionSpec {
    pub fn label(&self) -> &str {
        match self {
            DistributionSpec::Catalog(name) => name.as_str(),
            DistributionSpec::Explicit { label, .. } => label,
        }
    }

    pub fn resolve(&self) -> Result<CellProbabilities, ConfigError> {
        match self {
            DistributionSpec::Catalog(name) => Ok(catalog(*name).resolved),
            DistributionSpec::Explicit { label, probs } => {
                CellProbabilities::new(probs.clone(), label.as_str())
                    .map_err(|e| ConfigError::InvalidParameter(format!("distribution `{label}`: {e}")))
            }
        }
    }
}

impl fmt::Display for DistributionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Parses a command-line distribution argument: a catalog name,
/// `uniform-<k>`, or comma-separated probabilities.
impl FromStr for DistributionSpec {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, ConfigError> {
        let s = s.trim();
        if let Ok(name) = s.parse::<CatalogName>() {
            return Ok(DistributionSpec::Catalog(name));
        }
        if let Some(k) = s.strip_prefix("uniform-").and_then(|k| k.parse::<usize>().ok()) {
            if k < 2 {
                return Err(ConfigError::InvalidParameter(format!("`{s}` needs k >= 2")));
            }
            return Ok(DistributionSpec::Explicit {
                label: s.to_string(),
                probs: vec![1.0 / k as f64; k],
            });
        }
        if s.contains(',') || s.parse::<f64>().is_ok() {
            let probs = s
                .split(',')
                .map(|x| x.trim().parse::<f64>())
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| ConfigError::InvalidParameter(format!("`{s}`: {e}")))?;
            return Ok(DistributionSpec::Explicit {
                label: "custom".to_string(),
                probs,
            });
        }
        Err(ConfigError::UnknownDistributionName(s.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StudyConfig {
    pub plan: SimulationPlan,
    pub null: DistributionSpec,
    pub alternatives: Vec<DistributionSpec>,
    pub output: PathBuf,
    pub formats: Vec<OutputFormat>,
}

impl Default for StudyConfig {
    fn default() -> Self {
        Self {
            plan: SimulationPlan::default(),
            null: DistributionSpec::Catalog(CatalogName::ZigzagNull),
            alternatives: CatalogName::ALTERNATIVES
                .into_iter()
                .map(DistributionSpec::Catalog)
                .collect(),
            output: PathBuf::from(DEFAULT_OUTPUT),
            formats: vec![OutputFormat::Csv],
        }
    }
}

pub const DEFAULT_OUTPUT: &str = "results";

impl StudyConfig {
    /// Resolves the null and alternatives, checking that they share `k`.
    pub fn resolve(&self) -> Result<(CellProbabilities, Vec<CellProbabilities>), ConfigError> {
        let null = self.null.resolve()?;
        let mut alternatives = Vec::with_capacity(self.alternatives.len());
        for spec in &self.alternatives {
            let alt = spec.resolve()?;
            if alt.k() != null.k() {
                return Err(ConfigError::DimensionMismatch {
                    label: alt.label().to_string(),
                    expected: null.k(),
                    found: alt.k(),
                });
            }
            alternatives.push(alt);
        }
        Ok((null, alternatives))
    }

    fn validate(&self) -> Result<(), ConfigError> {
        self.plan
            .validate()
            .map_err(|e| ConfigError::InvalidParameter(e.to_string()))?;
        if self.alternatives.is_empty() {
            return Err(ConfigError::InvalidParameter("no alternatives".into()));
        }
        let mut labels = HashSet::new();
        for spec in &self.alternatives {
            if !labels.insert(spec.label()) {
                return Err(ConfigError::InvalidParameter(format!(
                    "duplicate alternative label `{}`",
                    spec.label()
                )));
            }
        }
        if self.formats.is_empty() {
            return Err(ConfigError::InvalidParameter("no output formats".into()));
        }
        self.resolve().map(|_| ())
    }

    /// Emits the config with every key spelled out. Parsing the result gives
    /// back an identical config.
    pub fn to_canonical(&self) -> String {
        let raw = RawConfig {
            replicates: Some(self.plan.replicates as i64),
            alpha: Some(self.plan.alpha),
            sample_sizes: Some(self.plan.sample_sizes.iter().map(|&n| n as i64).collect()),
            seed: Some(if self.plan.seed <= i64::MAX as u64 {
                RawSeed::Int(self.plan.seed as i64)
            } else {
                RawSeed::Text(self.plan.seed.to_string())
            }),
            statistics: Some(self.plan.statistics.iter().map(|k| k.as_str().to_string()).collect()),
            null: Some(RawDistribution::from(&self.null)),
            alternatives: Some(self.alternatives.iter().map(RawDistribution::from).collect()),
            output: Some(self.output.to_string_lossy().into_owned()),
            formats: Some(self.formats.clone()),
        };
        toml::to_string(&raw).expect("config always serialises")
    }
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    replicates: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    alpha: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    sample_sizes: Option<Vec<i64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    seed: Option<RawSeed>,
    #[serde(skip_serializing_if = "Option::is_none")]
    statistics: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    null: Option<RawDistribution>,
    #[serde(skip_serializing_if = "Option::is_none")]
    alternatives: Option<Vec<RawDistribution>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    output: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    formats: Option<Vec<OutputFormat>>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(untagged)]
enum RawSeed {
    Int(i64),
    Text(String),
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(untagged)]
enum RawDistribution {
    Name(String),
    Bare(Vec<f64>),
    Explicit {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        label: Option<String>,
        probs: Vec<f64>,
    },
}

impl From<&DistributionSpec> for RawDistribution {
    fn from(spec: &DistributionSpec) -> Self {
        match spec {
            DistributionSpec::Catalog(name) => RawDistribution::Name(name.as_str().to_string()),
            DistributionSpec::Explicit { label, probs } => RawDistribution::Explicit {
                label: Some(label.clone()),
                probs: probs.clone(),
            },
        }
    }
}

fn to_spec(raw: RawDistribution, default_label: String) -> Result<DistributionSpec, ConfigError> {
    match raw {
        RawDistribution::Name(name) => name
            .parse::<CatalogName>()
            .map(DistributionSpec::Catalog)
            .map_err(|_| ConfigError::UnknownDistributionName(name)),
        RawDistribution::Bare(probs) => Ok(DistributionSpec::Explicit {
            label: default_label,
            probs,
        }),
        RawDistribution::Explicit { label, probs } => Ok(DistributionSpec::Explicit {
            label: label.unwrap_or(default_label),
            probs,
        }),
    }
}

fn non_negative(name: &str, value: i64) -> Result<u64, ConfigError> {
    u64::try_from(value)
        .map_err(|_| ConfigError::InvalidParameter(format!("{name} must be non-negative, got {value}")))
}

fn line_column(source: &str, offset: usize) -> (usize, usize) {
    let before = &source[..offset.min(source.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    (line, column)
}

/// Parses and validates a study config, filling defaults for absent keys.
pub fn parse_config(source: &str) -> Result<StudyConfig, ConfigError> {
    let raw: RawConfig = toml::from_str(source).map_err(|e| {
        let (line, column) = e
            .span()
            .map_or((1, 1), |span| line_column(source, span.start));
        ConfigError::Syntax {
            line,
            column,
            message: e.message().to_string(),
        }
    })?;

    let mut config = StudyConfig::default();
    if let Some(r) = raw.replicates {
        config.plan.replicates = non_negative("replicates", r)? as usize;
    }
    if let Some(alpha) = raw.alpha {
        config.plan.alpha = alpha;
    }
    if let Some(sizes) = raw.sample_sizes {
        config.plan.sample_sizes = sizes
            .into_iter()
            .map(|n| non_negative("sample size", n))
            .collect::<Result<_, _>>()?;
    }
    if let Some(seed) = raw.seed {
        config.plan.seed = match seed {
            RawSeed::Int(s) => non_negative("seed", s)?,
            RawSeed::Text(s) => s
                .parse()
                .map_err(|_| ConfigError::InvalidParameter(format!("seed `{s}` is not a u64")))?,
        };
    }
    if let Some(stats) = raw.statistics {
        config.plan.statistics = stats
            .iter()
            .map(|s| {
                s.parse::<StatisticKind>()
                    .map_err(|e| ConfigError::InvalidParameter(e.to_string()))
            })
            .collect::<Result<_, _>>()?;
    }
    if let Some(null) = raw.null {
        config.null = to_spec(null, "custom-null".to_string())?;
    }
    if let Some(alts) = raw.alternatives {
        config.alternatives = alts
            .into_iter()
            .enumerate()
            .map(|(i, raw)| to_spec(raw, format!("custom-{}", i + 1)))
            .collect::<Result<_, _>>()?;
    }
    if let Some(output) = raw.output {
        config.output = PathBuf::from(output);
    }
    if let Some(formats) = raw.formats {
        let mut seen = HashSet::new();
        config.formats = formats.into_iter().filter(|f| seen.insert(*f)).collect();
    }
    config.validate()?;
    Ok(config)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_config_is_the_default_study() {
        let c = parse_config("").unwrap();
        assert_eq!(c, StudyConfig::default());
        assert_eq!(c.plan.replicates, 10_000);
        assert_eq!(c.plan.alpha, 0.01);
        assert_eq!(c.plan.sample_sizes, vec![10, 20, 30, 50, 100, 200]);
        assert_eq!(c.plan.statistics.len(), 6);
        assert_eq!(c.null.label(), "zigzag-null");
        assert_eq!(c.alternatives.len(), 7);
    }

    #[test]
    fn statistic_subset() {
        let c = parse_config(r#"statistics = ["discrete-ks"]"#).unwrap();
        assert_eq!(c.plan.statistics, vec![StatisticKind::DiscreteKs]);
    }

    #[test]
    fn invalid_parameters() {
        for src in [
            "alpha = 1.5",
            "alpha = 0.0",
            "replicates = 99",
            "replicates = -5",
            "sample_sizes = [0]",
            r#"statistics = ["ks"]"#,
            "alternatives = []",
            r#"formats = []"#,
            r#"alternatives = ["decreasing", "decreasing"]"#,
            r#"null = { probs = [0.6, 0.6] }"#,
        ] {
            assert!(
                matches!(parse_config(src), Err(ConfigError::InvalidParameter(_))),
                "{src}: {:?}",
                parse_config(src)
            );
        }
    }

    #[test]
    fn syntax_errors_carry_position() {
        let err = parse_config("alpha = 0.01\nreplicates = = 3\n").unwrap_err();
        match err {
            ConfigError::Syntax { line, .. } => assert_eq!(line, 2),
            other => panic!("{other:?}"),
        }
        assert!(matches!(
            parse_config("colour = \"blue\""),
            Err(ConfigError::Syntax { line: 1, .. })
        ));
    }

    #[test]
    fn unknown_names_and_dimensions() {
        assert_eq!(
            parse_config(r#"null = "uniform""#),
            Err(ConfigError::UnknownDistributionName("uniform".into()))
        );
        assert!(matches!(
            parse_config(r#"alternatives = [{ label = "three", probs = [0.2, 0.3, 0.5] }]"#),
            Err(ConfigError::DimensionMismatch { expected: 10, found: 3, .. })
        ));
    }

    #[test]
    fn explicit_distributions() {
        let c = parse_config(
            r#"
            null = [0.25, 0.25, 0.25, 0.25]
            alternatives = [{ label = "tilt", probs = [0.4, 0.3, 0.2, 0.1] }, { probs = [0.1, 0.2, 0.3, 0.4] }]
            "#,
        )
        .unwrap();
        assert_eq!(c.null.label(), "custom-null");
        assert_eq!(c.alternatives[0].label(), "tilt");
        assert_eq!(c.alternatives[1].label(), "custom-2");
        let (null, alts) = c.resolve().unwrap();
        assert_eq!(null.k(), 4);
        assert_eq!(parse_config(&c.to_canonical()).unwrap(), c);
        assert!(matches!(
            parse_config(r#"null = { label = "x" }"#),
            Err(ConfigError::Syntax { .. })
        ));
        assert_eq!(alts[1].probs(), &[0.1, 0.2, 0.3, 0.4]);
    }

    #[test]
    fn canonical_round_trip_of_default_and_large_seed() {
        let mut c = StudyConfig::default();
        assert_eq!(parse_config(&c.to_canonical()).unwrap(), c);
        c.plan.seed = u64::MAX;
        c.formats = vec![OutputFormat::Json, OutputFormat::Csv];
        assert_eq!(parse_config(&c.to_canonical()).unwrap(), c);
    }

    #[test]
    fn command_line_distribution_arguments() {
        assert_eq!(
            "bathtub".parse::<DistributionSpec>().unwrap(),
            DistributionSpec::Catalog(CatalogName::Bathtub)
        );
        let u = "uniform-3".parse::<DistributionSpec>().unwrap();
        assert_eq!(u.resolve().unwrap().k(), 3);
        let e = "0.5, 0.5".parse::<DistributionSpec>().unwrap();
        assert_eq!(e.resolve().unwrap().probs(), &[0.5, 0.5]);
        assert!(matches!(
            "nope".parse::<DistributionSpec>(),
            Err(ConfigError::UnknownDistributionName(_))
        ));
        assert!("0.5,x".parse::<DistributionSpec>().is_err());
    }
}
