//! Subcommand implementations. Each writes its report to `out` and returns
//! the process exit status; `main` only parses arguments.

use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use thiserror::Error;

use discretegof_core::power::{distribution_id, StreamKey, StreamRole};
use discretegof_core::{
    beta_binomial, classify_zigzag, compute, estimate_power, exact_power_oracle_with,
    run_study, simulate_distribution, BetaBinomialParams, CellProbabilities, ObservedCounts,
    OracleOptions, StatisticKind,
};

use crate::config::{DistributionSpec, OutputFormat, StudyConfig};
use crate::report::{
    curve_file_name, format_cutoff, format_significant, report_rows, write_catalog_csv, write_curve_csv,
    write_sensitivity_csv, write_study_csv, write_study_json,
};

/// Process exit statuses. The zig-zag classifier is the only command that
/// returns [`ExitStatus::Negative`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitStatus {
    Success = 0,
    Negative = 1,
    InvalidInput = 2,
    PartialFailure = 3,
    IoFailure = 4,
}

impl ExitStatus {
    pub fn code(self) -> i32 {
        self as i32
    }
}

#[derive(Debug, Error)]
pub enum CommandError {
    #[error("{0}")]
    Invalid(String),
    #[error("I/O error: {0}")]
    Io(#[from] io::Error),
}

impl CommandError {
    pub fn status(&self) -> ExitStatus {
        match self {
            CommandError::Invalid(_) => ExitStatus::InvalidInput,
            CommandError::Io(_) => ExitStatus::IoFailure,
        }
    }
}

impl From<discretegof_core::Error> for CommandError {
    fn from(e: discretegof_core::Error) -> Self {
        CommandError::Invalid(e.to_string())
    }
}

impl From<crate::config::ConfigError> for CommandError {
    fn from(e: crate::config::ConfigError) -> Self {
        CommandError::Invalid(e.to_string())
    }
}

impl From<csv::Error> for CommandError {
    fn from(e: csv::Error) -> Self {
        match e.into_kind() {
            csv::ErrorKind::Io(io) => CommandError::Io(io),
            other => CommandError::Io(io::Error::other(format!("{other:?}"))),
        }
    }
}

pub type CommandResult = Result<ExitStatus, CommandError>;

fn resolve_spec(spec: &DistributionSpec) -> Result<CellProbabilities, CommandError> {
    Ok(spec.resolve()?)
}

#[derive(Debug, Clone, Default)]
pub struct PowerOptions {
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    /// Worker threads; `None` uses the global pool. Output does not depend on
    /// this setting.
    pub threads: Option<usize>,
}

/// Runs a power study and writes `study.csv`, one `curve_<label>.csv` per
/// alternative and `sensitivity.csv` (plus `study.json` when requested).
///
/// Returns [`ExitStatus::PartialFailure`] when some grid cells failed; the
/// files are written either way.
pub fn cmd_power(config: &StudyConfig, options: &PowerOptions, out: &mut dyn Write) -> CommandResult {
    let mut plan = config.plan.clone();
    if let Some(seed) = options.seed {
        plan.seed = seed;
    }
    let dir = options.out.clone().unwrap_or_else(|| config.output.clone());
    let (null, alternatives) = config.resolve()?;

    let result = match options.threads {
        Some(threads) => rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .map_err(|e| CommandError::Invalid(e.to_string()))?
            .install(|| run_study(&plan, &null, &alternatives)),
        None => run_study(&plan, &null, &alternatives),
    }?;
    let rows = report_rows(&result);

    fs::create_dir_all(&dir)?;
    let mut written = Vec::new();
    if config.formats.contains(&OutputFormat::Csv) {
        let path = dir.join("study.csv");
        write_study_csv(&rows, create(&path)?)?;
        written.push(path);
        for alt in &alternatives {
            let path = dir.join(curve_file_name(alt.label()));
            write_curve_csv(&rows, alt.label(), create(&path)?)?;
            written.push(path);
        }
        let path = dir.join("sensitivity.csv");
        write_sensitivity_csv(&rows, create(&path)?)?;
        written.push(path);
    }
    if config.formats.contains(&OutputFormat::Json) {
        let path = dir.join("study.json");
        let mut w = create(&path)?;
        write_study_json(&rows, &mut w).map_err(io::Error::from)?;
        w.flush()?;
        written.push(path);
    }

    for path in &written {
        writeln!(out, "wrote {}", path.display())?;
    }
    let failures: Vec<_> = result.failures().collect();
    for f in &failures {
        if let Err(e) = &f.outcome {
            writeln!(
                out,
                "failed: {} {} n={}: {e}",
                f.alternative, f.statistic, f.sample_size
            )?;
        }
    }
    Ok(if failures.is_empty() {
        ExitStatus::Success
    } else {
        ExitStatus::PartialFailure
    })
}

fn create(path: &Path) -> io::Result<BufWriter<File>> {
    File::create(path).map(BufWriter::new)
}

/// Evaluates all six statistics on one set of counts, with Monte Carlo
/// p-values `P(T ≥ observed)` under the null.
pub fn cmd_stat(
    counts: &[u64],
    null: &DistributionSpec,
    replicates: usize,
    seed: u64,
    out: &mut dyn Write,
) -> CommandResult {
    let null = resolve_spec(null)?;
    let obs = ObservedCounts::new(counts.to_vec());
    if obs.k() != null.k() {
        return Err(CommandError::Invalid(format!(
            "{} counts given for a null with {} cells",
            obs.k(),
            null.k()
        )));
    }
    if obs.n() == 0 {
        return Err(CommandError::Invalid("counts sum to zero".into()));
    }
    if replicates == 0 {
        return Err(CommandError::Invalid("replicates must be positive".into()));
    }
    let key = StreamKey::new(seed, StreamRole::Null, distribution_id(null.label()));
    writeln!(out, "statistic,value,p_value")?;
    for kind in StatisticKind::ALL {
        match compute(kind, &obs, &null) {
            Ok(value) => {
                let dist = simulate_distribution(kind, &null, &null, obs.n(), replicates, key)?;
                writeln!(
                    out,
                    "{kind},{},{}",
                    format_significant(value, 12),
                    format_significant(dist.tail(value), 12)
                )?;
            }
            Err(e) => {
                writeln!(out, "{kind},,")?;
                eprintln!("{kind}: {e}");
            }
        }
    }
    Ok(ExitStatus::Success)
}

pub fn cmd_zigzag(probs: &[f64], out: &mut dyn Write) -> CommandResult {
    let cp = CellProbabilities::new(probs.to_vec(), "input")?;
    let report = classify_zigzag(&cp);
    writeln!(out, "is_zigzag={}", report.is_zigzag)?;
    writeln!(out, "pattern={}", report.pattern)?;
    match report.first_violation {
        Some(i) => writeln!(out, "first_violation={},{}", i, i + 1)?,
        None => writeln!(out, "first_violation=")?,
    }
    Ok(if report.is_zigzag {
        ExitStatus::Success
    } else {
        ExitStatus::Negative
    })
}

pub fn cmd_betabinomial(a: f64, b: f64, k: usize, out: &mut dyn Write) -> CommandResult {
    let cp = beta_binomial(BetaBinomialParams::new(a, b, k)?)?;
    writeln!(out, "cell,probability,rounded")?;
    for (i, p) in cp.probs().iter().enumerate() {
        writeln!(out, "{},{p},{p:.2}", i + 1)?;
    }
    Ok(ExitStatus::Success)
}

#[derive(Debug, Clone)]
pub struct OracleArgs {
    pub kind: StatisticKind,
    pub null: DistributionSpec,
    pub alt: DistributionSpec,
    pub n: u64,
    pub alpha: f64,
    pub cap: u64,
    /// When set, also report the Monte Carlo estimate with this many
    /// replicates.
    pub monte_carlo: Option<usize>,
    pub seed: u64,
}

pub fn cmd_oracle(args: &OracleArgs, out: &mut dyn Write) -> CommandResult {
    let null = resolve_spec(&args.null)?;
    let mut alt = resolve_spec(&args.alt)?;
    if alt.label() == null.label() && alt.probs() != null.probs() {
        alt = alt.with_label("alternative");
    }
    let options = OracleOptions { cap: args.cap };
    let exact = exact_power_oracle_with(args.kind, &null, &alt, args.n, args.alpha, options)?;
    let b = exact.bracket;
    writeln!(out, "statistic={}", args.kind)?;
    writeln!(out, "exact_power={}", exact.power)?;
    writeln!(out, "sensitivity={}", exact.sensitivity)?;
    writeln!(out, "x1={}", format_cutoff(b.x1))?;
    writeln!(out, "alpha1={}", b.alpha1)?;
    writeln!(out, "x2={}", format_cutoff(b.x2))?;
    writeln!(out, "alpha2={}", b.alpha2)?;
    writeln!(out, "exact_hit={}", b.exact_hit)?;
    writeln!(out, "power_at_x1={}", exact.power_at_x1)?;
    writeln!(out, "power_at_x2={}", exact.power_at_x2)?;
    if let Some(r) = args.monte_carlo {
        let mc = estimate_power(args.kind, &null, &alt, args.n, args.alpha, r, args.seed)?;
        let se = (mc.power * (1.0 - mc.power) / r as f64).sqrt();
        writeln!(out, "monte_carlo_power={}", mc.power)?;
        writeln!(out, "monte_carlo_standard_error={se}")?;
        writeln!(out, "monte_carlo_replicates={r}")?;
    }
    Ok(ExitStatus::Success)
}

/// Writes the catalog CSV to `dump`, or to `out` when no path is given.
pub fn cmd_catalog(dump: Option<&Path>, out: &mut dyn Write) -> CommandResult {
    match dump {
        Some(path) => {
            write_catalog_csv(create(path)?)?;
            writeln!(out, "wrote {}", path.display())?;
        }
        None => write_catalog_csv(out)?,
    }
    Ok(ExitStatus::Success)
}

#[cfg(test)]
mod tests {
    use super::*;
    use discretegof_core::CatalogName;

    fn run(f: impl FnOnce(&mut Vec<u8>) -> CommandResult) -> (ExitStatus, String) {
        let mut buf = Vec::new();
        let status = f(&mut buf).unwrap_or_else(|e| e.status());
        (status, String::from_utf8(buf).unwrap())
    }

    #[test]
    fn zigzag_exit_codes() {
        let (s, text) = run(|o| cmd_zigzag(&[0.3, 0.1, 0.3, 0.1, 0.2], o));
        assert_eq!(s, ExitStatus::Success);
        assert!(text.contains("pattern=falling-start"));

        let null = discretegof_core::catalog(CatalogName::ZigzagNull).raw;
        let (s, text) = run(|o| cmd_zigzag(&null, o));
        assert_eq!(s, ExitStatus::Negative);
        assert!(text.contains("first_violation=8,9"));

        assert_eq!(run(|o| cmd_zigzag(&[0.5, 0.5], o)).0, ExitStatus::Negative);
        assert_eq!(run(|o| cmd_zigzag(&[0.5, 0.6], o)).0, ExitStatus::InvalidInput);
    }

    #[test]
    fn betabinomial_report() {
        let (s, text) = run(|o| cmd_betabinomial(1.5, 1.5, 10, o));
        assert_eq!(s, ExitStatus::Success);
        let first = text.lines().nth(1).unwrap();
        assert!(first.starts_with("1,0.06407"), "{first}");
        assert!(first.ends_with(",0.06"));

        let (_, text) = run(|o| cmd_betabinomial(0.9, 0.9, 10, o));
        let lines: Vec<&str> = text.lines().collect();
        assert!(lines[1].ends_with(",0.11"));
        assert!(lines[10].ends_with(",0.11"));

        let (_, text) = run(|o| cmd_betabinomial(1.0, 1.0, 10, o));
        assert!(text.lines().skip(1).all(|l| l.ends_with(",0.10")));

        assert_eq!(run(|o| cmd_betabinomial(-1.0, 1.0, 10, o)).0, ExitStatus::InvalidInput);
    }

    #[test]
    fn stat_report() {
        let uniform = "uniform-3".parse().unwrap();
        let (s, text) = run(|o| cmd_stat(&[4, 1, 1], &uniform, 200, 1, o));
        assert_eq!(s, ExitStatus::Success);
        assert!(text.contains("pearson-chi-square,3,"));
        assert!(text.contains("nominal-ks,2,"));
        assert!(text.contains("ordinal-ad,1.25,"));

        let (_, text) = run(|o| cmd_stat(&[2, 2, 2], &uniform, 200, 1, o));
        for line in text.lines().skip(1) {
            assert!(line.ends_with(",0,1"), "{line}");
        }

        let half = "0.5,0.5".parse().unwrap();
        let (_, text) = run(|o| cmd_stat(&[3, 1], &half, 200, 1, o));
        assert!(text.contains("ordinal-watson,0.0625,"));

        assert_eq!(run(|o| cmd_stat(&[3, 1], &uniform, 200, 1, o)).0, ExitStatus::InvalidInput);
        assert_eq!(run(|o| cmd_stat(&[0, 0, 0], &uniform, 200, 1, o)).0, ExitStatus::InvalidInput);
    }

    #[test]
    fn oracle_report() {
        let args = OracleArgs {
            kind: StatisticKind::PearsonChiSquare,
            null: "0.5,0.5".parse().unwrap(),
            alt: "0.8,0.2".parse().unwrap(),
            n: 4,
            alpha: 0.25,
            cap: OracleOptions::DEFAULT_CAP,
            monte_carlo: Some(2000),
            seed: 5,
        };
        let (s, text) = run(|o| cmd_oracle(&args, o));
        assert_eq!(s, ExitStatus::Success);
        let power: f64 = text
            .lines()
            .find_map(|l| l.strip_prefix("exact_power="))
            .unwrap()
            .parse()
            .unwrap();
        assert!((power - 0.52).abs() < 1e-12);
        assert!(text.contains("monte_carlo_power="));

        let same = OracleArgs {
            alt: args.null.clone(),
            monte_carlo: None,
            ..args.clone()
        };
        let (_, text) = run(|o| cmd_oracle(&same, o));
        let power: f64 = text
            .lines()
            .find_map(|l| l.strip_prefix("exact_power="))
            .unwrap()
            .parse()
            .unwrap();
        assert!((power - 0.25).abs() < 1e-12);

        let huge = OracleArgs {
            null: "zigzag-null".parse().unwrap(),
            alt: "decreasing".parse().unwrap(),
            n: 500,
            ..args
        };
        assert_eq!(run(|o| cmd_oracle(&huge, o)).0, ExitStatus::InvalidInput);
    }
}
