use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use discretegof_cli::{
    cmd_betabinomial, cmd_catalog, cmd_oracle, cmd_power, cmd_stat, cmd_zigzag, parse_config,
    CommandError, DistributionSpec, ExitStatus, OracleArgs, PowerOptions, StudyConfig,
};
use discretegof_core::{OracleOptions, SimulationPlan, StatisticKind};

#[derive(Parser)]
#[command(name = "discretegof", version, about = "Discrete goodness-of-fit statistics and Monte Carlo power studies")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a power study and write study, curve and sensitivity CSVs.
    Power {
        /// TOML study config; omitted keys take their defaults.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        /// Output directory, overriding the config's `output`.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Worker threads (results are identical for any value).
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Evaluate all six statistics on observed counts, with Monte Carlo p-values.
    Stat {
        /// Comma-separated cell counts.
        #[arg(long, value_delimiter = ',', required = true)]
        counts: Vec<u64>,
        /// Catalog name, `uniform-<k>` or comma-separated probabilities.
        #[arg(long)]
        null: DistributionSpec,
        #[arg(long, default_value_t = SimulationPlan::DEFAULT_REPLICATES)]
        replicates: usize,
        #[arg(long, default_value_t = SimulationPlan::DEFAULT_SEED)]
        seed: u64,
    },
    /// Classify a probability vector as zig-zag (exit 0) or not (exit 1).
    Zigzag {
        #[arg(long, value_delimiter = ',', required = true, allow_hyphen_values = true)]
        probs: Vec<f64>,
    },
    /// Print Beta-Binomial trend probabilities.
    Betabinomial {
        #[arg(long, allow_hyphen_values = true)]
        a: f64,
        #[arg(long, allow_hyphen_values = true)]
        b: f64,
        #[arg(long)]
        k: usize,
    },
    /// Exact interpolated power by full enumeration of the outcome space.
    Oracle {
        #[arg(long, value_parser = parse_kind)]
        kind: StatisticKind,
        #[arg(long)]
        null: DistributionSpec,
        #[arg(long)]
        alt: DistributionSpec,
        #[arg(long)]
        n: u64,
        #[arg(long)]
        alpha: f64,
        /// Largest outcome space to enumerate.
        #[arg(long, default_value_t = OracleOptions::DEFAULT_CAP)]
        cap: u64,
        /// Also print a Monte Carlo estimate with this many replicates.
        #[arg(long)]
        monte_carlo: Option<usize>,
        #[arg(long, default_value_t = SimulationPlan::DEFAULT_SEED)]
        seed: u64,
    },
    /// Dump the distribution catalog (raw and resolved rows) as CSV.
    Catalog {
        #[arg(long)]
        dump: Option<PathBuf>,
    },
}

fn parse_kind(s: &str) -> Result<StatisticKind, String> {
    s.parse().map_err(|e: discretegof_core::Error| e.to_string())
}

fn run(cli: Cli, out: &mut dyn Write) -> Result<ExitStatus, CommandError> {
    match cli.command {
        Command::Power {
            config,
            seed,
            out: dir,
            threads,
        } => {
            let config = match config {
                Some(path) => {
                    let source = fs::read_to_string(&path)
                        .map_err(|e| CommandError::Invalid(format!("{}: {e}", path.display())))?;
                    parse_config(&source)?
                }
                None => StudyConfig::default(),
            };
            let options = PowerOptions {
                seed,
                out: dir,
                threads,
            };
            cmd_power(&config, &options, out)
        }
        Command::Stat {
            counts,
            null,
            replicates,
            seed,
        } => cmd_stat(&counts, &null, replicates, seed, out),
        Command::Zigzag { probs } => cmd_zigzag(&probs, out),
        Command::Betabinomial { a, b, k } => cmd_betabinomial(a, b, k, out),
        Command::Oracle {
            kind,
            null,
            alt,
            n,
            alpha,
            cap,
            monte_carlo,
            seed,
        } => cmd_oracle(
            &OracleArgs {
                kind,
                null,
                alt,
                n,
                alpha,
                cap,
                monte_carlo,
                seed,
            },
            out,
        ),
        Command::Catalog { dump } => cmd_catalog(dump.as_deref(), out),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            let code = if e.use_stderr() { ExitStatus::InvalidInput.code() } else { 0 };
            return ExitCode::from(code as u8);
        }
    };
    let stdout = io::stdout();
    let mut out = stdout.lock();
    let status = match run(cli, &mut out) {
        Ok(status) => status,
        Err(e) => {
            eprintln!("error: {e}");
            e.status()
        }
    };
    let _ = out.flush();
    ExitCode::from(status.code() as u8)
}
