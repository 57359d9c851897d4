//! Configuration, reports and subcommands for the `discretegof` binary.

pub mod commands;
pub mod config;
pub mod report;

pub use commands::{
    cmd_betabinomial, cmd_catalog, cmd_oracle, cmd_power, cmd_stat, cmd_zigzag, CommandError,
    ExitStatus, OracleArgs, PowerOptions,
};
pub use config::{parse_config, ConfigError, DistributionSpec, OutputFormat, StudyConfig};
pub use report::{ReportRow, STUDY_HEADER};
