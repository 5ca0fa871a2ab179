//! Configuration parsing and experiment drivers for the `kolmo-box` binary.

pub mod config;
pub mod experiments;
pub mod summary;

pub use config::{parse_config, ConfigError, RunConfig};
pub use experiments::{cmd_balance, cmd_bounds, cmd_decay, cmd_run, cmd_scaling, CliError};
pub use summary::{Check, VerificationSummary};
