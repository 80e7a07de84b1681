//! Batch runner: reads a TOML run description, integrates the flow, checks the
//! requested identities and writes `trace.csv`, `report.json` and `report.txt`.

pub mod config;
pub mod csv;
pub mod run;

pub use config::{parse_config, ConfigError, RunConfig, Tolerances, Verification};
pub use run::{execute, run, write_artifacts, Report, RunError, RunOutput};
