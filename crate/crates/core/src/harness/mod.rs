//! Configured experiments behind the `sbe` command line tool.

pub mod checks;
pub mod config;
pub mod run;

pub use checks::{checks_csv, checks_report, Check};
pub use config::{DriftKind, ExperimentConfig, Mode};
pub use run::{exit_code, run, Outcome};
