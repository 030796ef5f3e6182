//! Experiment harness over the ordering-CSP toolkit: seeded configs,
//! deterministic CSV output, derived parameter defaults, and the
//! invariant-verification experiments behind the `ocsp` CLI.

pub mod config;
pub mod csvout;
pub mod defaults;
pub mod error;
pub mod experiments;
pub mod runner;
pub mod stats;

pub use config::ExperimentConfig;
pub use error::{HarnessError, Result};
pub use experiments::ExperimentReport;
