//! Experiment harness around `dtam-core`: random instances, phase-transition sweeps,
//! the wavelet signal demo, quality metrics and theory reports.

pub mod config;
pub mod demo;
pub mod error;
pub mod experiment;
pub mod instance;
pub mod metrics;
pub mod report;

pub use error::{CliError, CliResult};
