//! Experiment runner for `spectra-cert-core`: JSON configs in, JSON/CSV
//! reports and a hashed manifest out.

// `!(x > 0.0)` is used on purpose so NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod output;
pub mod run;

pub use config::{parse_config, parse_with_overrides, ConfigError, Experiment, ExperimentConfig};
pub use output::RunManifest;
pub use run::run;

/// Exit status for a run whose numerical checks failed.
pub const EXIT_CHECK_FAILED: u8 = 1;
/// Exit status for a bad config or command line.
pub const EXIT_CONFIG: u8 = 2;

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error("config error: {0}")]
    Config(#[from] ConfigError),
    #[error("{experiment}: {op}: {source}")]
    Core {
        experiment: Experiment,
        op: &'static str,
        #[source]
        source: spectra_cert_core::Error,
    },
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("output file `{0}` does not match its recorded hash")]
    Integrity(String),
}

impl RunError {
    pub fn exit_code(&self) -> u8 {
        match self {
            RunError::Config(_) => EXIT_CONFIG,
            _ => EXIT_CHECK_FAILED,
        }
    }
}
