use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::Serialize;
use spectra_cert::config::ConfigError;
use spectra_cert::{parse_with_overrides, run, ExperimentConfig, EXIT_CHECK_FAILED, EXIT_CONFIG};
use spectra_cert_core::conditions::{thresholds, Thresholds};
use spectra_cert_core::potential::CATALOG_NAMES;

#[derive(Parser)]
#[command(
    name = "spectra-cert",
    version,
    about = "Spectral stability experiments for complex Schrödinger operators"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment and write its reports.
    Run {
        config: PathBuf,
        /// Override a config field, e.g. `--set potential.params.a=0.3`.
        #[arg(long = "set", value_name = "KEY=VALUE")]
        set: Vec<String>,
    },
    /// Parse and validate a config; prints it with defaults filled in.
    Validate {
        config: PathBuf,
        #[arg(long = "set", value_name = "KEY=VALUE")]
        set: Vec<String>,
    },
    /// List the potential catalog and the hypothesis thresholds.
    Catalog {
        #[arg(long, default_value_t = 3)]
        dim: usize,
    },
}

fn load(path: &Path, set: &[String]) -> Result<ExperimentConfig, ConfigError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| ConfigError::new("config", format!("{}: {e}", path.display())))?;
    parse_with_overrides(&text, set)
}

/// Caps the rayon pool from `SPECTRA_CERT_THREADS`.
fn init_threads() -> Result<(), ConfigError> {
    let Ok(raw) = std::env::var("SPECTRA_CERT_THREADS") else {
        return Ok(());
    };
    let n: usize = raw.trim().parse().ok().filter(|n| *n > 0).ok_or_else(|| {
        ConfigError::new(
            "SPECTRA_CERT_THREADS",
            format!("expected a positive integer, got `{raw}`"),
        )
    })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| ConfigError::new("SPECTRA_CERT_THREADS", e.to_string()))
}

#[derive(Serialize)]
struct CatalogEntry {
    name: &'static str,
    params: &'static [&'static str],
}

#[derive(Serialize)]
struct CatalogListing {
    dimension: usize,
    potentials: Vec<CatalogEntry>,
    thresholds: Thresholds,
}

fn params_of(name: &str) -> &'static [&'static str] {
    match name {
        "hardy" => &["a"],
        "coulomb_repulsive" => &["c"],
        "imaginary_hardy" => &["beta"],
        "gaussian" => &["v0", "c_im"],
        "yukawa" => &["g", "mu"],
        "square_well" => &["v0", "r0"],
        _ => &[],
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    if let Err(e) = init_threads() {
        eprintln!("error: {e}");
        return ExitCode::from(EXIT_CONFIG);
    }
    match cli.command {
        Command::Validate { config, set } => match load(&config, &set) {
            Ok(cfg) => {
                println!(
                    "{}",
                    serde_json::to_string_pretty(&cfg).expect("config serializes")
                );
                ExitCode::SUCCESS
            }
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::from(EXIT_CONFIG)
            }
        },
        Command::Run { config, set } => {
            let cfg = match load(&config, &set) {
                Ok(c) => c,
                Err(e) => {
                    eprintln!("error: {e}");
                    return ExitCode::from(EXIT_CONFIG);
                }
            };
            match run(&cfg) {
                Ok(m) => {
                    for c in &m.checks {
                        let mark = if c.passed { "ok  " } else { "FAIL" };
                        println!("{mark} {}: {}", c.name, c.detail);
                    }
                    println!(
                        "wrote {} file(s) to {}",
                        m.files.len() + 1,
                        cfg.output.path.display()
                    );
                    if m.passed {
                        ExitCode::SUCCESS
                    } else {
                        ExitCode::from(EXIT_CHECK_FAILED)
                    }
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(e.exit_code())
                }
            }
        }
        Command::Catalog { dim } => match thresholds(dim) {
            Ok(t) => {
                let listing = CatalogListing {
                    dimension: dim,
                    potentials: CATALOG_NAMES
                        .iter()
                        .map(|n| CatalogEntry {
                            name: n,
                            params: params_of(n),
                        })
                        .collect(),
                    thresholds: t,
                };
                println!(
                    "{}",
                    serde_json::to_string_pretty(&listing).expect("listing serializes")
                );
                ExitCode::SUCCESS
            }
            Err(e) => {
                eprintln!("error: --dim: {e}");
                ExitCode::from(EXIT_CONFIG)
            }
        },
    }
}
