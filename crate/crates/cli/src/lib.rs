//! Batch front end: analytic curves, simulations, comparisons, percentile
//! sweeps and figure data, written as CSV or JSON.

pub mod config;
pub mod error;
pub mod figures;
pub mod output;
pub mod run;

pub use config::{ExperimentConfig, Figure, Mode, OutputFormat, SweepParam, TandemKind};
pub use error::CliError;
pub use output::{read_config, Cell, Table};
pub use run::{
    execute, run_analytic, run_compare, run_reproduce, run_simulate, run_sweep, RunSummary,
};

/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "TANDEM_PAOI_OUT_DIR";
