use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use tandem_paoi_cli::{
    execute, read_config, CliError, ExperimentConfig, Figure, Mode, OutputFormat, SweepParam,
    TandemKind,
};

/// Peak age of information for M/M/1 -> M/D/1 and M/M/1 -> M/M/1 tandems.
///
/// Exit status: 0 on success (compare: all checks pass), 1 when a compare
/// check fails, 2 on configuration or I/O errors.
#[derive(Debug, Parser)]
#[command(version, about)]
struct Args {
    #[arg(long, value_enum, default_value = "analytic")]
    mode: Mode,
    #[arg(long, value_enum, default_value = "md1")]
    tandem: TandemKind,
    #[arg(long, default_value_t = 0.5)]
    lambda: f64,
    #[arg(long, default_value_t = 1.0)]
    mu1: f64,
    /// Service rate of an exponential second node.
    #[arg(long, default_value_t = 1.25)]
    mu2: f64,
    /// Service time of a deterministic second node.
    #[arg(long, default_value_t = 0.8)]
    service_d: f64,
    /// Packets generated, warm-up included.
    #[arg(long, default_value_t = 10_000_000)]
    packets: u64,
    #[arg(long, default_value_t = 1000)]
    warmup: u64,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long, default_value_t = 0.0)]
    tau_min: f64,
    #[arg(long, default_value_t = 30.0)]
    tau_max: f64,
    #[arg(long, default_value_t = 301)]
    tau_points: usize,
    #[arg(long, value_enum, default_value = "lambda")]
    sweep_param: SweepParam,
    /// Comma-separated; defaults to 0.05, 0.10, ..., 0.95.
    #[arg(long, value_delimiter = ',')]
    sweep_values: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_value = "0.95,0.99,0.999")]
    percentiles: Vec<f64>,
    /// Output file, or directory for reproduce mode. Defaults to a name
    /// derived from mode and tandem inside $TANDEM_PAOI_OUT_DIR (or `.`).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    format: OutputFormat,
    /// fig4 .. fig10, for reproduce mode.
    #[arg(long)]
    figure: Option<String>,
    /// Simulate with this arrival rate instead of --lambda.
    #[arg(long)]
    sim_lambda: Option<f64>,
    /// Also dump every simulated packet record to this CSV file.
    #[arg(long)]
    raw_out: Option<PathBuf>,
    /// Rerun the configuration embedded in an earlier output file.
    #[arg(long)]
    replay: Option<PathBuf>,
}

fn config_from(args: Args) -> Result<ExperimentConfig, CliError> {
    if let Some(path) = &args.replay {
        let mut config = read_config(path)?;
        config.out = Some(args.out.unwrap_or_else(|| path.clone()));
        config.raw_out = args.raw_out;
        return Ok(config);
    }
    let defaults = ExperimentConfig::default();
    let figure = args.figure.as_deref().map(Figure::parse).transpose()?;
    Ok(ExperimentConfig {
        mode: args.mode,
        tandem: args.tandem,
        lambda: args.lambda,
        mu1: args.mu1,
        mu2: args.mu2,
        service_d: args.service_d,
        packets: args.packets,
        warmup: args.warmup,
        seed: args.seed,
        tau_min: args.tau_min,
        tau_max: args.tau_max,
        tau_points: args.tau_points,
        sweep_param: args.sweep_param,
        sweep_values: if args.sweep_values.is_empty() {
            defaults.sweep_values
        } else {
            args.sweep_values
        },
        percentiles: args.percentiles,
        format: args.format,
        figure,
        sim_lambda: args.sim_lambda,
        label: None,
        out: args.out,
        raw_out: args.raw_out,
    })
}

fn main() -> ExitCode {
    let args = Args::parse();
    let result = config_from(args).and_then(|c| execute(&c));
    match result {
        Ok(summary) => {
            for f in &summary.files {
                println!("{}", f.display());
            }
            if summary.passed {
                ExitCode::SUCCESS
            } else {
                eprintln!("one or more checks failed");
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
