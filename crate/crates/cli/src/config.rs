use std::path::PathBuf;

use clap::ValueEnum;
use serde::{Deserialize, Serialize};
use tandem_paoi::{ServerSpec, TandemParams};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Analytic,
    Simulate,
    Compare,
    Sweep,
    Reproduce,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum TandemKind {
    Md1,
    Mm1,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum OutputFormat {
    Csv,
    Json,
}

impl OutputFormat {
    pub fn extension(self) -> &'static str {
        match self {
            OutputFormat::Csv => "csv",
            OutputFormat::Json => "json",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum SweepParam {
    Lambda,
    ServiceD,
    Mu2,
}

impl SweepParam {
    pub fn column(self) -> &'static str {
        match self {
            SweepParam::Lambda => "lambda",
            SweepParam::ServiceD => "service_d",
            SweepParam::Mu2 => "mu2",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Figure {
    Fig4,
    Fig5,
    Fig6,
    Fig7,
    Fig8,
    Fig9,
    Fig10,
}

impl Figure {
    pub fn id(self) -> &'static str {
        match self {
            Figure::Fig4 => "fig4",
            Figure::Fig5 => "fig5",
            Figure::Fig6 => "fig6",
            Figure::Fig7 => "fig7",
            Figure::Fig8 => "fig8",
            Figure::Fig9 => "fig9",
            Figure::Fig10 => "fig10",
        }
    }

    pub fn parse(id: &str) -> Result<Self, CliError> {
        Figure::from_str(id, true).map_err(|_| CliError::UnknownFigure(id.to_string()))
    }
}

/// Everything one run needs. Serialized verbatim into every output file;
/// output locations are not part of it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub mode: Mode,
    pub tandem: TandemKind,
    pub lambda: f64,
    pub mu1: f64,
    pub mu2: f64,
    pub service_d: f64,
    pub packets: u64,
    pub warmup: u64,
    pub seed: u64,
    pub tau_min: f64,
    pub tau_max: f64,
    pub tau_points: usize,
    pub sweep_param: SweepParam,
    pub sweep_values: Vec<f64>,
    pub percentiles: Vec<f64>,
    pub format: OutputFormat,
    pub figure: Option<Figure>,
    /// Arrival rate fed to the simulator when it should differ from the
    /// analytic one.
    pub sim_lambda: Option<f64>,
    /// Free-text note carried into the file header.
    pub label: Option<String>,
    #[serde(skip)]
    pub out: Option<PathBuf>,
    #[serde(skip)]
    pub raw_out: Option<PathBuf>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            mode: Mode::Analytic,
            tandem: TandemKind::Md1,
            lambda: 0.5,
            mu1: 1.0,
            mu2: 1.25,
            service_d: 0.8,
            packets: 10_000_000,
            warmup: 1000,
            seed: 42,
            tau_min: 0.0,
            tau_max: 30.0,
            tau_points: 301,
            sweep_param: SweepParam::Lambda,
            sweep_values: (1..=19)
                .map(|i| (i as f64 * 0.05 * 100.0).round() / 100.0)
                .collect(),
            percentiles: vec![0.95, 0.99, 0.999],
            format: OutputFormat::Csv,
            figure: None,
            sim_lambda: None,
            label: None,
            out: None,
            raw_out: None,
        }
    }
}

fn invalid(field: &'static str, message: impl Into<String>) -> CliError {
    CliError::InvalidConfig {
        field,
        message: message.into(),
    }
}

fn positive(field: &'static str, v: f64) -> Result<(), CliError> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(invalid(
            field,
            format!("must be a positive finite number, got {v}"),
        ))
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<(), CliError> {
        positive("lambda", self.lambda)?;
        positive("mu1", self.mu1)?;
        positive("mu2", self.mu2)?;
        positive("service-d", self.service_d)?;
        if let Some(l) = self.sim_lambda {
            positive("sim-lambda", l)?;
        }
        if self.tau_points < 2 {
            return Err(invalid("tau-points", "need at least 2 grid points"));
        }
        if !(self.tau_min.is_finite() && self.tau_max.is_finite() && self.tau_max > self.tau_min) {
            return Err(invalid("tau-max", "must exceed tau-min"));
        }
        if self.mode == Mode::Sweep {
            if self.sweep_values.is_empty() {
                return Err(invalid("sweep-values", "must not be empty"));
            }
            for &v in &self.sweep_values {
                positive("sweep-values", v)?;
            }
        }
        if self.percentiles.is_empty() {
            return Err(invalid("percentiles", "must not be empty"));
        }
        for &p in &self.percentiles {
            if !(p > 0.0 && p < 1.0) {
                return Err(invalid("percentiles", format!("{p} is outside (0, 1)")));
            }
        }
        if matches!(self.mode, Mode::Simulate | Mode::Compare) && self.packets <= self.warmup {
            return Err(invalid("packets", "must exceed warmup"));
        }
        if self.mode == Mode::Reproduce && self.figure.is_none() {
            return Err(invalid("figure", "reproduce mode needs a figure id"));
        }
        Ok(())
    }

    pub fn second_server(&self) -> ServerSpec {
        match self.tandem {
            TandemKind::Md1 => ServerSpec::Deterministic(self.service_d),
            TandemKind::Mm1 => ServerSpec::Exponential(self.mu2),
        }
    }

    /// Parameters for the analytic side; must be stable.
    pub fn params(&self) -> Result<TandemParams, CliError> {
        Ok(TandemParams::new(
            self.lambda,
            self.mu1,
            self.second_server(),
        )?)
    }

    /// Parameters for the simulator; unstable ones are allowed.
    pub fn sim_params(&self) -> Result<TandemParams, CliError> {
        let lambda = self.sim_lambda.unwrap_or(self.lambda);
        Ok(TandemParams::allow_unstable(
            lambda,
            self.mu1,
            self.second_server(),
        )?)
    }

    pub fn tau_grid(&self) -> Vec<f64> {
        let n = self.tau_points;
        (0..n)
            .map(|i| self.tau_min + (self.tau_max - self.tau_min) * i as f64 / (n - 1) as f64)
            .collect()
    }

    /// Copy with one sweep coordinate replaced.
    pub fn with_sweep_value(&self, value: f64) -> Self {
        let mut c = self.clone();
        match self.sweep_param {
            SweepParam::Lambda => c.lambda = value,
            SweepParam::ServiceD => c.service_d = value,
            SweepParam::Mu2 => c.mu2 = value,
        }
        c
    }
}
