//! Parameter sets behind each reproducible figure.
//!
//! Defaults follow the main parameter table (λ = 0.5, μ₁ = 1, μ₂ = 1.25,
//! D = 0.8). Where a figure's parameters are only implied by the text,
//! the choice is stated in the sub-run label.

use crate::config::{ExperimentConfig, Figure, Mode, SweepParam, TandemKind};

type Plan = Vec<(String, ExperimentConfig)>;

fn lambda_grid() -> Vec<f64> {
    (1..=19).map(|i| (i as f64 * 5.0).round() / 100.0).collect()
}

fn sub(
    base: &ExperimentConfig,
    figure: Figure,
    mode: Mode,
    tandem: TandemKind,
) -> ExperimentConfig {
    let mut c = base.clone();
    c.mode = mode;
    c.tandem = tandem;
    c.figure = Some(figure);
    c.out = None;
    c.raw_out = None;
    c.sim_lambda = None;
    c.label = None;
    c
}

/// Analytic and simulated curve files for one parameter set.
fn curve_pair(plan: &mut Plan, stem: &str, cfg: ExperimentConfig) {
    let mut analytic = cfg.clone();
    analytic.mode = Mode::Analytic;
    let mut simulated = cfg;
    simulated.mode = Mode::Simulate;
    plan.push((format!("{stem}_analytic"), analytic));
    plan.push((format!("{stem}_simulated"), simulated));
}

fn labelled(mut c: ExperimentConfig, label: &str) -> ExperimentConfig {
    c.label = Some(label.to_string());
    c
}

fn fmt(x: f64) -> String {
    x.to_string()
}

pub fn plan(figure: Figure, base: &ExperimentConfig) -> Plan {
    let mut base = base.clone();
    base.lambda = 0.5;
    base.mu1 = 1.0;
    base.mu2 = 1.25;
    base.service_d = 0.8;
    let mut plan = Plan::new();
    let md1 = |mode| sub(&base, figure, mode, TandemKind::Md1);
    let mm1 = |mode| sub(&base, figure, mode, TandemKind::Mm1);
    match figure {
        Figure::Fig4 => curve_pair(
            &mut plan,
            "md1_cases",
            labelled(md1(Mode::Analytic), "M/M/1 -> M/D/1 case-conditional CDFs"),
        ),
        Figure::Fig5 => {
            for l in [0.25, 0.5, 0.75] {
                let mut c = md1(Mode::Analytic);
                c.lambda = l;
                curve_pair(
                    &mut plan,
                    &format!("md1_lambda_{}", fmt(l)),
                    labelled(c, "lambda variation"),
                );
            }
            // second node faster vs. the same rates flipped
            for (mu1, d) in [(1.0, 0.8), (1.25, 1.0), (1.0, 0.625), (1.6, 1.0)] {
                let mut c = md1(Mode::Analytic);
                c.mu1 = mu1;
                c.service_d = d;
                let label = "rate-swap pair; rates {1, 1.25} and {1, 1.6} inferred from the text";
                curve_pair(
                    &mut plan,
                    &format!("md1_mu1_{}_d_{}", fmt(mu1), fmt(d)),
                    labelled(c, label),
                );
            }
        }
        Figure::Fig6 => curve_pair(
            &mut plan,
            "mm1_cases",
            labelled(mm1(Mode::Analytic), "M/M/1 -> M/M/1 case-conditional CDFs"),
        ),
        Figure::Fig7 => {
            for l in [0.25, 0.5, 0.75] {
                let mut c = mm1(Mode::Analytic);
                c.lambda = l;
                curve_pair(
                    &mut plan,
                    &format!("mm1_lambda_{}", fmt(l)),
                    labelled(c, "lambda variation"),
                );
            }
            for (mu1, mu2) in [(1.0, 1.2), (1.2, 1.0), (1.0, 1.6), (1.6, 1.0)] {
                let mut c = mm1(Mode::Analytic);
                c.mu1 = mu1;
                c.mu2 = mu2;
                let label = "rate-swap pair; second-node rates 1.2 and 1.6 from the text";
                curve_pair(
                    &mut plan,
                    &format!("mm1_mu1_{}_mu2_{}", fmt(mu1), fmt(mu2)),
                    labelled(c, label),
                );
            }
        }
        Figure::Fig8 => {
            let mut a = md1(Mode::Sweep);
            a.sweep_values = lambda_grid();
            plan.push(("md1_percentiles_vs_lambda".into(), labelled(a, "D = 0.8")));
            let mut b = md1(Mode::Sweep);
            b.sweep_param = SweepParam::ServiceD;
            b.sweep_values = (1..=15).map(|i| i as f64 / 10.0).collect();
            plan.push((
                "md1_percentiles_vs_d".into(),
                labelled(b, "lambda = 0.5, the p99-optimal rate for D = 0.8"),
            ));
            let mut c = mm1(Mode::Sweep);
            c.sweep_values = lambda_grid();
            plan.push((
                "mm1_percentiles_vs_lambda".into(),
                labelled(c, "mu2 = 1.25"),
            ));
            let mut d = mm1(Mode::Sweep);
            d.lambda = 0.45;
            d.sweep_param = SweepParam::Mu2;
            d.sweep_values = (3..=12).map(|i| i as f64 / 4.0).collect();
            plan.push((
                "mm1_percentiles_vs_mu2".into(),
                labelled(d, "lambda = 0.45, the p99-optimal rate for mu2 = 1.25"),
            ));
        }
        Figure::Fig9 => {
            for d in [1.0, 0.8, 0.5] {
                let mut c = md1(Mode::Analytic);
                c.service_d = d;
                plan.push((format!("md1_d_{}", fmt(d)), labelled(c, "analytic only")));
            }
            for mu2 in [1.0, 1.25, 2.0] {
                let mut c = mm1(Mode::Analytic);
                c.mu2 = mu2;
                plan.push((
                    format!("mm1_mu2_{}", fmt(mu2)),
                    labelled(c, "analytic only"),
                ));
            }
        }
        Figure::Fig10 => {
            for d in [1.0, 0.8, 0.5] {
                let mut c = md1(Mode::Sweep);
                c.service_d = d;
                c.sweep_values = lambda_grid();
                plan.push((
                    format!("md1_mean_d_{}", fmt(d)),
                    labelled(c, "mean column is the curve"),
                ));
            }
            for mu2 in [1.0, 1.25, 2.0] {
                let mut c = mm1(Mode::Sweep);
                c.mu2 = mu2;
                c.sweep_values = lambda_grid();
                plan.push((
                    format!("mm1_mean_mu2_{}", fmt(mu2)),
                    labelled(c, "mean column is the curve"),
                ));
            }
        }
    }
    plan
}
