//! PAoI of the M/M/1 → M/D/1 tandem.
//!
//! Every case density lives on `[2D, ∞)`. With `x = τ − 2D` and the
//! waiting time `W` of the second node, each one is a convolution of an
//! exponential law with `W` (or its CDF), evaluated through [`Kernel`]s.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::md1::wait::{exp_conv, Kernel, KernelSource, WaitTable};
use crate::model::{CaseLabel, MixedDistribution, ServerSpec, TandemParams};
use crate::numerics::QuadratureSpec;
use crate::CaseProbabilities;

/// Precomputed evaluator for one parameter set.
#[derive(Debug, Clone)]
pub struct Md1Tandem {
    lambda: f64,
    mu1: f64,
    d: f64,
    alpha1: f64,
    idle: f64,
    wait: Arc<WaitTable>,
    g_a1_0: Kernel,
    g_m1_0: Kernel,
    g_a1_m1: Kernel,
    g_m1_l: Kernel,
    h_a1_m1: Kernel,
    h_m1_m1: Kernel,
    h_m1_l: Kernel,
    probs: CaseProbabilities,
}

fn deterministic(params: &TandemParams) -> Result<f64> {
    params.check_stable()?;
    match params.second() {
        ServerSpec::Deterministic(d) => Ok(d),
        ServerSpec::Exponential(_) => Err(Error::WrongTandem {
            expected: "deterministic",
        }),
    }
}

/// Case probabilities of the M/M/1 → M/D/1 tandem.
pub fn case_probabilities_md1(params: &TandemParams) -> Result<CaseProbabilities> {
    let d = deterministic(params)?;
    let (lambda, mu1, alpha1) = (params.lambda(), params.mu1(), params.alpha1());
    let idle = 1.0 - lambda * d;
    // P(S₁ ≥ W + D) = (1 − λD) μ₁ / (α₁ e^{μ₁D} + λ)
    let b = lambda * idle / (alpha1 * (mu1 * d).exp() + lambda);
    let a = params.rho1() - b;
    Ok(CaseProbabilities {
        a,
        b,
        c: lambda * d - a,
        d: idle - b,
    })
}

impl Md1Tandem {
    pub fn new(params: &TandemParams) -> Result<Self> {
        let d = deterministic(params)?;
        let (lambda, mu1, alpha1) = (params.lambda(), params.mu1(), params.alpha1());
        let wait = Arc::new(WaitTable::new(lambda, d)?);
        let k = |src, a, b| wait.kernel(src, a, b);
        use KernelSource::{Cdf, Density};
        Ok(Md1Tandem {
            lambda,
            mu1,
            d,
            alpha1,
            idle: wait.idle_mass(),
            g_a1_0: k(Density, alpha1, 0.0),
            g_m1_0: k(Density, mu1, 0.0),
            g_a1_m1: k(Density, alpha1, mu1),
            g_m1_l: k(Density, mu1, lambda),
            h_a1_m1: k(Cdf, alpha1, mu1),
            h_m1_m1: k(Cdf, mu1, mu1),
            h_m1_l: k(Cdf, mu1, lambda),
            probs: case_probabilities_md1(params)?,
            wait,
        })
    }

    pub fn probabilities(&self) -> CaseProbabilities {
        self.probs
    }

    pub fn wait_table(&self) -> &Arc<WaitTable> {
        &self.wait
    }

    pub fn support_lower(&self) -> f64 {
        2.0 * self.d
    }

    /// Fastest rate in the model, setting the finest time scale.
    pub fn max_rate(&self) -> f64 {
        self.mu1.max(1.0 / self.d)
    }

    /// `P(V + S₁ ≤ z)` with `V ~ Exp(λ)`, `S₁ ~ Exp(μ₁)`.
    fn sum_cdf(&self, z: f64) -> f64 {
        -(-self.lambda * z).exp_m1() - self.lambda * exp_conv(self.mu1, self.lambda, z)
    }

    /// `p(X)·p_{Δ|X}(τ)` for all four cases.
    pub fn joint_densities(&self, tau: f64) -> [f64; 4] {
        let x = tau - 2.0 * self.d;
        if !(x >= 0.0) {
            return [0.0; 4];
        }
        let (lambda, mu1, d, alpha1, idle) =
            (self.lambda, self.mu1, self.d, self.alpha1, self.idle);
        let e_m1d = (-mu1 * d).exp();
        let e_m1x = (-mu1 * x).exp();
        let above_idle = e_m1x * (self.wait.cdf(x) - idle);

        let a = alpha1
            * (idle * -(-mu1 * d).exp_m1() * lambda * exp_conv(alpha1, mu1, x)
                + self.g_a1_0.eval(x)
                - self.g_m1_0.eval(x)
                - e_m1d * (self.g_a1_m1.eval(x) - above_idle));
        let b = alpha1 * mu1 * e_m1d * (self.h_a1_m1.eval(x) - self.h_m1_m1.eval(x));
        let c = alpha1
            * (idle * self.sum_cdf(d) * e_m1x + self.g_m1_0.eval(x)
                - (mu1 / alpha1) * (-lambda * d).exp() * self.g_m1_l.eval(x)
                + (lambda / alpha1) * e_m1d * above_idle);
        let dd = lambda
            * mu1
            * ((-lambda * d).exp() * self.h_m1_l.eval(x) - e_m1d * self.h_m1_m1.eval(x));
        [a.max(0.0), b.max(0.0), c.max(0.0), dd.max(0.0)]
    }

    /// Conditional density `p_{Δ|case}(τ)`.
    pub fn case_pdf(&self, case: CaseLabel, tau: f64) -> f64 {
        self.joint_densities(tau)[case.index()] / self.probs.get(case)
    }

    /// Mixture density.
    pub fn pdf(&self, tau: f64) -> f64 {
        self.joint_densities(tau).iter().sum()
    }

    /// Slowest exponential decay present in the tail.
    pub fn tail_rate(&self) -> f64 {
        self.alpha1.min(self.lambda).min(self.wait.tail_rate())
    }

    /// Breakpoints at `2D + kD`, where the density loses smoothness.
    pub fn quadrature_spec(&self) -> QuadratureSpec {
        let lower = self.support_lower();
        let reach = lower + QuadratureSpec::tail_span(self.tail_rate());
        let count = ((reach - lower) / self.d).ceil() as usize;
        let breakpoints = (0..=count).map(|k| lower + k as f64 * self.d).collect();
        QuadratureSpec::new(1e-9, breakpoints, self.tail_rate())
    }

    pub fn distribution(self: &Arc<Self>) -> MixedDistribution {
        let me = Arc::clone(self);
        MixedDistribution::continuous(move |t| me.pdf(t), self.support_lower())
            .expect("finite support")
    }

    pub fn case_distribution(self: &Arc<Self>, case: CaseLabel) -> MixedDistribution {
        let me = Arc::clone(self);
        MixedDistribution::continuous(move |t| me.case_pdf(case, t), self.support_lower())
            .expect("finite support")
    }
}

pub fn paoi_pdf_md1_case(case: CaseLabel, tau: f64, params: &TandemParams) -> Result<f64> {
    if tau.is_nan() {
        return Err(Error::Domain("tau is NaN".into()));
    }
    Ok(Md1Tandem::new(params)?.case_pdf(case, tau))
}

pub fn paoi_distribution_md1(params: &TandemParams) -> Result<MixedDistribution> {
    Ok(Arc::new(Md1Tandem::new(params)?).distribution())
}

/// PAoI CDF of a single M/D/1 queue fed by Poisson arrivals.
pub fn single_md1_paoi_cdf(tau: f64, lambda: f64, d: f64) -> Result<f64> {
    if tau.is_nan() {
        return Err(Error::Domain("tau is NaN".into()));
    }
    let table = WaitTable::new(lambda, d)?;
    if tau < 2.0 * d {
        return Ok(0.0);
    }
    Ok(-(-lambda * (tau - d)).exp_m1() * table.cdf(tau - 2.0 * d))
}
