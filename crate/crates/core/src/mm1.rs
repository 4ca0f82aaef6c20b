//! PAoI of the M/M/1 → M/M/1 tandem.
//!
//! Cases A, B and C are hypoexponential laws:
//! A with rates {α₁, μ₁, α₂, σ, μ₂}, B with {α₁, μ₁, μ₁, σ, μ₂} and C with
//! {α₂, μ₂, μ₂, σ, μ₁}, where `σ = μ₁ + μ₂ − λ`. Case D is a signed
//! mixture of two hypoexponentials that collapses to a short closed form.
//! The partial-fraction expansions below are singular at `μ₁ = μ₂`,
//! `μ₂ = α₁` and `μ₁ = α₂`; [`Mm1Regime`] routes around them.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::model::{CaseLabel, MixedDistribution, ServerSpec, TandemParams};
use crate::numerics::QuadratureSpec;
use crate::CaseProbabilities;

/// Relative gap under which `μ₁` and `μ₂` are treated as equal.
pub const EQUAL_RATE_TOL: f64 = 1e-5;
/// Relative gap under which `μ₂ = α₁` or `μ₁ = α₂` is treated as hit.
pub const DEGENERATE_TOL: f64 = 1e-7;
/// Relative nudge applied to `μ₂` at a degenerate point.
pub const DEGENERATE_NUDGE: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RegimeKind {
    General,
    EqualRates,
    PerturbedDegenerate,
}

/// Which closed form evaluates a parameter set.
#[derive(Debug, Clone, PartialEq)]
pub struct Mm1Regime {
    pub kind: RegimeKind,
    /// `μ₂` values the closed forms are evaluated at. Results are averaged
    /// over them.
    pub effective_mu2: Vec<f64>,
}

impl Mm1Regime {
    pub fn resolve(lambda: f64, mu1: f64, mu2: f64) -> Self {
        let scale = mu1;
        if (mu1 - mu2).abs() <= EQUAL_RATE_TOL * scale {
            return Mm1Regime {
                kind: RegimeKind::EqualRates,
                effective_mu2: vec![0.5 * (mu1 + mu2)],
            };
        }
        let near_a1 = (mu2 - (mu1 - lambda)).abs() <= DEGENERATE_TOL * scale;
        let near_a2 = (mu1 - (mu2 - lambda)).abs() <= DEGENERATE_TOL * scale;
        if near_a1 || near_a2 {
            return Mm1Regime {
                kind: RegimeKind::PerturbedDegenerate,
                effective_mu2: vec![
                    mu2 * (1.0 - DEGENERATE_NUDGE),
                    mu2 * (1.0 + DEGENERATE_NUDGE),
                ],
            };
        }
        Mm1Regime {
            kind: RegimeKind::General,
            effective_mu2: vec![mu2],
        }
    }
}

/// `coef · τ^power · e^{−rate·τ}`.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Term {
    rate: f64,
    power: i32,
    coef: f64,
}

fn eval_terms(terms: &[Term], tau: f64) -> f64 {
    terms
        .iter()
        .map(|t| t.coef * tau.powi(t.power) * (-t.rate * tau).exp())
        .sum()
}

fn exponential(params: &TandemParams) -> Result<f64> {
    params.check_stable()?;
    match params.second() {
        ServerSpec::Exponential(mu2) => Ok(mu2),
        ServerSpec::Deterministic(_) => Err(Error::WrongTandem {
            expected: "exponential",
        }),
    }
}

fn probabilities(lambda: f64, mu1: f64, mu2: f64) -> CaseProbabilities {
    let (a1, a2) = (mu1 - lambda, mu2 - lambda);
    let sigma = mu1 + a2;
    CaseProbabilities {
        a: lambda / sigma,
        b: lambda * a2 / (mu1 * sigma),
        c: lambda * a1 / (mu2 * sigma),
        d: a1 * a2 * (mu1 + mu2) / (mu1 * mu2 * sigma),
    }
}

pub fn case_probabilities_mm1(params: &TandemParams) -> Result<CaseProbabilities> {
    let mu2 = exponential(params)?;
    Ok(probabilities(params.lambda(), params.mu1(), mu2))
}

fn general_a(l: f64, m1: f64, m2: f64) -> Vec<Term> {
    let (a1, a2) = (m1 - l, m2 - l);
    let s = m1 + a2;
    let d12 = m1 - m2;
    vec![
        Term {
            rate: s,
            power: 0,
            coef: s,
        },
        Term {
            rate: m2,
            power: 0,
            coef: m1 * m2 * a2 * s / (l * d12 * (m2 - a1)),
        },
        Term {
            rate: a1,
            power: 0,
            coef: -m1 * a1 * a2 * s / (l * d12 * (m2 - a1)),
        },
        Term {
            rate: m1,
            power: 0,
            coef: -m1 * m2 * a1 * s / (l * d12 * (m1 - a2)),
        },
        Term {
            rate: a2,
            power: 0,
            coef: m2 * a1 * a2 * s / (l * d12 * (m1 - a2)),
        },
    ]
}

fn general_b(l: f64, m1: f64, m2: f64) -> Vec<Term> {
    let (a1, a2) = (m1 - l, m2 - l);
    let s = m1 + a2;
    let d12 = m1 - m2;
    let q = m1 * m1 * s;
    let inner = l * l + 2.0 * l * m1 - 3.0 * l * m2 - m1 * m2 + m2 * m2;
    vec![
        Term {
            rate: s,
            power: 0,
            coef: q / (a2 * a2),
        },
        Term {
            rate: m2,
            power: 0,
            coef: -q * m2 / (d12 * d12 * (m2 - a1)),
        },
        Term {
            rate: a1,
            power: 0,
            coef: q * a1 / (l * l * (m2 - a1)),
        },
        Term {
            rate: m1,
            power: 1,
            coef: q * m2 * a1 / (l * a2 * d12),
        },
        Term {
            rate: m1,
            power: 0,
            coef: -q * m2 * a1 * inner / (l * l * a2 * a2 * d12 * d12),
        },
    ]
}

fn equal_a(l: f64, m: f64) -> Vec<Term> {
    let a = m - l;
    let s = m + a;
    let l3 = l * l * l;
    vec![
        Term {
            rate: s,
            power: 0,
            coef: s,
        },
        Term {
            rate: m,
            power: 0,
            coef: m * m * s * (2.0 * m - 3.0 * l) / l3,
        },
        Term {
            rate: a,
            power: 0,
            coef: -s * a * a * (l + 2.0 * m) / l3,
        },
        Term {
            rate: m,
            power: 1,
            coef: m * m * s * a / (l * l),
        },
        Term {
            rate: a,
            power: 1,
            coef: m * s * a * a / (l * l),
        },
    ]
}

fn equal_b(l: f64, m: f64) -> Vec<Term> {
    let a = m - l;
    let s = m + a;
    let l3 = l * l * l;
    let m3s = m * m * m * s;
    vec![
        Term {
            rate: m,
            power: 2,
            coef: -m3s / (2.0 * l),
        },
        Term {
            rate: s,
            power: 0,
            coef: m * m * s / (a * a),
        },
        Term {
            rate: a,
            power: 0,
            coef: m * m * s * a / l3,
        },
        Term {
            rate: m,
            power: 0,
            coef: -m3s * (3.0 * l * l - 3.0 * l * m + m * m) / (l3 * a * a),
        },
        Term {
            rate: m,
            power: 1,
            coef: -m3s * (a - l) / (l * l * a),
        },
    ]
}

/// Case D conditional density; finite for every stable parameter set,
/// including `μ₁ = μ₂`.
fn case_d(l: f64, m1: f64, m2: f64, tau: f64) -> f64 {
    let (a1, a2) = (m1 - l, m2 - l);
    let s = m1 + a2;
    let base = l * m1 * m1 * m2 * m2 * s / (a1 * a2 * (m1 + m2));
    let k = base / (a1 * a2);
    let exps = (-l * tau).exp() + (-s * tau).exp() - (-m1 * tau).exp() - (-m2 * tau).exp();
    // (e^{−μ₁τ} − e^{−μ₂τ}) / (μ₁ − μ₂)
    let gap = m2 - m1;
    let divided = if gap == 0.0 {
        -tau * (-m1 * tau).exp()
    } else {
        (-m1 * tau).exp() * (-gap * tau).exp_m1() / gap
    };
    k * exps + base * tau * divided
}

/// Closed-form conditional densities at `μ₁ = μ₂ = μ`. Cases B and C share
/// one law.
pub fn paoi_pdf_mm1_equal(case: CaseLabel, tau: f64, lambda: f64, mu: f64) -> Result<f64> {
    TandemParams::mm1(lambda, mu, mu)?;
    if tau.is_nan() {
        return Err(Error::Domain("tau is NaN".into()));
    }
    if tau < 0.0 {
        return Ok(0.0);
    }
    let v = match case {
        CaseLabel::A => eval_terms(&equal_a(lambda, mu), tau),
        CaseLabel::B | CaseLabel::C => eval_terms(&equal_b(lambda, mu), tau),
        CaseLabel::D => {
            let a = mu - lambda;
            let s = mu + a;
            let pd = 2.0 * a * a / (mu * s);
            let bracket = 2.0 * (a * tau).cosh() - a * a * tau * tau - 2.0;
            mu * mu * lambda * (-mu * tau).exp() * bracket / (a * a * pd)
        }
    };
    Ok(v.max(0.0))
}

#[derive(Debug, Clone)]
struct Expansion {
    mu2: f64,
    a: Vec<Term>,
    b: Vec<Term>,
    c: Vec<Term>,
}

/// Precomputed evaluator for one parameter set.
#[derive(Debug, Clone)]
pub struct Mm1Tandem {
    lambda: f64,
    mu1: f64,
    mu2: f64,
    regime: Mm1Regime,
    expansions: Vec<Expansion>,
    probs: CaseProbabilities,
}

impl Mm1Tandem {
    pub fn new(params: &TandemParams) -> Result<Self> {
        let mu2 = exponential(params)?;
        let (lambda, mu1) = (params.lambda(), params.mu1());
        let regime = Mm1Regime::resolve(lambda, mu1, mu2);
        let expansions = regime
            .effective_mu2
            .iter()
            .map(|&m2| match regime.kind {
                RegimeKind::EqualRates => {
                    let b = equal_b(lambda, m2);
                    Expansion {
                        mu2: m2,
                        a: equal_a(lambda, m2),
                        c: b.clone(),
                        b,
                    }
                }
                _ => Expansion {
                    mu2: m2,
                    a: general_a(lambda, mu1, m2),
                    b: general_b(lambda, mu1, m2),
                    c: general_b(lambda, m2, mu1),
                },
            })
            .collect();
        Ok(Mm1Tandem {
            lambda,
            mu1,
            mu2,
            probs: probabilities(lambda, mu1, mu2),
            regime,
            expansions,
        })
    }

    pub fn regime(&self) -> &Mm1Regime {
        &self.regime
    }

    pub fn probabilities(&self) -> CaseProbabilities {
        self.probs
    }

    /// Conditional density `p_{Δ|case}(τ)`.
    pub fn case_pdf(&self, case: CaseLabel, tau: f64) -> f64 {
        if !(tau >= 0.0) {
            return 0.0;
        }
        let n = self.expansions.len() as f64;
        let sum: f64 = self
            .expansions
            .iter()
            .map(|e| match case {
                CaseLabel::A => eval_terms(&e.a, tau),
                CaseLabel::B => eval_terms(&e.b, tau),
                CaseLabel::C => eval_terms(&e.c, tau),
                CaseLabel::D => {
                    let m1 = if self.regime.kind == RegimeKind::EqualRates {
                        e.mu2
                    } else {
                        self.mu1
                    };
                    case_d(self.lambda, m1, e.mu2, tau)
                }
            })
            .sum();
        (sum / n).max(0.0)
    }

    pub fn joint_densities(&self, tau: f64) -> [f64; 4] {
        CaseLabel::ALL.map(|c| self.probs.get(c) * self.case_pdf(c, tau))
    }

    pub fn pdf(&self, tau: f64) -> f64 {
        self.joint_densities(tau).iter().sum()
    }

    pub fn tail_rate(&self) -> f64 {
        (self.mu1 - self.lambda)
            .min(self.mu2 - self.lambda)
            .min(self.lambda)
    }

    pub fn support_lower(&self) -> f64 {
        0.0
    }

    /// Fastest rate in the model, setting the finest time scale.
    pub fn max_rate(&self) -> f64 {
        self.mu1.max(self.mu2)
    }

    pub fn quadrature_spec(&self) -> QuadratureSpec {
        QuadratureSpec::new(1e-9, vec![0.0], self.tail_rate())
    }

    pub fn distribution(self: &Arc<Self>) -> MixedDistribution {
        let me = Arc::clone(self);
        MixedDistribution::continuous(move |t| me.pdf(t), 0.0).expect("finite support")
    }

    pub fn case_distribution(self: &Arc<Self>, case: CaseLabel) -> MixedDistribution {
        let me = Arc::clone(self);
        MixedDistribution::continuous(move |t| me.case_pdf(case, t), 0.0).expect("finite support")
    }
}

pub fn paoi_pdf_mm1_case(case: CaseLabel, tau: f64, params: &TandemParams) -> Result<f64> {
    if tau.is_nan() {
        return Err(Error::Domain("tau is NaN".into()));
    }
    Ok(Mm1Tandem::new(params)?.case_pdf(case, tau))
}

pub fn paoi_distribution_mm1(params: &TandemParams) -> Result<MixedDistribution> {
    Ok(Arc::new(Mm1Tandem::new(params)?).distribution())
}
