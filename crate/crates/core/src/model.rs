//! Parameters, occupancy cases and per-packet timing shared by the
//! analytic evaluators and the simulator.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Service discipline of the second node.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ServerSpec {
    /// Constant service time.
    Deterministic(f64),
    /// Exponential service with the given rate.
    Exponential(f64),
}

impl ServerSpec {
    pub fn mean_service(&self) -> f64 {
        match *self {
            ServerSpec::Deterministic(d) => d,
            ServerSpec::Exponential(mu) => 1.0 / mu,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            ServerSpec::Deterministic(_) => "md1",
            ServerSpec::Exponential(_) => "mm1",
        }
    }
}

/// Arrival rate, first-server rate and second-server spec of a tandem.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TandemParams {
    lambda: f64,
    mu1: f64,
    second: ServerSpec,
}

fn positive(name: &'static str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name,
            value,
            reason: "must be finite and > 0",
        })
    }
}

impl TandemParams {
    /// Validated, stable parameters.
    pub fn new(lambda: f64, mu1: f64, second: ServerSpec) -> Result<Self> {
        let p = Self::allow_unstable(lambda, mu1, second)?;
        p.check_stable()?;
        Ok(p)
    }

    pub fn md1(lambda: f64, mu1: f64, d: f64) -> Result<Self> {
        Self::new(lambda, mu1, ServerSpec::Deterministic(d))
    }

    pub fn mm1(lambda: f64, mu1: f64, mu2: f64) -> Result<Self> {
        Self::new(lambda, mu1, ServerSpec::Exponential(mu2))
    }

    /// Positive, finite parameters that may violate stability.
    /// Only the simulator accepts these.
    pub fn allow_unstable(lambda: f64, mu1: f64, second: ServerSpec) -> Result<Self> {
        positive("lambda", lambda)?;
        positive("mu1", mu1)?;
        match second {
            ServerSpec::Deterministic(d) => positive("D", d)?,
            ServerSpec::Exponential(mu2) => positive("mu2", mu2)?,
        }
        Ok(TandemParams {
            lambda,
            mu1,
            second,
        })
    }

    pub fn check_stable(&self) -> Result<()> {
        if self.lambda >= self.mu1 {
            return Err(Error::Unstable(format!(
                "lambda = {} must be below mu1 = {}",
                self.lambda, self.mu1
            )));
        }
        match self.second {
            ServerSpec::Deterministic(d) if self.lambda * d >= 1.0 => Err(Error::Unstable(
                format!("lambda * D = {} must be below 1", self.lambda * d),
            )),
            ServerSpec::Exponential(mu2) if self.lambda >= mu2 => Err(Error::Unstable(format!(
                "lambda = {} must be below mu2 = {}",
                self.lambda, mu2
            ))),
            _ => Ok(()),
        }
    }

    pub fn is_stable(&self) -> bool {
        self.check_stable().is_ok()
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn mu1(&self) -> f64 {
        self.mu1
    }

    pub fn second(&self) -> ServerSpec {
        self.second
    }

    pub fn alpha1(&self) -> f64 {
        self.mu1 - self.lambda
    }

    /// `mu2 - lambda`, only for an exponential second server.
    pub fn alpha2(&self) -> Option<f64> {
        self.mu2().map(|mu2| mu2 - self.lambda)
    }

    pub fn rho1(&self) -> f64 {
        self.lambda / self.mu1
    }

    pub fn mu2(&self) -> Option<f64> {
        match self.second {
            ServerSpec::Exponential(mu2) => Some(mu2),
            ServerSpec::Deterministic(_) => None,
        }
    }

    pub fn service_d(&self) -> Option<f64> {
        match self.second {
            ServerSpec::Deterministic(d) => Some(d),
            ServerSpec::Exponential(_) => None,
        }
    }

    pub fn with_lambda(&self, lambda: f64) -> Result<Self> {
        Self::new(lambda, self.mu1, self.second)
    }
}

/// Occupancy pattern met by a packet at the two nodes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CaseLabel {
    /// Queued at both nodes.
    A,
    /// Queued at the first node only.
    B,
    /// Queued at the second node only.
    C,
    /// Queued at neither node.
    D,
}

impl CaseLabel {
    pub const ALL: [CaseLabel; 4] = [CaseLabel::A, CaseLabel::B, CaseLabel::C, CaseLabel::D];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn as_str(self) -> &'static str {
        match self {
            CaseLabel::A => "A",
            CaseLabel::B => "B",
            CaseLabel::C => "C",
            CaseLabel::D => "D",
        }
    }
}

impl fmt::Display for CaseLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Case from the signs of the extended waiting times. Zero counts as
/// "not queued".
pub fn classify_case(omega1: f64, omega2: f64) -> CaseLabel {
    match (omega1 > 0.0, omega2 > 0.0) {
        (true, true) => CaseLabel::A,
        (true, false) => CaseLabel::B,
        (false, true) => CaseLabel::C,
        (false, false) => CaseLabel::D,
    }
}

/// Peak age of a packet: interarrival plus its time in both nodes.
pub fn paoi_from_record(y: f64, t1: f64, t2: f64) -> f64 {
    y + t1 + t2
}

/// One simulated packet.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PacketRecord {
    pub index: u64,
    pub g: f64,
    pub y: f64,
    pub s1: f64,
    pub s2: f64,
    pub omega1: f64,
    pub omega2: f64,
    pub w1: f64,
    pub w2: f64,
    pub t1: f64,
    pub t2: f64,
    pub delta: f64,
    pub case: CaseLabel,
}

pub type DensityFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A point mass.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Atom {
    pub location: f64,
    pub mass: f64,
}

/// Continuous density plus point masses, zero below `support_lower`.
#[derive(Clone)]
pub struct MixedDistribution {
    density: DensityFn,
    atoms: Vec<Atom>,
    support_lower: f64,
}

impl MixedDistribution {
    pub fn new(density: DensityFn, atoms: Vec<Atom>, support_lower: f64) -> Result<Self> {
        if !support_lower.is_finite() {
            return Err(Error::Domain("support_lower must be finite".into()));
        }
        for a in &atoms {
            if !(0.0..=1.0).contains(&a.mass) || !a.location.is_finite() {
                return Err(Error::Domain(format!(
                    "atom at {} with mass {} is invalid",
                    a.location, a.mass
                )));
            }
            if a.location < support_lower {
                return Err(Error::Domain("atom below support_lower".into()));
            }
        }
        Ok(MixedDistribution {
            density,
            atoms,
            support_lower,
        })
    }

    pub fn continuous<F>(density: F, support_lower: f64) -> Result<Self>
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        Self::new(Arc::new(density), Vec::new(), support_lower)
    }

    /// Density at `x`; zero below the support.
    pub fn density(&self, x: f64) -> f64 {
        if x < self.support_lower {
            0.0
        } else {
            (self.density)(x)
        }
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn atom_mass(&self) -> f64 {
        self.atoms.iter().fold(0.0, |acc, a| acc + a.mass)
    }

    pub fn support_lower(&self) -> f64 {
        self.support_lower
    }
}

impl fmt::Debug for MixedDistribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MixedDistribution")
            .field("atoms", &self.atoms)
            .field("support_lower", &self.support_lower)
            .finish_non_exhaustive()
    }
}
