use crate::error::{Error, Result};
use crate::model::MixedDistribution;
use crate::numerics::quadrature::{integrate, integrate_budget};
use crate::numerics::QuadratureSpec;
use crate::par::{self, Execution};

/// A density integrated panel by panel once, for repeated CDF, quantile
/// and mean queries.
#[derive(Debug, Clone)]
pub struct CdfTable {
    dist: MixedDistribution,
    spec: QuadratureSpec,
    knots: Vec<f64>,
    /// Continuous mass on `[lower, knots[k]]`.
    cum: Vec<f64>,
    /// Density just right of each knot and just left of the next one.
    ends: Vec<(f64, f64)>,
    moment: f64,
}

impl CdfTable {
    /// Panels no wider than `panel_width`, with every breakpoint a knot.
    pub fn build(
        dist: &MixedDistribution,
        spec: &QuadratureSpec,
        panel_width: f64,
    ) -> Result<Self> {
        Self::build_with(dist, spec, panel_width, Execution::default())
    }

    /// About 128 panels over the truncated support.
    pub fn coarse(dist: &MixedDistribution, spec: &QuadratureSpec) -> Result<Self> {
        spec.validate()?;
        let width = (spec.upper_bound(dist) - dist.support_lower()) / 128.0;
        Self::build(dist, spec, width)
    }

    pub fn build_with(
        dist: &MixedDistribution,
        spec: &QuadratureSpec,
        panel_width: f64,
        exec: Execution,
    ) -> Result<Self> {
        spec.validate()?;
        if !(panel_width > 0.0) {
            return Err(Error::Domain(format!("panel width {panel_width}")));
        }
        let lower = dist.support_lower();
        let upper = spec.upper_bound(dist);
        let mut edges = vec![lower];
        edges.extend(
            spec.breakpoints
                .iter()
                .copied()
                .filter(|&b| b > lower && b < upper),
        );
        edges.push(upper);
        let mut knots = vec![lower];
        for w in edges.windows(2) {
            let gap = w[1] - w[0];
            if gap <= 0.0 {
                continue;
            }
            let n = (gap / panel_width).ceil().max(1.0) as usize;
            for i in 1..n {
                knots.push(w[0] + gap * i as f64 / n as f64);
            }
            knots.push(w[1]);
        }
        let panels = knots.len() - 1;
        // per-panel target; the total achieved error is checked below
        let tol = spec.abs_tol / panels as f64;
        let f = |x: f64| {
            let d = dist.density(x);
            [d, x * d]
        };
        let results = par::map_indexed(exec, panels, |k| {
            let (a, b) = (knots[k], knots[k + 1]);
            let weights = [1.0, 1.0 / (1.0 + b.abs())];
            let (mass, err) = integrate_budget(&f, a, b, &[], tol, weights, 64);
            let left = dist.density(a);
            let right = dist.density(b.next_down());
            (mass, err, (left, right))
        });
        let mut cum = Vec::with_capacity(knots.len());
        let mut ends = Vec::with_capacity(panels);
        let mut moment = 0.0;
        let mut acc = 0.0;
        cum.push(0.0);
        let achieved: f64 = results.iter().map(|r| r.1).sum();
        if achieved > spec.abs_tol {
            return Err(Error::QuadratureNonConvergence {
                lower,
                upper,
                error: achieved,
            });
        }
        for ([m, mom], _, e) in results {
            acc += m;
            moment += mom;
            cum.push(acc);
            ends.push(e);
        }
        Ok(CdfTable {
            dist: dist.clone(),
            spec: spec.clone(),
            knots,
            cum,
            ends,
            moment,
        })
    }

    pub fn lower(&self) -> f64 {
        self.knots[0]
    }

    pub fn upper(&self) -> f64 {
        *self.knots.last().expect("nonempty")
    }

    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    pub fn distribution(&self) -> &MixedDistribution {
        &self.dist
    }

    fn atoms_upto(&self, tau: f64) -> f64 {
        self.dist
            .atoms()
            .iter()
            .filter(|a| a.location <= tau)
            .fold(0.0, |acc, a| acc + a.mass)
    }

    fn panel(&self, tau: f64) -> usize {
        let k = self.knots.partition_point(|&x| x <= tau);
        k.saturating_sub(1).min(self.knots.len() - 2)
    }

    /// Quadrature mass, atoms included.
    pub fn total_mass(&self) -> f64 {
        *self.cum.last().expect("nonempty") + self.dist.atom_mass()
    }

    /// CDF with the last partial panel integrated directly.
    pub fn cdf(&self, tau: f64) -> f64 {
        if tau.is_nan() {
            return f64::NAN;
        }
        let atoms = self.atoms_upto(tau);
        if tau <= self.lower() {
            return atoms.clamp(0.0, 1.0);
        }
        if tau >= self.upper() {
            return (self.total_mass()).clamp(0.0, 1.0);
        }
        let k = self.panel(tau);
        let f = |x: f64| self.dist.density(x);
        let part = integrate(&f, self.knots[k], tau, &[], 1e-13).unwrap_or_else(|_| {
            // fall back to the panel's cubic interpolant
            self.interp_cont(k, tau) - self.cum[k]
        });
        (self.cum[k] + part + atoms).clamp(0.0, 1.0)
    }

    fn interp_cont(&self, k: usize, tau: f64) -> f64 {
        let (a, b) = (self.knots[k], self.knots[k + 1]);
        let h = b - a;
        let t = (tau - a) / h;
        let (f0, f1) = self.ends[k];
        let (c0, c1) = (self.cum[k], self.cum[k + 1]);
        let t2 = t * t;
        let t3 = t2 * t;
        (2.0 * t3 - 3.0 * t2 + 1.0) * c0
            + (t3 - 2.0 * t2 + t) * h * f0
            + (-2.0 * t3 + 3.0 * t2) * c1
            + (t3 - t2) * h * f1
    }

    /// Cubic Hermite interpolation of the tabulated CDF. No density
    /// evaluations; accurate to roughly `(panel·rate)^4 / 384`.
    pub fn cdf_interp(&self, tau: f64) -> f64 {
        if tau.is_nan() {
            return f64::NAN;
        }
        let atoms = self.atoms_upto(tau);
        if tau <= self.lower() {
            return atoms.clamp(0.0, 1.0);
        }
        if tau >= self.upper() {
            return self.total_mass().clamp(0.0, 1.0);
        }
        let k = self.panel(tau);
        let c = self.interp_cont(k, tau).clamp(self.cum[k], self.cum[k + 1]);
        (c + atoms).clamp(0.0, 1.0)
    }

    /// Smallest `τ` with `cdf(τ) ≥ p`.
    pub fn quantile(&self, p: f64) -> Result<f64> {
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::Domain(format!("quantile level {p} outside (0, 1)")));
        }
        let at = |k: usize| self.cum[k] + self.atoms_upto(self.knots[k]);
        if at(0) >= p {
            return Ok(self.lower());
        }
        let last = self.knots.len() - 1;
        if at(last) < p {
            return Err(Error::BracketFailure { p });
        }
        let (mut lo, mut hi) = (0, last);
        while hi - lo > 1 {
            let mid = (lo + hi) / 2;
            if at(mid) >= p {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        let (mut a, mut b) = (self.knots[lo], self.knots[hi]);
        for _ in 0..200 {
            if b - a <= 1e-12 * b.abs().max(1.0) {
                break;
            }
            let mid = 0.5 * (a + b);
            let c = self.cdf(mid);
            if c >= p {
                b = mid;
            } else {
                a = mid;
            }
        }
        Ok(b)
    }

    pub fn mean(&self) -> f64 {
        self.moment
            + self
                .dist
                .atoms()
                .iter()
                .map(|a| a.location * a.mass)
                .sum::<f64>()
    }

    pub fn spec(&self) -> &QuadratureSpec {
        &self.spec
    }
}
