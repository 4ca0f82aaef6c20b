//! Quadrature CDFs, quantiles, means and empirical comparisons.

mod empirical;
pub mod quadrature;
mod table;

pub use empirical::{
    binomial_z, dkw_bound, ks_distance, ks_distance_mixed, ks_distance_mixed_with,
    ks_distance_with, EmpiricalDistribution,
};
pub use table::CdfTable;

use crate::error::{Error, Result};
use crate::model::MixedDistribution;

/// Residual tail mass targeted by the truncation point.
pub const TAIL_RESIDUAL: f64 = 1e-10;

/// How to integrate a density: tolerance, forced split points and the
/// slowest tail decay rate.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureSpec {
    pub abs_tol: f64,
    pub breakpoints: Vec<f64>,
    pub tail_rate: f64,
}

impl QuadratureSpec {
    pub fn new(abs_tol: f64, mut breakpoints: Vec<f64>, tail_rate: f64) -> Self {
        breakpoints.sort_by(f64::total_cmp);
        breakpoints.dedup();
        QuadratureSpec {
            abs_tol,
            breakpoints,
            tail_rate,
        }
    }

    /// Distance past the support start after which an `e^{−rate·t}` tail
    /// holds less than [`TAIL_RESIDUAL`].
    pub fn tail_span(rate: f64) -> f64 {
        (1.0 / TAIL_RESIDUAL).ln() / rate
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.abs_tol > 0.0) || !(self.tail_rate > 0.0) || !self.tail_rate.is_finite() {
            return Err(Error::Domain(format!(
                "quadrature spec needs abs_tol > 0 and tail_rate > 0 (got {} and {})",
                self.abs_tol, self.tail_rate
            )));
        }
        Ok(())
    }

    /// Truncation point. Starts from the exponential bound and extends by
    /// whole decay lengths while the density still carries visible mass.
    pub fn upper_bound(&self, dist: &MixedDistribution) -> f64 {
        let lower = dist.support_lower();
        let step = 1.0 / self.tail_rate;
        let mut upper = lower + Self::tail_span(self.tail_rate);
        for _ in 0..200 {
            if dist.density(upper) * step <= TAIL_RESIDUAL * 1e-2 {
                break;
            }
            upper += step;
        }
        upper
    }
}

/// `P(X ≤ τ)`: density quadrature plus atoms at or below `τ`.
pub fn cdf_from_density(dist: &MixedDistribution, tau: f64, spec: &QuadratureSpec) -> Result<f64> {
    spec.validate()?;
    if tau.is_nan() {
        return Err(Error::Domain("tau is NaN".into()));
    }
    let atoms: f64 = dist
        .atoms()
        .iter()
        .filter(|a| a.location <= tau)
        .fold(0.0, |acc, a| acc + a.mass);
    let lower = dist.support_lower();
    if tau <= lower {
        return Ok(atoms.clamp(0.0, 1.0));
    }
    let upper = tau.min(spec.upper_bound(dist));
    let f = |x: f64| dist.density(x);
    let cont = quadrature::integrate(&f, lower, upper, &spec.breakpoints, spec.abs_tol)?;
    Ok((cont + atoms).clamp(0.0, 1.0))
}

/// Smallest `τ` with `P(X ≤ τ) ≥ p`.
pub fn quantile(dist: &MixedDistribution, p: f64, spec: &QuadratureSpec) -> Result<f64> {
    CdfTable::coarse(dist, spec)?.quantile(p)
}

/// `E[X]` by quadrature, truncated per `spec`.
pub fn mean(dist: &MixedDistribution, spec: &QuadratureSpec) -> Result<f64> {
    spec.validate()?;
    let lower = dist.support_lower();
    let upper = spec.upper_bound(dist);
    let f = |x: f64| {
        let d = dist.density(x);
        [d, x * d]
    };
    let scale = 1.0 / (1.0 + upper.abs());
    let [_, m] = quadrature::integrate_vec(
        &f,
        lower,
        upper,
        &spec.breakpoints,
        spec.abs_tol,
        [1.0, scale],
    )?;
    Ok(m + dist
        .atoms()
        .iter()
        .map(|a| a.location * a.mass)
        .sum::<f64>())
}

/// Total mass: density quadrature plus atoms.
pub fn total_mass(dist: &MixedDistribution, spec: &QuadratureSpec) -> Result<f64> {
    spec.validate()?;
    let lower = dist.support_lower();
    let upper = spec.upper_bound(dist);
    let f = |x: f64| dist.density(x);
    let cont = quadrature::integrate(&f, lower, upper, &spec.breakpoints, spec.abs_tol)?;
    Ok(cont + dist.atom_mass())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Atom;
    use approx::assert_relative_eq;
    use std::sync::Arc;

    fn expo(rate: f64) -> MixedDistribution {
        MixedDistribution::continuous(move |x| rate * (-rate * x).exp(), 0.0).unwrap()
    }

    #[test]
    fn exponential_cdf_quantile_mean() {
        let d = expo(2.0);
        let spec = QuadratureSpec::new(1e-9, vec![], 2.0);
        assert_relative_eq!(
            cdf_from_density(&d, 1.0, &spec).unwrap(),
            1.0 - (-2.0f64).exp(),
            epsilon = 1e-9
        );
        assert_eq!(cdf_from_density(&d, -1.0, &spec).unwrap(), 0.0);
        assert!((cdf_from_density(&d, 1e6, &spec).unwrap() - 1.0).abs() < 1e-6);
        let q = quantile(&d, 0.5, &spec).unwrap();
        assert_relative_eq!(q, std::f64::consts::LN_2 / 2.0, epsilon = 1e-9);
        assert_relative_eq!(mean(&d, &spec).unwrap(), 0.5, epsilon = 1e-8);
    }

    #[test]
    fn point_mass_mean() {
        let d = MixedDistribution::new(
            Arc::new(|_| 0.0),
            vec![Atom {
                location: 3.5,
                mass: 1.0,
            }],
            0.0,
        )
        .unwrap();
        let spec = QuadratureSpec::new(1e-9, vec![], 1.0);
        assert_relative_eq!(mean(&d, &spec).unwrap(), 3.5);
        assert_eq!(cdf_from_density(&d, 3.4, &spec).unwrap(), 0.0);
        assert_eq!(cdf_from_density(&d, 3.5, &spec).unwrap(), 1.0);
    }

    #[test]
    fn rejects_bad_spec() {
        let spec = QuadratureSpec::new(0.0, vec![], 1.0);
        assert!(cdf_from_density(&expo(1.0), 1.0, &spec).is_err());
    }
}
