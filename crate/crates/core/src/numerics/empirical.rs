use crate::error::{Error, Result};
use crate::par::{self, Execution};

/// Sorted samples.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalDistribution {
    samples: Vec<f64>,
}

impl EmpiricalDistribution {
    pub fn new(mut samples: Vec<f64>) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::EmptyInput);
        }
        if samples.iter().any(|x| x.is_nan()) {
            return Err(Error::Domain("NaN sample".into()));
        }
        samples.sort_by(f64::total_cmp);
        Ok(EmpiricalDistribution { samples })
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn min(&self) -> f64 {
        self.samples[0]
    }

    pub fn max(&self) -> f64 {
        self.samples[self.samples.len() - 1]
    }

    /// Right-continuous ECDF.
    pub fn ecdf(&self, x: f64) -> f64 {
        self.samples.partition_point(|&s| s <= x) as f64 / self.len() as f64
    }

    /// Inverse ECDF: the smallest sample with `ecdf ≥ p`.
    pub fn quantile(&self, p: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::Domain(format!("quantile level {p} outside [0, 1]")));
        }
        let n = self.len();
        let k = ((p * n as f64).ceil() as usize).clamp(1, n);
        Ok(self.samples[k - 1])
    }

    pub fn mean(&self) -> f64 {
        self.samples.iter().sum::<f64>() / self.len() as f64
    }

    /// Standard error of the sample mean.
    pub fn mean_std_error(&self) -> f64 {
        let n = self.len() as f64;
        if n < 2.0 {
            return f64::INFINITY;
        }
        let m = self.mean();
        let var = self.samples.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0);
        (var / n).sqrt()
    }
}

/// `sup_x |F(x) − F_n(x)|` for a continuous `F`.
pub fn ks_distance<F>(analytic_cdf: F, empirical: &EmpiricalDistribution) -> f64
where
    F: Fn(f64) -> f64 + Sync,
{
    ks_distance_with(analytic_cdf, empirical, Execution::default())
}

pub fn ks_distance_with<F>(
    analytic_cdf: F,
    empirical: &EmpiricalDistribution,
    exec: Execution,
) -> f64
where
    F: Fn(f64) -> f64 + Sync,
{
    ks_distance_mixed_with(&analytic_cdf, &analytic_cdf, empirical, exec)
}

/// KS distance against a law with atoms. `left_cdf(x)` is `F(x−)`; tied
/// samples form a single ECDF jump, compared with `F(x−)` below and `F(x)`
/// above.
pub fn ks_distance_mixed<F, G>(cdf: F, left_cdf: G, empirical: &EmpiricalDistribution) -> f64
where
    F: Fn(f64) -> f64 + Sync,
    G: Fn(f64) -> f64 + Sync,
{
    ks_distance_mixed_with(cdf, left_cdf, empirical, Execution::default())
}

pub fn ks_distance_mixed_with<F, G>(
    cdf: F,
    left_cdf: G,
    empirical: &EmpiricalDistribution,
    exec: Execution,
) -> f64
where
    F: Fn(f64) -> f64 + Sync,
    G: Fn(f64) -> f64 + Sync,
{
    let xs = empirical.samples();
    let n = xs.len() as f64;
    const CHUNK: usize = 4096;
    let chunks = xs.len().div_ceil(CHUNK);
    par::map_indexed(exec, chunks, |c| {
        let start = c * CHUNK;
        let end = (start + CHUNK).min(xs.len());
        let mut best = 0.0f64;
        let mut i = start;
        // a tie group belongs to the chunk where it starts
        while i > 0 && i < end && xs[i] == xs[i - 1] {
            i += 1;
        }
        while i < end {
            let v = xs[i];
            let mut j = i + 1;
            while j < xs.len() && xs[j] == v {
                j += 1;
            }
            let below = (left_cdf(v) - i as f64 / n).abs();
            let above = (cdf(v) - j as f64 / n).abs();
            best = best.max(below).max(above);
            i = j;
        }
        best
    })
    .into_iter()
    .fold(0.0, f64::max)
}

/// `(k − np) / sqrt(np(1 − p))`.
pub fn binomial_z(count: usize, n: usize, p: f64) -> f64 {
    let n = n as f64;
    let sd = (n * p * (1.0 - p)).sqrt();
    if sd == 0.0 {
        return if count as f64 == n * p {
            0.0
        } else {
            f64::INFINITY
        };
    }
    (count as f64 - n * p) / sd
}

/// DKW radius: `P(KS > ε) ≤ alpha` for `ε = sqrt(ln(2/alpha) / 2n)`.
pub fn dkw_bound(n: usize, alpha: f64) -> f64 {
    ((2.0 / alpha).ln() / (2.0 * n as f64)).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ecdf_counts() {
        let e = EmpiricalDistribution::new(vec![4.0, 1.0, 3.0, 2.0]).unwrap();
        assert_eq!(e.ecdf(2.5), 0.5);
        assert_eq!(e.ecdf(4.0), 1.0);
        assert_eq!(e.ecdf(0.5), 0.0);
        assert_eq!(e.quantile(0.5).unwrap(), 2.0);
        assert_eq!(e.quantile(0.51).unwrap(), 3.0);
        assert_eq!(e.quantile(0.0).unwrap(), 1.0);
    }

    #[test]
    fn empty_rejected() {
        assert_eq!(EmpiricalDistribution::new(vec![]), Err(Error::EmptyInput));
    }

    #[test]
    fn ks_uniform_grid() {
        let n = 1000;
        let xs = (0..n).map(|i| (i as f64 + 0.5) / n as f64).collect();
        let e = EmpiricalDistribution::new(xs).unwrap();
        let d = ks_distance(|x| x.clamp(0.0, 1.0), &e);
        assert!(d <= 1.0 / n as f64 + 1e-12);
        let far = ks_distance(|x| if x < 5.0 { 0.0 } else { 1.0 }, &e);
        assert!((far - 1.0).abs() < 1e-12);
    }

    #[test]
    fn ks_with_atom() {
        // half the mass at 0, the rest uniform on (0, 1)
        let mut xs = vec![0.0; 500];
        xs.extend((0..500).map(|i| (i as f64 + 0.5) / 500.0));
        let e = EmpiricalDistribution::new(xs).unwrap();
        let cdf = |x: f64| {
            if x < 0.0 {
                0.0
            } else {
                (0.5 + 0.5 * x).min(1.0)
            }
        };
        let left = |x: f64| {
            if x <= 0.0 {
                0.0
            } else {
                (0.5 + 0.5 * x).min(1.0)
            }
        };
        assert!(ks_distance_mixed(cdf, left, &e) < 0.01);
        assert!((ks_distance(cdf, &e) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn z_scores() {
        assert_eq!(binomial_z(50, 100, 0.5), 0.0);
        assert!((binomial_z(60, 100, 0.5) - 2.0).abs() < 1e-12);
        assert!((dkw_bound(1_000_000, 0.01) - 0.001_627).abs() < 1e-5);
    }
}
