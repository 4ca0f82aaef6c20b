//! M/D/1 waiting time: CDF, density and exponential convolution kernels.
//!
//! On each segment `[nD, (n+1)D)` the CDF solves `F'(x) = λ(F(x) − F(x−D))`,
//! which gives the exact local expansion
//! `F(nD+u) = e^{λu} Σ_m F((n−m)D) (−λu)^m / m!`.
//! Only the grid values `F(nD)` are stored. Every term is bounded by
//! `(λD)^m/m!`, so the sum is free of the cancellation that the textbook
//! alternating Erlang sum suffers at large `w`.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::model::{Atom, MixedDistribution};

/// Largest polynomial order kept per segment.
const MAX_ORDER: usize = 40;
/// Hard cap on tabulated segments.
const MAX_SEGMENTS: usize = 4_000_000;

pub(crate) fn check_md1(lambda: f64, d: f64) -> Result<()> {
    if !(lambda.is_finite() && lambda > 0.0) {
        return Err(Error::InvalidParameter {
            name: "lambda",
            value: lambda,
            reason: "must be finite and > 0",
        });
    }
    if !(d.is_finite() && d > 0.0) {
        return Err(Error::InvalidParameter {
            name: "D",
            value: d,
            reason: "must be finite and > 0",
        });
    }
    if lambda * d >= 1.0 {
        return Err(Error::Unstable(format!(
            "lambda * D = {} must be below 1",
            lambda * d
        )));
    }
    Ok(())
}

/// `∫₀ˢ e^{−a(s−t)} e^{−bt} dt` for `a, b ≥ 0`, stable for close rates.
pub fn exp_conv(a: f64, b: f64, s: f64) -> f64 {
    if s <= 0.0 {
        return 0.0;
    }
    let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
    let gap = hi - lo;
    if gap == 0.0 {
        s * (-lo * s).exp()
    } else {
        (-lo * s).exp() * -(-gap * s).exp_m1() / gap
    }
}

/// `I_m = ∫₀ᵛ u^m e^{γu} du` for `m = 0..out.len()`, via positive series.
fn power_exp_moments(gamma: f64, v: f64, out: &mut [f64]) {
    if v <= 0.0 {
        out.iter_mut().for_each(|x| *x = 0.0);
        return;
    }
    let z = gamma.abs() * v;
    let mut vpow = v;
    for (m, slot) in out.iter_mut().enumerate() {
        if m > 0 {
            vpow *= v;
        }
        let mf = m as f64;
        let mut sum = 0.0;
        if gamma >= 0.0 {
            // Σ_k z^k / (k! (m+k+1))
            let mut zk = 1.0;
            for k in 0..2000 {
                let term = zk / (mf + k as f64 + 1.0);
                sum += term;
                if term <= 1e-17 * sum {
                    break;
                }
                zk *= z / (k as f64 + 1.0);
            }
            *slot = vpow * sum;
        } else {
            // e^{−z} Σ_j z^j m!/(m+1+j)!
            let mut term = 1.0 / (mf + 1.0);
            for j in 0..4000 {
                sum += term;
                if term <= 1e-17 * sum {
                    break;
                }
                term *= z / (mf + 2.0 + j as f64);
            }
            *slot = vpow * (-z).exp() * sum;
        }
    }
}

fn wait_tail_rate(lambda: f64, d: f64) -> f64 {
    let f = |eta: f64| lambda * (eta * d).exp_m1() - eta;
    let mut hi = 1.0 / d;
    while f(hi) < 0.0 {
        hi *= 2.0;
    }
    // f < 0 just right of 0 since λD < 1
    let mut lo = 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Grid of `P_W(nD)` for an M/D/1 queue.
#[derive(Debug, Clone)]
pub struct WaitTable {
    lambda: f64,
    d: f64,
    order: usize,
    /// `F(nD)`, n = 0..=end.
    cdf: Vec<f64>,
    /// `F(nD) − F((n−1)D)`, with `F(−D) = 0`.
    jumps: Vec<f64>,
    /// `(−λ)^m / m!`.
    coef: Vec<f64>,
    truncated: bool,
}

impl WaitTable {
    pub fn new(lambda: f64, d: f64) -> Result<Self> {
        check_md1(lambda, d)?;
        let rho = lambda * d;
        let mut order = 1;
        let mut t = rho;
        while order < MAX_ORDER && t > 1e-19 {
            order += 1;
            t *= rho / order as f64;
        }
        let coef: Vec<f64> = (0..=order)
            .scan(1.0, |c, m| {
                if m > 0 {
                    *c *= -lambda / m as f64;
                }
                Some(*c)
            })
            .collect();
        let growth = rho.exp();
        // past this many segments the tail is below e^{-40}
        let settled = (40.0 / (wait_tail_rate(lambda, d) * d)).ceil() as usize + order;
        let mut cdf = vec![1.0 - rho];
        let mut truncated = true;
        while cdf.len() < MAX_SEGMENTS {
            let n = cdf.len();
            let mut s = 0.0;
            let mut dm = 1.0;
            for m in 0..n.min(order + 1) {
                s += cdf[n - 1 - m] * coef[m] * dm;
                dm *= d;
            }
            let next = (growth * s).min(1.0);
            cdf.push(next);
            // rounding drift can hold the recursion a little below 1
            if 1.0 - next <= 1e-15 || n >= settled {
                truncated = false;
                break;
            }
        }
        let jumps = cdf
            .iter()
            .enumerate()
            .map(|(n, &f)| if n == 0 { f } else { f - cdf[n - 1] })
            .collect();
        Ok(WaitTable {
            lambda,
            d,
            order,
            cdf,
            jumps,
            coef,
            truncated,
        })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn service(&self) -> f64 {
        self.d
    }

    /// Probability of zero wait, `1 − λD`.
    pub fn idle_mass(&self) -> f64 {
        self.cdf[0]
    }

    /// Index of the last tabulated segment; the CDF is 1 beyond it.
    pub fn end_segment(&self) -> usize {
        self.cdf.len() - 1
    }

    /// True if the table hit its size cap before the CDF reached 1.
    pub fn truncated(&self) -> bool {
        self.truncated
    }

    fn split(&self, w: f64) -> (usize, f64) {
        let n = (w / self.d).floor();
        let n = if n < 0.0 { 0 } else { n as usize };
        let u = (w - n as f64 * self.d).clamp(0.0, self.d);
        (n, u)
    }

    fn local(&self, values: &[f64], n: usize, u: f64) -> f64 {
        let mut s = 0.0;
        let mut up = 1.0;
        for m in 0..=n.min(self.order) {
            s += values[n - m] * self.coef[m] * up;
            up *= u;
        }
        (self.lambda * u).exp() * s
    }

    /// `P_W(w)`.
    pub fn cdf(&self, w: f64) -> f64 {
        if w.is_nan() {
            return f64::NAN;
        }
        if w < 0.0 {
            return 0.0;
        }
        let (n, u) = self.split(w);
        if n >= self.end_segment() {
            return 1.0;
        }
        self.local(&self.cdf, n, u).clamp(0.0, 1.0)
    }

    /// Continuous part of the waiting-time density, `w > 0`.
    pub fn density(&self, w: f64) -> f64 {
        if w.is_nan() {
            return f64::NAN;
        }
        if w <= 0.0 {
            return 0.0;
        }
        let (n, u) = self.split(w);
        if n >= self.end_segment() {
            return 0.0;
        }
        (self.lambda * self.local(&self.jumps, n, u)).max(0.0)
    }

    /// Decay rate of `1 − P_W(w)`: the positive root of `λ(e^{ηD} − 1) = η`.
    pub fn tail_rate(&self) -> f64 {
        wait_tail_rate(self.lambda, self.d)
    }

    /// Waiting time as a mixed distribution with its atom at zero.
    pub fn distribution(self: &Arc<Self>) -> MixedDistribution {
        let table = Arc::clone(self);
        MixedDistribution::new(
            Arc::new(move |w| table.density(w)),
            vec![Atom {
                location: 0.0,
                mass: self.idle_mass(),
            }],
            0.0,
        )
        .expect("idle mass lies in [0, 1]")
    }

    /// Convolution kernel `∫₀ˣ q(w) e^{−a(x−w)} e^{−bw} dw` where `q` is the
    /// continuous density or the CDF.
    pub fn kernel(self: &Arc<Self>, source: KernelSource, a: f64, b: f64) -> Kernel {
        Kernel::new(Arc::clone(self), source, a, b)
    }

    fn values(&self, source: KernelSource) -> &[f64] {
        match source {
            KernelSource::Density => &self.jumps,
            KernelSource::Cdf => &self.cdf,
        }
    }

    /// `∫₀ᵛ q(nD+u) e^{−a(v−u)} e^{−bu} du`, without the `e^{−bnD}` factor.
    fn segment_integral(&self, source: KernelSource, a: f64, b: f64, n: usize, v: f64) -> f64 {
        if v <= 0.0 {
            return 0.0;
        }
        let top = n.min(self.order);
        let mut moments = [0.0; MAX_ORDER + 1];
        power_exp_moments(self.lambda + a - b, v, &mut moments[..=top]);
        let values = self.values(source);
        let mut s = 0.0;
        for m in 0..=top {
            s += values[n - m] * self.coef[m] * moments[m];
        }
        let scale = match source {
            KernelSource::Density => self.lambda,
            KernelSource::Cdf => 1.0,
        };
        scale * (-a * v).exp() * s
    }
}

/// Which waiting-time function a [`Kernel`] integrates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KernelSource {
    /// Continuous part of the density (the atom at 0 is excluded).
    Density,
    /// The CDF (atom included).
    Cdf,
}

/// `K(x) = ∫₀ˣ q(w) e^{−a(x−w)} e^{−bw} dw` with values at segment ends
/// cached.
#[derive(Debug, Clone)]
pub struct Kernel {
    table: Arc<WaitTable>,
    source: KernelSource,
    a: f64,
    b: f64,
    prefix: Vec<f64>,
}

impl Kernel {
    fn new(table: Arc<WaitTable>, source: KernelSource, a: f64, b: f64) -> Self {
        let end = table.end_segment();
        let d = table.d;
        let decay = (-a * d).exp();
        let mut prefix = Vec::with_capacity(end + 1);
        prefix.push(0.0);
        for n in 0..end {
            let seg = (-b * n as f64 * d).exp() * table.segment_integral(source, a, b, n, d);
            let next = decay * prefix[n] + seg;
            prefix.push(next);
        }
        Kernel {
            table,
            source,
            a,
            b,
            prefix,
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        let t = &self.table;
        let (n, v) = t.split(x);
        let end = t.end_segment();
        if n >= end {
            let base = end as f64 * t.d;
            let s = x - base;
            let mut r = (-self.a * s).exp() * self.prefix[end];
            if self.source == KernelSource::Cdf {
                r += (-self.b * base).exp() * exp_conv(self.a, self.b, s);
            }
            return r;
        }
        (-self.a * v).exp() * self.prefix[n]
            + (-self.b * n as f64 * t.d).exp()
                * t.segment_integral(self.source, self.a, self.b, n, v)
    }
}

/// How a θ argument relates to the removable singularities of the
/// classical closed form.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ThetaBranch {
    Zero,
    MinusLambda,
    General,
}

pub fn theta_branch(beta: f64, lambda: f64) -> ThetaBranch {
    let tol = 1e-9 * lambda;
    if beta.abs() < tol {
        ThetaBranch::Zero
    } else if (beta + lambda).abs() < tol {
        ThetaBranch::MinusLambda
    } else {
        ThetaBranch::General
    }
}

/// `θ(M, β) = ∫₀ᴹ p_W(w) e^{βw} dw` over the continuous part of the
/// waiting-time density; the atom at zero is not included.
pub fn theta(m: f64, beta: f64, lambda: f64, d: f64) -> Result<f64> {
    if !m.is_finite() || m < 0.0 || !beta.is_finite() {
        return Err(Error::Domain(format!("theta({m}, {beta})")));
    }
    let table = WaitTable::new(lambda, d)?;
    Ok(theta_with(&table, m, beta))
}

pub(crate) fn theta_with(table: &WaitTable, m: f64, beta: f64) -> f64 {
    if m <= 0.0 {
        return 0.0;
    }
    let (n_top, v_top) = table.split(m);
    let n_top = n_top.min(table.end_segment());
    let v_top = if n_top == table.end_segment() {
        0.0
    } else {
        v_top
    };
    let mut total = 0.0;
    for n in 0..=n_top {
        let v = if n == n_top { v_top } else { table.d };
        total += (beta * n as f64 * table.d).exp()
            * table.segment_integral(KernelSource::Density, 0.0, -beta, n, v);
    }
    total
}

/// `P_W(w)` for an M/D/1 queue with arrival rate `lambda` and service `d`.
pub fn md1_wait_cdf(w: f64, lambda: f64, d: f64) -> Result<f64> {
    if w.is_nan() {
        return Err(Error::Domain("waiting time is NaN".into()));
    }
    Ok(WaitTable::new(lambda, d)?.cdf(w))
}

pub fn md1_wait_distribution(lambda: f64, d: f64) -> Result<MixedDistribution> {
    Ok(Arc::new(WaitTable::new(lambda, d)?).distribution())
}

/// Erlang's alternating sum evaluated term by term in log magnitude with
/// compensated accumulation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErlangValue {
    pub value: f64,
    /// Set when the point lies outside `λD ≤ 0.95, w/D ≤ 150` or the
    /// cancellation error estimate exceeds 1e-9.
    pub degraded: bool,
}

pub fn erlang_wait_cdf(w: f64, lambda: f64, d: f64) -> Result<ErlangValue> {
    check_md1(lambda, d)?;
    if w.is_nan() {
        return Err(Error::Domain("waiting time is NaN".into()));
    }
    if w < 0.0 {
        return Ok(ErlangValue {
            value: 0.0,
            degraded: false,
        });
    }
    let rho = lambda * d;
    let kmax = (w / d).floor() as usize;
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    let mut magnitude = 0.0f64;
    let mut ln_fact = 0.0f64;
    for k in 0..=kmax {
        if k > 0 {
            ln_fact += (k as f64).ln();
        }
        let gap = w - k as f64 * d;
        let term = if k == 0 {
            (lambda * w).exp()
        } else if gap <= 0.0 {
            0.0
        } else {
            let ln_mag = k as f64 * (lambda * gap).ln() - ln_fact + lambda * gap;
            let sign = if k % 2 == 1 { -1.0 } else { 1.0 };
            sign * ln_mag.exp()
        };
        magnitude += term.abs();
        let y = term - comp;
        let t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    let value = ((1.0 - rho) * sum).clamp(0.0, 1.0);
    let error_estimate = 100.0 * (1.0 - rho) * magnitude * f64::EPSILON;
    let degraded = rho > 0.95 || w / d > 150.0 || error_estimate > 1e-9 || !sum.is_finite();
    Ok(ErlangValue { value, degraded })
}
