use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

const MAX_INTERVALS: usize = 20_000;

/// 15-point Kronrod estimate of `∫ₐᵇ f` with the QUADPACK error heuristic.
/// Each component of `f` is integrated on the same nodes.
pub fn gk15<const N: usize, F>(f: &F, a: f64, b: f64) -> ([f64; N], [f64; N])
where
    F: Fn(f64) -> [f64; N],
{
    let centr = 0.5 * (a + b);
    let hlgth = 0.5 * (b - a);
    let fc = f(centr);
    let mut resk = [0.0; N];
    let mut resg = [0.0; N];
    let mut resabs = [0.0; N];
    let mut fv1 = [[0.0; N]; 7];
    let mut fv2 = [[0.0; N]; 7];
    for i in 0..N {
        resk[i] = fc[i] * WGK[7];
        resg[i] = fc[i] * WG[3];
        resabs[i] = resk[i].abs();
    }
    for j in 0..7 {
        let dx = hlgth * XGK[j];
        let f1 = f(centr - dx);
        let f2 = f(centr + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        for i in 0..N {
            resk[i] += WGK[j] * (f1[i] + f2[i]);
            resabs[i] += WGK[j] * (f1[i].abs() + f2[i].abs());
            if j % 2 == 1 {
                resg[i] += WG[j / 2] * (f1[i] + f2[i]);
            }
        }
    }
    let mut value = [0.0; N];
    let mut error = [0.0; N];
    for i in 0..N {
        let reskh = resk[i] * 0.5;
        let mut resasc = WGK[7] * (fc[i] - reskh).abs();
        for j in 0..7 {
            resasc += WGK[j] * ((fv1[j][i] - reskh).abs() + (fv2[j][i] - reskh).abs());
        }
        let h = hlgth.abs();
        let resasc = resasc * h;
        let resabs = resabs[i] * h;
        let mut err = ((resk[i] - resg[i]) * hlgth).abs();
        if resasc != 0.0 && err != 0.0 {
            err = resasc * (200.0 * err / resasc).powf(1.5).min(1.0);
        }
        if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
            err = err.max(50.0 * f64::EPSILON * resabs);
        }
        value[i] = resk[i] * hlgth;
        error[i] = err;
    }
    (value, error)
}

struct Piece<const N: usize> {
    a: f64,
    b: f64,
    value: [f64; N],
    error: f64,
}

impl<const N: usize> PartialEq for Piece<N> {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl<const N: usize> Eq for Piece<N> {}
impl<const N: usize> PartialOrd for Piece<N> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<const N: usize> Ord for Piece<N> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// Globally adaptive Gauss–Kronrod over `[a, b]`, split first at every
/// breakpoint strictly inside. `weights` scales each component's error
/// before the tolerance check.
pub fn integrate_vec<const N: usize, F>(
    f: &F,
    a: f64,
    b: f64,
    breakpoints: &[f64],
    abs_tol: f64,
    weights: [f64; N],
) -> Result<[f64; N]>
where
    F: Fn(f64) -> [f64; N],
{
    let (value, error) = integrate_budget(f, a, b, breakpoints, abs_tol, weights, MAX_INTERVALS);
    if error > abs_tol {
        return Err(Error::QuadratureNonConvergence {
            lower: a,
            upper: b,
            error,
        });
    }
    Ok(value)
}

/// Like [`integrate_vec`] but stops at `max_intervals` and reports the
/// error estimate reached instead of failing.
pub fn integrate_budget<const N: usize, F>(
    f: &F,
    a: f64,
    b: f64,
    breakpoints: &[f64],
    abs_tol: f64,
    weights: [f64; N],
    max_intervals: usize,
) -> ([f64; N], f64)
where
    F: Fn(f64) -> [f64; N],
{
    if !(b > a) {
        return ([0.0; N], 0.0);
    }
    let mut edges = vec![a];
    edges.extend(breakpoints.iter().copied().filter(|&x| x > a && x < b));
    edges.push(b);
    edges.sort_by(f64::total_cmp);
    edges.dedup();

    let score = |e: [f64; N]| {
        e.iter()
            .zip(weights.iter())
            .map(|(e, w)| e * w)
            .fold(0.0, f64::max)
    };
    let mut heap = BinaryHeap::new();
    let mut total_err = 0.0;
    for w in edges.windows(2) {
        let (value, err) = gk15(f, w[0], w[1]);
        let error = score(err);
        total_err += error;
        heap.push(Piece {
            a: w[0],
            b: w[1],
            value,
            error,
        });
    }
    while total_err > abs_tol && heap.len() < max_intervals {
        let worst = heap.pop().expect("at least one interval");
        let mid = 0.5 * (worst.a + worst.b);
        if !(mid > worst.a && mid < worst.b) {
            // interval cannot shrink further
            heap.push(worst);
            break;
        }
        total_err -= worst.error;
        for (lo, hi) in [(worst.a, mid), (mid, worst.b)] {
            let (value, err) = gk15(f, lo, hi);
            let error = score(err);
            total_err += error;
            heap.push(Piece {
                a: lo,
                b: hi,
                value,
                error,
            });
        }
    }
    let mut pieces: Vec<_> = heap.into_vec();
    pieces.sort_by(|p, q| p.a.total_cmp(&q.a));
    let mut out = [0.0; N];
    let mut err = 0.0;
    for p in &pieces {
        err += p.error;
        for (o, v) in out.iter_mut().zip(p.value) {
            *o += v;
        }
    }
    (out, err)
}

/// Scalar version of [`integrate_vec`].
pub fn integrate<F>(f: &F, a: f64, b: f64, breakpoints: &[f64], abs_tol: f64) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    let g = |x: f64| [f(x)];
    Ok(integrate_vec(&g, a, b, breakpoints, abs_tol, [1.0])?[0])
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn polynomial_exact() {
        let f = |x: f64| [x.powi(20), 1.0];
        let (v, _) = gk15(&f, 0.0, 1.0);
        assert_relative_eq!(v[0], 1.0 / 21.0, max_relative = 1e-14);
        assert_relative_eq!(v[1], 1.0, max_relative = 1e-14);
    }

    #[test]
    fn exponential_and_kink() {
        let v = integrate(&|x: f64| (-x).exp(), 0.0, 40.0, &[], 1e-12).unwrap();
        assert_relative_eq!(v, 1.0 - (-40.0f64).exp(), max_relative = 1e-12);
        let v = integrate(&|x: f64| (x - 0.3).abs(), 0.0, 1.0, &[0.3], 1e-12).unwrap();
        assert_relative_eq!(v, 0.5 * (0.09 + 0.49), max_relative = 1e-12);
    }

    #[test]
    fn hard_integrand_adapts() {
        let v = integrate(&|x: f64| x.sqrt(), 0.0, 1.0, &[], 1e-10).unwrap();
        assert_relative_eq!(v, 2.0 / 3.0, max_relative = 1e-9);
    }

    #[test]
    fn empty_interval() {
        assert_eq!(integrate(&|_| 1.0, 2.0, 2.0, &[], 1e-9).unwrap(), 0.0);
    }
}
