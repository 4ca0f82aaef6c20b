//! Reference computations used only by the integration tests. They work
//! from the queueing model directly and share no code with the library's
//! closed forms.

#![allow(dead_code)]

/// Composite Simpson on `[a, b]` with `n` (rounded up to even) panels.
/// The end values are taken just inside, so a jump at either end is seen
/// from the correct side.
pub fn simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, n: usize) -> f64 {
    if b <= a {
        return 0.0;
    }
    let n = n + n % 2;
    let h = (b - a) / n as f64;
    let inset = (b - a) * 1e-12;
    let mut s = f(a + inset) + f(b - inset);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        s += w * f(a + i as f64 * h);
    }
    s * h / 3.0
}

/// Simpson split at every interior point of `cuts`, so kinks sit on panel edges.
pub fn simpson_pieces<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, cuts: &[f64], n_per: usize) -> f64 {
    let mut edges = vec![a];
    edges.extend(cuts.iter().copied().filter(|&c| c > a && c < b));
    edges.push(b);
    edges
        .windows(2)
        .map(|w| simpson(&f, w[0], w[1], n_per))
        .sum()
}

/// M/D/1 waiting-time CDF from the classical Erlang sum
/// `(1−ρ) Σ_{k ≤ w/D} (λ(kD−w))^k / k! · e^{−λ(kD−w)}`.
pub fn erlang_cdf(w: f64, lambda: f64, d: f64) -> f64 {
    if w < 0.0 {
        return 0.0;
    }
    let rho = lambda * d;
    let mut s = 0.0;
    let mut fact = 1.0;
    for k in 0..=((w / d).floor() as i32) {
        if k > 0 {
            fact *= k as f64;
        }
        let u = lambda * (k as f64 * d - w);
        s += u.powi(k) / fact * (-u).exp();
    }
    (1.0 - rho) * s
}

/// Derivative of [`erlang_cdf`] for `w > 0`.
pub fn erlang_density(w: f64, lambda: f64, d: f64) -> f64 {
    if w <= 0.0 {
        return 0.0;
    }
    let rho = lambda * d;
    let mut s = 0.0;
    let mut fact = 1.0;
    for k in 0..=((w / d).floor() as i32) {
        let prev_fact = fact;
        if k > 0 {
            fact *= k as f64;
        }
        let u = lambda * (k as f64 * d - w);
        let mut term = u.powi(k) / fact;
        if k > 0 {
            term -= u.powi(k - 1) / prev_fact;
        }
        s += lambda * (-u).exp() * term;
    }
    (1.0 - rho) * s
}

/// Density of a sum of independent exponentials with the given rates,
/// by uniformization of the pure-death chain through the phases.
pub fn hypo_density(rates: &[f64], t: f64) -> f64 {
    if t < 0.0 {
        return 0.0;
    }
    let big = rates.iter().copied().fold(0.0, f64::max);
    let k = rates.len();
    // distribution over phases after n uniformized jumps
    let mut v = vec![0.0; k + 1];
    v[0] = 1.0;
    let x = big * t;
    let mut pois = (-x).exp();
    let mut out = 0.0;
    let mut n = 0u32;
    loop {
        out += pois * v[k - 1] * rates[k - 1];
        let mut next = vec![0.0; k + 1];
        for i in 0..k {
            let leave = rates[i] / big;
            next[i] += v[i] * (1.0 - leave);
            next[i + 1] += v[i] * leave;
        }
        next[k] += v[k];
        v = next;
        n += 1;
        pois *= x / n as f64;
        if n as f64 > x + 40.0 * x.sqrt() + 60.0 {
            break;
        }
    }
    out
}

/// Fine-grid check helper: largest absolute gap.
pub fn max_gap<F: Fn(f64) -> f64, G: Fn(f64) -> f64>(f: F, g: G, grid: &[f64]) -> (f64, f64) {
    grid.iter()
        .map(|&x| ((f(x) - g(x)).abs(), x))
        .fold((0.0, f64::NAN), |acc, v| if v.0 > acc.0 { v } else { acc })
}

pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| a + (b - a) * i as f64 / (n - 1) as f64)
        .collect()
}
