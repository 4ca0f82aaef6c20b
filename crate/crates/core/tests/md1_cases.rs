mod common;

use common::{erlang_cdf, erlang_density, linspace, simpson_pieces};
use tandem_paoi::md1::{md1_wait_cdf, theta, Md1Tandem};
use tandem_paoi::{CaseLabel, TandemParams};

/// Joint densities `p(X)·p_{Δ|X}(τ)` rebuilt by direct 1-D convolution of
/// the model's primitive laws.
struct Oracle {
    lambda: f64,
    mu1: f64,
    d: f64,
}

impl Oracle {
    fn alpha1(&self) -> f64 {
        self.mu1 - self.lambda
    }
    fn p_w(&self, w: f64) -> f64 {
        erlang_density(w, self.lambda, self.d)
    }
    fn cdf_w(&self, w: f64) -> f64 {
        erlang_cdf(w, self.lambda, self.d)
    }
    /// `V + S₁` with `V ~ Exp(λ)`, `S₁ ~ Exp(μ₁)`.
    fn f_z(&self, z: f64) -> f64 {
        let (l, m) = (self.lambda, self.mu1);
        l * m / (m - l) * ((-l * z).exp() - (-m * z).exp())
    }
    fn cdf_z(&self, z: f64) -> f64 {
        let (l, m) = (self.lambda, self.mu1);
        1.0 - (m * (-l * z).exp() - l * (-m * z).exp()) / (m - l)
    }
    /// Interarrival shorter than the previous system time, weighted by the
    /// residual system time law.
    fn h(&self, t: f64) -> f64 {
        let a1 = self.alpha1();
        (1.0 - (-self.lambda * t).exp()) * a1 * (-a1 * t).exp()
    }

    fn cuts(&self, tau: f64) -> Vec<f64> {
        let mut c = Vec::new();
        let mut k = 0.0;
        while k * self.d < tau {
            c.push(k * self.d);
            c.push(tau - 2.0 * self.d - k * self.d);
            c.push(tau - self.d - k * self.d);
            k += 1.0;
        }
        c.sort_by(f64::total_cmp);
        c
    }

    fn joint(&self, tau: f64) -> [f64; 4] {
        let (d, mu1) = (self.d, self.mu1);
        let x = tau - 2.0 * d;
        if x < 0.0 {
            return [0.0; 4];
        }
        let m0 = 1.0 - self.lambda * d;
        let n = 400;
        let cuts = self.cuts(tau);
        let a = m0 * (1.0 - (-mu1 * d).exp()) * self.h(x)
            + simpson_pieces(
                |m| self.h(tau - d - m) * (1.0 - (-mu1 * m).exp()) * self.p_w(m - d),
                d,
                tau - d,
                &cuts,
                n,
            );
        let b = simpson_pieces(
            |t| self.h(t) * mu1 * (-mu1 * (tau - d - t)).exp() * self.cdf_w(x - t),
            0.0,
            x,
            &cuts,
            n,
        );
        let a1 = self.alpha1();
        let c = a1 * (-mu1 * x).exp() * m0 * self.cdf_z(d)
            + a1 * simpson_pieces(
                |t| (-mu1 * t).exp() * self.p_w(x - t) * self.cdf_z(tau - d - t),
                0.0,
                x,
                &cuts,
                n,
            );
        let dd = a1
            * simpson_pieces(
                |t| (-mu1 * t).exp() * self.f_z(tau - d - t) * self.cdf_w(x - t),
                0.0,
                x,
                &cuts,
                n,
            );
        [a, b, c, dd]
    }
}

fn check(lambda: f64, mu1: f64, d: f64) {
    let params = TandemParams::md1(lambda, mu1, d).unwrap();
    let model = Md1Tandem::new(&params).unwrap();
    let oracle = Oracle { lambda, mu1, d };
    for tau in linspace(2.0 * d + 0.013, 2.0 * d + 14.0, 45) {
        let got = model.joint_densities(tau);
        let want = oracle.joint(tau);
        for case in CaseLabel::ALL {
            let i = case.index();
            let gap = (got[i] - want[i]).abs();
            assert!(
                gap < 2e-6 * (1.0 + want[i]),
                "case {case} at tau={tau}: {} vs oracle {}",
                got[i],
                want[i]
            );
        }
    }
}

#[test]
fn joint_densities_match_convolution_oracle() {
    check(0.5, 1.0, 0.8);
    check(0.3, 1.5, 1.2);
    check(0.7, 2.0, 0.5);
}

#[test]
fn conditional_density_is_joint_over_probability() {
    let params = TandemParams::md1(0.5, 1.0, 0.8).unwrap();
    let model = Md1Tandem::new(&params).unwrap();
    let probs = model.probabilities();
    for tau in [1.7, 3.0, 7.5] {
        let j = model.joint_densities(tau);
        for case in CaseLabel::ALL {
            let c = model.case_pdf(case, tau);
            assert!((c * probs.get(case) - j[case.index()]).abs() < 1e-15);
        }
        assert!((model.pdf(tau) - j.iter().sum::<f64>()).abs() < 1e-15);
    }
}

#[test]
fn wait_cdf_matches_erlang_sum() {
    for &(l, d) in &[(0.5, 0.8), (0.2, 2.0), (0.9, 1.0)] {
        for w in linspace(0.0, 12.0, 97) {
            let got = md1_wait_cdf(w, l, d).unwrap();
            let want = erlang_cdf(w, l, d);
            assert!(
                (got - want).abs() < 1e-9,
                "λ={l} D={d} w={w}: {got} vs {want}"
            );
        }
    }
}

#[test]
fn theta_matches_brute_quadrature() {
    let (l, d) = (0.5, 0.8);
    let cuts: Vec<f64> = (1..40).map(|k| k as f64 * d).collect();
    for &beta in &[0.0, -0.5, 0.3, -1.0, 0.2] {
        for &m in &[0.0, 0.4, 0.8, 2.5, 6.1] {
            let got = theta(m, beta, l, d).unwrap();
            let want = simpson_pieces(
                |w| erlang_density(w, l, d) * (beta * w).exp(),
                0.0,
                m,
                &cuts,
                2000,
            );
            assert!((got - want).abs() < 1e-9, "β={beta} M={m}: {got} vs {want}");
        }
    }
}

#[test]
fn theta_continuous_across_branches() {
    let (l, d) = (0.5, 0.8);
    for &center in &[0.0, -l] {
        for &m in &[0.5, 3.3] {
            let mid = theta(m, center, l, d).unwrap();
            for eps in [1e-8, -1e-8] {
                let near = theta(m, center + eps, l, d).unwrap();
                assert!((near - mid).abs() < 1e-7, "center {center} eps {eps}");
            }
        }
    }
}

#[test]
fn wait_density_integrates_to_cdf() {
    let (l, d) = (0.5, 0.8);
    let table = tandem_paoi::md1::WaitTable::new(l, d).unwrap();
    let cuts: Vec<f64> = (1..20).map(|k| k as f64 * d).collect();
    for &w in &[0.3, 0.8, 1.9, 5.0, 11.0] {
        let cont = simpson_pieces(|x| table.density(x), 0.0, w, &cuts, 2000);
        assert!((cont + table.idle_mass() - table.cdf(w)).abs() < 1e-9);
    }
}
