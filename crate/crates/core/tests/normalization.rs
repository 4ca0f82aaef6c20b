use tandem_paoi::numerics::total_mass;
use tandem_paoi::{CaseLabel, Tandem, TandemParams};

fn grid() -> Vec<TandemParams> {
    vec![
        TandemParams::md1(0.5, 1.0, 0.8).unwrap(),
        TandemParams::md1(0.2, 1.0, 2.0).unwrap(),
        TandemParams::md1(0.9, 2.0, 0.5).unwrap(),
        TandemParams::mm1(0.5, 1.0, 1.25).unwrap(),
        TandemParams::mm1(0.1, 0.5, 3.0).unwrap(),
        TandemParams::mm1(0.7, 1.0, 1.0).unwrap(),
    ]
}

#[test]
fn mixture_and_cases_integrate_to_one() {
    for params in grid() {
        let t = Tandem::new(&params).unwrap();
        let spec = t.quadrature_spec();
        let m = total_mass(&t.distribution(), &spec).unwrap();
        assert!((m - 1.0).abs() < 1e-6, "{params:?}: {m}");
        for case in CaseLabel::ALL {
            let m = total_mass(&t.case_distribution(case), &spec).unwrap();
            assert!((m - 1.0).abs() < 1e-6, "{params:?} case {case}: {m}");
        }
    }
}

#[test]
fn table_mass_agrees_with_direct_quadrature() {
    for params in grid() {
        let t = Tandem::new(&params).unwrap();
        let table = t.cdf_table().unwrap();
        assert!((table.total_mass() - 1.0).abs() < 1e-8, "{params:?}");
        let mut prev = 0.0;
        for i in 0..400 {
            let c = table.cdf(i as f64 * 0.1);
            assert!(c >= prev);
            prev = c;
        }
    }
}

#[test]
fn md1_cdf_vanishes_below_two_d() {
    let t = Tandem::new(&TandemParams::md1(0.5, 1.0, 0.8).unwrap()).unwrap();
    let table = t.cdf_table().unwrap();
    for i in 0..=1600 {
        let tau = i as f64 * 0.001;
        if tau < 1.6 {
            assert_eq!(table.cdf(tau), 0.0, "τ={tau}");
        }
    }
}
