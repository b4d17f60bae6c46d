use conharm::corpus::{build_corpus, CorpusConfig};
use conharm::cross_section::{sphere_function_spectrum, EigenTable};
use conharm::fields::{FieldKind, FieldMode, SeparableField};
use conharm::frequency::{frequency_profile, log_convexity_defect, pairing_law_check};
use conharm::radial::RadialProfile;
use conharm::spectra::{indicial_roots, lichnerowicz_filter, GrowthMode, IndicialRoots, TypeTag};
use proptest::prelude::*;

fn dyadic() -> Vec<f64> {
    (-16..=16).map(|k| 2f64.powf(k as f64 / 4.0)).collect()
}

fn small_corpus(seed: u64) -> Vec<SeparableField> {
    build_corpus(&CorpusConfig {
        size: 6,
        seed,
        ..Default::default()
    })
    .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn mixtures_are_harmonic_and_radial_derivative_commutes(seed in any::<u64>()) {
        for f in small_corpus(seed) {
            prop_assert!(f.harmonicity_residual(&dyadic()) < 1e-10);
            let df = f.radial_derivative().unwrap();
            prop_assert!(df.harmonicity_residual(&dyadic()) < 1e-10);
        }
    }

    #[test]
    fn frequency_is_monotone_and_log_convex(seed in any::<u64>()) {
        for f in small_corpus(seed) {
            let p = frequency_profile(&f, &dyadic()).unwrap();
            prop_assert!(p.n.windows(2).all(|w| w[1] >= w[0] - 1e-9));
            prop_assert!(log_convexity_defect(&p) >= -1e-9);
            prop_assert!(p.f.windows(2).all(|w| w[1] > w[0]));
            prop_assert!(p.h.iter().all(|h| *h > 0.0));
        }
    }

    #[test]
    fn pairing_exponent_is_two_s_plus_m_minus_one(seed in any::<u64>()) {
        for f in small_corpus(seed) {
            for t in &f.terms {
                let v = SeparableField { terms: vec![t.clone()], ..f.clone() };
                let fit = pairing_law_check(&f, &v, &[0.5, 1.0, 2.0]).unwrap();
                prop_assert!(fit.pass);
                if let Some(e) = fit.exponent {
                    prop_assert!((e - (2.0 * t.mode.rate() + f.m as f64 - 1.0)).abs() < 1e-9);
                }
            }
        }
    }

    #[test]
    fn exact_modes_are_closed_and_coclosed_modes_are_coclosed(m in 4usize..7, k in 1u32..4) {
        let kf = f64::from(k);
        let lam = kf * (kf + m as f64 - 2.0);
        let mu = (kf + 1.0) * (kf + m as f64 - 3.0);
        let vol = conharm::special::sphere_volume(m);
        let ii = GrowthMode::new(m, TypeTag::II, kf - 1.0, lam, 1).unwrap();
        let iv = GrowthMode::new(m, TypeTag::IV, kf, mu, 1).unwrap();
        let u = SeparableField::new(m, "S", vol, FieldKind::OneForm).with_term(1.3, FieldMode::OneForm(ii), 0).unwrap();
        prop_assert!(u.components().d_norm2_density().unwrap().is_zero());
        prop_assert!(u.codifferential().unwrap().is_zero());
        let w = SeparableField::new(m, "S", vol, FieldKind::OneForm).with_term(0.7, FieldMode::OneForm(iv), 0).unwrap();
        prop_assert!(w.codifferential().unwrap().is_zero());
        prop_assert!(!w.components().d_norm2_density().unwrap().is_zero());
    }

    #[test]
    fn bulk_and_boundary_dirichlet_agree(seed in any::<u64>(), r in 0.05f64..20.0) {
        for f in small_corpus(seed) {
            let c = f.components();
            let bulk = c.gradient_density().integral_from_zero(r).unwrap();
            let bdry = c.boundary_dirichlet().eval(r);
            let h = c.boundary_mass().eval(r);
            prop_assert!((bulk - bdry).abs() <= 1e-9 * bulk.abs().max(bdry.abs()).max(1e-14 * h / r));
        }
    }

    #[test]
    fn indicial_roots_solve_the_quadratic(m in 2usize..9, c1 in -20.0f64..40.0) {
        let mf = m as f64;
        let q = |s: f64| s * s + (mf - 2.0) * s - (c1 + mf - 1.0);
        match indicial_roots(m, c1) {
            IndicialRoots::Distinct { plus, minus } => {
                prop_assert!(plus > minus);
                prop_assert!(q(plus).abs() < 1e-9 * (1.0 + c1.abs()));
                prop_assert!(q(minus).abs() < 1e-9 * (1.0 + c1.abs()));
            }
            IndicialRoots::Repeated { root } => prop_assert!((root + (mf - 2.0) / 2.0).abs() < 1e-9),
            IndicialRoots::Complex { re, .. } => {
                prop_assert!(mf * mf + 4.0 * c1 < 0.0);
                prop_assert!((re + (mf - 2.0) / 2.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn lichnerowicz_filter_keeps_everything_at_or_above_the_bound(m in 4usize..8, s in 0.0f64..4.0) {
        let mu = (s + 1.0) * (s + m as f64 - 3.0);
        let g = GrowthMode::new(m, TypeTag::IV, s, mu, 1).unwrap();
        let (kept, _) = lichnerowicz_filter(&[g], m);
        prop_assert_eq!(kept.len() == 1, mu >= 2.0 * m as f64 - 4.0 - 1e-12);
    }

    #[test]
    fn radial_integrals_invert_derivatives(p in 0.05f64..4.0, c in -3.0f64..3.0, r in 0.1f64..5.0) {
        let f = RadialProfile::power(c, p).add(&RadialProfile::power_log(0.5, p + 0.5, 1));
        let fp = f.derivative();
        let got = fp.integral_from_zero(r).unwrap();
        prop_assert!((got - f.eval(r)).abs() < 1e-10 * (1.0 + f.eval(r).abs()));
    }

    #[test]
    fn eigen_tables_round_trip(m in 2usize..7, k in 0usize..6) {
        let t = sphere_function_spectrum(m, k).unwrap();
        let back = EigenTable::from_json(&t.to_json().unwrap()).unwrap();
        prop_assert_eq!(back, t);
    }
}
