use conharm::cross_section::CrossSection;
use conharm::fields::{FieldKind, FieldMode, SeparableField};
use conharm::oracle::ConvergenceStudy;
use conharm::spectra::{GrowthMode, TypeTag};
use conharm::verify::fd_consistency;

fn second_order(s: &ConvergenceStudy) -> bool {
    s.exact || s.order().is_some_and(|p| p >= 1.9)
}

fn field(m: usize, modes: &[(f64, GrowthMode, usize)]) -> (SeparableField, CrossSection) {
    let s = CrossSection::round_sphere(m).unwrap();
    let mut f = SeparableField::new(m, &s.id, s.volume(), FieldKind::OneForm);
    for (c, g, i) in modes {
        f = f.with_term(*c, FieldMode::OneForm(g.clone()), *i).unwrap();
    }
    (f, s)
}

#[test]
fn r3_mixture_matches_central_differences() {
    let (f, s) = field(
        3,
        &[
            (1.0, GrowthMode::type_i(3, 1.0).unwrap(), 0),
            (0.6, GrowthMode::new(3, TypeTag::III, 2.0, 2.0, 3).unwrap(), 1),
            (-0.4, GrowthMode::new(3, TypeTag::II, 1.0, 6.0, 5).unwrap(), 3),
        ],
    );
    let (ds, dn) = fd_consistency(&f, &s, &[1.1, 0.9, 0.4]).unwrap();
    assert!(second_order(&ds), "{ds:?}");
    assert!(second_order(&dn), "{dn:?}");
}

#[test]
fn r4_mixture_matches_central_differences() {
    let (f, s) = field(
        4,
        &[
            (0.8, GrowthMode::new(4, TypeTag::IV, 1.0, 4.0, 6).unwrap(), 3),
            (0.5, GrowthMode::new(4, TypeTag::III, 2.0, 3.0, 4).unwrap(), 2),
            (1.0, GrowthMode::type_i(4, 1.0).unwrap(), 0),
        ],
    );
    let (ds, dn) = fd_consistency(&f, &s, &[1.0, 0.7, 0.3, 0.9]).unwrap();
    assert!(second_order(&ds), "{ds:?}");
    assert!(second_order(&dn), "{dn:?}");
}

#[test]
fn radial_form_dstar_on_grids() {
    for m in [3, 4] {
        let (f, s) = field(m, &[(1.0, GrowthMode::type_i(m, 1.0).unwrap(), 0)]);
        let center: Vec<f64> = if m == 3 { vec![1.0, 1.0, 0.5] } else { vec![1.0, 0.7, 0.3, 0.9] };
        let (ds, dn) = fd_consistency(&f, &s, &center).unwrap();
        assert!(second_order(&ds) && second_order(&dn));
        assert!(ds.errors.iter().all(|e| *e < 1e-2));
    }
}
