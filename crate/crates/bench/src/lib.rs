//! Shared fixtures for the kernel benchmarks.

use conharm::corpus::{build_corpus, CorpusConfig};
use conharm::cross_section::CrossSection;
use conharm::fields::{FieldKind, FieldMode, SeparableField};
use conharm::spectra::{GrowthMode, TypeTag};

/// Dyadic radii 2^{-4} ..= 2^4, four per octave.
pub fn dyadic_radii() -> Vec<f64> {
    (-16..=16).map(|k| 2f64.powf(f64::from(k) / 4.0)).collect()
}

/// First `n` fields of the default seeded corpus.
pub fn corpus(n: usize) -> Vec<SeparableField> {
    build_corpus(&CorpusConfig {
        size: n,
        ..Default::default()
    })
    .expect("default corpus builds")
}

/// Type I + IV + III mixture on flat ℝ⁴, the heaviest single field the
/// benches use.
pub fn r4_mixture() -> (SeparableField, CrossSection) {
    let s = CrossSection::round_sphere(4).expect("S3");
    let f = SeparableField::new(4, &s.id, s.volume(), FieldKind::OneForm)
        .with_term(1.0, FieldMode::OneForm(GrowthMode::type_i(4, 1.0).unwrap()), 0)
        .and_then(|f| f.with_term(0.8, FieldMode::OneForm(GrowthMode::new(4, TypeTag::IV, 1.0, 4.0, 6).unwrap()), 3))
        .and_then(|f| f.with_term(0.5, FieldMode::OneForm(GrowthMode::new(4, TypeTag::III, 2.0, 3.0, 4).unwrap()), 2))
        .expect("valid mixture");
    (f, s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixtures_are_harmonic() {
        let (f, _) = r4_mixture();
        assert!(f.harmonicity_residual(&dyadic_radii()) < 1e-10);
        assert_eq!(corpus(4).len(), 4);
    }
}
