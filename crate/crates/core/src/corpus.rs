//! Seeded random mixtures of separable harmonic modes on C(S²) and C(S³).

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::cross_section::{CrossSection, EigenTable};
use crate::error::Result;
use crate::fields::{FieldKind, FieldMode, FunctionMode, SeparableField};
use crate::spectra::{function_degrees, lichnerowicz_filter, GrowthMode, TypeTag};

pub const DEFAULT_SEED: u64 = 0x5eed;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorpusConfig {
    pub size: usize,
    pub seed: u64,
    pub max_modes: usize,
    /// Coefficient magnitudes are drawn uniformly from this range.
    pub coefficient_range: (f64, f64),
    /// Growth rates are drawn from the spectrum inside [lo, hi).
    pub rate_window: (f64, f64),
}

impl Default for CorpusConfig {
    fn default() -> Self {
        Self {
            size: 200,
            seed: DEFAULT_SEED,
            max_modes: 5,
            coefficient_range: (0.1, 1.0),
            rate_window: (0.0, 3.0),
        }
    }
}

/// Every mode with rate in `window` fed by the tables, both indicial roots,
/// types I to IV, after the Lichnerowicz filter. No completeness demand is
/// made: this is a sampling pool, not a classification.
pub fn mode_pool(m: usize, functions: &EigenTable, coclosed: Option<&EigenTable>, window: (f64, f64)) -> Result<Vec<GrowthMode>> {
    let inside = |s: f64| s >= window.0 - 1e-12 && s < window.1 - 1e-12;
    let mut pool = Vec::new();
    for s in [1.0, -(m as f64 - 1.0)] {
        if inside(s) {
            pool.push(GrowthMode::type_i(m, s)?);
        }
    }
    for item in &functions.items {
        if item.eigenvalue.abs() < 1e-12 {
            continue;
        }
        for t in [TypeTag::II, TypeTag::III] {
            for s in t.exponents_for(m, item.eigenvalue) {
                if inside(s) && !(t == TypeTag::III && (s + m as f64 - 3.0).abs() < 1e-12) {
                    pool.push(GrowthMode::new(m, t, s, item.eigenvalue, item.multiplicity)?);
                }
            }
        }
    }
    for item in coclosed.map(|t| t.items.as_slice()).unwrap_or_default() {
        for s in TypeTag::IV.exponents_for(m, item.eigenvalue) {
            if inside(s) {
                pool.push(GrowthMode::new(m, TypeTag::IV, s, item.eigenvalue, item.multiplicity)?);
            }
        }
    }
    Ok(lichnerowicz_filter(&pool, m).0)
}

struct Cone {
    section: CrossSection,
    functions: Vec<(FunctionMode, usize)>,
    forms: Vec<GrowthMode>,
}

impl Cone {
    fn new(m: usize, window: (f64, f64)) -> Result<Self> {
        let section = CrossSection::round_sphere(m)?;
        let ftab = section.function_table(5)?;
        let ctab = if m >= 4 { Some(section.coclosed_table(4)?) } else { None };
        let functions = function_degrees(m, &ftab, window)?
            .into_iter()
            .map(|d| {
                (
                    FunctionMode {
                        degree: d.degree,
                        eigenvalue: d.eigenvalue,
                    },
                    d.multiplicity,
                )
            })
            .collect();
        let forms = mode_pool(m, &ftab, ctab.as_ref(), window)?;
        Ok(Self {
            section,
            functions,
            forms,
        })
    }
}

/// `config.size` fields; each lives on C(S²) or C(S³), is a function or a
/// 1-form, and mixes 1..=max_modes distinct (mode, basis index) pairs.
pub fn build_corpus(config: &CorpusConfig) -> Result<Vec<SeparableField>> {
    let cones = [Cone::new(3, config.rate_window)?, Cone::new(4, config.rate_window)?];
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut out = Vec::with_capacity(config.size);
    for _ in 0..config.size {
        let cone = &cones[rng.random_range(0..cones.len())];
        let kind = if rng.random_bool(0.5) {
            FieldKind::Function
        } else {
            FieldKind::OneForm
        };
        let m = cone.section.cone_dim();
        let mut field = SeparableField::new(m, &cone.section.id, cone.section.volume(), kind);
        let n_modes = rng.random_range(1..=config.max_modes.max(1));
        let mut used: Vec<(usize, usize)> = Vec::new();
        for _ in 0..n_modes {
            let (pick, mode, mult) = match kind {
                FieldKind::Function => {
                    let i = rng.random_range(0..cone.functions.len());
                    let (f, mult) = cone.functions[i];
                    (i, FieldMode::Function(f), mult)
                }
                FieldKind::OneForm => {
                    let i = rng.random_range(0..cone.forms.len());
                    let g = cone.forms[i].clone();
                    let mult = if g.type_tag == TypeTag::I { 1 } else { g.multiplicity };
                    (i, FieldMode::OneForm(g), mult)
                }
            };
            let idx = rng.random_range(0..mult);
            if used.contains(&(pick, idx)) {
                continue;
            }
            used.push((pick, idx));
            let (lo, hi) = config.coefficient_range;
            let mag = rng.random_range(lo..=hi);
            let sign = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
            field = field.with_term(sign * mag, mode, idx)?;
        }
        out.push(field);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn corpus_is_deterministic_and_in_range() {
        let cfg = CorpusConfig {
            size: 50,
            ..Default::default()
        };
        let a = build_corpus(&cfg).unwrap();
        assert_eq!(a, build_corpus(&cfg).unwrap());
        for f in &a {
            assert!(!f.terms.is_empty() && f.terms.len() <= 5);
            assert!(f.m == 3 || f.m == 4);
            for t in &f.terms {
                assert!((0.1..=1.0).contains(&t.coefficient.abs()));
                assert!((0.0..3.0).contains(&t.mode.rate()));
            }
        }
        let other = build_corpus(&CorpusConfig { seed: 7, ..cfg }).unwrap();
        assert_ne!(a, other);
    }

    #[test]
    fn pools_cover_expected_types() {
        let s2 = Cone::new(3, (0.0, 3.0)).unwrap();
        let tags: Vec<TypeTag> = s2.forms.iter().map(|g| g.type_tag).collect();
        assert!(tags.contains(&TypeTag::I) && tags.contains(&TypeTag::II) && tags.contains(&TypeTag::III));
        assert!(!tags.contains(&TypeTag::IV));
        let s3 = Cone::new(4, (0.0, 3.0)).unwrap();
        let rates: Vec<(TypeTag, f64)> = s3.forms.iter().map(|g| (g.type_tag, g.growth_rate)).collect();
        assert!(rates.contains(&(TypeTag::IV, 1.0)) && rates.contains(&(TypeTag::IV, 2.0)));
        assert!(rates.contains(&(TypeTag::II, 0.0)) && rates.contains(&(TypeTag::III, 2.0)));
        assert_eq!(s3.functions.len(), 3);
    }
}
