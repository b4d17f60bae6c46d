//! Indicial roots, the six families of homogeneous harmonic 1-forms on a
//! cone, Lichnerowicz filtering, growth spectra of harmonic functions and
//! 1-forms, and holomorphic spectra of flat Kähler cones and their quotients.

use serde::{Deserialize, Serialize};

use crate::cross_section::{CrossSection, EigenKind, EigenTable, GroupAction};
use crate::error::{Error, Result};

/// Eigenvalue relations are checked to this absolute tolerance.
pub const RELATION_TOL: f64 = 1e-12;
/// Rates closer than this are the same rate.
pub const RATE_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum IndicialRoots {
    Distinct { plus: f64, minus: f64 },
    Repeated { root: f64 },
    Complex { re: f64, im: f64 },
}

/// Roots of s² + (m−2)s − (c₁+m−1) = 0.
pub fn indicial_roots(m: usize, c1: f64) -> IndicialRoots {
    let mf = m as f64;
    let disc = mf * mf + 4.0 * c1;
    let centre = -(mf - 2.0) / 2.0;
    if disc.abs() <= RELATION_TOL {
        IndicialRoots::Repeated { root: centre }
    } else if disc > 0.0 {
        let h = disc.sqrt() / 2.0;
        IndicialRoots::Distinct {
            plus: centre + h,
            minus: centre - h,
        }
    } else {
        IndicialRoots::Complex {
            re: centre,
            im: (-disc).sqrt() / 2.0,
        }
    }
}

/// Separation constant c₁ belonging to the radial exponent s.
pub fn separation_constant(m: usize, s: f64) -> f64 {
    let mf = m as f64;
    s * s + (mf - 2.0) * s - (mf - 1.0)
}

/// Both roots of s(s+m−2) = λ, nonnegative one first.
pub fn function_degrees_from_eigenvalue(m: usize, lambda: f64) -> (f64, f64) {
    let mf = m as f64;
    let root = ((mf - 2.0).powi(2) + 4.0 * lambda.max(0.0)).sqrt();
    (snap((-(mf - 2.0) + root) / 2.0), snap((-(mf - 2.0) - root) / 2.0))
}

/// Remove rounding noise from rates that are integers up to 1e−12.
fn snap(s: f64) -> f64 {
    let r = s.round();
    if (s - r).abs() <= RELATION_TOL * (1.0 + s.abs()) {
        r
    } else {
        s
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum TypeTag {
    I,
    II,
    III,
    IV,
    V,
    VI,
}

impl TypeTag {
    pub const ALL: [TypeTag; 6] = [TypeTag::I, TypeTag::II, TypeTag::III, TypeTag::IV, TypeTag::V, TypeTag::VI];

    /// Angular eigenvalue forced by the exponent s; None for type I.
    pub fn eigenvalue_relation(&self, m: usize, s: f64) -> Option<f64> {
        let mf = m as f64;
        match self {
            TypeTag::I => None,
            TypeTag::II => Some((s + 1.0) * (s + mf - 1.0)),
            TypeTag::III => Some((s - 1.0) * (s + mf - 3.0)),
            TypeTag::IV => Some((s + 1.0) * (s + mf - 3.0)),
            TypeTag::V => Some(type_v_eigenvalue(m)),
            TypeTag::VI => Some(type_vi_eigenvalue(m)),
        }
    }

    pub fn angular_kind(&self) -> Option<EigenKind> {
        match self {
            TypeTag::I => None,
            TypeTag::II | TypeTag::III | TypeTag::V => Some(EigenKind::Function),
            TypeTag::IV | TypeTag::VI => Some(EigenKind::Coclosed1Form),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            TypeTag::I => "I",
            TypeTag::II => "II",
            TypeTag::III => "III",
            TypeTag::IV => "IV",
            TypeTag::V => "V",
            TypeTag::VI => "VI",
        }
    }

    /// Exponents s with relation(s) = λ, for the quadratic families.
    pub fn exponents_for(&self, m: usize, lambda: f64) -> Vec<f64> {
        let mf = m as f64;
        // every relation is (s − a)(s − b) with the same vertex structure
        let (p, q) = match self {
            TypeTag::II => (mf, mf - 1.0 - lambda),
            TypeTag::III => (mf - 4.0, -(mf - 3.0) - lambda),
            TypeTag::IV => (mf - 2.0, mf - 3.0 - lambda),
            _ => return Vec::new(),
        };
        let disc = p * p - 4.0 * q;
        if disc < -RELATION_TOL {
            return Vec::new();
        }
        let root = disc.max(0.0).sqrt();
        let a = snap((-p + root) / 2.0);
        let b = snap((-p - root) / 2.0);
        if (a - b).abs() <= RATE_TOL {
            vec![a]
        } else {
            vec![a, b]
        }
    }
}

pub fn type_v_eigenvalue(m: usize) -> f64 {
    let mf = m as f64;
    -mf * mf / 4.0 + mf
}

pub fn type_vi_eigenvalue(m: usize) -> f64 {
    let mf = m as f64;
    -mf * mf / 4.0 + 2.0 * mf - 4.0
}

/// Exponent of the repeated indicial root, −(m−2)/2.
pub fn log_exponent(m: usize) -> f64 {
    -(m as f64 - 2.0) / 2.0
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "exponent", rename_all = "snake_case")]
pub enum RadialKind {
    Power(f64),
    LogPower(f64),
}

impl RadialKind {
    pub fn exponent(&self) -> f64 {
        match *self {
            RadialKind::Power(e) | RadialKind::LogPower(e) => e,
        }
    }
    pub fn is_log(&self) -> bool {
        matches!(self, RadialKind::LogPower(_))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AngularRef {
    pub kind: EigenKind,
    pub eigenvalue: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GrowthMode {
    pub type_tag: TypeTag,
    pub s_raw: f64,
    /// Exponent of |u| in the cone metric.
    pub growth_rate: f64,
    pub radial: RadialKind,
    pub angular: Option<AngularRef>,
    pub c1: f64,
    /// Dimension of the angular eigenspace feeding this mode.
    pub multiplicity: usize,
}

impl GrowthMode {
    fn build(m: usize, type_tag: TypeTag, s: f64, angular: Option<AngularRef>, multiplicity: usize) -> Self {
        let radial = match type_tag {
            TypeTag::V | TypeTag::VI => RadialKind::LogPower(s),
            _ => RadialKind::Power(s),
        };
        Self {
            type_tag,
            s_raw: s,
            growth_rate: s,
            radial,
            angular,
            c1: separation_constant(m, s),
            multiplicity,
        }
    }

    /// Type I: r dr (s = 1) or r^{−(m−1)} dr.
    pub fn type_i(m: usize, s: f64) -> Result<Self> {
        let lower = -(m as f64 - 1.0);
        if (s - 1.0).abs() > RELATION_TOL && (s - lower).abs() > RELATION_TOL {
            return Err(Error::InvalidArgument(format!(
                "type I exists only at rates 1 and {lower}, not {s}"
            )));
        }
        Ok(Self::build(m, TypeTag::I, snap(s), None, 1))
    }

    /// Mode of the given type at exponent s, fed by an angular eigenvalue.
    pub fn new(m: usize, type_tag: TypeTag, s: f64, eigenvalue: f64, multiplicity: usize) -> Result<Self> {
        let Some(kind) = type_tag.angular_kind() else {
            return Self::type_i(m, s);
        };
        let want = type_tag.eigenvalue_relation(m, s).unwrap();
        if (want - eigenvalue).abs() > RELATION_TOL * (1.0 + eigenvalue.abs()) {
            return Err(Error::InvalidArgument(format!(
                "type {} at s = {s} needs eigenvalue {want}, got {eigenvalue}",
                type_tag.name()
            )));
        }
        if matches!(type_tag, TypeTag::V | TypeTag::VI) && (s - log_exponent(m)).abs() > RELATION_TOL {
            return Err(Error::InvalidArgument(format!(
                "log modes live at s = {}, not {s}",
                log_exponent(m)
            )));
        }
        Ok(Self::build(
            m,
            type_tag,
            s,
            Some(AngularRef { kind, eigenvalue }),
            multiplicity,
        ))
    }

    pub fn eigenvalue(&self) -> Option<f64> {
        self.angular.map(|a| a.eigenvalue)
    }

    /// |relation(s) − λ| and |indicial residual|, the two consistency checks.
    pub fn consistency_residual(&self, m: usize) -> f64 {
        let mf = m as f64;
        let s = self.s_raw;
        let ind = (s * s + (mf - 2.0) * s - (self.c1 + mf - 1.0)).abs();
        let rel = match (self.type_tag.eigenvalue_relation(m, s), self.eigenvalue()) {
            (Some(w), Some(l)) => (w - l).abs(),
            _ => 0.0,
        };
        ind.max(rel)
    }
}

fn check_window(window: (f64, f64)) -> Result<()> {
    if !(window.0.is_finite() && window.1.is_finite()) || window.0 > window.1 {
        return Err(Error::InvalidArgument(format!(
            "window [{}, {}) must be bounded with lo ≤ hi",
            window.0, window.1
        )));
    }
    Ok(())
}

fn in_window(s: f64, window: (f64, f64)) -> bool {
    s >= window.0 - RELATION_TOL && s < window.1 - RELATION_TOL
}

/// Largest function eigenvalue that can produce a 1-form rate in the window.
pub fn required_function_eigenvalue(m: usize, window: (f64, f64)) -> f64 {
    [TypeTag::II, TypeTag::III]
        .iter()
        .flat_map(|t| [window.0, window.1].map(|s| t.eigenvalue_relation(m, s).unwrap()))
        .fold(0.0, f64::max)
}

pub fn required_coclosed_eigenvalue(m: usize, window: (f64, f64)) -> f64 {
    [window.0, window.1]
        .map(|s| TypeTag::IV.eigenvalue_relation(m, s).unwrap())
        .into_iter()
        .fold(0.0, f64::max)
}

/// Largest function eigenvalue that can produce a function degree in the window.
pub fn required_degree_eigenvalue(m: usize, window: (f64, f64)) -> f64 {
    let mf = m as f64;
    [window.0, window.1]
        .map(|s| s * (s + mf - 2.0))
        .into_iter()
        .fold(0.0, f64::max)
}

/// Lichnerowicz–Obata lower bound for coclosed eigenvalues on links with
/// Ric = (m−2)g; no coclosed table is needed below it.
pub fn coclosed_lower_bound(m: usize) -> f64 {
    2.0 * m as f64 - 4.0
}

/// Every homogeneous harmonic 1-form family with growth rate in `window`.
pub fn classify_homogeneous(
    m: usize,
    functions: &EigenTable,
    coclosed: Option<&EigenTable>,
    window: (f64, f64),
) -> Result<Vec<GrowthMode>> {
    check_window(window)?;
    if m < 2 {
        return Err(Error::InvalidArgument(format!("cone dimension {m} < 2")));
    }
    let mut modes = Vec::new();
    if window.0 >= window.1 {
        return Ok(modes);
    }
    functions.require_complete(required_function_eigenvalue(m, window))?;
    let need_cocl = required_coclosed_eigenvalue(m, window);
    match coclosed {
        Some(t) => t.require_complete(need_cocl)?,
        None if need_cocl > coclosed_lower_bound(m) => {
            return Err(Error::IncompleteTable {
                kind: "Coclosed1Form".into(),
                required: need_cocl,
                cutoff: coclosed_lower_bound(m),
            })
        }
        None => {}
    }

    for s in [1.0, -(m as f64 - 1.0)] {
        if in_window(s, window) {
            modes.push(GrowthMode::type_i(m, s)?);
        }
    }
    for item in functions.items.iter().filter(|i| i.kind == EigenKind::Function) {
        let lam = item.eigenvalue;
        // λ = 0: type II is d(const) = 0, type III coincides with type I
        if lam.abs() <= RELATION_TOL {
            continue;
        }
        for t in [TypeTag::II, TypeTag::III] {
            for s in t.exponents_for(m, lam) {
                if t == TypeTag::III && (s + m as f64 - 3.0).abs() <= RELATION_TOL {
                    continue;
                }
                if in_window(s, window) {
                    modes.push(GrowthMode::new(m, t, s, lam, item.multiplicity)?);
                }
            }
        }
        if (lam - type_v_eigenvalue(m)).abs() <= RELATION_TOL && in_window(log_exponent(m), window) {
            modes.push(GrowthMode::new(m, TypeTag::V, log_exponent(m), lam, item.multiplicity)?);
        }
    }
    if let Some(t) = coclosed {
        for item in t.items.iter().filter(|i| i.kind == EigenKind::Coclosed1Form) {
            let mu = item.eigenvalue;
            for s in TypeTag::IV.exponents_for(m, mu) {
                if in_window(s, window) {
                    modes.push(GrowthMode::new(m, TypeTag::IV, s, mu, item.multiplicity)?);
                }
            }
            if (mu - type_vi_eigenvalue(m)).abs() <= RELATION_TOL && in_window(log_exponent(m), window) {
                modes.push(GrowthMode::new(m, TypeTag::VI, log_exponent(m), mu, item.multiplicity)?);
            }
        }
    }
    modes.sort_by(|a, b| {
        a.growth_rate
            .total_cmp(&b.growth_rate)
            .then(a.type_tag.cmp(&b.type_tag))
    });
    Ok(modes)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FilterRemoval {
    pub mode: GrowthMode,
    pub violated: String,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct FilterReport {
    pub kept: usize,
    pub removed: Vec<FilterRemoval>,
}

/// Drop modes whose angular eigenvalue is incompatible with a link of
/// Ric = (m−2)g: nonconstant functions need λ ≥ m−1 (m ≥ 3), coclosed forms
/// μ ≥ 2m−4 (m ≥ 4); the log families V and VI never survive for m ≥ 3.
pub fn lichnerowicz_filter(modes: &[GrowthMode], m: usize) -> (Vec<GrowthMode>, FilterReport) {
    let mf = m as f64;
    let mut kept = Vec::new();
    let mut report = FilterReport::default();
    for mode in modes {
        let violated = match (mode.type_tag, mode.eigenvalue()) {
            (TypeTag::V | TypeTag::VI, Some(l)) if m >= 3 => Some(format!(
                "type {} needs eigenvalue {l} but log modes are excluded for m ≥ 3",
                mode.type_tag.name()
            )),
            (TypeTag::II | TypeTag::III, Some(l))
                if m >= 3 && l.abs() > RELATION_TOL && l < mf - 1.0 - RELATION_TOL =>
            {
                Some(format!("λ = {l} < m−1 = {}", mf - 1.0))
            }
            (TypeTag::IV, Some(l)) if m >= 4 && l < 2.0 * mf - 4.0 - RELATION_TOL => {
                Some(format!("μ = {l} < 2m−4 = {}", 2.0 * mf - 4.0))
            }
            _ => None,
        };
        match violated {
            Some(v) => report.removed.push(FilterRemoval {
                mode: mode.clone(),
                violated: v,
            }),
            None => kept.push(mode.clone()),
        }
    }
    report.kept = kept.len();
    (kept, report)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DegreeEntry {
    pub degree: f64,
    pub multiplicity: usize,
    pub eigenvalue: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TypeContribution {
    pub type_tag: TypeTag,
    pub multiplicity: usize,
    pub eigenvalue: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RateEntry {
    pub growth_rate: f64,
    pub multiplicity: usize,
    pub types: Vec<TypeContribution>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectrumReport {
    pub m: usize,
    pub cross_section_id: String,
    pub window: [f64; 2],
    pub function_spectrum: Vec<DegreeEntry>,
    pub oneform_spectrum: Vec<RateEntry>,
    pub filters_applied: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub filter_report: Option<FilterReport>,
}

/// Degrees of homogeneous harmonic functions with rate in `window`.
pub fn function_degrees(m: usize, functions: &EigenTable, window: (f64, f64)) -> Result<Vec<DegreeEntry>> {
    check_window(window)?;
    let mut out: Vec<DegreeEntry> = Vec::new();
    if window.0 >= window.1 {
        return Ok(out);
    }
    functions.require_complete(required_degree_eigenvalue(m, window))?;
    for item in functions.items.iter().filter(|i| i.kind == EigenKind::Function) {
        let (a, b) = function_degrees_from_eigenvalue(m, item.eigenvalue);
        let roots = if (a - b).abs() <= RATE_TOL { vec![a] } else { vec![a, b] };
        for d in roots {
            if in_window(d, window) {
                out.push(DegreeEntry {
                    degree: d,
                    multiplicity: item.multiplicity,
                    eigenvalue: item.eigenvalue,
                });
            }
        }
    }
    out.sort_by(|a, b| a.degree.total_cmp(&b.degree));
    // distinct eigenvalues give distinct nonnegative degrees; merge rounding twins
    let mut merged: Vec<DegreeEntry> = Vec::new();
    for e in out {
        match merged.last_mut() {
            Some(l) if (l.degree - e.degree).abs() <= RATE_TOL => l.multiplicity += e.multiplicity,
            _ => merged.push(e),
        }
    }
    Ok(merged)
}

fn merge_rates(modes: &[GrowthMode]) -> Vec<RateEntry> {
    let mut out: Vec<RateEntry> = Vec::new();
    for mode in modes {
        let contrib = TypeContribution {
            type_tag: mode.type_tag,
            multiplicity: mode.multiplicity,
            eigenvalue: mode.eigenvalue(),
        };
        match out.last_mut() {
            Some(e) if (e.growth_rate - mode.growth_rate).abs() <= RATE_TOL => {
                e.multiplicity += mode.multiplicity;
                e.types.push(contrib);
            }
            _ => out.push(RateEntry {
                growth_rate: mode.growth_rate,
                multiplicity: mode.multiplicity,
                types: vec![contrib],
            }),
        }
    }
    out
}

/// Function table of a cross-section complete enough for a function-degree
/// window and a 1-form window.
pub fn tables_for_window(
    section: &CrossSection,
    window: (f64, f64),
    with_coclosed: bool,
) -> Result<(EigenTable, Option<EigenTable>)> {
    check_window(window)?;
    let m = section.cone_dim();
    let need = required_function_eigenvalue(m, window).max(required_degree_eigenvalue(m, window));
    let mut k = 0;
    while ((k + 1) * (k + m - 1)) as f64 <= need {
        k += 1;
    }
    let functions = section.function_table(k)?;
    let coclosed = if with_coclosed && m >= 4 {
        let need_c = required_coclosed_eigenvalue(m, window);
        if need_c > coclosed_lower_bound(m) && section.is_analytic() {
            let mut kc = 1;
            while ((kc + 2) * (kc + m - 2)) as f64 <= need_c {
                kc += 1;
            }
            Some(section.coclosed_table(kc)?)
        } else {
            None
        }
    } else {
        None
    };
    Ok((functions, coclosed))
}

/// 𝒟(C(X)) ∩ window.
pub fn growth_spectrum(section: &CrossSection, window: (f64, f64)) -> Result<SpectrumReport> {
    let (functions, _) = tables_for_window(section, window, false)?;
    growth_spectrum_with(section.cone_dim(), &section.id, &functions, window)
}

pub fn growth_spectrum_with(
    m: usize,
    id: &str,
    functions: &EigenTable,
    window: (f64, f64),
) -> Result<SpectrumReport> {
    Ok(SpectrumReport {
        m,
        cross_section_id: id.to_string(),
        window: [window.0, window.1],
        function_spectrum: function_degrees(m, functions, window)?,
        oneform_spectrum: Vec::new(),
        filters_applied: Vec::new(),
        filter_report: None,
    })
}

/// 𝒟¹(C(X)) ∩ window, with the Lichnerowicz filter applied.
pub fn oneform_growth_spectrum(section: &CrossSection, window: (f64, f64)) -> Result<SpectrumReport> {
    let (functions, coclosed) = tables_for_window(section, window, true)?;
    oneform_growth_spectrum_with(section.cone_dim(), &section.id, &functions, coclosed.as_ref(), window)
}

pub fn oneform_growth_spectrum_with(
    m: usize,
    id: &str,
    functions: &EigenTable,
    coclosed: Option<&EigenTable>,
    window: (f64, f64),
) -> Result<SpectrumReport> {
    let modes = classify_homogeneous(m, functions, coclosed, window)?;
    let mut filters = Vec::new();
    let (kept, report) = if m >= 3 {
        filters.push("lichnerowicz_obata".to_string());
        let (k, r) = lichnerowicz_filter(&modes, m);
        (k, Some(r))
    } else {
        (modes, None)
    };
    let oneform = merge_rates(&kept);
    if window.0 >= 0.0 && window.1 <= 1.0 && window.0 < window.1 {
        // below rate 1 every harmonic 1-form is d of a harmonic function
        let shifted = exactness_reduction(m, functions, window)?;
        let ok = shifted.len() == oneform.len()
            && shifted.iter().zip(&oneform).all(|(a, b)| {
                (a.growth_rate - b.growth_rate).abs() <= RATE_TOL && a.multiplicity == b.multiplicity
            });
        if !ok {
            return Err(Error::OracleMismatch(format!(
                "1-form spectrum in [{}, {}) is not the shifted function spectrum",
                window.0, window.1
            )));
        }
        filters.push("exactness_reduction".to_string());
    }
    Ok(SpectrumReport {
        m,
        cross_section_id: id.to_string(),
        window: [window.0, window.1],
        function_spectrum: Vec::new(),
        oneform_spectrum: oneform,
        filters_applied: filters,
        filter_report: report,
    })
}

/// (𝒟 ∩ [lo+1, hi+1)) − 1 with degree 0 dropped, as type II rate entries.
pub fn exactness_reduction(m: usize, functions: &EigenTable, window: (f64, f64)) -> Result<Vec<RateEntry>> {
    let degrees = function_degrees(m, functions, (window.0 + 1.0, window.1 + 1.0))?;
    Ok(degrees
        .into_iter()
        .filter(|d| d.degree.abs() > RATE_TOL)
        .map(|d| RateEntry {
            growth_rate: d.degree - 1.0,
            multiplicity: d.multiplicity,
            types: vec![TypeContribution {
                type_tag: TypeTag::II,
                multiplicity: d.multiplicity,
                eigenvalue: Some(d.eigenvalue),
            }],
        })
        .collect())
}

/// Flat ℂⁿ or a free diagonal cyclic quotient ℂⁿ/ℤ_p.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum KahlerCone {
    Flat { n: usize },
    Quotient { order: u32, weights: Vec<u32> },
}

impl KahlerCone {
    pub fn complex_dim(&self) -> usize {
        match self {
            KahlerCone::Flat { n } => *n,
            KahlerCone::Quotient { weights, .. } => weights.len(),
        }
    }

    pub fn cross_section(&self) -> Result<CrossSection> {
        match self {
            KahlerCone::Flat { n } => CrossSection::round_sphere(2 * n),
            KahlerCone::Quotient { order, weights } => CrossSection::sphere_quotient(
                2 * weights.len(),
                GroupAction::CyclicDiagonal {
                    order: *order,
                    weights: weights.clone(),
                },
            ),
        }
    }

    pub fn label(&self) -> String {
        match self {
            KahlerCone::Flat { n } => format!("C{n}"),
            KahlerCone::Quotient { order, weights } => format!(
                "C{}/Z{order}({})",
                weights.len(),
                weights.iter().map(u32::to_string).collect::<Vec<_>>().join(",")
            ),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HoloSpectrum {
    pub cone: KahlerCone,
    /// (degree, dimension of invariant holomorphic monomials)
    pub degrees: Vec<(u32, u64)>,
}

/// Degrees of invariant holomorphic monomials up to `max_degree`.
pub fn holomorphic_spectrum(cone: &KahlerCone, max_degree: u32) -> Result<HoloSpectrum> {
    let n = cone.complex_dim();
    if n == 0 {
        return Err(Error::Unsupported("ℂ⁰ is not a cone".into()));
    }
    // validates freeness for quotients
    cone.cross_section()?;
    let (p, weights) = match cone {
        KahlerCone::Flat { n } => (1, vec![0; *n]),
        KahlerCone::Quotient { order, weights } => (*order, weights.clone()),
    };
    let mut degrees = Vec::new();
    for d in 0..=max_degree {
        // holomorphic monomials only: the a-part of z^a z̄^b
        let count = holomorphic_classes(&weights, p, d as usize)[0];
        if count > 0 {
            degrees.push((d, count));
        }
    }
    Ok(HoloSpectrum {
        cone: cone.clone(),
        degrees,
    })
}

fn holomorphic_classes(weights: &[u32], p: u32, k: usize) -> Vec<u64> {
    let p = p as usize;
    let mut dp = vec![vec![0u64; p]; k + 1];
    dp[0][0] = 1;
    for &w in weights {
        let w = w as usize % p;
        let mut next = vec![vec![0u64; p]; k + 1];
        for d in 0..=k {
            for r in 0..p {
                if dp[d][r] == 0 {
                    continue;
                }
                for a in 0..=(k - d) {
                    next[d + a][(r + w * a) % p] += dp[d][r];
                }
            }
        }
        dp = next;
    }
    dp.swap_remove(k)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectralMatch {
    pub cone: String,
    pub growth_degrees: Vec<f64>,
    pub holomorphic_degrees: Vec<f64>,
    pub sets_equal: bool,
    /// (degree, real harmonic multiplicity, holomorphic multiplicity), reported only.
    pub multiplicities: Vec<(f64, usize, u64)>,
}

/// Compare 𝒟 ∩ [0,2) with 𝒮 ∩ [0,2) as sets.
pub fn spectra_match_check(cone: &KahlerCone) -> Result<SpectralMatch> {
    let section = cone.cross_section()?;
    let growth = growth_spectrum(&section, (0.0, 2.0))?;
    let holo = holomorphic_spectrum(cone, 1)?;
    let g: Vec<f64> = growth.function_spectrum.iter().map(|d| d.degree).collect();
    let h: Vec<f64> = holo.degrees.iter().map(|&(d, _)| f64::from(d)).collect();
    let sets_equal = g.len() == h.len() && g.iter().zip(&h).all(|(a, b)| (a - b).abs() <= RATE_TOL);
    let multiplicities = growth
        .function_spectrum
        .iter()
        .map(|d| {
            let hm = holo
                .degrees
                .iter()
                .find(|&&(k, _)| (f64::from(k) - d.degree).abs() <= RATE_TOL)
                .map_or(0, |&(_, c)| c);
            (d.degree, d.multiplicity, hm)
        })
        .collect();
    Ok(SpectralMatch {
        cone: cone.label(),
        growth_degrees: g,
        holomorphic_degrees: h,
        sets_equal,
        multiplicities,
    })
}
