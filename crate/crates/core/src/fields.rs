//! Separable harmonic functions and 1-forms on a cone.
//!
//! A 1-form is split as u = κ dr + η. Against an orthonormal angular basis
//! every field reduces to radial profiles per angular key: for a function
//! eigenfunction Y (eigenvalue λ) the pair (A, B) with κ ∋ A(r)Y and
//! η ∋ B(r)dY; for a coclosed eigenform η_a (eigenvalue μ) a single C(r).
//! All integrals over spheres and balls then follow from orthogonality:
//! ∫_X Y² = 1, ∫_X |dY|² = λ, ∫_X |η_a|² = 1, ∫_X |dη_a|² = μ.

use std::sync::OnceLock;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::cross_section::EigenKind;
use crate::error::{Error, Result};
use crate::radial::RadialProfile;
use crate::spectra::{GrowthMode, RadialKind, TypeTag, RATE_TOL};

/// d* = −div on flat space; every codifferential in the crate uses this sign.
pub const CODIFFERENTIAL_SIGN: f64 = -1.0;

const KEY_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum FieldKind {
    Function,
    OneForm,
}

/// r^s Y with Y a λ-eigenfunction, s(s+m−2) = λ.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FunctionMode {
    pub degree: f64,
    pub eigenvalue: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FieldMode {
    Function(FunctionMode),
    OneForm(GrowthMode),
}

impl FieldMode {
    pub fn rate(&self) -> f64 {
        match self {
            FieldMode::Function(f) => f.degree,
            FieldMode::OneForm(g) => g.growth_rate,
        }
    }

    pub fn is_log(&self) -> bool {
        matches!(self, FieldMode::OneForm(g) if g.radial.is_log())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FieldTerm {
    pub coefficient: f64,
    pub mode: FieldMode,
    /// Index within the orthonormal basis of the mode's angular eigenspace.
    pub angular_index: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeparableField {
    pub m: usize,
    pub cross_section_id: String,
    /// Vol(X); type I modes use the constant eigenfunction 1/√Vol(X).
    pub link_volume: f64,
    pub kind: FieldKind,
    pub terms: Vec<FieldTerm>,
}

/// Angular eigenvector identity: kind, eigenvalue and basis index.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AngularKey {
    pub kind: EigenKind,
    pub eigenvalue: f64,
    pub index: usize,
}

impl AngularKey {
    fn same(&self, other: &AngularKey) -> bool {
        self.kind == other.kind
            && self.index == other.index
            && (self.eigenvalue - other.eigenvalue).abs() <= KEY_TOL * (1.0 + self.eigenvalue.abs())
    }

    /// ∫_X |d(angular part)|² weight multiplying B²/r² in |η|².
    fn tangential_weight(&self) -> f64 {
        match self.kind {
            EigenKind::Function => self.eigenvalue,
            EigenKind::Coclosed1Form => 1.0,
        }
    }
}

/// Radial profiles per angular key. For function keys `a` is the Y (or dr)
/// coefficient and `b` the dY coefficient; for coclosed keys only `b` is used.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KeyComponent {
    pub key: AngularKey,
    pub a: RadialProfile,
    pub b: RadialProfile,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComponentField {
    pub m: usize,
    pub kind: FieldKind,
    pub components: Vec<KeyComponent>,
}

impl ComponentField {
    fn push(&mut self, key: AngularKey, a: RadialProfile, b: RadialProfile) {
        if let Some(c) = self.components.iter_mut().find(|c| c.key.same(&key)) {
            c.a = c.a.add(&a);
            c.b = c.b.add(&b);
        } else {
            self.components.push(KeyComponent { key, a, b });
        }
    }

    /// Per-key profile of ∫_X ⟨u, v⟩ at radius r, without the r^{m−1} factor.
    fn sphere_pairing_density(&self, other: &ComponentField) -> RadialProfile {
        let mut total = RadialProfile::zero();
        for c in &self.components {
            let Some(o) = other.components.iter().find(|o| o.key.same(&c.key)) else {
                continue;
            };
            total = total.add(&c.a.mul(&o.a));
            if self.kind == FieldKind::OneForm {
                let w = c.key.tangential_weight();
                total = total.add(&c.b.mul(&o.b).shift(-2.0).scale(w));
            }
        }
        total
    }

    /// ∫_{∂B_r} ⟨u, v⟩ as a profile in r.
    pub fn boundary_pairing(&self, other: &ComponentField) -> RadialProfile {
        self.sphere_pairing_density(other).shift(self.m as f64 - 1.0)
    }

    /// H(r) = ∫_{∂B_r} |u|².
    pub fn boundary_mass(&self) -> RadialProfile {
        self.boundary_pairing(self)
    }

    /// ∫_{∂B_r} ⟨u, ∇_{∂r} u⟩.
    pub fn boundary_dirichlet(&self) -> RadialProfile {
        let mut total = RadialProfile::zero();
        for c in &self.components {
            total = total.add(&c.a.mul(&c.a.derivative()));
            if self.kind == FieldKind::OneForm {
                let w = c.key.tangential_weight();
                let nb = c.b.derivative().sub(&c.b.shift(-1.0));
                total = total.add(&c.b.mul(&nb).shift(-2.0).scale(w));
            }
        }
        total.shift(self.m as f64 - 1.0)
    }

    /// t^{m−1} ∫_X |∇u|²(t), whose integral from 0 is the bulk Dirichlet energy.
    pub fn gradient_density(&self) -> RadialProfile {
        let mf = self.m as f64;
        let mut total = RadialProfile::zero();
        for c in &self.components {
            let (a, b, l) = (&c.a, &c.b, c.key.eigenvalue);
            let q = match (self.kind, c.key.kind) {
                (FieldKind::Function, _) => {
                    let da = a.derivative();
                    da.mul(&da).add(&a.mul(a).shift(-2.0).scale(l))
                }
                (FieldKind::OneForm, EigenKind::Function) => {
                    let da = a.derivative();
                    let nb = b.derivative().sub(&b.shift(-1.0));
                    let mix = a.sub(&b.shift(-1.0));
                    da.mul(&da)
                        .add(&nb.mul(&nb).shift(-2.0).scale(l))
                        .add(&mix.mul(&mix).shift(-2.0).scale(l))
                        .add(&b.mul(b).shift(-4.0).scale(l * l - (mf - 2.0) * l))
                        .add(&a.mul(b).shift(-3.0).scale(-2.0 * l))
                        .add(&a.mul(a).shift(-2.0).scale(mf - 1.0))
                }
                (FieldKind::OneForm, EigenKind::Coclosed1Form) => {
                    let nb = b.derivative().sub(&b.shift(-1.0));
                    nb.mul(&nb)
                        .shift(-2.0)
                        .add(&b.mul(b).shift(-4.0))
                        .add(&b.mul(b).shift(-4.0).scale(l - (mf - 2.0)))
                }
            };
            total = total.add(&q);
        }
        total.shift(mf - 1.0)
    }

    /// Per-key component-equation residual profiles (eq. of the Hodge
    /// Laplacian on the cone), as (key, residual of the dr part, residual of
    /// the tangential part).
    pub fn laplacian_components(&self) -> Vec<(AngularKey, RadialProfile, RadialProfile)> {
        let mf = self.m as f64;
        self.components
            .iter()
            .map(|c| {
                let (a, b, l) = (&c.a, &c.b, c.key.eigenvalue);
                match (self.kind, c.key.kind) {
                    (FieldKind::Function, _) => {
                        let e = a
                            .shift(-2.0)
                            .scale(l)
                            .sub(&a.derivative().derivative())
                            .sub(&a.derivative().shift(-1.0).scale(mf - 1.0));
                        (c.key, e, RadialProfile::zero())
                    }
                    (FieldKind::OneForm, EigenKind::Function) => {
                        let e1 = a
                            .shift(-2.0)
                            .scale(l)
                            .sub(&a.derivative().derivative())
                            .sub(&a.derivative().shift(-1.0).scale(mf - 1.0))
                            .add(&a.shift(-2.0).scale(mf - 1.0))
                            .sub(&b.shift(-3.0).scale(2.0 * l));
                        // dY = 0 on the constant key: no tangential equation
                        let e2 = if l.abs() <= KEY_TOL {
                            RadialProfile::zero()
                        } else {
                            b.shift(-2.0)
                                .scale(l)
                                .sub(&b.derivative().derivative())
                                .sub(&b.derivative().shift(-1.0).scale(mf - 3.0))
                                .sub(&a.shift(-1.0).scale(2.0))
                        };
                        (c.key, e1, e2)
                    }
                    (FieldKind::OneForm, EigenKind::Coclosed1Form) => {
                        let e2 = b
                            .shift(-2.0)
                            .scale(l)
                            .sub(&b.derivative().derivative())
                            .sub(&b.derivative().shift(-1.0).scale(mf - 3.0));
                        (c.key, RadialProfile::zero(), e2)
                    }
                }
            })
            .collect()
    }

    /// d*u as a function field: per function key −(A′ + (m−1)A/r) + λB/r².
    pub fn codifferential(&self) -> Result<ComponentField> {
        if self.kind != FieldKind::OneForm {
            return Err(Error::InvalidArgument("d* is taken of 1-forms".into()));
        }
        dstar_self_test()?;
        Ok(self.codifferential_unchecked())
    }

    fn codifferential_unchecked(&self) -> ComponentField {
        let mf = self.m as f64;
        let mut out = ComponentField {
            m: self.m,
            kind: FieldKind::Function,
            components: Vec::new(),
        };
        for c in self.components.iter().filter(|c| c.key.kind == EigenKind::Function) {
            let div = c.a.derivative().add(&c.a.shift(-1.0).scale(mf - 1.0));
            let f = div
                .scale(CODIFFERENTIAL_SIGN)
                .add(&c.b.shift(-2.0).scale(c.key.eigenvalue))
                .simplified(1e-13);
            if !f.is_zero() {
                out.push(c.key, f, RadialProfile::zero());
            }
        }
        out
    }

    /// t^{m−1} ∫_X |du|²(t).
    pub fn d_norm2_density(&self) -> Result<RadialProfile> {
        if self.kind != FieldKind::OneForm {
            return Err(Error::InvalidArgument("|du|² is taken of 1-forms".into()));
        }
        let mut total = RadialProfile::zero();
        for c in &self.components {
            let l = c.key.eigenvalue;
            let q = match c.key.kind {
                EigenKind::Function => {
                    let w = c.b.derivative().sub(&c.a).simplified(1e-13);
                    w.mul(&w).shift(-2.0).scale(l)
                }
                EigenKind::Coclosed1Form => {
                    let db = c.b.derivative();
                    db.mul(&db).shift(-2.0).add(&c.b.mul(&c.b).shift(-4.0).scale(l))
                }
            };
            total = total.add(&q);
        }
        Ok(total.shift(self.m as f64 - 1.0).simplified(1e-13))
    }

    /// t^{m−1} ∫_X |u|²(t), integrand of ∫_{B_r} |u|².
    pub fn mass_density(&self) -> RadialProfile {
        self.boundary_mass()
    }

    pub fn is_zero(&self) -> bool {
        self.components.iter().all(|c| c.a.is_zero() && c.b.is_zero())
    }
}

static DSTAR_SIGN_OK: OnceLock<bool> = OnceLock::new();

/// d*(r dr) = −m on flat cones, for m = 2..6. Run once per process before
/// any codifferential is handed out.
pub fn dstar_self_test() -> Result<()> {
    let ok = *DSTAR_SIGN_OK.get_or_init(|| {
        (2..=6).all(|m| {
            let vol = crate::special::sphere_volume(m);
            let u = SeparableField::radial_form(m, "flat", vol);
            let d = u.components().codifferential_unchecked();
            // Y₀ = 1/√Vol, so the constant −m appears as −m√Vol on the key
            d.components.len() == 1
                && d.components[0]
                    .a
                    .single_power()
                    .is_some_and(|p| p.abs() < 1e-12)
                && (d.components[0].a.eval(1.0) / vol.sqrt() + m as f64).abs() < 1e-12
        })
    });
    if ok {
        Ok(())
    } else {
        Err(Error::Precondition(
            "codifferential sign self-test failed: d*(r dr) ≠ −m".into(),
        ))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Homogeneity {
    Homogeneous { rate: f64 },
    /// Single rate, but with r^s log r profiles.
    LogHomogeneous { rate: f64 },
    Inhomogeneous { rates: Vec<f64> },
}

impl SeparableField {
    pub fn new(m: usize, cross_section_id: &str, link_volume: f64, kind: FieldKind) -> Self {
        Self {
            m,
            cross_section_id: cross_section_id.to_string(),
            link_volume,
            kind,
            terms: Vec::new(),
        }
    }

    /// u = r dr.
    pub fn radial_form(m: usize, cross_section_id: &str, link_volume: f64) -> Self {
        let mut f = Self::new(m, cross_section_id, link_volume, FieldKind::OneForm);
        f.terms.push(FieldTerm {
            coefficient: 1.0,
            mode: FieldMode::OneForm(GrowthMode::type_i(m, 1.0).expect("rate 1")),
            angular_index: 0,
        });
        f
    }

    pub fn with_term(mut self, coefficient: f64, mode: FieldMode, angular_index: usize) -> Result<Self> {
        let ok = matches!(
            (&mode, self.kind),
            (FieldMode::Function(_), FieldKind::Function) | (FieldMode::OneForm(_), FieldKind::OneForm)
        );
        if !ok {
            return Err(Error::InvalidArgument("mode kind does not match field kind".into()));
        }
        self.terms.push(FieldTerm {
            coefficient,
            mode,
            angular_index,
        });
        Ok(self)
    }

    pub fn rates(&self) -> Vec<f64> {
        let mut rates: Vec<f64> = self
            .terms
            .iter()
            .filter(|t| t.coefficient != 0.0)
            .map(|t| t.mode.rate())
            .collect();
        rates.sort_by(f64::total_cmp);
        rates.dedup_by(|a, b| (*a - *b).abs() <= RATE_TOL);
        rates
    }

    pub fn components(&self) -> ComponentField {
        let mut out = ComponentField {
            m: self.m,
            kind: self.kind,
            components: Vec::new(),
        };
        let mf = self.m as f64;
        for t in &self.terms {
            if t.coefficient == 0.0 {
                continue;
            }
            let c = t.coefficient;
            match &t.mode {
                FieldMode::Function(f) => {
                    let key = AngularKey {
                        kind: EigenKind::Function,
                        eigenvalue: f.eigenvalue,
                        index: t.angular_index,
                    };
                    out.push(key, RadialProfile::power(c, f.degree), RadialProfile::zero());
                }
                FieldMode::OneForm(g) => {
                    let s = g.s_raw;
                    let lam = g.eigenvalue().unwrap_or(0.0);
                    let fkey = AngularKey {
                        kind: EigenKind::Function,
                        eigenvalue: lam,
                        index: t.angular_index,
                    };
                    let ckey = AngularKey {
                        kind: EigenKind::Coclosed1Form,
                        ..fkey
                    };
                    let logp = |coef: f64, p: f64| RadialProfile::power_log(coef, p, 1);
                    match g.type_tag {
                        TypeTag::I => {
                            let key = AngularKey {
                                kind: EigenKind::Function,
                                eigenvalue: 0.0,
                                index: 0,
                            };
                            let a = RadialProfile::power(c * self.link_volume.sqrt(), s);
                            out.push(key, a, RadialProfile::zero());
                        }
                        TypeTag::II => out.push(
                            fkey,
                            RadialProfile::power(c * (s + 1.0), s),
                            RadialProfile::power(c, s + 1.0),
                        ),
                        TypeTag::III => out.push(
                            fkey,
                            RadialProfile::power(c, s),
                            RadialProfile::power(-c / (s + mf - 3.0), s + 1.0),
                        ),
                        TypeTag::IV => out.push(ckey, RadialProfile::zero(), RadialProfile::power(c, s + 1.0)),
                        TypeTag::V => out.push(fkey, logp(c * (s + 1.0), s), logp(c, s + 1.0)),
                        TypeTag::VI => out.push(ckey, RadialProfile::zero(), logp(c, s + 1.0)),
                    }
                }
            }
        }
        out
    }

    /// Max |residual| of the component equations over the radii.
    pub fn harmonicity_residual(&self, radii: &[f64]) -> f64 {
        let comps = self.components().laplacian_components();
        let mut worst = 0.0_f64;
        for (_, e1, e2) in &comps {
            for &r in radii {
                worst = worst.max(e1.eval(r).abs()).max(e2.eval(r).abs());
            }
        }
        worst
    }

    /// ∇_{r∂r} u, term by term. Pure powers are eigenvectors; log modes pick
    /// up the power mode of the same rate.
    pub fn radial_derivative(&self) -> Result<SeparableField> {
        let mut out = Self::new(self.m, &self.cross_section_id, self.link_volume, self.kind);
        for t in &self.terms {
            let s = t.mode.rate();
            out.terms.push(FieldTerm {
                coefficient: t.coefficient * s,
                ..t.clone()
            });
            if let FieldMode::OneForm(g) = &t.mode {
                let partner = match g.type_tag {
                    TypeTag::V => Some(TypeTag::II),
                    TypeTag::VI => Some(TypeTag::IV),
                    _ => None,
                };
                if let Some(tag) = partner {
                    let lam = g.eigenvalue().unwrap_or(0.0);
                    let mode = GrowthMode::new(self.m, tag, s, lam, g.multiplicity)?;
                    out.terms.push(FieldTerm {
                        coefficient: t.coefficient,
                        mode: FieldMode::OneForm(mode),
                        angular_index: t.angular_index,
                    });
                }
            }
        }
        Ok(out.merged())
    }

    pub fn homogeneity_check(&self) -> Homogeneity {
        let rates = self.rates();
        let has_log = self.terms.iter().any(|t| t.coefficient != 0.0 && t.mode.is_log());
        match rates.as_slice() {
            [s] if has_log => Homogeneity::LogHomogeneous { rate: *s },
            [s] => Homogeneity::Homogeneous { rate: *s },
            _ => Homogeneity::Inhomogeneous { rates },
        }
    }

    /// Combine terms with identical mode and angular index.
    pub fn merged(mut self) -> Self {
        let mut out: Vec<FieldTerm> = Vec::new();
        for t in self.terms.drain(..) {
            if let Some(e) = out
                .iter_mut()
                .find(|e| e.angular_index == t.angular_index && same_mode(&e.mode, &t.mode))
            {
                e.coefficient += t.coefficient;
            } else {
                out.push(t);
            }
        }
        self.terms = out;
        self
    }

    pub fn scaled(&self, c: f64) -> Self {
        let mut f = self.clone();
        f.terms.iter_mut().for_each(|t| t.coefficient *= c);
        f
    }

    pub fn plus(&self, other: &SeparableField) -> Result<Self> {
        if self.m != other.m || self.kind != other.kind {
            return Err(Error::InvalidArgument("fields live on different cones or kinds".into()));
        }
        let mut f = self.clone();
        f.terms.extend(other.terms.iter().cloned());
        Ok(f.merged())
    }

    /// ∫_{B_R} ⟨u, v⟩.
    pub fn ball_inner(&self, other: &SeparableField, radius: f64) -> Result<f64> {
        self.components()
            .boundary_pairing(&other.components())
            .integral_from_zero(radius)
    }

    pub fn codifferential(&self) -> Result<ComponentField> {
        self.components().codifferential()
    }

    /// Serialises the field terms.
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

fn same_mode(a: &FieldMode, b: &FieldMode) -> bool {
    match (a, b) {
        (FieldMode::Function(x), FieldMode::Function(y)) => {
            (x.degree - y.degree).abs() <= RATE_TOL && (x.eigenvalue - y.eigenvalue).abs() <= KEY_TOL
        }
        (FieldMode::OneForm(x), FieldMode::OneForm(y)) => {
            x.type_tag == y.type_tag
                && (x.s_raw - y.s_raw).abs() <= RATE_TOL
                && match (x.eigenvalue(), y.eigenvalue()) {
                    (Some(p), Some(q)) => (p - q).abs() <= KEY_TOL,
                    (None, None) => true,
                    _ => false,
                }
        }
        _ => false,
    }
}

/// Gram matrices with condition number above this are rejected.
pub const MAX_GRAM_CONDITION: f64 = 1e12;

/// u minus its L²(B_R)-orthogonal projection onto span(subspace).
pub fn project_against(u: &SeparableField, subspace: &[SeparableField], radius: f64) -> Result<SeparableField> {
    if subspace.is_empty() {
        return Ok(u.clone());
    }
    let n = subspace.len();
    let mut g = DMatrix::zeros(n, n);
    let mut b = DVector::zeros(n);
    for i in 0..n {
        for j in i..n {
            let v = subspace[i].ball_inner(&subspace[j], radius)?;
            g[(i, j)] = v;
            g[(j, i)] = v;
        }
        b[i] = subspace[i].ball_inner(u, radius)?;
    }
    let eig = SymmetricEigen::new(g.clone());
    let (lo, hi) = eig
        .eigenvalues
        .iter()
        .fold((f64::INFINITY, 0.0_f64), |(lo, hi), &v| (lo.min(v), hi.max(v.abs())));
    let cond = if lo > 0.0 { hi / lo } else { f64::INFINITY };
    if cond > MAX_GRAM_CONDITION {
        return Err(Error::SingularGram(cond));
    }
    let coef = g
        .cholesky()
        .ok_or(Error::SingularGram(cond))?
        .solve(&b);
    let mut out = u.clone();
    for (i, v) in subspace.iter().enumerate() {
        out = out.plus(&v.scaled(-coef[i]))?;
    }
    // exact cancellations leave rounding-level coefficients
    let scale = u.terms.iter().map(|t| t.coefficient.abs()).fold(0.0, f64::max).max(1.0);
    for t in &mut out.terms {
        if t.coefficient.abs() <= 1e-14 * scale {
            t.coefficient = 0.0;
        }
    }
    Ok(out)
}

/// Radial kind of a growth mode's profile, for reporting.
pub fn radial_label(kind: &RadialKind) -> String {
    match kind {
        RadialKind::Power(e) => format!("r^{e}"),
        RadialKind::LogPower(e) => format!("r^{e} log r"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::sphere_volume;

    fn flat(m: usize, kind: FieldKind) -> SeparableField {
        SeparableField::new(m, "S", sphere_volume(m), kind)
    }

    fn radii() -> Vec<f64> {
        (-4..=4).map(|k| 2f64.powi(k)).collect()
    }

    #[test]
    fn radial_form_is_harmonic_with_dstar_minus_m() {
        for m in 2..=6 {
            let u = SeparableField::radial_form(m, "S", sphere_volume(m));
            assert_eq!(u.harmonicity_residual(&radii()), 0.0);
            let d = u.codifferential().unwrap();
            let v = d.components[0].a.eval(0.7) / sphere_volume(m).sqrt();
            assert!((v + m as f64).abs() < 1e-12);
            assert!(u.components().d_norm2_density().unwrap().is_zero());
        }
    }

    #[test]
    fn each_type_solves_the_component_equations() {
        let m = 4;
        let cases = [
            (TypeTag::II, 1.0, 8.0),
            (TypeTag::II, 0.0, 3.0),
            (TypeTag::III, 2.0, 3.0),
            (TypeTag::III, 3.0, 8.0),
            (TypeTag::IV, 1.0, 4.0),
            (TypeTag::IV, 2.0, 9.0),
            (TypeTag::V, -1.0, 0.0),
            (TypeTag::VI, -1.0, 0.0),
        ];
        for (t, s, l) in cases {
            let mode = GrowthMode::new(m, t, s, l, 1).unwrap();
            let u = flat(m, FieldKind::OneForm).with_term(0.7, FieldMode::OneForm(mode), 0).unwrap();
            let res = u.harmonicity_residual(&radii());
            assert!(res < 1e-10, "{t:?} s={s}: {res}");
        }
        for m in [3, 5, 6] {
            let s = 0.5;
            let l = TypeTag::II.eigenvalue_relation(m, s).unwrap();
            let mode = GrowthMode::new(m, TypeTag::II, s, l, 1).unwrap();
            let u = flat(m, FieldKind::OneForm).with_term(1.0, FieldMode::OneForm(mode), 0).unwrap();
            assert!(u.harmonicity_residual(&radii()) < 1e-10);
        }
    }

    #[test]
    fn perturbed_eigenvalue_is_detected() {
        let mut mode = GrowthMode::new(4, TypeTag::II, 1.0, 8.0, 1).unwrap();
        mode.angular.as_mut().unwrap().eigenvalue += 1e-3;
        let u = flat(4, FieldKind::OneForm).with_term(1.0, FieldMode::OneForm(mode), 0).unwrap();
        let res = u.harmonicity_residual(&[1.0]);
        assert!(res > 1e-4 && res < 1e-2, "{res}");
    }

    #[test]
    fn bulk_and_boundary_dirichlet_agree() {
        let m = 4;
        let modes = [
            GrowthMode::new(m, TypeTag::II, 1.0, 8.0, 1).unwrap(),
            GrowthMode::new(m, TypeTag::III, 2.0, 3.0, 1).unwrap(),
            GrowthMode::new(m, TypeTag::IV, 1.0, 4.0, 1).unwrap(),
            GrowthMode::type_i(m, 1.0).unwrap(),
        ];
        let mut u = flat(m, FieldKind::OneForm);
        for (i, g) in modes.into_iter().enumerate() {
            u = u.with_term(0.3 + i as f64, FieldMode::OneForm(g), 0).unwrap();
        }
        let c = u.components();
        for r in [0.3, 1.0, 2.5] {
            let bulk = c.gradient_density().integral_from_zero(r).unwrap();
            let bdry = c.boundary_dirichlet().eval(r);
            assert!((bulk - bdry).abs() <= 1e-9 * bdry.abs(), "{bulk} vs {bdry}");
        }
    }

    #[test]
    fn radial_derivative_of_log_mode() {
        let mode = GrowthMode::new(4, TypeTag::V, -1.0, 0.0, 1).unwrap();
        let u = flat(4, FieldKind::OneForm).with_term(1.0, FieldMode::OneForm(mode), 0).unwrap();
        assert!(matches!(u.homogeneity_check(), Homogeneity::LogHomogeneous { .. }));
        let du = u.radial_derivative().unwrap();
        assert_eq!(du.terms.len(), 2);
        assert!(du.harmonicity_residual(&radii()) < 1e-10);
    }

    #[test]
    fn projection_of_member_is_zero() {
        let m = 4;
        let g = GrowthMode::new(m, TypeTag::II, 1.0, 8.0, 9).unwrap();
        let v = flat(m, FieldKind::OneForm).with_term(1.0, FieldMode::OneForm(g), 2).unwrap();
        let u = v.scaled(2.5);
        let p = project_against(&u, &[v.clone()], 1.0).unwrap();
        assert!(p.terms.iter().all(|t| t.coefficient.abs() < 1e-12));
        assert_eq!(project_against(&u, &[], 1.0).unwrap(), u);
        assert!(matches!(
            project_against(&u, &[v.clone(), v], 1.0),
            Err(Error::SingularGram(_))
        ));
    }
}
