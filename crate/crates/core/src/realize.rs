//! Pointwise realisation of separable fields on C(S^{m−1}/Γ) ⊂ ℝ^m/Γ.
//!
//! Angular eigendata are harmonic polynomials: Y = P/r^k with P of degree k,
//! dY = ∇P/r^k − kP x/r^{k+2}, and a coclosed form lifts as ω/r^{k+1}. Every
//! term then becomes a sum of φ(r)·V(x) with V polynomial, which gives exact
//! Cartesian derivatives by the product rule.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::cross_section::{CrossSection, CrossSectionModel, EigenKind};
use crate::error::{Error, Result};
use crate::fields::{FieldKind, FieldMode, SeparableField, CODIFFERENTIAL_SIGN};
use crate::harmonics::{coclosed_basis, harmonic_basis};
use crate::poly::Poly;
use crate::radial::RadialProfile;
use crate::spectra::{GrowthMode, TypeTag};

#[derive(Clone, Debug)]
struct Piece {
    phi: RadialProfile,
    dphi: RadialProfile,
    ddphi: RadialProfile,
    v: Vec<Poly>,
    grad: Vec<Vec<Poly>>,
    lap: Vec<Poly>,
}

impl Piece {
    fn new(phi: RadialProfile, v: Vec<Poly>) -> Self {
        let m = v[0].nvars();
        let dphi = phi.derivative();
        let ddphi = dphi.derivative();
        let grad = v.iter().map(|p| (0..m).map(|i| p.derivative(i)).collect()).collect();
        let lap = v.iter().map(Poly::laplacian).collect();
        Self {
            phi,
            dphi,
            ddphi,
            v,
            grad,
            lap,
        }
    }
}

/// A field as Σ φ(r) V(x) in Cartesian components (one for functions).
#[derive(Clone, Debug)]
pub struct PointField {
    pub m: usize,
    pub kind: FieldKind,
    pieces: Vec<Piece>,
}

/// Value of a field at a point of the cone.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PointSample {
    pub r: f64,
    /// Point of the unit sphere covering X.
    pub x: Vec<f64>,
    /// Function value, or the dr component of a 1-form.
    pub radial: f64,
    /// Orthonormal-frame tangential components (Cartesian, normal part removed).
    pub tangential: Vec<f64>,
}

fn degree_from(lambda: f64, m: usize, kind: EigenKind) -> Result<u32> {
    // λ = k(k+m−2) or μ = (k+1)(k+m−3): solve the quadratic and insist on an integer
    let mf = m as f64;
    let k = match kind {
        EigenKind::Function => (-(mf - 2.0) + ((mf - 2.0).powi(2) + 4.0 * lambda).sqrt()) / 2.0,
        EigenKind::Coclosed1Form => (-(mf - 2.0) + ((mf - 4.0).powi(2) + 4.0 * lambda).sqrt()) / 2.0,
    };
    let kr = k.round();
    if (k - kr).abs() > 1e-8 || kr < 0.0 {
        return Err(Error::Unsupported(format!(
            "eigenvalue {lambda} is not a polynomial degree on S^{}",
            m - 1
        )));
    }
    Ok(kr as u32)
}

struct Bases<'a> {
    m: usize,
    section: &'a CrossSection,
    functions: HashMap<u32, Vec<Poly>>,
    forms: HashMap<u32, Vec<Vec<Poly>>>,
}

impl Bases<'_> {
    fn function(&mut self, k: u32, index: usize) -> Result<Poly> {
        if !self.functions.contains_key(&k) {
            let b = harmonic_basis(self.m, k, &self.section.group())?;
            self.functions.insert(k, b);
        }
        self.functions[&k]
            .get(index)
            .cloned()
            .ok_or_else(|| Error::InvalidArgument(format!("angular index {index} out of range at degree {k}")))
    }

    fn form(&mut self, k: u32, index: usize) -> Result<Vec<Poly>> {
        if !self.section.group().is_trivial() {
            return Err(Error::Unsupported("coclosed forms on sphere quotients".into()));
        }
        if !self.forms.contains_key(&k) {
            self.forms.insert(k, coclosed_basis(self.m, k)?);
        }
        self.forms[&k]
            .get(index)
            .cloned()
            .ok_or_else(|| Error::InvalidArgument(format!("coclosed index {index} out of range at degree {k}")))
    }
}

/// Builds the Cartesian realisation of a field on a sphere or sphere-quotient cone.
pub fn realize(field: &SeparableField, section: &CrossSection) -> Result<PointField> {
    if matches!(section.model, CrossSectionModel::Mesh { .. }) {
        return Err(Error::Unsupported("point evaluation on mesh cross-sections".into()));
    }
    let m = field.m;
    if section.cone_dim() != m {
        return Err(Error::InvalidArgument("field and cross-section dimensions differ".into()));
    }
    let mut bases = Bases {
        m,
        section,
        functions: HashMap::new(),
        forms: HashMap::new(),
    };
    let x: Vec<Poly> = (0..m).map(|i| Poly::variable(m, i)).collect();
    let mut pieces = Vec::new();
    for t in &field.terms {
        let c = t.coefficient;
        if c == 0.0 {
            continue;
        }
        match &t.mode {
            FieldMode::Function(f) => {
                let k = degree_from(f.eigenvalue, m, EigenKind::Function)?;
                let p = bases.function(k, t.angular_index)?;
                pieces.push(Piece::new(RadialProfile::power(c, f.degree - k as f64), vec![p]));
            }
            FieldMode::OneForm(g) => {
                let s = g.s_raw;
                let (a, b, key_kind) = match g.type_tag {
                    TypeTag::I => {
                        let phi = RadialProfile::power(c, s - 1.0);
                        pieces.push(Piece::new(phi, x.clone()));
                        continue;
                    }
                    TypeTag::II => (
                        RadialProfile::power(c * (s + 1.0), s),
                        RadialProfile::power(c, s + 1.0),
                        EigenKind::Function,
                    ),
                    TypeTag::III => (
                        RadialProfile::power(c, s),
                        RadialProfile::power(-c / (s + m as f64 - 3.0), s + 1.0),
                        EigenKind::Function,
                    ),
                    TypeTag::V => (
                        RadialProfile::power_log(c * (s + 1.0), s, 1),
                        RadialProfile::power_log(c, s + 1.0, 1),
                        EigenKind::Function,
                    ),
                    TypeTag::IV => (
                        RadialProfile::zero(),
                        RadialProfile::power(c, s + 1.0),
                        EigenKind::Coclosed1Form,
                    ),
                    TypeTag::VI => (
                        RadialProfile::zero(),
                        RadialProfile::power_log(c, s + 1.0, 1),
                        EigenKind::Coclosed1Form,
                    ),
                };
                let lam = g.eigenvalue().unwrap_or(0.0);
                let k = degree_from(lam, m, key_kind)?;
                let kf = k as f64;
                match key_kind {
                    EigenKind::Function => {
                        let p = bases.function(k, t.angular_index)?;
                        let px: Vec<Poly> = x.iter().map(|xi| xi.mul(&p)).collect();
                        let grad: Vec<Poly> = (0..m).map(|i| p.derivative(i)).collect();
                        // A Y dr = A r^{−k−1} P x
                        pieces.push(Piece::new(a.shift(-kf - 1.0), px.clone()));
                        // B dY = B r^{−k} ∇P − k B r^{−k−2} P x
                        pieces.push(Piece::new(b.shift(-kf), grad));
                        if k > 0 {
                            pieces.push(Piece::new(b.shift(-kf - 2.0).scale(-kf), px));
                        }
                    }
                    EigenKind::Coclosed1Form => {
                        let w = bases.form(k, t.angular_index)?;
                        pieces.push(Piece::new(b.shift(-kf - 1.0), w));
                    }
                }
            }
        }
    }
    Ok(PointField {
        m,
        kind: field.kind,
        pieces,
    })
}

fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

impl PointField {
    fn ncomp(&self) -> usize {
        match self.kind {
            FieldKind::Function => 1,
            FieldKind::OneForm => self.m,
        }
    }

    /// Cartesian components at x ≠ 0.
    pub fn value(&self, x: &[f64]) -> Vec<f64> {
        let r = norm(x);
        let mut out = vec![0.0; self.ncomp()];
        for p in &self.pieces {
            let phi = p.phi.eval(r);
            for (o, v) in out.iter_mut().zip(&p.v) {
                *o += phi * v.eval(x);
            }
        }
        out
    }

    /// J[(i, j)] = ∂_i u_j.
    pub fn jacobian(&self, x: &[f64]) -> Vec<Vec<f64>> {
        let r = norm(x);
        let mut out = vec![vec![0.0; self.ncomp()]; self.m];
        for p in &self.pieces {
            let (phi, dphi) = (p.phi.eval(r), p.dphi.eval(r));
            for j in 0..self.ncomp() {
                let vj = p.v[j].eval(x);
                for i in 0..self.m {
                    out[i][j] += dphi * x[i] / r * vj + phi * p.grad[j][i].eval(x);
                }
            }
        }
        out
    }

    /// Componentwise flat Laplacian Σ∂²u_j (zero for harmonic fields).
    pub fn laplacian(&self, x: &[f64]) -> Vec<f64> {
        let r = norm(x);
        let mf = self.m as f64;
        let mut out = vec![0.0; self.ncomp()];
        for p in &self.pieces {
            let (phi, dphi, ddphi) = (p.phi.eval(r), p.dphi.eval(r), p.ddphi.eval(r));
            for (j, o) in out.iter_mut().enumerate() {
                let euler: f64 = (0..self.m).map(|i| x[i] * p.grad[j][i].eval(x)).sum();
                *o += (ddphi + (mf - 1.0) * dphi / r) * p.v[j].eval(x)
                    + 2.0 * dphi / r * euler
                    + phi * p.lap[j].eval(x);
            }
        }
        out
    }

    pub fn codifferential(&self, x: &[f64]) -> Result<f64> {
        if self.kind != FieldKind::OneForm {
            return Err(Error::InvalidArgument("d* is taken of 1-forms".into()));
        }
        let j = self.jacobian(x);
        Ok(CODIFFERENTIAL_SIGN * (0..self.m).map(|i| j[i][i]).sum::<f64>())
    }

    /// |du|² at x, summed over i < j.
    pub fn d_norm2(&self, x: &[f64]) -> Result<f64> {
        if self.kind != FieldKind::OneForm {
            return Err(Error::InvalidArgument("|du|² is taken of 1-forms".into()));
        }
        let j = self.jacobian(x);
        let mut total = 0.0;
        for a in 0..self.m {
            for b in (a + 1)..self.m {
                total += (j[a][b] - j[b][a]).powi(2);
            }
        }
        Ok(total)
    }

    pub fn sample(&self, r: f64, direction: &[f64]) -> Result<PointSample> {
        let n = norm(direction);
        if r <= 0.0 || n == 0.0 || direction.len() != self.m {
            return Err(Error::InvalidArgument("samples need r > 0 and a nonzero direction in ℝ^m".into()));
        }
        let xhat: Vec<f64> = direction.iter().map(|v| v / n).collect();
        let point: Vec<f64> = xhat.iter().map(|v| v * r).collect();
        let u = self.value(&point);
        Ok(match self.kind {
            FieldKind::Function => PointSample {
                r,
                x: xhat,
                radial: u[0],
                tangential: Vec::new(),
            },
            FieldKind::OneForm => {
                let radial: f64 = u.iter().zip(&xhat).map(|(a, b)| a * b).sum();
                let tangential = u.iter().zip(&xhat).map(|(a, b)| a - radial * b).collect();
                PointSample {
                    r,
                    x: xhat,
                    radial,
                    tangential,
                }
            }
        })
    }
}

/// CSV with columns r, x_0.., radial, t_0.. (one row per sample).
pub fn samples_to_csv(samples: &[PointSample]) -> String {
    let Some(first) = samples.first() else {
        return String::from("r\n");
    };
    let mut header = vec!["r".to_string()];
    header.extend((0..first.x.len()).map(|i| format!("x{i}")));
    header.push("radial".into());
    header.extend((0..first.tangential.len()).map(|i| format!("t{i}")));
    let mut out = header.join(",");
    out.push('\n');
    for s in samples {
        let mut row = vec![format!("{:.16e}", s.r)];
        row.extend(s.x.iter().map(|v| format!("{v:.16e}")));
        row.push(format!("{:.16e}", s.radial));
        row.extend(s.tangential.iter().map(|v| format!("{v:.16e}")));
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

/// Classifies a homogeneous polynomial 1-form on ℝ^m (Cartesian
/// components) as a type II or type IV growth mode on C(S^{m−1}).
pub fn classify_polynomial_oneform(components: &[Poly]) -> Result<GrowthMode> {
    let m = components.len();
    let mut degree = None;
    for p in components {
        for (e, &c) in p.terms() {
            if c == 0.0 {
                continue;
            }
            let d: u32 = e.iter().sum();
            if *degree.get_or_insert(d) != d {
                return Err(Error::InvalidArgument("form is not homogeneous".into()));
            }
        }
    }
    let k = degree.ok_or_else(|| Error::InvalidArgument("zero form".into()))?;
    let tol = 1e-12 * components.iter().map(|p| p.sphere_inner(p)).sum::<f64>().sqrt();
    let small = |p: &Poly| p.sphere_inner(p).sqrt() <= tol;
    if !components.iter().all(|p| small(&p.laplacian())) {
        return Err(Error::NotHarmonic(
            components.iter().map(|p| p.laplacian().sphere_inner(&p.laplacian()).sqrt()).fold(0.0, f64::max),
        ));
    }
    let closed = (0..m).all(|i| {
        (i + 1..m).all(|j| small(&components[j].derivative(i).add(&components[i].derivative(j).scale(-1.0))))
    });
    let s = k as f64;
    if closed {
        // u = dP with P of degree k+1
        let kf = s + 1.0;
        let lambda = kf * (kf + m as f64 - 2.0);
        return GrowthMode::new(m, TypeTag::II, s, lambda, crate::special::harmonic_dimension(m, k as usize + 1));
    }
    let mut radial = Poly::zero(m);
    let mut div = Poly::zero(m);
    for (i, p) in components.iter().enumerate() {
        radial = radial.add(&Poly::variable(m, i).mul(p));
        div = div.add(&p.derivative(i));
    }
    if small(&radial) && small(&div) {
        // exact Rayleigh quotient on the unit sphere
        let num = crate::harmonics::form_d_norm2(components);
        let den: f64 = components.iter().map(|p| p.sphere_inner(p)).sum();
        let mu = num / den - (s + 1.0).powi(2);
        let expected = (s + 1.0) * (s + m as f64 - 3.0);
        if (mu - expected).abs() > 1e-10 * expected.abs().max(1.0) {
            return Err(Error::OracleMismatch(format!(
                "Rayleigh quotient {mu} differs from (k+1)(k+m−3) = {expected}"
            )));
        }
        return GrowthMode::new(m, TypeTag::IV, s, expected, crate::special::coclosed_dimension(m - 1, k as usize));
    }
    Err(Error::Unsupported("form mixes exact and coclosed parts".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cross_section::GroupAction;

    fn sphere(m: usize) -> CrossSection {
        CrossSection::round_sphere(m).unwrap()
    }

    fn one_form(m: usize, modes: &[(f64, GrowthMode, usize)]) -> SeparableField {
        let s = sphere(m);
        let mut f = SeparableField::new(m, &s.id, s.volume(), FieldKind::OneForm);
        for (c, g, i) in modes {
            f = f.with_term(*c, FieldMode::OneForm(g.clone()), *i).unwrap();
        }
        f
    }

    #[test]
    fn radial_form_point_values() {
        let u = one_form(4, &[(1.0, GrowthMode::type_i(4, 1.0).unwrap(), 0)]);
        let p = realize(&u, &sphere(4)).unwrap();
        let x = [0.3, -0.2, 0.5, 0.1];
        for (a, b) in p.value(&x).iter().zip(&x) {
            assert!((a - b).abs() < 1e-14);
        }
        assert!((p.codifferential(&x).unwrap() + 4.0).abs() < 1e-13);
        assert!(p.d_norm2(&x).unwrap().abs() < 1e-26);
    }

    #[test]
    fn realized_modes_are_flat_harmonic() {
        let m = 4;
        let modes = [
            GrowthMode::new(m, TypeTag::II, 1.0, 8.0, 9).unwrap(),
            GrowthMode::new(m, TypeTag::III, 2.0, 3.0, 4).unwrap(),
            GrowthMode::new(m, TypeTag::IV, 1.0, 4.0, 6).unwrap(),
            GrowthMode::new(m, TypeTag::IV, 2.0, 9.0, 16).unwrap(),
            GrowthMode::new(m, TypeTag::II, -4.0, 3.0, 4).unwrap(),
        ];
        let x = [0.4, 0.7, -0.3, 0.2];
        for g in modes {
            for idx in [0, 2] {
                let p = realize(&one_form(m, &[(1.0, g.clone(), idx)]), &sphere(m)).unwrap();
                let lap = p.laplacian(&x);
                assert!(lap.iter().all(|v| v.abs() < 1e-10), "{:?} {lap:?}", g.type_tag);
            }
        }
    }

    #[test]
    fn pointwise_and_integrated_quantities_agree() {
        // ∫_S |du|² and ∫_S (d*u)² from point values against the closed forms
        let m = 3;
        let g = GrowthMode::new(m, TypeTag::III, 2.0, 2.0, 3).unwrap();
        let u = one_form(m, &[(1.0, g, 1)]);
        let p = realize(&u, &sphere(m)).unwrap();
        let c = u.components();
        let dn = c.d_norm2_density().unwrap();
        let ds = c.codifferential().unwrap().boundary_mass();
        let n = 400;
        let (mut a, mut b) = (0.0, 0.0);
        for i in 0..n {
            let th = std::f64::consts::PI * (i as f64 + 0.5) / n as f64;
            for j in 0..2 * n {
                let ph = std::f64::consts::PI * (j as f64 + 0.5) / n as f64;
                let x = [th.sin() * ph.cos(), th.sin() * ph.sin(), th.cos()];
                let w = th.sin() * (std::f64::consts::PI / n as f64).powi(2);
                a += p.d_norm2(&x).unwrap() * w;
                b += p.codifferential(&x).unwrap().powi(2) * w;
            }
        }
        assert!((a - dn.eval(1.0)).abs() < 1e-4 * dn.eval(1.0), "{a} {}", dn.eval(1.0));
        assert!((b - ds.eval(1.0)).abs() < 1e-4 * ds.eval(1.0).max(1.0), "{b} {}", ds.eval(1.0));
    }

    #[test]
    fn quotient_invariance_of_realized_field() {
        let s = CrossSection::sphere_quotient(4, GroupAction::Antipodal).unwrap();
        let g = GrowthMode::new(4, TypeTag::II, 1.0, 8.0, 9).unwrap();
        let u = SeparableField::new(4, &s.id, s.volume(), FieldKind::OneForm)
            .with_term(1.0, FieldMode::OneForm(g), 0)
            .unwrap();
        let p = realize(&u, &s).unwrap();
        let x = [0.2, 0.5, -0.6, 0.3];
        let y: Vec<f64> = x.iter().map(|v| -v).collect();
        // pullback under x ↦ −x flips the sign of components of an invariant form
        for (a, b) in p.value(&x).iter().zip(p.value(&y)) {
            assert!((a + b).abs() < 1e-12);
        }
    }

    #[test]
    fn rotational_form_is_type_iv_at_the_lichnerowicz_bound() {
        let v = |i| Poly::variable(4, i);
        let w = vec![v(1).scale(-1.0), v(0), v(3).scale(-1.0), v(2)];
        let g = classify_polynomial_oneform(&w).unwrap();
        assert_eq!(g.type_tag, TypeTag::IV);
        assert_eq!(g.growth_rate, 1.0);
        assert!((g.eigenvalue().unwrap() - 4.0).abs() < 1e-12);
        let x2 = v(0).mul(&v(0)).add(&v(1).mul(&v(1)).scale(-1.0));
        let df: Vec<Poly> = (0..4).map(|i| x2.derivative(i)).collect();
        assert_eq!(classify_polynomial_oneform(&df).unwrap().type_tag, TypeTag::II);
    }

    #[test]
    fn samples_export() {
        let u = one_form(3, &[(1.0, GrowthMode::type_i(3, 1.0).unwrap(), 0)]);
        let p = realize(&u, &sphere(3)).unwrap();
        let s = p.sample(2.0, &[0.0, 0.0, 5.0]).unwrap();
        assert!((s.radial - 2.0).abs() < 1e-14);
        assert!(s.tangential.iter().all(|v| v.abs() < 1e-14));
        let csv = samples_to_csv(&[s]);
        assert!(csv.starts_with("r,x0,x1,x2,radial,t0,t1,t2\n"));
        assert!(p.sample(0.0, &[1.0, 0.0, 0.0]).is_err());
    }
}
