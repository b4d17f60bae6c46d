//! Almgren frequency N(r) = rD(r)/H(r) of separable harmonic fields on cones,
//! with the monotonicity, log-convexity, pairing, 3-annulus, ε-doubling and
//! dyadic decay experiments built on it.

use serde::{Deserialize, Serialize};

use crate::cross_section::EigenTable;
use crate::error::{Error, Result};
use crate::fields::{project_against, ComponentField, FieldKind, FieldMode, Homogeneity, SeparableField};
use crate::spectra::{function_degrees, GrowthMode, TypeTag, RATE_TOL};

/// Component-equation residual above which a field is not accepted as harmonic.
pub const HARMONIC_TOL: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum ToleranceProfile {
    #[default]
    Analytic,
    Mesh,
}

impl ToleranceProfile {
    pub fn tol(self) -> f64 {
        match self {
            ToleranceProfile::Analytic => 1e-9,
            ToleranceProfile::Mesh => 1e-6,
        }
    }
}

/// Curvature contribution ∫_{B_r} 𝕽(u, u) to D(r).
pub trait CurvatureTerm {
    fn integrated(&self, field: &ComponentField, r: f64) -> f64;

    fn is_zero(&self) -> bool {
        false
    }
}

/// Ricci-flat cones carry no curvature term for functions and 1-forms.
pub struct RicciFlat;

impl CurvatureTerm for RicciFlat {
    fn integrated(&self, _field: &ComponentField, _r: f64) -> f64 {
        0.0
    }

    fn is_zero(&self) -> bool {
        true
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrequencyProfile {
    pub radii: Vec<f64>,
    #[serde(rename = "D")]
    pub d: Vec<f64>,
    #[serde(rename = "H")]
    pub h: Vec<f64>,
    #[serde(rename = "N")]
    pub n: Vec<f64>,
    #[serde(rename = "F")]
    pub f: Vec<f64>,
    pub curvature_term_included: bool,
}

fn check_radii(radii: &[f64]) -> Result<()> {
    if radii.is_empty() || radii[0] <= 0.0 || radii.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidArgument("radii must be positive and strictly increasing".into()));
    }
    Ok(())
}

/// Rejects fields whose component equations fail at the radii.
pub fn require_harmonic(field: &SeparableField, radii: &[f64]) -> Result<()> {
    let res = field.harmonicity_residual(radii);
    if res > HARMONIC_TOL {
        return Err(Error::NotHarmonic(res));
    }
    Ok(())
}

pub fn frequency_profile(field: &SeparableField, radii: &[f64]) -> Result<FrequencyProfile> {
    frequency_profile_with(field, radii, &RicciFlat)
}

pub fn frequency_profile_with(
    field: &SeparableField,
    radii: &[f64],
    curvature: &dyn CurvatureTerm,
) -> Result<FrequencyProfile> {
    check_radii(radii)?;
    require_harmonic(field, radii)?;
    let c = field.components();
    let (hp, bulk, bdry) = (c.boundary_mass(), c.gradient_density(), c.boundary_dirichlet());
    let mut p = FrequencyProfile {
        radii: radii.to_vec(),
        d: Vec::new(),
        h: Vec::new(),
        n: Vec::new(),
        f: Vec::new(),
        curvature_term_included: !curvature.is_zero(),
    };
    for &r in radii {
        let h = hp.eval(r);
        if !(h > 0.0) {
            return Err(Error::FrequencyUndefined(format!("frequency undefined: H({r}) = {h}")));
        }
        let d_bulk = bulk.integral_from_zero(r)? + curvature.integrated(&c, r);
        let d_bdry = bdry.eval(r);
        let scale = d_bulk.abs().max(d_bdry.abs()).max(1e-14 * h / r);
        if (d_bulk - d_bdry).abs() > 1e-9 * scale {
            return Err(Error::OracleMismatch(format!(
                "bulk D({r}) = {d_bulk:e} disagrees with boundary D = {d_bdry:e}"
            )));
        }
        p.d.push(d_bdry);
        p.h.push(h);
        p.n.push(r * d_bdry / h);
        p.f.push(hp.integral_from_zero(r)?);
    }
    Ok(p)
}

impl FrequencyProfile {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("r,D,H,N,F\n");
        for i in 0..self.radii.len() {
            out.push_str(&format!(
                "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}\n",
                self.radii[i], self.d[i], self.h[i], self.n[i], self.f[i]
            ));
        }
        out
    }

    /// (log r, log H, log F, N) for plotting.
    pub fn plot_data_csv(&self) -> String {
        let mut out = String::from("log_r,log_H,log_F,N\n");
        for i in 0..self.radii.len() {
            out.push_str(&format!(
                "{:.16e},{:.16e},{:.16e},{:.16e}\n",
                self.radii[i].ln(),
                self.h[i].ln(),
                self.f[i].ln(),
                self.n[i]
            ));
        }
        out
    }
}

/// Residuals of H′ = (m−1)H/r + 2D and D′ = (m−2)D/r + 2∫_{∂B_r}|∇_{∂r}u|²,
/// relative to the size of the right-hand sides.
pub fn derivative_identities(field: &SeparableField, r: f64) -> Result<(f64, f64)> {
    let mf = field.m as f64;
    let c = field.components();
    let h = c.boundary_mass();
    let d = c.boundary_dirichlet();
    let radial = field.radial_derivative()?.components().boundary_mass();
    let rhs_h = (mf - 1.0) / r * h.eval(r) + 2.0 * d.eval(r);
    let rhs_d = (mf - 2.0) / r * d.eval(r) + 2.0 * radial.eval(r) / (r * r);
    let (lh, ld) = (h.derivative().eval(r), d.derivative().eval(r));
    let rel = |a: f64, b: f64| (a - b).abs() / a.abs().max(b.abs()).max(f64::MIN_POSITIVE);
    Ok((rel(lh, rhs_h), rel(ld, rhs_d)))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MonotonicityReport {
    pub pass: bool,
    /// (index i, N(r_i) − N(r_{i+1})) for each drop beyond tolerance.
    pub violations: Vec<(usize, f64)>,
    pub constant: bool,
    pub homogeneous: bool,
    /// Constancy of N agrees with the homogeneity of the field.
    pub equality_case_consistent: bool,
    /// Some step sat exactly at the tolerance.
    pub boundary: bool,
}

pub fn monotonicity_check(profile: &FrequencyProfile, homogeneity: &Homogeneity, tol: f64) -> MonotonicityReport {
    let mut violations = Vec::new();
    let mut boundary = false;
    for (i, w) in profile.n.windows(2).enumerate() {
        let drop = w[0] - w[1];
        if drop > tol {
            violations.push((i, drop));
        } else if drop == tol {
            boundary = true;
        }
    }
    let (lo, hi) = profile
        .n
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
    let constant = hi - lo < tol;
    let homogeneous = matches!(homogeneity, Homogeneity::Homogeneous { .. });
    MonotonicityReport {
        pass: violations.is_empty(),
        violations,
        constant,
        homogeneous,
        equality_case_consistent: constant == homogeneous,
        boundary,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThreeCircleReport {
    pub pass: bool,
    /// Smallest of F(r)F(r/4)/F(r/2)² − 1 over the radii (and the same for H).
    pub min_gap_f: f64,
    pub min_gap_h: f64,
    /// Every gap is within tolerance of zero.
    pub equality: bool,
    pub homogeneous: bool,
    pub boundary: bool,
}

/// F(r)F(r/4) ≥ F(r/2)² and H(r)H(r/4) ≥ H(r/2)² at each radius.
pub fn three_circle_check(field: &SeparableField, radii: &[f64], tol: f64) -> Result<ThreeCircleReport> {
    check_radii(radii)?;
    require_harmonic(field, radii)?;
    let c = field.components();
    let hp = c.boundary_mass();
    let (mut gf, mut gh) = (f64::INFINITY, f64::INFINITY);
    let mut max_abs = 0.0_f64;
    for &r in radii {
        let f = |t: f64| hp.integral_from_zero(t);
        let (f0, f1, f2) = (f(r)?, f(r / 2.0)?, f(r / 4.0)?);
        let (h0, h1, h2) = (hp.eval(r), hp.eval(r / 2.0), hp.eval(r / 4.0));
        if !(f1 > 0.0 && h1 > 0.0) {
            return Err(Error::FrequencyUndefined(format!("frequency undefined: H vanishes near r = {r}")));
        }
        let a = f0 * f2 / (f1 * f1) - 1.0;
        let b = h0 * h2 / (h1 * h1) - 1.0;
        gf = gf.min(a);
        gh = gh.min(b);
        max_abs = max_abs.max(a.abs()).max(b.abs());
    }
    let worst = gf.min(gh);
    Ok(ThreeCircleReport {
        pass: worst >= -tol,
        min_gap_f: gf,
        min_gap_h: gh,
        equality: max_abs <= tol,
        homogeneous: matches!(field.homogeneity_check(), Homogeneity::Homogeneous { .. }),
        boundary: worst == -tol,
    })
}

/// Discrete second differences of log F on a radius grid uniform in log r.
pub fn log_convexity_defect(profile: &FrequencyProfile) -> f64 {
    let lf: Vec<f64> = profile.f.iter().map(|v| v.ln()).collect();
    lf.windows(3)
        .map(|w| w[0] - 2.0 * w[1] + w[2])
        .fold(f64::INFINITY, f64::min)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairingFit {
    pub c: f64,
    pub exponent: Option<f64>,
    pub expected_exponent: f64,
    pub vanishes: bool,
    pub fit_residual: f64,
    pub pass: bool,
}

/// Fits ∫_{∂B_r}⟨u, v⟩ = C r^e; v must be homogeneous of degree s.
pub fn pairing_law_check(u: &SeparableField, v: &SeparableField, radii: &[f64]) -> Result<PairingFit> {
    check_radii(radii)?;
    if radii.len() < 2 {
        return Err(Error::InvalidArgument("pairing fit needs two radii".into()));
    }
    require_harmonic(u, radii)?;
    require_harmonic(v, radii)?;
    let s = match v.homogeneity_check() {
        Homogeneity::Homogeneous { rate } => rate,
        _ => return Err(Error::Precondition("pairing law needs a homogeneous v".into())),
    };
    let expected = 2.0 * s + v.m as f64 - 1.0;
    let (cu, cv) = (u.components(), v.components());
    let pairing = cu.boundary_pairing(&cv);
    let (hu, hv) = (cu.boundary_mass(), cv.boundary_mass());
    let values: Vec<f64> = radii.iter().map(|&r| pairing.eval(r)).collect();
    let vanishes = radii
        .iter()
        .zip(&values)
        .all(|(&r, p)| p.abs() < 1e-12 * (hu.eval(r) * hv.eval(r)).sqrt());
    if vanishes {
        return Ok(PairingFit {
            c: 0.0,
            exponent: None,
            expected_exponent: expected,
            vanishes: true,
            fit_residual: 0.0,
            pass: true,
        });
    }
    if values.iter().any(|p| *p == 0.0) || values.windows(2).any(|w| w[0].signum() != w[1].signum()) {
        return Ok(PairingFit {
            c: f64::NAN,
            exponent: None,
            expected_exponent: expected,
            vanishes: false,
            fit_residual: f64::INFINITY,
            pass: false,
        });
    }
    let xs: Vec<f64> = radii.iter().map(|r| r.ln()).collect();
    let ys: Vec<f64> = values.iter().map(|p| p.abs().ln()).collect();
    let (slope, intercept, residual) = linear_fit(&xs, &ys);
    Ok(PairingFit {
        c: values[0].signum() * intercept.exp(),
        exponent: Some(slope),
        expected_exponent: expected,
        vanishes: false,
        fit_residual: residual,
        pass: (slope - expected).abs() <= 1e-9,
    })
}

/// Least squares y = a x + b; returns (a, b, rms residual).
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let a = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let b = my - a * mx;
    let rms = (xs.iter().zip(ys).map(|(x, y)| (y - a * x - b).powi(2)).sum::<f64>() / n).sqrt();
    (a, b, rms)
}

fn ball_volume(field: &SeparableField, r: f64) -> f64 {
    field.link_volume * r.powi(field.m as i32) / field.m as f64
}

/// ⨏_{B_r} |u|².
pub fn ball_average_mass(field: &SeparableField, r: f64) -> Result<f64> {
    Ok(field.components().boundary_mass().integral_from_zero(r)? / ball_volume(field, r))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnnulusVerdict {
    pub r: f64,
    pub d_bar: f64,
    pub premise: bool,
    pub conclusion: bool,
    pub holds: bool,
}

/// ⨏_{B_r}|u|² ≤ 4^{d̄}⨏_{B_{r/2}}|u|² ⇒ ⨏_{B_{r/2}}|u|² < 4^{d̄}⨏_{B_{r/4}}|u|².
pub fn three_annulus_check(field: &SeparableField, d_bar: f64, r: f64, spectrum_rates: &[f64]) -> Result<AnnulusVerdict> {
    if spectrum_rates.iter().any(|s| (s - d_bar).abs() <= RATE_TOL) {
        return Err(Error::Precondition(format!("d̄ = {d_bar} lies in the growth spectrum")));
    }
    if r <= 0.0 {
        return Err(Error::InvalidArgument("radius must be positive".into()));
    }
    require_harmonic(field, &[r, r / 2.0, r / 4.0])?;
    let a = |t: f64| ball_average_mass(field, t);
    let (a0, a1, a2) = (a(r)?, a(r / 2.0)?, a(r / 4.0)?);
    let k = 4f64.powf(d_bar);
    let premise = a0 <= k * a1;
    let conclusion = a1 < k * a2;
    Ok(AnnulusVerdict {
        r,
        d_bar,
        premise,
        conclusion,
        holds: !premise || conclusion,
    })
}

/// Type II modes d(r^{k}Y) with harmonic degree k ∈ (0, 2), one per basis index.
pub fn sub_quadratic_exact_modes(
    field: &SeparableField,
    functions: &EigenTable,
) -> Result<Vec<SeparableField>> {
    let m = field.m;
    let mut out = Vec::new();
    for deg in function_degrees(m, functions, (0.0, 2.0))? {
        if deg.degree <= RATE_TOL {
            continue;
        }
        let mode = GrowthMode::new(m, TypeTag::II, deg.degree - 1.0, deg.eigenvalue, deg.multiplicity)?;
        for idx in 0..deg.multiplicity {
            let v = SeparableField::new(m, &field.cross_section_id, field.link_volume, FieldKind::OneForm)
                .with_term(1.0, FieldMode::OneForm(mode.clone()), idx)?;
            out.push(v);
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DoublingReport {
    pub delta: f64,
    pub remainder: SeparableField,
    pub vacuous: bool,
    pub ratio: Option<f64>,
    pub threshold: f64,
    pub pass: bool,
}

/// Projects u off d𝓗_{<2} on B₁ and checks ⨏_{B₁}|w|² ≥ 4^{1−δ}⨏_{B_{1/2}}|w|²
/// for the remainder w. Type II terms of u with rate below 1 join the
/// subspace, so artificial sub-linear exact terms are removed as well.
pub fn epsilon_doubling_test(u: &SeparableField, delta: f64, functions: &EigenTable) -> Result<DoublingReport> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::InvalidArgument(format!("δ = {delta} outside (0, 1)")));
    }
    if u.kind != FieldKind::OneForm {
        return Err(Error::InvalidArgument("ε-doubling is stated for 1-forms".into()));
    }
    require_harmonic(u, &[0.25, 0.5, 1.0])?;
    let mut subspace = sub_quadratic_exact_modes(u, functions)?;
    for t in &u.terms {
        if let FieldMode::OneForm(g) = &t.mode {
            if g.type_tag == TypeTag::II && g.growth_rate < 1.0 - RATE_TOL {
                let v = SeparableField::new(u.m, &u.cross_section_id, u.link_volume, FieldKind::OneForm)
                    .with_term(1.0, t.mode.clone(), t.angular_index)?;
                if !subspace.contains(&v) {
                    subspace.push(v);
                }
            }
        }
    }
    let w = project_against(u, &subspace, 1.0)?;
    let threshold = 4f64.powf(1.0 - delta);
    if w.terms.iter().all(|t| t.coefficient.abs() < 1e-12) {
        return Ok(DoublingReport {
            delta,
            remainder: w,
            vacuous: true,
            ratio: None,
            threshold,
            pass: true,
        });
    }
    let ratio = ball_average_mass(&w, 1.0)? / ball_average_mass(&w, 0.5)?;
    Ok(DoublingReport {
        delta,
        pass: ratio >= threshold * (1.0 - 1e-12),
        remainder: w,
        vacuous: false,
        ratio: Some(ratio),
        threshold,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecayReport {
    pub radii: Vec<f64>,
    /// ⨏_{B_ρ} (|du|² + |d*u|²) at ρ = 2^{−k}.
    pub energy_averages: Vec<f64>,
    /// ⨏_{B_ρ} |u|².
    pub mass_averages: Vec<f64>,
    pub identically_zero: bool,
    pub fitted_exponent: Option<f64>,
    pub fit_residual: f64,
    /// Log-slope between the two smallest scales.
    pub leading_exponent: Option<f64>,
    pub doubling_ratios: Vec<f64>,
    pub delta: f64,
    /// C with the bound taken as equality at k = 1.
    pub fitted_c: f64,
    pub bound_holds: bool,
}

/// Tabulates ⨏_{B_{2^{−k}}}(|du|² + |d*u|²) for k = 0..=k_max and checks
/// ⨏ ≤ C ρ^{−2δ} ⨏_{B₁}|u|² with C fitted at k = 1.
pub fn dyadic_decay_report(u: &SeparableField, k_max: u32, delta: f64) -> Result<DecayReport> {
    if u.kind != FieldKind::OneForm {
        return Err(Error::InvalidArgument("decay report is stated for 1-forms".into()));
    }
    if k_max < 2 {
        return Err(Error::InvalidArgument("k_max must be at least 2".into()));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::InvalidArgument(format!("δ = {delta} outside (0, 1)")));
    }
    let radii: Vec<f64> = (0..=k_max).map(|k| 0.5f64.powi(k as i32)).collect();
    require_harmonic(u, &radii)?;
    let c = u.components();
    let energy = c.d_norm2_density()?.add(&c.codifferential()?.boundary_mass()).simplified(1e-13);
    let mass = c.boundary_mass();
    let mut ea = Vec::new();
    let mut ma = Vec::new();
    for &r in &radii {
        let vol = ball_volume(u, r);
        ea.push(energy.integral_from_zero(r)? / vol);
        ma.push(mass.integral_from_zero(r)? / vol);
    }
    let doubling_ratios = ma.windows(2).map(|w| w[0] / w[1]).collect();
    let identically_zero = energy.is_zero();
    let (fitted_exponent, fit_residual, leading_exponent) = if identically_zero || ea.iter().any(|v| *v <= 0.0) {
        (None, 0.0, None)
    } else {
        let xs: Vec<f64> = radii.iter().map(|r| r.ln()).collect();
        let ys: Vec<f64> = ea.iter().map(|v| v.ln()).collect();
        let (a, _, res) = linear_fit(&xs, &ys);
        let n = ys.len();
        let lead = (ys[n - 2] - ys[n - 1]) / (xs[n - 2] - xs[n - 1]);
        (Some(a), res, Some(lead))
    };
    let m1 = ma[0];
    let fitted_c = if m1 > 0.0 { ea[1] * 0.5f64.powf(2.0 * delta) / m1 } else { 0.0 };
    let bound_holds = radii
        .iter()
        .zip(&ea)
        .skip(1)
        .all(|(&r, &e)| e <= fitted_c * r.powf(-2.0 * delta) * m1 * (1.0 + 1e-9) + 1e-300);
    Ok(DecayReport {
        radii,
        energy_averages: ea,
        mass_averages: ma,
        identically_zero,
        fitted_exponent,
        fit_residual,
        leading_exponent,
        doubling_ratios,
        delta,
        fitted_c,
        bound_holds,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cross_section::CrossSection;
    use crate::fields::FunctionMode;
    use std::f64::consts::PI;

    fn dyadic() -> Vec<f64> {
        (-4..=4).map(|k| 2f64.powi(k)).collect()
    }

    fn function_field(m: usize, terms: &[(f64, f64, f64, usize)]) -> SeparableField {
        let s = CrossSection::round_sphere(m).unwrap();
        let mut f = SeparableField::new(m, &s.id, s.volume(), FieldKind::Function);
        for &(c, deg, lam, idx) in terms {
            f = f
                .with_term(c, FieldMode::Function(FunctionMode { degree: deg, eigenvalue: lam }), idx)
                .unwrap();
        }
        f
    }

    /// 1 + x₁ on ℝ³ in the orthonormal basis: 1 = √(4π)Y₀, x₁ = r√(4π/3)Y₁.
    fn one_plus_x() -> SeparableField {
        function_field(3, &[((4.0 * PI).sqrt(), 0.0, 0.0, 0), ((4.0 * PI / 3.0).sqrt(), 1.0, 2.0, 0)])
    }

    #[test]
    fn one_plus_x_frequency() {
        let radii = [0.5, 1.0, 2.0];
        let p = frequency_profile(&one_plus_x(), &radii).unwrap();
        for (i, &r) in radii.iter().enumerate() {
            assert!((p.n[i] - r * r / (3.0 + r * r)).abs() < 1e-14);
            assert!((p.h[i] - 4.0 * PI * r * r * (1.0 + r * r / 3.0)).abs() < 1e-12 * p.h[i]);
            assert!((p.d[i] - 4.0 * PI * r.powi(3) / 3.0).abs() < 1e-12 * p.d[i]);
        }
        assert!((p.n[1] - 0.25).abs() < 1e-15);
        let rep = monotonicity_check(&p, &one_plus_x().homogeneity_check(), 1e-9);
        assert!(rep.pass && !rep.constant && rep.equality_case_consistent);
    }

    #[test]
    fn radial_form_frequency() {
        for m in 2..=5 {
            let s = CrossSection::round_sphere(m).unwrap();
            let u = SeparableField::radial_form(m, &s.id, s.volume());
            let p = frequency_profile(&u, &dyadic()).unwrap();
            for (i, &r) in p.radii.iter().enumerate() {
                assert!((p.d[i] - s.volume() * r.powi(m as i32)).abs() < 1e-12 * p.d[i]);
                assert!((p.h[i] - s.volume() * r.powi(m as i32 + 1)).abs() < 1e-12 * p.h[i]);
                assert!((p.n[i] - 1.0).abs() < 1e-13);
            }
            let rep = monotonicity_check(&p, &u.homogeneity_check(), 1e-9);
            assert!(rep.constant && rep.homogeneous);
        }
    }

    #[test]
    fn degree_one_function_is_log_affine() {
        let f = function_field(3, &[((4.0 * PI / 3.0).sqrt(), 1.0, 2.0, 2)]);
        let p = frequency_profile(&f, &dyadic()).unwrap();
        assert!(p.n.iter().all(|n| (n - 1.0).abs() < 1e-13));
        for (i, &r) in p.radii.iter().enumerate() {
            assert!((p.f[i] - 4.0 * PI * r.powi(5) / 15.0).abs() < 1e-12 * p.f[i]);
        }
        let tc = three_circle_check(&f, &dyadic(), 1e-9).unwrap();
        assert!(tc.pass && tc.equality && tc.homogeneous);
        let mix = function_field(3, &[(1.0, 1.0, 2.0, 0), (1.0, 2.0, 6.0, 0)]);
        let tc = three_circle_check(&mix, &dyadic(), 1e-9).unwrap();
        assert!(tc.pass && !tc.equality && tc.min_gap_f > 1e-6);
        let constant = function_field(3, &[(1.0, 0.0, 0.0, 0)]);
        assert!(three_circle_check(&constant, &dyadic(), 1e-9).unwrap().equality);
    }

    #[test]
    fn zero_and_non_harmonic_fields_rejected() {
        let zero = function_field(3, &[(0.0, 1.0, 2.0, 0)]);
        assert!(matches!(frequency_profile(&zero, &[1.0]), Err(Error::FrequencyUndefined(_))));
        let bad = function_field(3, &[(1.0, 1.0, 2.5, 0)]);
        assert!(matches!(frequency_profile(&bad, &[1.0]), Err(Error::NotHarmonic(_))));
        assert!(frequency_profile(&one_plus_x(), &[1.0, 0.5]).is_err());
    }

    #[test]
    fn derivative_identities_hold_with_n_equal_m() {
        let s = CrossSection::round_sphere(4).unwrap();
        let modes = [
            GrowthMode::new(4, TypeTag::II, 1.0, 8.0, 9).unwrap(),
            GrowthMode::new(4, TypeTag::III, 2.0, 3.0, 4).unwrap(),
            GrowthMode::new(4, TypeTag::IV, 1.0, 4.0, 6).unwrap(),
            GrowthMode::type_i(4, 1.0).unwrap(),
        ];
        let mut u = SeparableField::new(4, &s.id, s.volume(), FieldKind::OneForm);
        for (i, g) in modes.into_iter().enumerate() {
            u = u.with_term(1.0 + 0.5 * i as f64, FieldMode::OneForm(g), 0).unwrap();
        }
        for r in [0.3, 1.0, 4.0] {
            let (eh, ed) = derivative_identities(&u, r).unwrap();
            assert!(eh < 1e-12 && ed < 1e-12, "{eh} {ed}");
            let (eh, ed) = derivative_identities(&one_plus_x(), r).unwrap();
            assert!(eh < 1e-12 && ed < 1e-12, "{eh} {ed}");
        }
    }

    #[test]
    fn pairing_law_examples() {
        let radii = [0.5, 1.0, 2.0, 4.0];
        let x = function_field(3, &[(1.0, 1.0, 2.0, 0)]);
        let fit = pairing_law_check(&x, &x, &radii).unwrap();
        assert!(fit.pass && (fit.exponent.unwrap() - 4.0).abs() < 1e-9);
        let q = function_field(3, &[(1.0, 2.0, 6.0, 0)]);
        let fit = pairing_law_check(&q, &x, &radii).unwrap();
        assert!(fit.vanishes && fit.c == 0.0);
        for m in 2..=5 {
            let u = SeparableField::radial_form(m, "S", crate::special::sphere_volume(m));
            let fit = pairing_law_check(&u, &u, &radii).unwrap();
            assert!((fit.exponent.unwrap() - (m as f64 + 1.0)).abs() < 1e-9);
        }
        assert!(pairing_law_check(&x, &one_plus_x(), &radii).is_err());
    }

    #[test]
    fn three_annulus_examples() {
        let x = function_field(3, &[(1.0, 1.0, 2.0, 0)]);
        for r in [0.5, 1.0, 3.0] {
            let v = three_annulus_check(&x, 1.3, r, &[0.0, 1.0, 2.0]).unwrap();
            assert!(v.premise && v.conclusion && v.holds);
            let v = three_annulus_check(&one_plus_x(), 0.5, r, &[0.0, 1.0, 2.0]).unwrap();
            assert!(v.holds);
        }
        assert!(matches!(
            three_annulus_check(&x, 1.0, 1.0, &[0.0, 1.0]),
            Err(Error::Precondition(_))
        ));
    }

    fn r4_modes() -> (CrossSection, GrowthMode, GrowthMode) {
        let s = CrossSection::round_sphere(4).unwrap();
        let exact = GrowthMode::new(4, TypeTag::II, 0.0, 3.0, 4).unwrap();
        let rot = GrowthMode::new(4, TypeTag::IV, 1.0, 4.0, 6).unwrap();
        (s, exact, rot)
    }

    #[test]
    fn epsilon_doubling_examples() {
        let (s, exact, rot) = r4_modes();
        let table = s.function_table(4).unwrap();
        let base = SeparableField::new(4, &s.id, s.volume(), FieldKind::OneForm);
        let df = base.clone().with_term(0.8, FieldMode::OneForm(exact.clone()), 1).unwrap();
        let rep = epsilon_doubling_test(&df, 0.3, &table).unwrap();
        assert!(rep.vacuous && rep.pass);
        let mixed = df.clone().with_term(0.6, FieldMode::OneForm(rot.clone()), 2).unwrap();
        for delta in [0.1, 0.5, 0.9] {
            let rep = epsilon_doubling_test(&mixed, delta, &table).unwrap();
            assert!(rep.pass && !rep.vacuous);
            assert!((rep.ratio.unwrap() - 4.0).abs() < 1e-12);
            let rot_only = base.clone().with_term(0.6, FieldMode::OneForm(rot.clone()), 2).unwrap();
            assert_eq!(rep.remainder.terms.iter().filter(|t| t.coefficient != 0.0).count(), 1);
            assert!((rep.remainder.terms[1].coefficient - rot_only.terms[0].coefficient).abs() < 1e-12);
        }
        let lam = TypeTag::II.eigenvalue_relation(4, 0.5).unwrap();
        let art = GrowthMode::new(4, TypeTag::II, 0.5, lam, 1).unwrap();
        let with_art = mixed.with_term(0.4, FieldMode::OneForm(art), 0).unwrap();
        let rep = epsilon_doubling_test(&with_art, 0.5, &table).unwrap();
        assert!(rep.pass && (rep.ratio.unwrap() - 4.0).abs() < 1e-12);
    }

    #[test]
    fn decay_examples() {
        let (s, exact, rot) = r4_modes();
        let base = SeparableField::new(4, &s.id, s.volume(), FieldKind::OneForm);
        let df = base.clone().with_term(1.0, FieldMode::OneForm(exact), 0).unwrap();
        let rep = dyadic_decay_report(&df, 8, 0.5).unwrap();
        assert!(rep.identically_zero && rep.bound_holds);
        assert!(rep.energy_averages.iter().all(|v| *v == 0.0));

        let rdr = SeparableField::radial_form(4, &s.id, s.volume());
        let rep = dyadic_decay_report(&rdr, 8, 0.5).unwrap();
        assert!(rep.energy_averages.iter().all(|v| (v - 16.0).abs() < 1e-12));
        assert!(rep.fitted_exponent.unwrap().abs() < 1e-12 && rep.bound_holds);

        // rotational form with |ω|² = r² on the unit sphere normalisation
        let w = base.with_term(1.0, FieldMode::OneForm(rot), 0).unwrap();
        let rep = dyadic_decay_report(&w, 8, 0.5).unwrap();
        let e = rep.energy_averages[0];
        assert!(rep.energy_averages.iter().all(|v| (v - e).abs() < 1e-12 * e));
        assert!(rep.fitted_exponent.unwrap().abs() < 1e-12);
    }
}
