//! Radial profiles: finite sums of c·r^p·(log r)^j.
//!
//! Every separable field on a cone reduces, per angular eigenmode, to a pair
//! of such profiles, and every quantity the frequency machinery needs
//! (boundary masses, Dirichlet energies, ball integrals) is again a profile
//! whose integral from the vertex has a closed form.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const POWER_MERGE_TOL: f64 = 1e-12;
const CANCEL_TOL: f64 = 64.0 * f64::EPSILON;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RadialTerm {
    pub coef: f64,
    pub power: f64,
    pub log_power: u32,
}

impl RadialTerm {
    fn eval(&self, r: f64) -> f64 {
        let base = self.coef * r.powf(self.power);
        if self.log_power == 0 {
            base
        } else {
            base * r.ln().powi(self.log_power as i32)
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct RadialProfile {
    terms: Vec<RadialTerm>,
}

impl RadialProfile {
    pub fn zero() -> Self {
        Self::default()
    }

    /// c·r^p
    pub fn power(coef: f64, power: f64) -> Self {
        Self::power_log(coef, power, 0)
    }

    /// c·r^p·(log r)^j
    pub fn power_log(coef: f64, power: f64, log_power: u32) -> Self {
        if coef == 0.0 {
            return Self::zero();
        }
        Self {
            terms: vec![RadialTerm {
                coef,
                power,
                log_power,
            }],
        }
    }

    pub fn terms(&self) -> &[RadialTerm] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.iter().all(|t| t.coef == 0.0)
    }

    pub fn has_log(&self) -> bool {
        self.terms.iter().any(|t| t.log_power > 0 && t.coef != 0.0)
    }

    pub fn eval(&self, r: f64) -> f64 {
        self.terms.iter().map(|t| t.eval(r)).sum()
    }

    pub fn scale(&self, c: f64) -> Self {
        if c == 0.0 {
            return Self::zero();
        }
        Self {
            terms: self
                .terms
                .iter()
                .map(|t| RadialTerm { coef: t.coef * c, ..*t })
                .collect(),
        }
    }

    /// Multiply by r^k.
    pub fn shift(&self, k: f64) -> Self {
        Self {
            terms: self
                .terms
                .iter()
                .map(|t| RadialTerm { power: t.power + k, ..*t })
                .collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut terms = self.terms.clone();
        terms.extend_from_slice(&other.terms);
        Self { terms }.merged()
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(-1.0))
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut terms = Vec::with_capacity(self.terms.len() * other.terms.len());
        for a in &self.terms {
            for b in &other.terms {
                terms.push(RadialTerm {
                    coef: a.coef * b.coef,
                    power: a.power + b.power,
                    log_power: a.log_power + b.log_power,
                });
            }
        }
        Self { terms }.merged()
    }

    pub fn derivative(&self) -> Self {
        let mut terms = Vec::with_capacity(2 * self.terms.len());
        for t in &self.terms {
            if t.power != 0.0 {
                terms.push(RadialTerm {
                    coef: t.coef * t.power,
                    power: t.power - 1.0,
                    log_power: t.log_power,
                });
            }
            if t.log_power > 0 {
                terms.push(RadialTerm {
                    coef: t.coef * f64::from(t.log_power),
                    power: t.power - 1.0,
                    log_power: t.log_power - 1,
                });
            }
        }
        Self { terms }.merged()
    }

    /// Combine terms sharing (power, log power). A combined coefficient at
    /// rounding level relative to its contributions is dropped.
    pub fn merged(self) -> Self {
        self.combine(CANCEL_TOL)
    }

    /// Like [`merged`](Self::merged), but a combined coefficient whose size is
    /// below `rel_tol` times the largest contributing coefficient is treated
    /// as an algebraic cancellation and removed.
    pub fn simplified(&self, rel_tol: f64) -> Self {
        self.clone().combine(rel_tol)
    }

    fn combine(mut self, rel_tol: f64) -> Self {
        self.terms.sort_by(|a, b| {
            a.log_power
                .cmp(&b.log_power)
                .then(a.power.total_cmp(&b.power))
        });
        let mut out: Vec<RadialTerm> = Vec::with_capacity(self.terms.len());
        let mut scale: Vec<f64> = Vec::with_capacity(self.terms.len());
        for t in self.terms {
            if let Some(last) = out.last_mut() {
                if last.log_power == t.log_power
                    && (last.power - t.power).abs() <= POWER_MERGE_TOL * (1.0 + t.power.abs())
                {
                    last.coef += t.coef;
                    let s = scale.last_mut().unwrap();
                    *s = s.max(t.coef.abs());
                    continue;
                }
            }
            scale.push(t.coef.abs());
            out.push(t);
        }
        let terms = out
            .into_iter()
            .zip(scale)
            .filter(|(t, s)| t.coef != 0.0 && t.coef.abs() > rel_tol * s)
            .map(|(t, _)| t)
            .collect();
        Self { terms }
    }

    /// ∫_0^r of the profile, in closed form. Fails when a nonzero term is not
    /// integrable at the vertex (power ≤ −1).
    pub fn integral_from_zero(&self, r: f64) -> Result<f64> {
        let lr = r.ln();
        let mut total = 0.0;
        for t in &self.terms {
            if t.coef == 0.0 {
                continue;
            }
            let q1 = t.power + 1.0;
            if q1 <= POWER_MERGE_TOL {
                return Err(Error::Divergent(format!(
                    "r^{} (log r)^{} is not integrable at the vertex",
                    t.power, t.log_power
                )));
            }
            // ∫_0^r t^q log^j t dt = r^{q+1} Σ_i (-1)^i j!/(j-i)! log^{j-i} r / (q+1)^{i+1}
            let j = t.log_power;
            let mut sum = 0.0;
            let mut falling = 1.0;
            for i in 0..=j {
                if i > 0 {
                    falling *= f64::from(j - i + 1);
                }
                let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
                sum += sign * falling * lr.powi((j - i) as i32) / q1.powi(i as i32 + 1);
            }
            total += t.coef * r.powf(q1) * sum;
        }
        Ok(total)
    }

    /// True when every term has the same power and no logarithm.
    pub fn single_power(&self) -> Option<f64> {
        let nz: Vec<_> = self.terms.iter().filter(|t| t.coef != 0.0).collect();
        let first = nz.first()?;
        if nz
            .iter()
            .all(|t| t.log_power == 0 && (t.power - first.power).abs() <= POWER_MERGE_TOL)
        {
            Some(first.power)
        } else {
            None
        }
    }
}

/// Adaptive Simpson quadrature with absolute tolerance.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    fn rec<F: Fn(f64) -> f64>(
        f: &F,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let flm = f(lm);
        let frm = f(rm);
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            left + right + delta / 15.0
        } else {
            rec(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1)
                + rec(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
        }
    }
    let fa = f(a);
    let fb = f(b);
    let fm = f(0.5 * (a + b));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    rec(f, a, b, fa, fm, fb, whole, tol, 50)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn derivative_of_log_term() {
        // d/dr (r^2 log r) = 2 r log r + r
        let p = RadialProfile::power_log(1.0, 2.0, 1);
        let d = p.derivative();
        for r in [0.5, 1.0, 3.0] {
            assert_relative_eq!(d.eval(r), 2.0 * r * r.ln() + r, epsilon = 1e-14);
        }
    }

    #[test]
    fn closed_form_integrals_match_simpson() {
        let p = RadialProfile::power_log(1.5, 2.5, 2)
            .add(&RadialProfile::power_log(-0.7, 0.3, 1))
            .add(&RadialProfile::power(2.0, 4.0));
        let r = 2.7;
        let exact = p.integral_from_zero(r).unwrap();
        // split off [0, 1e-6] where log singularities live; the tail is tiny
        let approx = adaptive_simpson(&|t| p.eval(t), 1e-9, r, 1e-12);
        assert_relative_eq!(exact, approx, epsilon = 1e-8, max_relative = 1e-8);
    }

    #[test]
    fn non_integrable_term_is_rejected() {
        let p = RadialProfile::power(1.0, -1.0);
        assert!(p.integral_from_zero(1.0).is_err());
        let q = RadialProfile::power(1.0, -2.0).add(&RadialProfile::power(-1.0, -2.0));
        assert_eq!(q.integral_from_zero(1.0).unwrap(), 0.0);
    }

    #[test]
    fn simplify_removes_rounding_cancellation() {
        let s = 2.0_f64.sqrt();
        let a = RadialProfile::power(s * s, 1.0);
        let b = RadialProfile::power(-2.0, 1.0);
        let sum = a.add(&b);
        assert!(sum.is_zero());
        let c = RadialProfile::power(1.0, 2.0).add(&RadialProfile::power(1e-13, 2.0));
        assert!(!c.simplified(1e-15).is_zero());
    }
}
