//! Orthonormal bases of spherical harmonics (optionally invariant under a
//! finite group) and of coclosed eigen-1-forms on round spheres, realised as
//! homogeneous polynomials on ℝ^m.

use std::collections::HashMap;

use nalgebra::DMatrix;

use crate::cross_section::GroupAction;
use crate::error::{Error, Result};
use crate::poly::{monomials, null_space, orthonormalizer, Exponent, Poly};

const NULL_TOL: f64 = 1e-10;

fn index_of(basis: &[Exponent]) -> HashMap<Exponent, usize> {
    basis.iter().cloned().enumerate().map(|(i, e)| (e, i)).collect()
}

fn monomial(nvars: usize, e: &Exponent) -> Poly {
    let mut p = Poly::zero(nvars);
    p.add_term(e.clone(), 1.0);
    p
}

/// Orthonormal basis of degree-k harmonic polynomials invariant under
/// `group`, normalised in L²(S^{m−1}/Γ), i.e. ∫_{S^{m−1}} Y_a Y_b = |Γ| δ_ab.
pub fn harmonic_basis(m: usize, k: u32, group: &GroupAction) -> Result<Vec<Poly>> {
    if m < 2 {
        return Err(Error::InvalidArgument(format!("ambient dimension {m} < 2")));
    }
    let basis = monomials(m, k);
    let lower = if k >= 2 { monomials(m, k - 2) } else { Vec::new() };
    let lower_idx = index_of(&lower);
    let idx = index_of(&basis);
    let generator = group.generator_matrix(m)?;
    let extra = if generator.is_some() { basis.len() } else { 0 };
    let mut a = DMatrix::zeros(lower.len() + extra, basis.len());
    for (j, e) in basis.iter().enumerate() {
        let p = monomial(m, e);
        for (d, &c) in p.laplacian().terms() {
            a[(lower_idx[d], j)] += c;
        }
        if let Some(g) = &generator {
            let moved = p.compose_linear(g).add(&p.scale(-1.0));
            for (d, &c) in moved.terms() {
                a[(lower.len() + idx[d], j)] += c;
            }
        }
    }
    let null = if a.nrows() == 0 {
        (0..basis.len())
            .map(|j| {
                let mut v = vec![0.0; basis.len()];
                v[j] = 1.0;
                v
            })
            .collect()
    } else {
        null_space(&a, NULL_TOL)
    };
    let polys: Vec<Poly> = null
        .iter()
        .map(|v| Poly::from_coefficients(m, &basis, v))
        .collect();
    orthonormalize(&polys, group.order() as f64, |p, q| p.sphere_inner(q))
}

/// Orthonormal basis of tangential, divergence-free, componentwise harmonic
/// 1-forms on ℝ^m with degree-k coefficients. Restricted to S^{m−1} these
/// are the coclosed eigenforms with eigenvalue (k+1)(k+m−3).
pub fn coclosed_basis(m: usize, k: u32) -> Result<Vec<Vec<Poly>>> {
    if m < 3 || k == 0 {
        return Ok(Vec::new());
    }
    let basis = monomials(m, k);
    let nb = basis.len();
    let lap_rows = if k >= 2 { monomials(m, k - 2) } else { Vec::new() };
    let div_rows = monomials(m, k - 1);
    let tan_rows = monomials(m, k + 1);
    let (lap_idx, div_idx, tan_idx) = (index_of(&lap_rows), index_of(&div_rows), index_of(&tan_rows));
    let n_rows = m * lap_rows.len() + div_rows.len() + tan_rows.len();
    let mut a = DMatrix::zeros(n_rows, m * nb);
    let div_off = m * lap_rows.len();
    let tan_off = div_off + div_rows.len();
    for i in 0..m {
        let xi = Poly::variable(m, i);
        for (j, e) in basis.iter().enumerate() {
            let col = i * nb + j;
            let p = monomial(m, e);
            for (d, &c) in p.laplacian().terms() {
                a[(i * lap_rows.len() + lap_idx[d], col)] += c;
            }
            for (d, &c) in p.derivative(i).terms() {
                a[(div_off + div_idx[d], col)] += c;
            }
            for (d, &c) in p.mul(&xi).terms() {
                a[(tan_off + tan_idx[d], col)] += c;
            }
        }
    }
    let forms: Vec<Vec<Poly>> = null_space(&a, NULL_TOL)
        .iter()
        .map(|v| {
            (0..m)
                .map(|i| Poly::from_coefficients(m, &basis, &v[i * nb..(i + 1) * nb]))
                .collect()
        })
        .collect();
    orthonormalize(&forms, 1.0, form_inner)
}

/// Σ_i ∫_{S^{m−1}} ω_i θ_i
pub fn form_inner(a: &Vec<Poly>, b: &Vec<Poly>) -> f64 {
    a.iter().zip(b).map(|(p, q)| p.sphere_inner(q)).sum()
}

/// ∫_{S^{m−1}} |dω|² for a polynomial 1-form (Cartesian components).
pub fn form_d_norm2(a: &[Poly]) -> f64 {
    let m = a.len();
    let mut total = 0.0;
    for i in 0..m {
        for j in (i + 1)..m {
            let c = a[j].derivative(i).add(&a[i].derivative(j).scale(-1.0));
            total += c.sphere_inner(&c);
        }
    }
    total
}

trait Combine: Sized {
    fn zero_like(&self) -> Self;
    fn axpy(&self, c: f64, acc: &Self) -> Self;
}

impl Combine for Poly {
    fn zero_like(&self) -> Self {
        Poly::zero(self.nvars())
    }
    fn axpy(&self, c: f64, acc: &Self) -> Self {
        acc.add(&self.scale(c))
    }
}

impl Combine for Vec<Poly> {
    fn zero_like(&self) -> Self {
        self.iter().map(|p| p.zero_like()).collect()
    }
    fn axpy(&self, c: f64, acc: &Self) -> Self {
        acc.iter().zip(self).map(|(a, p)| a.add(&p.scale(c))).collect()
    }
}

fn orthonormalize<T: Combine, F: Fn(&T, &T) -> f64>(
    items: &[T],
    norm: f64,
    inner: F,
) -> Result<Vec<T>> {
    let n = items.len();
    if n == 0 {
        return Ok(Vec::new());
    }
    let g = DMatrix::from_fn(n, n, |i, j| inner(&items[i], &items[j]) / norm);
    let c = orthonormalizer(&g).ok_or_else(|| Error::SingularGram(f64::INFINITY))?;
    Ok((0..n)
        .map(|k| {
            items
                .iter()
                .enumerate()
                .fold(items[0].zero_like(), |acc, (i, it)| it.axpy(c[(i, k)], &acc))
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::{coclosed_dimension, harmonic_dimension};

    #[test]
    fn harmonic_bases_have_expected_dimension_and_are_orthonormal() {
        for m in 2..=5 {
            for k in 0..=3 {
                let b = harmonic_basis(m, k, &GroupAction::Trivial).unwrap();
                assert_eq!(b.len(), harmonic_dimension(m, k as usize), "m={m} k={k}");
                for (i, p) in b.iter().enumerate() {
                    assert!(p.laplacian().terms().all(|(_, c)| c.abs() < 1e-10));
                    for (j, q) in b.iter().enumerate() {
                        let g = p.sphere_inner(q);
                        let want = if i == j { 1.0 } else { 0.0 };
                        assert!((g - want).abs() < 1e-12, "gram({i},{j})={g}");
                    }
                }
            }
        }
    }

    #[test]
    fn coclosed_basis_dimension_and_rayleigh_quotient() {
        for m in 4..=5 {
            for k in 1..=2u32 {
                let b = coclosed_basis(m, k).unwrap();
                assert_eq!(b.len(), coclosed_dimension(m - 1, k as usize));
                let lam = f64::from((k + 1) * (k + m as u32 - 3));
                for w in &b {
                    let kk = f64::from(k + 1);
                    let rq = form_d_norm2(w) - kk * kk * form_inner(w, w);
                    assert!((rq - lam).abs() < 1e-9, "m={m} k={k}: {rq} vs {lam}");
                }
            }
        }
    }

    #[test]
    fn antipodal_kills_odd_degrees() {
        let g = GroupAction::Antipodal;
        assert!(harmonic_basis(4, 1, &g).unwrap().is_empty());
        assert_eq!(harmonic_basis(4, 2, &g).unwrap().len(), 9);
    }
}
