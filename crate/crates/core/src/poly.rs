//! Real polynomials in several variables and the exact-ish linear algebra
//! used to build spherical-harmonic and coclosed-form bases on round spheres.

use std::collections::BTreeMap;

use nalgebra::DMatrix;

use crate::special::sphere_monomial_integral;

pub type Exponent = Vec<u32>;

/// All exponent vectors of total degree `k` in `nvars` variables, in
/// lexicographically decreasing order.
pub fn monomials(nvars: usize, k: u32) -> Vec<Exponent> {
    fn rec(nvars: usize, k: u32, prefix: &mut Exponent, out: &mut Vec<Exponent>) {
        if prefix.len() + 1 == nvars {
            prefix.push(k);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for a in (0..=k).rev() {
            prefix.push(a);
            rec(nvars, k - a, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if nvars == 0 {
        return out;
    }
    rec(nvars, k, &mut Vec::with_capacity(nvars), &mut out);
    out
}

#[derive(Clone, Debug, PartialEq)]
pub struct Poly {
    nvars: usize,
    terms: BTreeMap<Exponent, f64>,
}

impl Poly {
    pub fn zero(nvars: usize) -> Self {
        Self {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, c: f64) -> Self {
        let mut p = Self::zero(nvars);
        p.add_term(vec![0; nvars], c);
        p
    }

    pub fn variable(nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        let mut p = Self::zero(nvars);
        p.add_term(e, 1.0);
        p
    }

    pub fn from_coefficients(nvars: usize, basis: &[Exponent], coefs: &[f64]) -> Self {
        let mut p = Self::zero(nvars);
        for (e, &c) in basis.iter().zip(coefs) {
            p.add_term(e.clone(), c);
        }
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponent, &f64)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, e: &[u32]) -> f64 {
        self.terms.get(e).copied().unwrap_or(0.0)
    }

    pub fn add_term(&mut self, e: Exponent, c: f64) {
        if c == 0.0 {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(e) {
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if *o.get() == 0.0 {
                    o.remove();
                }
            }
            Entry::Vacant(v) => {
                v.insert(c);
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let mut p = self.clone();
        for (e, &c) in &other.terms {
            p.add_term(e.clone(), c);
        }
        p
    }

    pub fn scale(&self, c: f64) -> Poly {
        let mut p = Poly::zero(self.nvars);
        for (e, &v) in &self.terms {
            p.add_term(e.clone(), v * c);
        }
        p
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        let mut p = Poly::zero(self.nvars);
        for (a, &ca) in &self.terms {
            for (b, &cb) in &other.terms {
                let e: Exponent = a.iter().zip(b).map(|(x, y)| x + y).collect();
                p.add_term(e, ca * cb);
            }
        }
        p
    }

    pub fn derivative(&self, i: usize) -> Poly {
        let mut p = Poly::zero(self.nvars);
        for (e, &c) in &self.terms {
            if e[i] > 0 {
                let mut d = e.clone();
                d[i] -= 1;
                p.add_term(d, c * f64::from(e[i]));
            }
        }
        p
    }

    pub fn laplacian(&self) -> Poly {
        (0..self.nvars)
            .map(|i| self.derivative(i).derivative(i))
            .fold(Poly::zero(self.nvars), |acc, d| acc.add(&d))
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(e, &c)| {
                c * e
                    .iter()
                    .zip(x)
                    .map(|(&k, &xi)| xi.powi(k as i32))
                    .product::<f64>()
            })
            .sum()
    }

    /// Substitute x ↦ A x, i.e. return x ↦ p(Ax).
    pub fn compose_linear(&self, a: &DMatrix<f64>) -> Poly {
        let n = self.nvars;
        let rows: Vec<Poly> = (0..n)
            .map(|j| {
                let mut p = Poly::zero(n);
                for l in 0..n {
                    let mut e = vec![0; n];
                    e[l] = 1;
                    p.add_term(e, a[(j, l)]);
                }
                p
            })
            .collect();
        let mut out = Poly::zero(n);
        for (e, &c) in &self.terms {
            let mut term = Poly::constant(n, c);
            for (j, &k) in e.iter().enumerate() {
                for _ in 0..k {
                    term = term.mul(&rows[j]);
                }
            }
            out = out.add(&term);
        }
        out
    }

    /// ∫_{S^{n-1}} p·q over the unit sphere.
    pub fn sphere_inner(&self, other: &Poly) -> f64 {
        let mut total = 0.0;
        for (a, &ca) in &self.terms {
            for (b, &cb) in &other.terms {
                let e: Exponent = a.iter().zip(b).map(|(x, y)| x + y).collect();
                total += ca * cb * sphere_monomial_integral(&e);
            }
        }
        total
    }
}

/// Null space of a dense matrix by Gauss–Jordan elimination with partial
/// pivoting. Returns one basis vector per free column.
pub fn null_space(a: &DMatrix<f64>, tol: f64) -> Vec<Vec<f64>> {
    let (rows, cols) = a.shape();
    let mut m = a.clone();
    let scale = m.iter().fold(0.0_f64, |s, v| s.max(v.abs())).max(1.0);
    let mut pivots: Vec<usize> = Vec::new();
    let mut row = 0;
    for col in 0..cols {
        if row >= rows {
            break;
        }
        let (best, val) = (row..rows)
            .map(|r| (r, m[(r, col)].abs()))
            .fold((row, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        if val <= tol * scale {
            continue;
        }
        m.swap_rows(row, best);
        let p = m[(row, col)];
        for c in 0..cols {
            m[(row, c)] /= p;
        }
        for r in 0..rows {
            if r != row {
                let f = m[(r, col)];
                if f != 0.0 {
                    for c in 0..cols {
                        let v = m[(row, c)];
                        m[(r, c)] -= f * v;
                    }
                }
            }
        }
        pivots.push(col);
        row += 1;
    }
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![0.0; cols];
            v[f] = 1.0;
            for (r, &pc) in pivots.iter().enumerate() {
                v[pc] = -m[(r, f)];
            }
            v
        })
        .collect()
}

/// Orthonormalise vectors w.r.t. a Gram matrix `g` (g_ij = ⟨v_i, v_j⟩) by
/// Cholesky; returns the coefficient matrix C with orthonormal w_k = Σ_i C[(i,k)] v_i.
pub fn orthonormalizer(g: &DMatrix<f64>) -> Option<DMatrix<f64>> {
    let chol = g.clone().cholesky()?;
    let l = chol.l();
    let n = g.nrows();
    let inv = l.try_inverse()?;
    // w = L^{-1} v  ⇒  coefficients are rows of L^{-1}
    let mut c = DMatrix::zeros(n, n);
    for k in 0..n {
        for i in 0..n {
            c[(i, k)] = inv[(k, i)];
        }
    }
    Some(c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn monomial_counts() {
        assert_eq!(monomials(3, 2).len(), 6);
        assert_eq!(monomials(4, 3).len(), 20);
        assert_eq!(monomials(1, 5), vec![vec![5]]);
    }

    #[test]
    fn laplacian_of_harmonic() {
        let x = Poly::variable(3, 0);
        let y = Poly::variable(3, 1);
        let p = x.mul(&y);
        assert!(p.laplacian().is_zero());
        let q = x.mul(&x).add(&y.mul(&y).scale(-1.0));
        assert!(q.laplacian().is_zero());
    }

    #[test]
    fn composition_with_rotation() {
        let x = Poly::variable(2, 0);
        let y = Poly::variable(2, 1);
        let r2 = x.mul(&x).add(&y.mul(&y));
        let (c, s) = (0.3_f64.cos(), 0.3_f64.sin());
        let rot = DMatrix::from_row_slice(2, 2, &[c, -s, s, c]);
        let rotated = r2.compose_linear(&rot);
        for pt in [[0.2, 0.7], [1.0, -0.5]] {
            assert_relative_eq!(rotated.eval(&pt), r2.eval(&pt), epsilon = 1e-14);
        }
    }

    #[test]
    fn null_space_dimension() {
        let a = DMatrix::from_row_slice(2, 4, &[1.0, 1.0, 0.0, 0.0, 0.0, 0.0, 1.0, -1.0]);
        let ns = null_space(&a, 1e-12);
        assert_eq!(ns.len(), 2);
        for v in ns {
            let av = &a * nalgebra::DVector::from_vec(v);
            assert!(av.norm() < 1e-14);
        }
    }
}
