//! Lowest eigenpairs of K x = λ M x with K sparse symmetric positive
//! semidefinite and M diagonal positive, by shift-invert block subspace
//! iteration with Rayleigh–Ritz extraction.

use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::sparse::{CsrMatrix, EnvelopeCholesky};

#[derive(Clone, Debug)]
pub struct EigenPair {
    pub value: f64,
    /// M-normalised eigenvector.
    pub vector: Vec<f64>,
    /// ‖K x − λ M x‖_{M⁻¹} / max(1, |λ|)
    pub residual: f64,
}

#[derive(Clone, Debug)]
pub struct SubspaceOptions {
    pub shift: f64,
    pub tol: f64,
    pub max_iter: usize,
    /// Guard vectors beyond the requested count.
    pub extra: usize,
    pub seed: u64,
}

impl Default for SubspaceOptions {
    fn default() -> Self {
        Self {
            shift: 1.0,
            tol: 1e-10,
            max_iter: 500,
            extra: 8,
            seed: 0x5eed,
        }
    }
}

/// M-orthonormalise the columns of `y` (drops nothing; the block is kept
/// well conditioned by construction).
fn m_orthonormalize(y: &DMatrix<f64>, mass: &[f64]) -> Result<DMatrix<f64>> {
    let p = y.ncols();
    let mut my = y.clone();
    for (i, mut row) in my.row_iter_mut().enumerate() {
        row *= mass[i];
    }
    let g = y.transpose() * &my;
    let eig = SymmetricEigen::new(g);
    let max = eig.eigenvalues.max();
    let mut scale = DMatrix::zeros(p, p);
    for k in 0..p {
        let v = eig.eigenvalues[k];
        if !(v > 1e-14 * max) {
            return Err(Error::NoConvergence("search block lost rank".into()));
        }
        for i in 0..p {
            scale[(i, k)] = eig.eigenvectors[(i, k)] / v.sqrt();
        }
    }
    Ok(y * scale)
}

fn apply_csr(k: &CsrMatrix, y: &DMatrix<f64>) -> DMatrix<f64> {
    let mut out = DMatrix::zeros(y.nrows(), y.ncols());
    let mut buf = vec![0.0; y.nrows()];
    for c in 0..y.ncols() {
        let col: Vec<f64> = y.column(c).iter().copied().collect();
        k.mul_vec(&col, &mut buf);
        out.column_mut(c).copy_from_slice(&buf);
    }
    out
}

pub fn lowest_generalized(
    stiffness: &CsrMatrix,
    mass: &[f64],
    n_eigs: usize,
    opts: &SubspaceOptions,
) -> Result<Vec<EigenPair>> {
    let n = stiffness.dim();
    if mass.len() != n || mass.iter().any(|&m| !(m > 0.0)) {
        return Err(Error::InvalidArgument(
            "mass must be positive with one entry per row".into(),
        ));
    }
    if n_eigs == 0 || n_eigs > n {
        return Err(Error::InvalidArgument(format!(
            "requested {n_eigs} eigenpairs of a {n}×{n} problem"
        )));
    }
    let p = (n_eigs + opts.extra).min(n);
    let shifted: Vec<f64> = mass.iter().map(|m| opts.shift * m).collect();
    let chol = EnvelopeCholesky::factor(&stiffness.add_diagonal(&shifted))?;

    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut y = DMatrix::from_fn(n, p, |_, _| rng.random_range(-1.0..1.0));
    y = m_orthonormalize(&y, mass)?;

    let mut last = Vec::new();
    for _ in 0..opts.max_iter {
        // Z = (K + σM)^{-1} M Y
        let mut z = DMatrix::zeros(n, p);
        for c in 0..p {
            let rhs: Vec<f64> = y.column(c).iter().zip(mass).map(|(v, m)| v * m).collect();
            z.column_mut(c).copy_from_slice(&chol.solve(&rhs));
        }
        let q = m_orthonormalize(&z, mass)?;
        let kq = apply_csr(stiffness, &q);
        let a = q.transpose() * &kq;
        let a = (&a + a.transpose()) * 0.5;
        let eig = SymmetricEigen::new(a);
        let mut order: Vec<usize> = (0..p).collect();
        order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
        let w = DMatrix::from_fn(p, p, |i, k| eig.eigenvectors[(i, order[k])]);
        y = &q * &w;
        let ky = &kq * &w;

        let mut pairs = Vec::with_capacity(n_eigs);
        let mut converged = true;
        for k in 0..n_eigs {
            let lam = eig.eigenvalues[order[k]];
            let mut r2 = 0.0;
            for i in 0..n {
                let r = ky[(i, k)] - lam * mass[i] * y[(i, k)];
                r2 += r * r / mass[i];
            }
            let res = r2.sqrt() / lam.abs().max(1.0);
            if res > opts.tol {
                converged = false;
            }
            pairs.push(EigenPair {
                value: lam,
                vector: y.column(k).iter().copied().collect(),
                residual: res,
            });
        }
        if converged {
            return Ok(pairs);
        }
        last = pairs;
    }
    let worst = last.iter().map(|p| p.residual).fold(0.0, f64::max);
    Err(Error::NoConvergence(format!(
        "{} iterations, worst residual {worst:e}",
        opts.max_iter
    )))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn path_graph_spectrum() {
        // Dirichlet path Laplacian: eigenvalues 2 − 2cos(kπ/(n+1))
        let n = 60;
        let mut t = Vec::new();
        for i in 0..n {
            t.push((i, i, 2.0));
            if i + 1 < n {
                t.push((i, i + 1, -1.0));
                t.push((i + 1, i, -1.0));
            }
        }
        let k = CsrMatrix::from_triplets(n, t);
        let mass = vec![1.0; n];
        let opts = SubspaceOptions {
            shift: 0.01,
            ..Default::default()
        };
        let pairs = lowest_generalized(&k, &mass, 4, &opts).unwrap();
        for (j, p) in pairs.iter().enumerate() {
            let exact = 2.0 - 2.0 * (((j + 1) as f64) * std::f64::consts::PI / (n as f64 + 1.0)).cos();
            assert!((p.value - exact).abs() < 1e-10, "{} vs {}", p.value, exact);
        }
    }
}
