//! Cross-sections X of a cone and their Laplace spectra: functions and
//! coclosed 1-forms on round spheres, invariant functions on free sphere
//! quotients, and functions on triangulated surfaces.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize, Serializer};

use crate::eigen::{lowest_generalized, SubspaceOptions};
use crate::error::{Error, Result};
use crate::harmonics::{coclosed_basis, form_d_norm2, form_inner};
use crate::mesh::TriMesh;
use crate::oracle::fd;
use crate::special::{coclosed_dimension, gcd, harmonic_dimension, sphere_volume};

/// Finite group acting isometrically on S^{m−1}.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GroupAction {
    Trivial,
    /// x ↦ −x
    Antipodal,
    /// ℤ_p acting on ℂ^{m/2} by z_i ↦ ζ^{w_i} z_i, ζ = e^{2πi/p}.
    CyclicDiagonal { order: u32, weights: Vec<u32> },
}

impl GroupAction {
    pub fn order(&self) -> usize {
        match self {
            GroupAction::Trivial => 1,
            GroupAction::Antipodal => 2,
            GroupAction::CyclicDiagonal { order, .. } => *order as usize,
        }
    }

    pub fn is_trivial(&self) -> bool {
        self.order() == 1
    }

    /// Check that the action on S^{m−1} is well defined and free.
    pub fn check_free(&self, m: usize) -> Result<()> {
        match self {
            GroupAction::Trivial | GroupAction::Antipodal => Ok(()),
            GroupAction::CyclicDiagonal { order, weights } => {
                if *order == 0 {
                    return Err(Error::InvalidArgument("cyclic group of order 0".into()));
                }
                if 2 * weights.len() != m {
                    return Err(Error::InvalidArgument(format!(
                        "{} complex weights do not act on ℝ^{m}",
                        weights.len()
                    )));
                }
                let p = u64::from(*order);
                for (i, &w) in weights.iter().enumerate() {
                    let d = gcd(u64::from(w) % p, p);
                    if p > 1 && d != 1 {
                        return Err(Error::NonFreeAction(format!(
                            "generator power ζ^{} fixes the unit vector e_{} (weight {w}, order {p})",
                            p / d,
                            2 * i + 1
                        )));
                    }
                }
                Ok(())
            }
        }
    }

    /// Real matrix of a generator on ℝ^m, or None for the trivial group.
    pub fn generator_matrix(&self, m: usize) -> Result<Option<DMatrix<f64>>> {
        self.check_free(m)?;
        Ok(match self {
            GroupAction::Trivial => None,
            GroupAction::Antipodal => Some(-DMatrix::identity(m, m)),
            GroupAction::CyclicDiagonal { order, weights } => {
                if *order == 1 {
                    return Ok(None);
                }
                let mut g = DMatrix::zeros(m, m);
                for (i, &w) in weights.iter().enumerate() {
                    let th = 2.0 * std::f64::consts::PI * f64::from(w) / f64::from(*order);
                    let (c, s) = (th.cos(), th.sin());
                    g[(2 * i, 2 * i)] = c;
                    g[(2 * i, 2 * i + 1)] = -s;
                    g[(2 * i + 1, 2 * i)] = s;
                    g[(2 * i + 1, 2 * i + 1)] = c;
                }
                Some(g)
            }
        })
    }

    pub fn describe(&self) -> String {
        match self {
            GroupAction::Trivial => "trivial".into(),
            GroupAction::Antipodal => "Z2 antipodal".into(),
            GroupAction::CyclicDiagonal { order, weights } => format!("Z{order} weights {weights:?}"),
        }
    }
}

/// Number of monomials z^a z̄^b of total degree k in each weight class
/// Σ w_i (a_i − b_i) mod p.
pub fn complex_monomial_classes(weights: &[u32], p: u32, k: usize) -> Vec<u64> {
    let p = p as usize;
    let mut dp = vec![vec![0u64; p]; k + 1];
    dp[0][0] = 1;
    for &w in weights {
        let w = w as usize % p;
        let mut next = vec![vec![0u64; p]; k + 1];
        for d in 0..=k {
            for r in 0..p {
                let c = dp[d][r];
                if c == 0 {
                    continue;
                }
                for a in 0..=(k - d) {
                    for b in 0..=(k - d - a) {
                        let nr = (r + w * a + (p - w) * b) % p;
                        next[d + a + b][nr] += c;
                    }
                }
            }
        }
        dp = next;
    }
    dp.swap_remove(k)
}

/// Dimension of degree-k spherical harmonics on S^{m−1} in each isotypic
/// component of the group (indexed by character; antipodal: [even, odd]).
pub fn isotypic_multiplicities(m: usize, group: &GroupAction, k: usize) -> Result<Vec<usize>> {
    group.check_free(m)?;
    Ok(match group {
        GroupAction::Trivial => vec![harmonic_dimension(m, k)],
        GroupAction::Antipodal => {
            let d = harmonic_dimension(m, k);
            if k % 2 == 0 {
                vec![d, 0]
            } else {
                vec![0, d]
            }
        }
        GroupAction::CyclicDiagonal { order, weights } => {
            let top = complex_monomial_classes(weights, *order, k);
            let low = if k >= 2 {
                complex_monomial_classes(weights, *order, k - 2)
            } else {
                vec![0; *order as usize]
            };
            top.iter().zip(&low).map(|(a, b)| (a - b) as usize).collect()
        }
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum CrossSectionModel {
    RoundSphere { dim: usize },
    SphereQuotient { dim: usize, group: GroupAction },
    Mesh { mesh: TriMesh },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CrossSection {
    pub id: String,
    pub dim_link: usize,
    pub model: CrossSectionModel,
    pub einstein_constant: f64,
}

impl CrossSection {
    /// S^{m−1} ⊂ ℝ^m.
    pub fn round_sphere(m: usize) -> Result<Self> {
        if m < 2 {
            return Err(Error::InvalidArgument(format!("sphere link needs m ≥ 2, got {m}")));
        }
        Ok(Self {
            id: format!("S{}", m - 1),
            dim_link: m - 1,
            model: CrossSectionModel::RoundSphere { dim: m - 1 },
            einstein_constant: (m - 2) as f64,
        })
    }

    pub fn sphere_quotient(m: usize, group: GroupAction) -> Result<Self> {
        if m < 2 {
            return Err(Error::InvalidArgument(format!("sphere link needs m ≥ 2, got {m}")));
        }
        group.check_free(m)?;
        if group.is_trivial() {
            return Self::round_sphere(m);
        }
        let tag = match &group {
            GroupAction::Antipodal => "Z2".to_string(),
            GroupAction::CyclicDiagonal { order, weights } => format!(
                "Z{order}({})",
                weights.iter().map(u32::to_string).collect::<Vec<_>>().join(",")
            ),
            GroupAction::Trivial => unreachable!(),
        };
        Ok(Self {
            id: format!("S{}/{tag}", m - 1),
            dim_link: m - 1,
            model: CrossSectionModel::SphereQuotient { dim: m - 1, group },
            einstein_constant: (m - 2) as f64,
        })
    }

    pub fn from_mesh(id: impl Into<String>, mesh: TriMesh) -> Result<Self> {
        mesh.validate()?;
        Ok(Self {
            id: id.into(),
            dim_link: 2,
            model: CrossSectionModel::Mesh { mesh },
            einstein_constant: 1.0,
        })
    }

    /// Ambient cone dimension m = dim X + 1.
    pub fn cone_dim(&self) -> usize {
        self.dim_link + 1
    }

    pub fn group(&self) -> GroupAction {
        match &self.model {
            CrossSectionModel::SphereQuotient { group, .. } => group.clone(),
            _ => GroupAction::Trivial,
        }
    }

    pub fn volume(&self) -> f64 {
        match &self.model {
            CrossSectionModel::RoundSphere { .. } => sphere_volume(self.cone_dim()),
            CrossSectionModel::SphereQuotient { group, .. } => {
                sphere_volume(self.cone_dim()) / group.order() as f64
            }
            CrossSectionModel::Mesh { mesh } => mesh.total_area(),
        }
    }

    pub fn is_analytic(&self) -> bool {
        !matches!(self.model, CrossSectionModel::Mesh { .. })
    }

    /// Function spectrum complete up to (and including) degree k_max, or the
    /// lowest `k_max` discrete modes for meshes.
    pub fn function_table(&self, k_max: usize) -> Result<EigenTable> {
        let m = self.cone_dim();
        let mut t = match &self.model {
            CrossSectionModel::RoundSphere { .. } => sphere_function_spectrum(m, k_max)?,
            CrossSectionModel::SphereQuotient { group, .. } => {
                quotient_function_spectrum(m, group, k_max)?
            }
            CrossSectionModel::Mesh { mesh } => mesh_function_spectrum(mesh, k_max)?,
        };
        t.cross_section_id = self.id.clone();
        Ok(t)
    }

    pub fn coclosed_table(&self, k_max: usize) -> Result<EigenTable> {
        match &self.model {
            CrossSectionModel::RoundSphere { .. } => {
                sphere_coclosed_1form_spectrum(self.cone_dim(), k_max)
            }
            _ => Err(Error::Unsupported(format!(
                "coclosed 1-form spectra are only available on round spheres, not {}",
                self.id
            ))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum EigenKind {
    Function,
    Coclosed1Form,
}

fn raw_number<S: Serializer>(x: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    if !x.is_finite() {
        return s.serialize_none();
    }
    let raw = serde_json::value::RawValue::from_string(format!("{x:.16e}"))
        .map_err(serde::ser::Error::custom)?;
    raw.serialize(s)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EigenItem {
    pub kind: EigenKind,
    #[serde(serialize_with = "raw_number")]
    pub eigenvalue: f64,
    pub multiplicity: usize,
    pub label: String,
    /// A-posteriori residual, for numerically computed items.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub residual: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EigenTable {
    pub cross_section_id: String,
    pub dim_link: usize,
    /// Every eigenvalue strictly below the cutoff is listed.
    #[serde(serialize_with = "raw_number")]
    pub cutoff: f64,
    pub items: Vec<EigenItem>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub approximate: bool,
}

/// Mesh eigenvalues may dip below zero by rounding.
const NEGATIVE_SLACK: f64 = 1e-9;

impl EigenTable {
    pub fn validate(&self) -> Result<()> {
        if self.dim_link == 0 {
            return Err(Error::Parse("dim_link must be ≥ 1".into()));
        }
        if !self.cutoff.is_finite() {
            return Err(Error::Parse("cutoff must be finite".into()));
        }
        let mut prev = f64::NEG_INFINITY;
        for (i, it) in self.items.iter().enumerate() {
            if !it.eigenvalue.is_finite() || it.eigenvalue < -NEGATIVE_SLACK {
                return Err(Error::Parse(format!(
                    "item {i}: eigenvalue {} is not a nonnegative number",
                    it.eigenvalue
                )));
            }
            if it.multiplicity == 0 {
                return Err(Error::Parse(format!("item {i}: multiplicity must be positive")));
            }
            if it.eigenvalue < prev {
                return Err(Error::Parse(format!("item {i}: eigenvalues not sorted")));
            }
            prev = it.eigenvalue;
        }
        Ok(())
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let t: Self = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        t.validate()?;
        Ok(t)
    }

    pub fn kind(&self) -> Option<EigenKind> {
        let k = self.items.first()?.kind;
        self.items.iter().all(|i| i.kind == k).then_some(k)
    }

    /// Item whose eigenvalue equals `lambda` within `tol`.
    pub fn find(&self, lambda: f64, tol: f64) -> Option<&EigenItem> {
        self.items.iter().find(|i| (i.eigenvalue - lambda).abs() <= tol)
    }

    pub fn require_complete(&self, required: f64) -> Result<()> {
        if required > self.cutoff {
            return Err(Error::IncompleteTable {
                kind: format!("{:?}", self.kind().unwrap_or(EigenKind::Function)),
                required,
                cutoff: self.cutoff,
            });
        }
        Ok(())
    }

    /// Flattened list of eigenvalues with multiplicity.
    pub fn expanded(&self) -> Vec<f64> {
        self.items
            .iter()
            .flat_map(|i| std::iter::repeat_n(i.eigenvalue, i.multiplicity))
            .collect()
    }
}

fn function_eigenvalue(m: usize, k: usize) -> f64 {
    (k * (k + m - 2)) as f64
}

pub fn sphere_function_spectrum(m: usize, k_max: usize) -> Result<EigenTable> {
    if m < 2 {
        return Err(Error::InvalidArgument(format!(
            "sphere spectrum needs m ≥ 2, got {m}"
        )));
    }
    let items = (0..=k_max)
        .map(|k| EigenItem {
            kind: EigenKind::Function,
            eigenvalue: function_eigenvalue(m, k),
            multiplicity: harmonic_dimension(m, k),
            label: format!("k={k}"),
            residual: None,
        })
        .collect();
    Ok(EigenTable {
        cross_section_id: format!("S{}", m - 1),
        dim_link: m - 1,
        cutoff: function_eigenvalue(m, k_max + 1),
        items,
        approximate: false,
    })
}

pub fn quotient_function_spectrum(
    m: usize,
    group: &GroupAction,
    k_max: usize,
) -> Result<EigenTable> {
    if m < 2 {
        return Err(Error::InvalidArgument(format!(
            "sphere spectrum needs m ≥ 2, got {m}"
        )));
    }
    group.check_free(m)?;
    if group.is_trivial() {
        return sphere_function_spectrum(m, k_max);
    }
    let mut items = Vec::new();
    for k in 0..=k_max {
        let mult = isotypic_multiplicities(m, group, k)?[0];
        if mult > 0 {
            items.push(EigenItem {
                kind: EigenKind::Function,
                eigenvalue: function_eigenvalue(m, k),
                multiplicity: mult,
                label: format!("k={k},chi=0"),
                residual: None,
            });
        }
    }
    Ok(EigenTable {
        cross_section_id: CrossSection::sphere_quotient(m, group.clone())?.id,
        dim_link: m - 1,
        cutoff: function_eigenvalue(m, k_max + 1),
        items,
        approximate: false,
    })
}

/// Pointwise finite-difference audit of a polynomial 1-form on ℝ^m:
/// componentwise harmonic, divergence free, tangential, homogeneous of degree k.
fn audit_coclosed_form(form: &[crate::poly::Poly], k: u32, seed: u64) -> Result<f64> {
    let m = form.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let h = 1e-4;
    let mut worst = 0.0_f64;
    for _ in 0..8 {
        let mut x: Vec<f64> = (0..m).map(|_| rng.random_range(-1.0..1.0)).collect();
        let n = x.iter().map(|v| v * v).sum::<f64>().sqrt().max(1e-3);
        let r = rng.random_range(0.5..1.5);
        x.iter_mut().for_each(|v| *v *= r / n);
        let u = |p: &[f64]| -> Vec<f64> { form.iter().map(|c| c.eval(p)).collect() };
        let ux = u(&x);
        let scale = ux.iter().map(|v| v.abs()).fold(0.0, f64::max).max(r.powi(k as i32));
        for c in form {
            worst = worst.max(fd::laplacian_at(&|p: &[f64]| c.eval(p), &x, h).abs() / scale);
        }
        worst = worst.max(fd::divergence_at(&u, &x, h).abs() / scale);
        let radial: f64 = ux.iter().zip(&x).map(|(a, b)| a * b).sum();
        worst = worst.max(radial.abs() / (r * scale));
        // Euler: d/dt u(tx) at t = 1 equals k u(x)
        let eps = 1e-4;
        let up: Vec<f64> = x.iter().map(|v| v * (1.0 + eps)).collect();
        let um: Vec<f64> = x.iter().map(|v| v * (1.0 - eps)).collect();
        let (a, b) = (u(&up), u(&um));
        for i in 0..m {
            let euler = (a[i] - b[i]) / (2.0 * eps) - f64::from(k) * ux[i];
            worst = worst.max(euler.abs() / scale);
        }
    }
    Ok(worst)
}

/// Relative FD tolerance for the coclosed audit (h = 1e−4 stencils).
const COCLOSED_FD_TOL: f64 = 1e-5;

pub fn sphere_coclosed_1form_spectrum(m: usize, k_max: usize) -> Result<EigenTable> {
    if m < 4 {
        return Err(Error::InvalidArgument(format!(
            "coclosed 1-form spectra need m ≥ 4, got {m}"
        )));
    }
    let mut items = Vec::new();
    for k in 1..=k_max.max(1) {
        let basis = coclosed_basis(m, k as u32)?;
        let expected = coclosed_dimension(m - 1, k);
        if basis.len() != expected {
            return Err(Error::OracleMismatch(format!(
                "degree {k}: {} coclosed forms found, closed form says {expected}",
                basis.len()
            )));
        }
        let lam = ((k + 1) * (k + m - 3)) as f64;
        let kk = (k + 1) as f64;
        let mut worst_rq = 0.0_f64;
        for w in &basis {
            let rq = (form_d_norm2(w) - kk * kk * form_inner(w, w)) / form_inner(w, w);
            worst_rq = worst_rq.max((rq - lam).abs() / lam);
        }
        if worst_rq > 1e-10 {
            return Err(Error::OracleMismatch(format!(
                "degree {k}: Rayleigh quotient off by {worst_rq:e}"
            )));
        }
        // audit the first basis form and one generic combination
        let mut generic: Vec<crate::poly::Poly> = basis[0].iter().map(|p| p.scale(0.0)).collect();
        for (j, w) in basis.iter().enumerate() {
            let c = 1.0 / (1.0 + j as f64);
            generic = generic.iter().zip(w).map(|(a, p)| a.add(&p.scale(c))).collect();
        }
        let fd_err = audit_coclosed_form(&basis[0], k as u32, 11 + k as u64)?
            .max(audit_coclosed_form(&generic, k as u32, 23 + k as u64)?);
        if fd_err > COCLOSED_FD_TOL {
            return Err(Error::OracleMismatch(format!(
                "degree {k}: finite-difference audit residual {fd_err:e}"
            )));
        }
        items.push(EigenItem {
            kind: EigenKind::Coclosed1Form,
            eigenvalue: lam,
            multiplicity: basis.len(),
            label: format!("k={k}"),
            residual: Some(fd_err.max(worst_rq)),
        });
        if k == k_max.max(1) {
            break;
        }
    }
    let kn = k_max.max(1) + 1;
    Ok(EigenTable {
        cross_section_id: format!("S{}", m - 1),
        dim_link: m - 1,
        cutoff: ((kn + 1) * (kn + m - 3)) as f64,
        items,
        approximate: false,
    })
}

/// Relative gap under which computed mesh eigenvalues are merged into one item.
const MESH_CLUSTER_TOL: f64 = 1e-6;

pub fn mesh_function_spectrum(mesh: &TriMesh, n_eigs: usize) -> Result<EigenTable> {
    let pairs = mesh_eigenvalues(mesh, n_eigs)?;
    let mut items: Vec<EigenItem> = Vec::new();
    for (i, &(value, residual)) in pairs.iter().enumerate() {
        let value = value.max(0.0);
        if let Some(last) = items.last_mut() {
            let scale = last.eigenvalue.abs().max(value.abs()).max(1e-3);
            if (value - last.eigenvalue).abs() <= MESH_CLUSTER_TOL * scale {
                let n = last.multiplicity as f64;
                last.eigenvalue = (last.eigenvalue * n + value) / (n + 1.0);
                last.multiplicity += 1;
                last.residual = Some(last.residual.unwrap_or(0.0).max(residual));
                continue;
            }
        }
        items.push(EigenItem {
            kind: EigenKind::Function,
            eigenvalue: value,
            multiplicity: 1,
            label: format!("mode {i}"),
            residual: Some(residual),
        });
    }
    let cutoff = pairs.last().map_or(0.0, |p| p.0);
    Ok(EigenTable {
        cross_section_id: "mesh".into(),
        dim_link: 2,
        cutoff,
        items,
        approximate: true,
    })
}

/// The lowest computed mesh eigenvalues with their residuals, ascending.
pub fn mesh_eigenvalues(mesh: &TriMesh, n_eigs: usize) -> Result<Vec<(f64, f64)>> {
    mesh.validate()?;
    let stiffness = mesh.cotangent_stiffness();
    let mass = mesh.lumped_mass();
    let area: f64 = mass.iter().sum();
    let opts = SubspaceOptions {
        shift: 0.1 * 4.0 * std::f64::consts::PI / area,
        tol: 1e-9,
        ..Default::default()
    };
    Ok(lowest_generalized(&stiffness, &mass, n_eigs, &opts)?
        .into_iter()
        .map(|p| (p.value, p.residual))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pairs(t: &EigenTable) -> Vec<(f64, usize)> {
        t.items.iter().map(|i| (i.eigenvalue, i.multiplicity)).collect()
    }

    #[test]
    fn sphere_examples() {
        assert_eq!(pairs(&sphere_function_spectrum(4, 1).unwrap()), vec![(0.0, 1), (3.0, 4)]);
        assert_eq!(
            pairs(&sphere_function_spectrum(2, 2).unwrap()),
            vec![(0.0, 1), (1.0, 2), (4.0, 2)]
        );
        assert_eq!(pairs(&sphere_function_spectrum(3, 0).unwrap()), vec![(0.0, 1)]);
        assert!(sphere_function_spectrum(1, 3).is_err());
    }

    #[test]
    fn antipodal_quotient_drops_odd_degrees() {
        let t = quotient_function_spectrum(4, &GroupAction::Antipodal, 1).unwrap();
        assert_eq!(pairs(&t), vec![(0.0, 1)]);
        let t = quotient_function_spectrum(4, &GroupAction::Antipodal, 2).unwrap();
        assert_eq!(pairs(&t), vec![(0.0, 1), (8.0, 9)]);
        // the same group as a cyclic diagonal action
        let z2 = GroupAction::CyclicDiagonal { order: 2, weights: vec![1, 1] };
        let t2 = quotient_function_spectrum(4, &z2, 2).unwrap();
        assert_eq!(pairs(&t2), pairs(&t));
    }

    #[test]
    fn trivial_quotient_is_the_sphere() {
        let a = quotient_function_spectrum(4, &GroupAction::Trivial, 3).unwrap();
        let b = sphere_function_spectrum(4, 3).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn non_free_action_names_fixed_vector() {
        let g = GroupAction::CyclicDiagonal { order: 4, weights: vec![1, 2] };
        match quotient_function_spectrum(4, &g, 2) {
            Err(Error::NonFreeAction(msg)) => assert!(msg.contains("e_3"), "{msg}"),
            other => panic!("expected non-free error, got {other:?}"),
        }
    }

    #[test]
    fn coclosed_spectrum_on_s3() {
        let t = sphere_coclosed_1form_spectrum(4, 2).unwrap();
        assert_eq!(pairs(&t), vec![(4.0, 6), (9.0, 16)]);
        assert!(sphere_coclosed_1form_spectrum(3, 2).is_err());
        let t5 = sphere_coclosed_1form_spectrum(5, 2).unwrap();
        assert!(t5.items.iter().all(|i| i.eigenvalue >= 6.0));
    }

    #[test]
    fn json_has_full_precision_and_round_trips() {
        let t = sphere_function_spectrum(4, 2).unwrap();
        let s = t.to_json().unwrap();
        assert!(s.contains("8.0000000000000000e0"), "{s}");
        let back = EigenTable::from_json(&s).unwrap();
        assert_eq!(back, t);
    }

    #[test]
    fn corrupted_table_rejected() {
        let t = sphere_function_spectrum(4, 2).unwrap();
        let s = t.to_json().unwrap().replace("\"multiplicity\": 4", "\"multiplicity\": 0");
        assert!(EigenTable::from_json(&s).is_err());
        assert!(EigenTable::from_json("{\"items\": 3}").is_err());
    }
}
