//! Finite-difference oracle on flat ℝ^m (m ≤ 4).
//!
//! Point stencils act on Cartesian closures. Grid fields live on a small
//! lattice patch in one of several charts (Cartesian, polar, spherical,
//! Hopf) inside an annulus away from the vertex; the Laplace–Beltrami
//! operator is discretised in conservative form, so the same code measures
//! genuine second-order truncation error on curvilinear charts.

use std::fs;
use std::io::{Read, Write};
use std::path::Path;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub fn partial_at<F: Fn(&[f64]) -> f64>(f: &F, x: &[f64], i: usize, h: f64) -> f64 {
    let mut p = x.to_vec();
    p[i] = x[i] + h;
    let a = f(&p);
    p[i] = x[i] - h;
    (a - f(&p)) / (2.0 * h)
}

/// Euclidean Laplacian Σ ∂_i² f (analyst's sign).
pub fn laplacian_at<F: Fn(&[f64]) -> f64>(f: &F, x: &[f64], h: f64) -> f64 {
    let f0 = f(x);
    let mut p = x.to_vec();
    let mut total = 0.0;
    for i in 0..x.len() {
        p[i] = x[i] + h;
        let a = f(&p);
        p[i] = x[i] - h;
        let b = f(&p);
        p[i] = x[i];
        total += (a - 2.0 * f0 + b) / (h * h);
    }
    total
}

/// Σ ∂_i u_i; note d*u = −div u.
pub fn divergence_at<F: Fn(&[f64]) -> Vec<f64>>(u: &F, x: &[f64], h: f64) -> f64 {
    (0..x.len())
        .map(|i| partial_at(&|p: &[f64]| u(p)[i], x, i, h))
        .sum()
}

/// |du|² = Σ_{i<j} (∂_i u_j − ∂_j u_i)².
pub fn d_norm2_at<F: Fn(&[f64]) -> Vec<f64>>(u: &F, x: &[f64], h: f64) -> f64 {
    let m = x.len();
    let mut total = 0.0;
    for i in 0..m {
        for j in (i + 1)..m {
            let a = partial_at(&|p: &[f64]| u(p)[j], x, i, h);
            let b = partial_at(&|p: &[f64]| u(p)[i], x, j, h);
            total += (a - b) * (a - b);
        }
    }
    total
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Chart {
    Cartesian,
    /// (r, θ) on ℝ².
    Polar,
    /// (r, θ, φ) on ℝ³, θ the polar angle.
    Spherical,
    /// (r, χ, φ₁, φ₂) on ℝ⁴: x = r(cos χ e^{iφ₁}, sin χ e^{iφ₂}).
    Hopf,
}

impl Chart {
    pub fn supports(&self, m: usize) -> bool {
        match self {
            Chart::Cartesian => (1..=4).contains(&m),
            Chart::Polar => m == 2,
            Chart::Spherical => m == 3,
            Chart::Hopf => m == 4,
        }
    }

    pub fn to_cartesian(&self, q: &[f64]) -> Vec<f64> {
        match self {
            Chart::Cartesian => q.to_vec(),
            Chart::Polar => vec![q[0] * q[1].cos(), q[0] * q[1].sin()],
            Chart::Spherical => {
                let (r, t, p) = (q[0], q[1], q[2]);
                vec![r * t.sin() * p.cos(), r * t.sin() * p.sin(), r * t.cos()]
            }
            Chart::Hopf => {
                let (r, c, a, b) = (q[0], q[1], q[2], q[3]);
                vec![
                    r * c.cos() * a.cos(),
                    r * c.cos() * a.sin(),
                    r * c.sin() * b.cos(),
                    r * c.sin() * b.sin(),
                ]
            }
        }
    }

    /// J[(i, a)] = ∂x_i/∂q_a.
    pub fn jacobian(&self, q: &[f64]) -> DMatrix<f64> {
        let m = q.len();
        match self {
            Chart::Cartesian => DMatrix::identity(m, m),
            Chart::Polar => {
                let (r, t) = (q[0], q[1]);
                DMatrix::from_row_slice(2, 2, &[t.cos(), -r * t.sin(), t.sin(), r * t.cos()])
            }
            Chart::Spherical => {
                let (r, t, p) = (q[0], q[1], q[2]);
                let (st, ct, sp, cp) = (t.sin(), t.cos(), p.sin(), p.cos());
                DMatrix::from_row_slice(
                    3,
                    3,
                    &[
                        st * cp,
                        r * ct * cp,
                        -r * st * sp,
                        st * sp,
                        r * ct * sp,
                        r * st * cp,
                        ct,
                        -r * st,
                        0.0,
                    ],
                )
            }
            Chart::Hopf => {
                let (r, c, a, b) = (q[0], q[1], q[2], q[3]);
                let (sc, cc, sa, ca, sb, cb) = (c.sin(), c.cos(), a.sin(), a.cos(), b.sin(), b.cos());
                DMatrix::from_row_slice(
                    4,
                    4,
                    &[
                        cc * ca,
                        -r * sc * ca,
                        -r * cc * sa,
                        0.0,
                        cc * sa,
                        -r * sc * sa,
                        r * cc * ca,
                        0.0,
                        sc * cb,
                        r * cc * cb,
                        0.0,
                        -r * sc * sb,
                        sc * sb,
                        r * cc * sb,
                        0.0,
                        r * sc * cb,
                    ],
                )
            }
        }
    }

    /// Diagonal of the flat metric in this chart.
    pub fn metric_diag(&self, q: &[f64]) -> Vec<f64> {
        match self {
            Chart::Cartesian => vec![1.0; q.len()],
            Chart::Polar => vec![1.0, q[0] * q[0]],
            Chart::Spherical => {
                let r2 = q[0] * q[0];
                vec![1.0, r2, r2 * q[1].sin().powi(2)]
            }
            Chart::Hopf => {
                let r2 = q[0] * q[0];
                vec![1.0, r2, r2 * q[1].cos().powi(2), r2 * q[1].sin().powi(2)]
            }
        }
    }

    fn sqrt_det(&self, q: &[f64]) -> f64 {
        self.metric_diag(q).iter().product::<f64>().sqrt()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GridKind {
    Function,
    OneForm,
}

/// Annulus the grids must stay inside; the vertex is excluded.
pub const ANNULUS: (f64, f64) = (0.25, 2.0);
/// Reference annulus width for the spacing bound h ≤ width/32.
pub const REFERENCE_WIDTH: f64 = 1.0;

/// Sampled field on a (2w+1)^m lattice in chart coordinates, centred at `center`.
#[derive(Clone, Debug, PartialEq)]
pub struct GridField {
    pub chart: Chart,
    pub m: usize,
    pub center: Vec<f64>,
    pub h: f64,
    pub half_width: usize,
    pub kind: GridKind,
    /// Chart components: one array for functions, m arrays (u_a = u(∂_a)) for 1-forms.
    pub components: Vec<Vec<f64>>,
}

#[derive(Serialize, Deserialize)]
struct Sidecar {
    chart: Chart,
    m: usize,
    shape: Vec<usize>,
    spacing: f64,
    center: Vec<f64>,
    annulus: [f64; 2],
    kind: GridKind,
    components: usize,
    dtype: String,
    layout: String,
}

impl GridField {
    fn check(chart: Chart, m: usize, center: &[f64], h: f64, half_width: usize) -> Result<()> {
        if !chart.supports(m) || center.len() != m {
            return Err(Error::InvalidArgument(format!("{chart:?} chart does not cover ℝ^{m}")));
        }
        if !(h > 0.0) || h > REFERENCE_WIDTH / 32.0 {
            return Err(Error::InvalidArgument(format!(
                "spacing {h} exceeds 1/32 of the annulus width"
            )));
        }
        if half_width < 2 {
            return Err(Error::InvalidArgument("grid needs half width ≥ 2".into()));
        }
        Ok(())
    }

    fn build(
        chart: Chart,
        m: usize,
        center: &[f64],
        h: f64,
        half_width: usize,
        kind: GridKind,
        sample: &dyn Fn(&[f64]) -> Vec<f64>,
    ) -> Result<Self> {
        Self::check(chart, m, center, h, half_width)?;
        let mut g = Self {
            chart,
            m,
            center: center.to_vec(),
            h,
            half_width,
            kind,
            components: Vec::new(),
        };
        let n = g.len();
        let ncomp = if kind == GridKind::Function { 1 } else { m };
        let mut comps = vec![vec![0.0; n]; ncomp];
        for idx in 0..n {
            let q = g.chart_point(idx);
            let x = chart.to_cartesian(&q);
            let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
            if r < ANNULUS.0 || r > ANNULUS.1 {
                return Err(Error::InvalidArgument(format!(
                    "grid node at radius {r} leaves the annulus {ANNULUS:?}"
                )));
            }
            let v = sample(&x);
            match kind {
                GridKind::Function => comps[0][idx] = v[0],
                GridKind::OneForm => {
                    // pull back: u_a = Σ_i U_i ∂x_i/∂q_a
                    let j = chart.jacobian(&q);
                    for a in 0..m {
                        comps[a][idx] = (0..m).map(|i| v[i] * j[(i, a)]).sum();
                    }
                }
            }
        }
        g.components = comps;
        Ok(g)
    }

    pub fn sample_function(
        chart: Chart,
        m: usize,
        center: &[f64],
        h: f64,
        half_width: usize,
        f: &dyn Fn(&[f64]) -> f64,
    ) -> Result<Self> {
        Self::build(chart, m, center, h, half_width, GridKind::Function, &|x| vec![f(x)])
    }

    /// `u` returns Cartesian components.
    pub fn sample_oneform(
        chart: Chart,
        m: usize,
        center: &[f64],
        h: f64,
        half_width: usize,
        u: &dyn Fn(&[f64]) -> Vec<f64>,
    ) -> Result<Self> {
        Self::build(chart, m, center, h, half_width, GridKind::OneForm, u)
    }

    pub fn side(&self) -> usize {
        2 * self.half_width + 1
    }

    pub fn shape(&self) -> Vec<usize> {
        vec![self.side(); self.m]
    }

    pub fn len(&self) -> usize {
        self.side().pow(self.m as u32)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Multi-index of a flat (row-major) node index, as offsets from the centre.
    pub fn offsets(&self, idx: usize) -> Vec<i64> {
        let s = self.side();
        let mut rem = idx;
        let mut out = vec![0i64; self.m];
        for a in (0..self.m).rev() {
            out[a] = (rem % s) as i64 - self.half_width as i64;
            rem /= s;
        }
        out
    }

    pub fn index_of(&self, offsets: &[i64]) -> Option<usize> {
        let s = self.side() as i64;
        let w = self.half_width as i64;
        let mut idx = 0i64;
        for &o in offsets {
            if o.abs() > w {
                return None;
            }
            idx = idx * s + (o + w);
        }
        Some(idx as usize)
    }

    fn point_from_offsets(&self, off: &[f64]) -> Vec<f64> {
        self.center.iter().zip(off).map(|(c, o)| c + o * self.h).collect()
    }

    pub fn chart_point(&self, idx: usize) -> Vec<f64> {
        let off: Vec<f64> = self.offsets(idx).iter().map(|&o| o as f64).collect();
        self.point_from_offsets(&off)
    }

    pub fn cartesian_point(&self, idx: usize) -> Vec<f64> {
        self.chart.to_cartesian(&self.chart_point(idx))
    }

    fn is_interior(&self, idx: usize) -> bool {
        let w = self.half_width as i64;
        self.offsets(idx).iter().all(|o| o.abs() < w)
    }

    pub fn interior_nodes(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.is_interior(i)).collect()
    }

    fn neighbour(&self, idx: usize, a: usize, step: i64) -> usize {
        let mut off = self.offsets(idx);
        off[a] += step;
        self.index_of(&off).expect("neighbour inside grid")
    }

    /// Cartesian components at every node (functions: the single value).
    fn cartesian_components(&self) -> Vec<Vec<f64>> {
        if self.kind == GridKind::Function {
            return self.components.clone();
        }
        let n = self.len();
        let mut out = vec![vec![0.0; n]; self.m];
        for idx in 0..n {
            let q = self.chart_point(idx);
            let jt = self.chart.jacobian(&q).transpose();
            let u = DVector::from_fn(self.m, |a, _| self.components[a][idx]);
            let big_u = jt.lu().solve(&u).expect("chart Jacobian is invertible");
            for i in 0..self.m {
                out[i][idx] = big_u[i];
            }
        }
        out
    }

    /// Conservative Laplace–Beltrami of a nodal function at an interior node
    /// (analyst's sign, Σ ∂² in Cartesian terms).
    fn laplace_beltrami(&self, f: &[f64], idx: usize) -> f64 {
        let q = self.chart_point(idx);
        let off: Vec<f64> = self.offsets(idx).iter().map(|&o| o as f64).collect();
        let mut total = 0.0;
        for a in 0..self.m {
            let coef = |shift: f64| {
                let mut o = off.clone();
                o[a] += shift;
                let qh = self.point_from_offsets(&o);
                self.chart.sqrt_det(&qh) / self.chart.metric_diag(&qh)[a]
            };
            let (cp, cm) = (coef(0.5), coef(-0.5));
            let fp = f[self.neighbour(idx, a, 1)];
            let fm = f[self.neighbour(idx, a, -1)];
            total += cp * (fp - f[idx]) - cm * (f[idx] - fm);
        }
        total / (self.h * self.h * self.chart.sqrt_det(&q))
    }

    /// Max over components of |Δ| at each interior node.
    pub fn harmonicity_residuals(&self) -> Vec<(usize, f64)> {
        let comps = self.cartesian_components();
        self.interior_nodes()
            .into_iter()
            .map(|idx| {
                let r = comps
                    .iter()
                    .map(|c| self.laplace_beltrami(c, idx).abs())
                    .fold(0.0, f64::max);
                (idx, r)
            })
            .collect()
    }

    /// d*u = −(1/√g) ∂_a(√g g^{aa} u_a) at each interior node.
    pub fn codifferential(&self) -> Result<Vec<(usize, f64)>> {
        if self.kind != GridKind::OneForm {
            return Err(Error::InvalidArgument("d* needs a 1-form grid".into()));
        }
        Ok(self
            .interior_nodes()
            .into_iter()
            .map(|idx| {
                let q = self.chart_point(idx);
                let mut div = 0.0;
                for a in 0..self.m {
                    let flux = |step: i64| {
                        let j = self.neighbour(idx, a, step);
                        let qj = self.chart_point(j);
                        self.chart.sqrt_det(&qj) / self.chart.metric_diag(&qj)[a] * self.components[a][j]
                    };
                    div += (flux(1) - flux(-1)) / (2.0 * self.h);
                }
                (idx, -div / self.chart.sqrt_det(&q))
            })
            .collect())
    }

    /// |du|² = Σ_{a<b} (∂_a u_b − ∂_b u_a)² g^{aa} g^{bb} at each interior node.
    pub fn d_norm2(&self) -> Result<Vec<(usize, f64)>> {
        if self.kind != GridKind::OneForm {
            return Err(Error::InvalidArgument("d needs a 1-form grid".into()));
        }
        Ok(self
            .interior_nodes()
            .into_iter()
            .map(|idx| {
                let g = self.chart.metric_diag(&self.chart_point(idx));
                let d = |a: usize, b: usize| {
                    (self.components[b][self.neighbour(idx, a, 1)]
                        - self.components[b][self.neighbour(idx, a, -1)])
                        / (2.0 * self.h)
                };
                let mut total = 0.0;
                for a in 0..self.m {
                    for b in (a + 1)..self.m {
                        let w = d(a, b) - d(b, a);
                        total += w * w / (g[a] * g[b]);
                    }
                }
                (idx, total)
            })
            .collect())
    }

    /// Write `<stem>.bin` (little-endian f64, component-major, row-major nodes)
    /// and `<stem>.json` describing it.
    pub fn write_dump(&self, dir: &Path, stem: &str) -> Result<()> {
        let mut bytes = Vec::with_capacity(8 * self.len() * self.components.len());
        for c in &self.components {
            for v in c {
                bytes.extend_from_slice(&v.to_le_bytes());
            }
        }
        fs::File::create(dir.join(format!("{stem}.bin")))?.write_all(&bytes)?;
        let side = Sidecar {
            chart: self.chart,
            m: self.m,
            shape: self.shape(),
            spacing: self.h,
            center: self.center.clone(),
            annulus: [ANNULUS.0, ANNULUS.1],
            kind: self.kind,
            components: self.components.len(),
            dtype: "f64le".into(),
            layout: "component-major, row-major nodes".into(),
        };
        fs::write(
            dir.join(format!("{stem}.json")),
            serde_json::to_string_pretty(&side)?,
        )?;
        Ok(())
    }

    pub fn read_dump(dir: &Path, stem: &str) -> Result<Self> {
        let side: Sidecar = serde_json::from_str(&fs::read_to_string(dir.join(format!("{stem}.json")))?)
            .map_err(|e| Error::Parse(e.to_string()))?;
        if side.dtype != "f64le" || side.shape.len() != side.m || side.shape.iter().any(|&s| s % 2 == 0) {
            return Err(Error::Parse("unsupported grid sidecar".into()));
        }
        let n: usize = side.shape.iter().product();
        let mut bytes = Vec::new();
        fs::File::open(dir.join(format!("{stem}.bin")))?.read_to_end(&mut bytes)?;
        if bytes.len() != 8 * n * side.components {
            return Err(Error::Parse(format!(
                "grid dump has {} bytes, expected {}",
                bytes.len(),
                8 * n * side.components
            )));
        }
        let vals: Vec<f64> = bytes
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
            .collect();
        Ok(Self {
            chart: side.chart,
            m: side.m,
            center: side.center,
            h: side.spacing,
            half_width: side.shape[0] / 2,
            kind: side.kind,
            components: vals.chunks(n).map(<[f64]>::to_vec).collect(),
        })
    }
}

/// Which discrete quantity a convergence study measures.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Quantity {
    /// Componentwise Laplacian, exact value 0.
    Harmonicity,
    Codifferential,
    DNorm2,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ConvergenceStudy {
    pub chart: Chart,
    pub quantity: Quantity,
    pub spacings: Vec<f64>,
    /// Max error over the nodes shared by all grids.
    pub errors: Vec<f64>,
    /// log₂ of successive error ratios; empty when the stencil is exact.
    pub orders: Vec<f64>,
    /// All errors at rounding level: the stencil reproduces the field exactly.
    pub exact: bool,
}

impl ConvergenceStudy {
    pub fn order(&self) -> Option<f64> {
        self.orders.last().copied()
    }
}

/// Error of a discrete quantity against `exact` at grids h, h/2, h/4 (and
/// more levels if `levels` > 3), compared on the nodes at offsets {−h, 0, h}
/// common to all levels.
pub fn convergence_study(
    chart: Chart,
    m: usize,
    center: &[f64],
    h0: f64,
    levels: usize,
    quantity: Quantity,
    kind: GridKind,
    field: &dyn Fn(&[f64]) -> Vec<f64>,
    exact: &dyn Fn(&[f64]) -> f64,
) -> Result<ConvergenceStudy> {
    let mut spacings = Vec::new();
    let mut errors = Vec::new();
    let mut scale = 0.0_f64;
    for level in 0..levels {
        let factor = 1i64 << level;
        let h = h0 / factor as f64;
        let hw = factor as usize + 1;
        let grid = match kind {
            GridKind::Function => GridField::sample_function(chart, m, center, h, hw, &|x| field(x)[0])?,
            GridKind::OneForm => GridField::sample_oneform(chart, m, center, h, hw, field)?,
        };
        let values: Vec<(usize, f64)> = match quantity {
            Quantity::Harmonicity => grid.harmonicity_residuals(),
            Quantity::Codifferential => grid.codifferential()?,
            Quantity::DNorm2 => grid.d_norm2()?,
        };
        let lookup: std::collections::HashMap<usize, f64> = values.into_iter().collect();
        let mut err = 0.0_f64;
        let mut count = 0;
        for idx in 0..3usize.pow(m as u32) {
            let mut rem = idx;
            let off: Vec<i64> = (0..m)
                .map(|_| {
                    let o = (rem % 3) as i64 - 1;
                    rem /= 3;
                    o * factor
                })
                .collect();
            let node = grid.index_of(&off).expect("common node");
            let x = grid.cartesian_point(node);
            let want = exact(&x);
            scale = scale.max(want.abs()).max(field(&x).iter().fold(0.0, |a, v| a.max(v.abs())));
            err = err.max((lookup[&node] - want).abs());
            count += 1;
        }
        debug_assert_eq!(count, 3usize.pow(m as u32));
        spacings.push(h);
        errors.push(err);
    }
    let floor = 1e-9 * scale.max(1.0);
    let exact_stencil = errors.iter().all(|&e| e <= floor);
    let orders = if exact_stencil {
        Vec::new()
    } else {
        errors.windows(2).map(|w| (w[0] / w[1]).log2()).collect()
    };
    Ok(ConvergenceStudy {
        chart,
        quantity,
        spacings,
        errors,
        orders,
        exact: exact_stencil,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rotational(x: &[f64]) -> Vec<f64> {
        vec![-x[1], x[0], -x[3], x[2]]
    }

    #[test]
    fn point_stencils_on_rotational_form() {
        let x = [0.3, -0.7, 0.5, 0.2];
        assert!(divergence_at(&rotational, &x, 1e-3).abs() < 1e-12);
        assert!((d_norm2_at(&rotational, &x, 1e-3) - 8.0).abs() < 1e-9);
    }

    #[test]
    fn radial_form_codifferential_is_minus_m() {
        let u = |x: &[f64]| x.to_vec();
        let g = GridField::sample_oneform(Chart::Cartesian, 3, &[0.6, 0.5, 0.4], 1.0 / 64.0, 3, &u).unwrap();
        for (_, v) in g.codifferential().unwrap() {
            assert!((v + 3.0).abs() < 1e-10);
        }
    }

    #[test]
    fn hopf_chart_has_second_order_truncation() {
        let s = convergence_study(
            Chart::Hopf,
            4,
            &[1.0, 0.7, 0.3, 0.9],
            1.0 / 32.0,
            3,
            Quantity::Harmonicity,
            GridKind::OneForm,
            &rotational,
            &|_| 0.0,
        )
        .unwrap();
        let p = s.order().unwrap();
        assert!((1.9..=2.1).contains(&p), "{s:?}");
    }

    #[test]
    fn chart_metric_matches_jacobian() {
        for (chart, q) in [
            (Chart::Polar, vec![1.1, 0.4]),
            (Chart::Spherical, vec![0.9, 0.8, 2.0]),
            (Chart::Hopf, vec![1.2, 0.5, 0.1, -0.7]),
        ] {
            let j = chart.jacobian(&q);
            let g = j.transpose() * &j;
            let d = chart.metric_diag(&q);
            for a in 0..q.len() {
                for b in 0..q.len() {
                    let want = if a == b { d[a] } else { 0.0 };
                    assert!((g[(a, b)] - want).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn dump_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let g = GridField::sample_function(Chart::Spherical, 3, &[1.0, 1.0, 0.5], 1.0 / 40.0, 2, &|x| x[0] * x[1])
            .unwrap();
        g.write_dump(dir.path(), "f").unwrap();
        assert_eq!(GridField::read_dump(dir.path(), "f").unwrap(), g);
    }

    #[test]
    fn spacing_bound_enforced() {
        assert!(GridField::sample_function(Chart::Cartesian, 2, &[1.0, 0.0], 0.1, 2, &|x| x[0]).is_err());
    }
}
