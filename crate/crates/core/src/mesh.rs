//! Triangle meshes of closed surfaces: OFF I/O, icospheres, and the
//! cotangent stiffness / lumped mass pair of the weak Laplace–Beltrami operator.

use std::collections::HashMap;
use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sparse::CsrMatrix;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TriMesh {
    pub vertices: Vec<[f64; 3]>,
    pub faces: Vec<[usize; 3]>,
}

fn sub(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

fn normalize(a: [f64; 3]) -> [f64; 3] {
    let n = dot(a, a).sqrt();
    [a[0] / n, a[1] / n, a[2] / n]
}

impl TriMesh {
    /// Subdivided icosahedron projected onto the unit sphere.
    /// Level L has 10·4^L + 2 vertices.
    pub fn icosphere(level: u32) -> Self {
        let t = (1.0 + 5.0_f64.sqrt()) / 2.0;
        let mut vertices: Vec<[f64; 3]> = [
            [-1.0, t, 0.0],
            [1.0, t, 0.0],
            [-1.0, -t, 0.0],
            [1.0, -t, 0.0],
            [0.0, -1.0, t],
            [0.0, 1.0, t],
            [0.0, -1.0, -t],
            [0.0, 1.0, -t],
            [t, 0.0, -1.0],
            [t, 0.0, 1.0],
            [-t, 0.0, -1.0],
            [-t, 0.0, 1.0],
        ]
        .into_iter()
        .map(normalize)
        .collect();
        let mut faces: Vec<[usize; 3]> = vec![
            [0, 11, 5],
            [0, 5, 1],
            [0, 1, 7],
            [0, 7, 10],
            [0, 10, 11],
            [1, 5, 9],
            [5, 11, 4],
            [11, 10, 2],
            [10, 7, 6],
            [7, 1, 8],
            [3, 9, 4],
            [3, 4, 2],
            [3, 2, 6],
            [3, 6, 8],
            [3, 8, 9],
            [4, 9, 5],
            [2, 4, 11],
            [6, 2, 10],
            [8, 6, 7],
            [9, 8, 1],
        ];
        for _ in 0..level {
            let mut cache: HashMap<(usize, usize), usize> = HashMap::new();
            let mut midpoint = |a: usize, b: usize, verts: &mut Vec<[f64; 3]>| -> usize {
                let key = (a.min(b), a.max(b));
                *cache.entry(key).or_insert_with(|| {
                    let (pa, pb) = (verts[a], verts[b]);
                    verts.push(normalize([
                        0.5 * (pa[0] + pb[0]),
                        0.5 * (pa[1] + pb[1]),
                        0.5 * (pa[2] + pb[2]),
                    ]));
                    verts.len() - 1
                })
            };
            let mut next = Vec::with_capacity(faces.len() * 4);
            for [a, b, c] in faces {
                let ab = midpoint(a, b, &mut vertices);
                let bc = midpoint(b, c, &mut vertices);
                let ca = midpoint(c, a, &mut vertices);
                next.push([a, ab, ca]);
                next.push([b, bc, ab]);
                next.push([c, ca, bc]);
                next.push([ab, bc, ca]);
            }
            faces = next;
        }
        Self { vertices, faces }
    }

    pub fn parse_off(text: &str) -> Result<Self> {
        let mut tokens = text
            .lines()
            .map(|l| l.split('#').next().unwrap_or("").trim())
            .filter(|l| !l.is_empty())
            .flat_map(|l| l.split_whitespace());
        match tokens.next() {
            Some("OFF") => {}
            other => {
                return Err(Error::Parse(format!(
                    "expected OFF header, found {other:?}"
                )))
            }
        }
        let mut next_usize = |what: &str| -> Result<usize> {
            tokens
                .next()
                .ok_or_else(|| Error::Parse(format!("unexpected end of file reading {what}")))?
                .parse::<usize>()
                .map_err(|e| Error::Parse(format!("bad {what}: {e}")))
        };
        let nv = next_usize("vertex count")?;
        let nf = next_usize("face count")?;
        let _ne = next_usize("edge count")?;
        // the closure above borrows `tokens`; collect the rest explicitly
        let rest: Vec<&str> = tokens.collect();
        let mut it = rest.into_iter();
        let mut vertices = Vec::with_capacity(nv);
        for i in 0..nv {
            let mut p = [0.0; 3];
            for c in &mut p {
                *c = it
                    .next()
                    .ok_or_else(|| Error::Parse(format!("truncated vertex {i}")))?
                    .parse::<f64>()
                    .map_err(|e| Error::Parse(format!("vertex {i}: {e}")))?;
            }
            vertices.push(p);
        }
        let mut faces = Vec::with_capacity(nf);
        for f in 0..nf {
            let parse = |s: Option<&str>| -> Result<usize> {
                s.ok_or_else(|| Error::Parse(format!("truncated face {f}")))?
                    .parse::<usize>()
                    .map_err(|e| Error::Parse(format!("face {f}: {e}")))
            };
            let count = parse(it.next())?;
            if count != 3 {
                return Err(Error::Parse(format!(
                    "face {f} has {count} vertices; only triangles are supported"
                )));
            }
            let tri = [parse(it.next())?, parse(it.next())?, parse(it.next())?];
            if tri.iter().any(|&v| v >= nv) {
                return Err(Error::Parse(format!("face {f} references a missing vertex")));
            }
            faces.push(tri);
        }
        Ok(Self { vertices, faces })
    }

    pub fn read_off<R: BufRead>(mut reader: R) -> Result<Self> {
        let mut text = String::new();
        reader.read_to_string(&mut text)?;
        Self::parse_off(&text)
    }

    pub fn write_off<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "OFF")?;
        writeln!(w, "{} {} 0", self.vertices.len(), self.faces.len())?;
        for v in &self.vertices {
            writeln!(w, "{:.17e} {:.17e} {:.17e}", v[0], v[1], v[2])?;
        }
        for f in &self.faces {
            writeln!(w, "3 {} {} {}", f[0], f[1], f[2])?;
        }
        Ok(())
    }

    pub fn triangle_area(&self, f: usize) -> f64 {
        let [a, b, c] = self.faces[f];
        let n = cross(
            sub(self.vertices[b], self.vertices[a]),
            sub(self.vertices[c], self.vertices[a]),
        );
        0.5 * dot(n, n).sqrt()
    }

    pub fn total_area(&self) -> f64 {
        (0..self.faces.len()).map(|f| self.triangle_area(f)).sum()
    }

    /// Rejects open, non-manifold, inconsistently oriented or degenerate meshes.
    pub fn validate(&self) -> Result<()> {
        if self.faces.is_empty() {
            return Err(Error::OpenMesh("mesh has no faces".into()));
        }
        let mut directed: HashMap<(usize, usize), usize> = HashMap::new();
        for (fi, &[a, b, c]) in self.faces.iter().enumerate() {
            if a == b || b == c || c == a {
                return Err(Error::DegenerateMesh(format!("face {fi} repeats a vertex")));
            }
            for e in [(a, b), (b, c), (c, a)] {
                *directed.entry(e).or_default() += 1;
            }
        }
        for (&(a, b), &count) in &directed {
            if count != 1 {
                return Err(Error::OpenMesh(format!(
                    "directed edge ({a},{b}) used {count} times (non-manifold or flipped face)"
                )));
            }
            if !directed.contains_key(&(b, a)) {
                return Err(Error::OpenMesh(format!("edge ({a},{b}) is on a boundary")));
            }
        }
        let areas: Vec<f64> = (0..self.faces.len()).map(|f| self.triangle_area(f)).collect();
        let mean = areas.iter().sum::<f64>() / areas.len() as f64;
        if let Some((f, a)) = areas
            .iter()
            .enumerate()
            .find(|(_, &a)| !(a >= 1e-12 * mean))
        {
            return Err(Error::DegenerateMesh(format!(
                "face {f} has area {a:e} (mean {mean:e})"
            )));
        }
        Ok(())
    }

    /// Cotangent stiffness matrix: K_ij = −(cot α_ij + cot β_ij)/2, K_ii = −Σ_j K_ij.
    pub fn cotangent_stiffness(&self) -> CsrMatrix {
        let n = self.vertices.len();
        let mut trip = Vec::with_capacity(self.faces.len() * 9);
        for &f in &self.faces {
            for k in 0..3 {
                let (i, j, o) = (f[k], f[(k + 1) % 3], f[(k + 2) % 3]);
                let u = sub(self.vertices[i], self.vertices[o]);
                let v = sub(self.vertices[j], self.vertices[o]);
                let c = cross(u, v);
                let cot = dot(u, v) / dot(c, c).sqrt();
                let w = 0.5 * cot;
                trip.push((i, j, -w));
                trip.push((j, i, -w));
                trip.push((i, i, w));
                trip.push((j, j, w));
            }
        }
        CsrMatrix::from_triplets(n, trip)
    }

    /// Barycentric lumped mass: a third of each incident triangle's area.
    pub fn lumped_mass(&self) -> Vec<f64> {
        let mut m = vec![0.0; self.vertices.len()];
        for (fi, f) in self.faces.iter().enumerate() {
            let a = self.triangle_area(fi) / 3.0;
            for &v in f {
                m[v] += a;
            }
        }
        m
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn icosphere_counts() {
        for level in 0..4 {
            let m = TriMesh::icosphere(level);
            assert_eq!(m.vertices.len(), 10 * 4usize.pow(level) + 2);
            assert_eq!(m.faces.len(), 20 * 4usize.pow(level));
            m.validate().unwrap();
        }
    }

    #[test]
    fn stiffness_annihilates_constants() {
        let m = TriMesh::icosphere(2);
        let k = m.cotangent_stiffness();
        let ones = vec![1.0; m.vertices.len()];
        let mut out = vec![0.0; ones.len()];
        k.mul_vec(&ones, &mut out);
        assert!(out.iter().all(|v| v.abs() < 1e-12));
        assert!(k.is_symmetric(1e-14));
    }

    #[test]
    fn off_round_trip() {
        let m = TriMesh::icosphere(1);
        let mut buf = Vec::new();
        m.write_off(&mut buf).unwrap();
        let back = TriMesh::parse_off(std::str::from_utf8(&buf).unwrap()).unwrap();
        assert_eq!(back, m);
    }

    #[test]
    fn open_mesh_rejected() {
        let mut m = TriMesh::icosphere(0);
        m.faces.pop();
        assert!(matches!(m.validate(), Err(Error::OpenMesh(_))));
    }

    #[test]
    fn degenerate_triangle_rejected() {
        let mut m = TriMesh::icosphere(1);
        let [a, b, _] = m.faces[0];
        // collapse one vertex onto the midpoint of an edge of its triangle
        let c = m.faces[0][2];
        let (pa, pb) = (m.vertices[a], m.vertices[b]);
        m.vertices[c] = [
            0.5 * (pa[0] + pb[0]),
            0.5 * (pa[1] + pb[1]),
            0.5 * (pa[2] + pb[2]),
        ];
        assert!(m.validate().is_err());
    }

    #[test]
    fn non_triangle_off_rejected() {
        let txt = "OFF\n4 1 0\n0 0 0\n1 0 0\n1 1 0\n0 1 0\n4 0 1 2 3\n";
        assert!(matches!(TriMesh::parse_off(txt), Err(Error::Parse(_))));
    }
}
