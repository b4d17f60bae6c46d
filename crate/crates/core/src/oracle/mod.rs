//! Independent brute-force checks for the analytic machinery.

pub mod fd;
pub mod fft;
pub mod ode;

pub use fd::{Chart, ConvergenceStudy, GridField, GridKind, Quantity};
pub use fft::circle_spectrum_fft;
pub use ode::{integrate_radial, RadialOde, RadialSolution};

use crate::cross_section::{mesh_function_spectrum, EigenTable};
use crate::error::{Error, Result};
use crate::mesh::TriMesh;

/// Lowest `n_eigs` Laplace–Beltrami eigenvalues of the level-`level` icosphere.
pub fn icosphere_eigensolve(level: u32, n_eigs: usize) -> Result<EigenTable> {
    if level > 6 {
        return Err(Error::InvalidArgument(format!(
            "icosphere level {level} is above the supported 6"
        )));
    }
    let mut t = mesh_function_spectrum(&TriMesh::icosphere(level), n_eigs)?;
    t.cross_section_id = format!("icosphere-{level}");
    Ok(t)
}
