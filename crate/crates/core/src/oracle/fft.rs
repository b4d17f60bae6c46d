//! Spectral (Fourier) Laplacian on the unit circle.

use nalgebra::{DMatrix, SymmetricEigen};
use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use crate::cross_section::{EigenItem, EigenKind, EigenTable};
use crate::error::{Error, Result};

/// Eigenvalues k² for |k| < n_modes, from the dense spectral Laplacian on
/// 2·n_modes − 1 equispaced nodes.
pub fn circle_spectrum_fft(n_modes: usize) -> Result<EigenTable> {
    if n_modes == 0 {
        return Err(Error::InvalidArgument("need at least one mode".into()));
    }
    let n = 2 * n_modes - 1;
    let mut planner = FftPlanner::<f64>::new();
    let fwd = planner.plan_fft_forward(n);
    let inv = planner.plan_fft_inverse(n);
    let freq = |j: usize| -> f64 {
        if j <= n / 2 {
            j as f64
        } else {
            j as f64 - n as f64
        }
    };
    let mut lap = DMatrix::zeros(n, n);
    for col in 0..n {
        let mut buf = vec![Complex::new(0.0, 0.0); n];
        buf[col].re = 1.0;
        fwd.process(&mut buf);
        for (j, c) in buf.iter_mut().enumerate() {
            *c *= freq(j).powi(2);
        }
        inv.process(&mut buf);
        for row in 0..n {
            lap[(row, col)] = buf[row].re / n as f64;
        }
    }
    let sym = (&lap + lap.transpose()) * 0.5;
    let mut vals: Vec<f64> = SymmetricEigen::new(sym).eigenvalues.iter().copied().collect();
    vals.sort_by(f64::total_cmp);
    let mut items: Vec<EigenItem> = Vec::new();
    for v in vals {
        if let Some(last) = items.last_mut() {
            if (v - last.eigenvalue).abs() <= 1e-9 * v.abs().max(1.0) {
                last.multiplicity += 1;
                continue;
            }
        }
        items.push(EigenItem {
            kind: EigenKind::Function,
            eigenvalue: v,
            multiplicity: 1,
            label: format!("k={}", v.max(0.0).sqrt().round()),
            residual: None,
        });
    }
    Ok(EigenTable {
        cross_section_id: "S1-fft".into(),
        dim_link: 1,
        cutoff: (n_modes * n_modes) as f64,
        items,
        approximate: false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn three_modes() {
        let t = circle_spectrum_fft(3).unwrap();
        let v = t.expanded();
        let want = [0.0, 1.0, 1.0, 4.0, 4.0];
        assert_eq!(v.len(), 5);
        for (a, b) in v.iter().zip(want) {
            assert!((a - b).abs() < 1e-12, "{a} vs {b}");
        }
    }
}
