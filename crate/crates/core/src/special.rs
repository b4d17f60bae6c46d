//! Small closed-form helpers: binomials, half-integer gamma values and
//! sphere integrals of monomials.

use std::f64::consts::PI;

/// Binomial coefficient C(n, k) as an integer; zero when k is out of range.
pub fn binomial(n: i64, k: i64) -> u64 {
    if k < 0 || n < 0 || k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc as u64
}

/// Γ(x) for x a positive integer or half-integer, given as `twice_x = 2x`.
pub fn gamma_half(twice_x: u32) -> f64 {
    assert!(twice_x > 0, "gamma_half needs a positive argument");
    if twice_x % 2 == 0 {
        let n = twice_x / 2;
        (1..n).map(f64::from).product()
    } else {
        // Γ(1/2) = √π, Γ(x+1) = xΓ(x)
        let mut g = PI.sqrt();
        let mut t = 1;
        while t < twice_x {
            g *= f64::from(t) / 2.0;
            t += 2;
        }
        g
    }
}

/// Volume of the unit round sphere S^{m-1} ⊂ ℝ^m.
pub fn sphere_volume(m: usize) -> f64 {
    2.0 * PI.powf(m as f64 / 2.0) / gamma_half(m as u32)
}

/// ∫_{S^{m-1}} x^α dσ for a multi-index α (m = α.len()).
pub fn sphere_monomial_integral(alpha: &[u32]) -> f64 {
    if alpha.iter().any(|a| a % 2 == 1) {
        return 0.0;
    }
    let m = alpha.len() as u32;
    let total: u32 = alpha.iter().sum();
    let num: f64 = alpha.iter().map(|&a| gamma_half(a + 1)).product();
    2.0 * num / gamma_half(total + m)
}

/// Dimension of degree-k spherical harmonics on S^{m-1}.
pub fn harmonic_dimension(m: usize, k: usize) -> usize {
    let (m, k) = (m as i64, k as i64);
    (binomial(k + m - 1, k) - binomial(k + m - 3, k - 2)) as usize
}

/// Multiplicity of the coclosed 1-form eigenvalue (k+1)(k+n-2) on S^n, k ≥ 1.
pub fn coclosed_dimension(n: usize, k: usize) -> usize {
    if k == 0 || n < 2 {
        return 0;
    }
    let (n, k) = (n as u128, k as u128);
    let fact = |x: u128| -> u128 { (1..=x).product::<u128>().max(1) };
    let num = k * (k + n - 1) * (2 * k + n - 1) * fact(k + n - 3);
    let den = fact(n - 2) * fact(k + 1);
    (num / den) as usize
}

pub fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn sphere_volumes() {
        assert_relative_eq!(sphere_volume(2), 2.0 * PI, epsilon = 1e-14);
        assert_relative_eq!(sphere_volume(3), 4.0 * PI, epsilon = 1e-14);
        assert_relative_eq!(sphere_volume(4), 2.0 * PI * PI, epsilon = 1e-13);
    }

    #[test]
    fn monomial_integrals() {
        // ∫_{S²} x² = 4π/3
        assert_relative_eq!(sphere_monomial_integral(&[2, 0, 0]), 4.0 * PI / 3.0, epsilon = 1e-14);
        assert_eq!(sphere_monomial_integral(&[1, 1, 0]), 0.0);
        assert_relative_eq!(sphere_monomial_integral(&[0, 0, 0, 0]), sphere_volume(4), epsilon = 1e-14);
    }

    #[test]
    fn harmonic_dimensions() {
        assert_eq!(harmonic_dimension(4, 0), 1);
        assert_eq!(harmonic_dimension(4, 1), 4);
        assert_eq!(harmonic_dimension(4, 2), 9);
        assert_eq!(harmonic_dimension(3, 2), 5);
        assert_eq!(harmonic_dimension(2, 1), 2);
        assert_eq!(harmonic_dimension(2, 2), 2);
    }

    #[test]
    fn coclosed_dimensions() {
        // Killing fields: dim so(n+1)
        assert_eq!(coclosed_dimension(3, 1), 6);
        assert_eq!(coclosed_dimension(4, 1), 10);
        assert_eq!(coclosed_dimension(3, 2), 16);
    }
}
