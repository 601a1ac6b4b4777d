//! Complex spherical harmonics `Y_lm(theta, phi)` with the physics
//! normalization
//!
//! ```text
//! integral |Y_lm|^2 dOmega = 1,
//! Y_lm(theta, phi) = N_lm P_l^m(cos theta) e^{i m phi},
//! ```
//!
//! where `P_l^m` are associated Legendre functions including the
//! Condon-Shortley phase `(-1)^m`, and `Y_{l,-m} = (-1)^m conj(Y_{lm})`.
//! These enter the angular decomposition of momentum-slice fields and the
//! homogeneous mode construction.

use crate::minkowski::C64;

/// Associated Legendre `P_l^m(x)` for `m >= 0`, Condon-Shortley phase
/// included, computed by the standard stable recurrence.
fn assoc_legendre(l: usize, m: usize, x: f64) -> f64 {
    debug_assert!(m <= l);
    // P_m^m = (-1)^m (2m-1)!! (1-x^2)^{m/2}
    let somx2 = ((1.0 - x) * (1.0 + x)).max(0.0).sqrt();
    let mut pmm = 1.0;
    let mut fact = 1.0;
    for _ in 0..m {
        pmm *= -fact * somx2;
        fact += 2.0;
    }
    if l == m {
        return pmm;
    }
    // P_{m+1}^m = x (2m+1) P_m^m
    let mut pmmp1 = x * (2.0 * m as f64 + 1.0) * pmm;
    if l == m + 1 {
        return pmmp1;
    }
    // (l-m) P_l^m = x (2l-1) P_{l-1}^m - (l+m-1) P_{l-2}^m
    let mut pll = 0.0;
    for ll in (m + 2)..=l {
        let llf = ll as f64;
        let mf = m as f64;
        pll = (x * (2.0 * llf - 1.0) * pmmp1 - (llf + mf - 1.0) * pmm) / (llf - mf);
        pmm = pmmp1;
        pmmp1 = pll;
    }
    pll
}

/// ln(n!) via `ln Gamma`, accurate for the factorial ratios in `N_lm`.
fn ln_factorial(n: usize) -> f64 {
    // Stirling with correction terms is overkill; direct product is exact
    // in double precision for the l-range used here (l <= ~60).
    let mut s = 0.0;
    for k in 2..=n {
        s += (k as f64).ln();
    }
    s
}

/// Spherical harmonic `Y_lm(theta, phi)`, `|m| <= l`.
///
/// `theta` is the polar angle from the positive z-axis, `phi` the azimuth.
pub fn ylm(l: usize, m: i64, theta: f64, phi: f64) -> C64 {
    let l_i = l as i64;
    assert!(
        m.abs() <= l_i,
        "spherical harmonic order |m| = {} exceeds degree l = {}",
        m.abs(),
        l
    );
    let mm = m.unsigned_abs() as usize;
    // sqrt((2l+1)/(4pi) * (l-m)!/(l+m)!), evaluated in log space
    let norm = (0.5
        * (((2 * l + 1) as f64 / (4.0 * std::f64::consts::PI)).ln() + ln_factorial(l - mm)
            - ln_factorial(l + mm)))
    .exp();
    let p = assoc_legendre(l, mm, theta.cos());
    let val = C64::from_polar(norm * p, mm as f64 * phi);
    if m >= 0 {
        val
    } else {
        // Y_{l,-m} = (-1)^m conj(Y_{lm})
        let sign = if mm % 2 == 0 { 1.0 } else { -1.0 };
        val.conj() * sign
    }
}

/// Real part basis helper: evaluates `Y_lm` on a unit direction vector.
pub fn ylm_dir(l: usize, m: i64, dir: [f64; 3]) -> C64 {
    let r = (dir[0] * dir[0] + dir[1] * dir[1] + dir[2] * dir[2]).sqrt();
    let theta = (dir[2] / r).clamp(-1.0, 1.0).acos();
    let phi = dir[1].atan2(dir[0]);
    ylm(l, m, theta, phi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::{gauss_legendre, periodic_trapezoid};
    use approx::assert_relative_eq;

    #[test]
    fn matches_reference_values() {
        // Reference values from an independent implementation.
        let y00 = ylm(0, 0, 0.3, 0.9);
        assert_relative_eq!(y00.re, 0.2820947917739, epsilon = 1e-12);
        assert!(y00.im.abs() < 1e-15);

        let y32 = ylm(3, 2, 0.7, 1.1);
        assert_relative_eq!(y32.re, -0.1909102029165, epsilon = 1e-11);
        assert_relative_eq!(y32.im, 0.2622768385391, epsilon = 1e-11);

        let y54 = ylm(5, 4, 2.1, -0.4);
        assert_relative_eq!(y54.re, 0.01201271118239, epsilon = 1e-11);
        assert_relative_eq!(y54.im, 0.4112255287941, epsilon = 1e-11);
    }

    #[test]
    fn negative_order_symmetry() {
        let theta = 1.234;
        let phi = -0.456;
        for l in 0..6usize {
            for m in 0..=(l as i64) {
                let plus = ylm(l, m, theta, phi);
                let minus = ylm(l, -m, theta, phi);
                let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
                let expected = plus.conj() * sign;
                assert_relative_eq!(minus.re, expected.re, epsilon = 1e-13);
                assert_relative_eq!(minus.im, expected.im, epsilon = 1e-13);
            }
        }
    }

    #[test]
    fn orthonormal_on_the_sphere() {
        // <Y_lm, Y_l'm'> = delta_ll' delta_mm' using Gauss-Legendre in
        // cos(theta) and trapezoid in phi.
        let rule = gauss_legendre(40);
        let cases = [(0usize, 0i64), (1, 0), (1, 1), (2, -1), (3, 2), (4, -3)];
        for &(l1, m1) in &cases {
            for &(l2, m2) in &cases {
                let mut acc = C64::new(0.0, 0.0);
                for (&xc, &wc) in rule.nodes.iter().zip(rule.weights.iter()) {
                    let theta = xc.clamp(-1.0, 1.0).acos();
                    let inner = periodic_trapezoid(
                        |phi| ylm(l1, m1, theta, phi).conj() * ylm(l2, m2, theta, phi),
                        64,
                    );
                    acc += inner * wc;
                }
                let expected = if l1 == l2 && m1 == m2 { 1.0 } else { 0.0 };
                assert_relative_eq!(acc.re, expected, epsilon = 1e-10);
                assert!(acc.im.abs() < 1e-10, "l1={l1} m1={m1} l2={l2} m2={m2}");
            }
        }
    }

    #[test]
    fn direction_form_matches_angles() {
        let theta = 0.8_f64;
        let phi = 2.4_f64;
        let dir = [
            theta.sin() * phi.cos(),
            theta.sin() * phi.sin(),
            theta.cos(),
        ];
        let a = ylm(4, 2, theta, phi);
        let b = ylm_dir(4, 2, dir);
        assert_relative_eq!(a.re, b.re, epsilon = 1e-13);
        assert_relative_eq!(a.im, b.im, epsilon = 1e-13);
    }
}
