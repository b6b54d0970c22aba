//! Complete elliptic integrals of the first kind via the arithmetic–geometric mean.

use std::f64::consts::FRAC_PI_2;

pub fn agm(mut a: f64, mut b: f64) -> f64 {
    for _ in 0..64 {
        let m = 0.5 * (a + b);
        let g = (a * b).sqrt();
        if (m - g).abs() <= 1e-16 * m {
            return m;
        }
        a = m;
        b = g;
    }
    0.5 * (a + b)
}

/// `K(k)` given the modulus and its complement `k′ = √(1 − k²)`; passing
/// the complement separately keeps full accuracy when `k` is close to 1.
pub fn complete_k(kp: f64) -> f64 {
    FRAC_PI_2 / agm(1.0, kp)
}
