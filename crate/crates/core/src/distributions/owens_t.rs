//! Owen's T function by adaptive quadrature of its defining integral.

use crate::quadrature::integrate;
use std::f64::consts::PI;

/// T(h, a) = (1/2π) ∫₀ᵃ exp(−h²(1+x²)/2) / (1+x²) dx.
pub fn owens_t(h: f64, a: f64) -> f64 {
    if a == 0.0 || h.is_infinite() {
        return 0.0;
    }
    if a < 0.0 {
        return -owens_t(h, -a);
    }
    let hh = 0.5 * h * h;
    let integrand = |x: f64| {
        let q = 1.0 + x * x;
        (-hh * q).exp() / q
    };
    integrate(integrand, 0.0, a, 1e-16, 1e-13) / (2.0 * PI)
}
