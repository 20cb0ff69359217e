//! Skew-normal law in mean/variance/shape form.

use super::normal::{big_phi, phi};
use super::owens_t::owens_t;
use crate::error::{Error, Result};
use std::f64::consts::PI;

/// Largest admissible |δ| for the centred parameterisation.
pub const DELTA_MAX: f64 = 0.9952;

/// Direct parameters (location ξ, scale ω, shape α) of a skew-normal law
/// with the given mean, variance and shape.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DirectParams {
    pub xi: f64,
    pub omega: f64,
    pub alpha: f64,
}

pub fn direct_params(mean: f64, variance: f64, shape: f64) -> Result<DirectParams> {
    if !mean.is_finite() || !shape.is_finite() {
        return Err(Error::InvalidParameter("skew-normal mean and shape must be finite".into()));
    }
    if !(variance > 0.0 && variance.is_finite()) {
        return Err(Error::InvalidParameter(format!("skew-normal variance must be positive, got {variance}")));
    }
    let delta = shape / (1.0 + shape * shape).sqrt();
    if delta.abs() > DELTA_MAX {
        return Err(Error::InvalidParameter(format!(
            "skew-normal |delta| = {:.6} exceeds {DELTA_MAX}",
            delta.abs()
        )));
    }
    let omega = (variance / (1.0 - 2.0 * delta * delta / PI)).sqrt();
    let xi = mean - omega * delta * (2.0 / PI).sqrt();
    Ok(DirectParams { xi, omega, alpha: shape })
}

impl DirectParams {
    pub fn delta(&self) -> f64 {
        self.alpha / (1.0 + self.alpha * self.alpha).sqrt()
    }

    pub fn pdf(&self, x: f64) -> f64 {
        let z = (x - self.xi) / self.omega;
        2.0 / self.omega * phi(z) * big_phi(self.alpha * z)
    }

    pub fn cdf(&self, x: f64) -> f64 {
        if x == f64::INFINITY {
            return 1.0;
        }
        if x == f64::NEG_INFINITY {
            return 0.0;
        }
        let z = (x - self.xi) / self.omega;
        (big_phi(z) - 2.0 * owens_t(z, self.alpha)).clamp(0.0, 1.0)
    }

    pub fn sf(&self, x: f64) -> f64 {
        if x == f64::INFINITY {
            return 0.0;
        }
        if x == f64::NEG_INFINITY {
            return 1.0;
        }
        let z = (x - self.xi) / self.omega;
        (big_phi(-z) + 2.0 * owens_t(z, self.alpha)).clamp(0.0, 1.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::integrate;

    #[test]
    fn moments_match_the_centred_parameters() {
        let d = direct_params(1.5, 0.8, 2.0).unwrap();
        let lo = d.xi - 40.0 * d.omega;
        let hi = d.xi + 40.0 * d.omega;
        let m0 = integrate(|x| d.pdf(x), lo, hi, 1e-14, 1e-13);
        let m1 = integrate(|x| x * d.pdf(x), lo, hi, 1e-14, 1e-13);
        let m2 = integrate(|x| (x - 1.5).powi(2) * d.pdf(x), lo, hi, 1e-14, 1e-13);
        assert!((m0 - 1.0).abs() < 1e-10);
        assert!((m1 - 1.5).abs() < 1e-10);
        assert!((m2 - 0.8).abs() < 1e-10);
    }

    #[test]
    fn cdf_is_integral_of_pdf() {
        let d = direct_params(0.0, 1.0, -3.0).unwrap();
        for &x in &[-2.5, -0.7, 0.0, 0.4, 1.9] {
            let q = integrate(|t| d.pdf(t), d.xi - 40.0 * d.omega, x, 1e-15, 1e-13);
            assert!((d.cdf(x) - q).abs() < 1e-10, "x={x}");
            assert!((d.cdf(x) + d.sf(x) - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn guard_on_delta() {
        assert!(direct_params(0.0, 1.0, 10.0).is_ok());
        assert!(direct_params(0.0, 1.0, 11.0).is_err());
        assert!(direct_params(0.0, -1.0, 0.0).is_err());
    }
}
