//! Parametric micro-data families.
//!
//! A [`Family`] bundles a model kind with a validated parameter vector and
//! exposes the density, distribution, conditional and rectangle-mass
//! primitives the likelihoods are built from. Infinite bounds are accepted
//! wherever a distribution function is evaluated.

pub mod bivariate;
pub mod normal;
pub mod owens_t;
pub mod skew_normal;

use crate::data::DataMatrix;
use crate::error::{Error, Result};
use crate::rng::SymRng;
use bivariate::std_bvn_cdf;
use normal::{big_phi, ln_phi, phi};
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use skew_normal::{direct_params, DirectParams};
use std::f64::consts::PI;
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyKind {
    #[serde(rename = "normal", alias = "normal1_d")]
    Normal1D,
    #[serde(rename = "lognormal", alias = "log_normal1_d")]
    LogNormal1D,
    #[serde(rename = "skew_normal", alias = "skew_normal1_d")]
    SkewNormal1D,
    #[serde(rename = "uniform", alias = "uniform1_d")]
    Uniform1D,
    BivariateNormal,
}

impl FamilyKind {
    pub fn dim(self) -> usize {
        match self {
            FamilyKind::BivariateNormal => 2,
            _ => 1,
        }
    }

    pub fn n_params(self) -> usize {
        self.param_names().len()
    }

    pub fn param_names(self) -> &'static [&'static str] {
        match self {
            FamilyKind::Normal1D | FamilyKind::LogNormal1D => &["mu", "sigma"],
            FamilyKind::SkewNormal1D => &["mean", "variance", "shape"],
            FamilyKind::Uniform1D => &["a", "b"],
            FamilyKind::BivariateNormal => &["mu1", "mu2", "sigma1", "sigma2", "rho"],
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            FamilyKind::Normal1D => "normal",
            FamilyKind::LogNormal1D => "lognormal",
            FamilyKind::SkewNormal1D => "skew_normal",
            FamilyKind::Uniform1D => "uniform",
            FamilyKind::BivariateNormal => "bivariate_normal",
        }
    }

    /// Parses a family name; accepts a few common spellings.
    pub fn parse(s: &str) -> Result<Self> {
        let key: String = s.to_ascii_lowercase().chars().filter(|c| c.is_ascii_alphanumeric()).collect();
        Ok(match key.as_str() {
            "normal" | "normal1d" | "gaussian" => FamilyKind::Normal1D,
            "lognormal" | "lognormal1d" => FamilyKind::LogNormal1D,
            "skewnormal" | "skewnormal1d" => FamilyKind::SkewNormal1D,
            "uniform" | "uniform1d" => FamilyKind::Uniform1D,
            "bivariatenormal" | "bvn" | "binormal" => FamilyKind::BivariateNormal,
            _ => return Err(Error::InvalidParameter(format!("unknown family '{s}'"))),
        })
    }
}

impl fmt::Display for FamilyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A model kind together with a parameter vector satisfying its invariants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Family {
    kind: FamilyKind,
    theta: [f64; 5],
    skew: Option<DirectParams>,
}

fn check_finite(kind: FamilyKind, theta: &[f64]) -> Result<()> {
    if theta.len() != kind.n_params() {
        return Err(Error::Dimension { expected: kind.n_params(), got: theta.len() });
    }
    if theta.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidParameter(format!("{kind} parameters must be finite: {theta:?}")));
    }
    Ok(())
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("{name} must be positive, got {v}")))
    }
}

impl Family {
    pub fn new(kind: FamilyKind, theta: &[f64]) -> Result<Self> {
        check_finite(kind, theta)?;
        let mut skew = None;
        match kind {
            FamilyKind::Normal1D | FamilyKind::LogNormal1D => positive("sigma", theta[1])?,
            FamilyKind::SkewNormal1D => skew = Some(direct_params(theta[0], theta[1], theta[2])?),
            FamilyKind::Uniform1D => {
                if theta[1] <= theta[0] {
                    return Err(Error::InvalidParameter(format!(
                        "uniform needs a < b, got ({}, {})",
                        theta[0], theta[1]
                    )));
                }
            }
            FamilyKind::BivariateNormal => {
                positive("sigma1", theta[2])?;
                positive("sigma2", theta[3])?;
                if theta[4].abs() >= 1.0 {
                    return Err(Error::InvalidParameter(format!("rho must lie in (-1, 1), got {}", theta[4])));
                }
            }
        }
        let mut arr = [0.0; 5];
        arr[..theta.len()].copy_from_slice(theta);
        Ok(Self { kind, theta: arr, skew })
    }

    pub fn normal(mu: f64, sigma: f64) -> Result<Self> {
        Self::new(FamilyKind::Normal1D, &[mu, sigma])
    }

    pub fn lognormal(mu: f64, sigma: f64) -> Result<Self> {
        Self::new(FamilyKind::LogNormal1D, &[mu, sigma])
    }

    pub fn skew_normal(mean: f64, variance: f64, shape: f64) -> Result<Self> {
        Self::new(FamilyKind::SkewNormal1D, &[mean, variance, shape])
    }

    pub fn uniform(a: f64, b: f64) -> Result<Self> {
        Self::new(FamilyKind::Uniform1D, &[a, b])
    }

    pub fn bivariate_normal(mu1: f64, mu2: f64, sigma1: f64, sigma2: f64, rho: f64) -> Result<Self> {
        Self::new(FamilyKind::BivariateNormal, &[mu1, mu2, sigma1, sigma2, rho])
    }

    pub fn kind(&self) -> FamilyKind {
        self.kind
    }

    pub fn dim(&self) -> usize {
        self.kind.dim()
    }

    pub fn theta(&self) -> &[f64] {
        &self.theta[..self.kind.n_params()]
    }

    /// Same kind with new parameters.
    pub fn with_theta(&self, theta: &[f64]) -> Result<Self> {
        Self::new(self.kind, theta)
    }

    fn require_dim(&self, d: usize) -> Result<()> {
        if self.dim() != d {
            return Err(Error::Dimension { expected: self.dim(), got: d });
        }
        Ok(())
    }

    fn in_support(&self, x: f64) -> bool {
        match self.kind {
            FamilyKind::LogNormal1D => x > 0.0,
            FamilyKind::Uniform1D => x >= self.theta[0] && x <= self.theta[1],
            _ => true,
        }
    }

    // ---- univariate primitives (no validation, zero outside the support) ----

    /// Density at `x`; zero outside the support.
    pub fn density(&self, x: f64) -> f64 {
        let t = &self.theta;
        match self.kind {
            FamilyKind::Normal1D => phi((x - t[0]) / t[1]) / t[1],
            FamilyKind::LogNormal1D => {
                if x > 0.0 {
                    phi((x.ln() - t[0]) / t[1]) / (t[1] * x)
                } else {
                    0.0
                }
            }
            FamilyKind::SkewNormal1D => self.skew.expect("skew params").pdf(x),
            FamilyKind::Uniform1D => {
                if x >= t[0] && x <= t[1] {
                    1.0 / (t[1] - t[0])
                } else {
                    0.0
                }
            }
            FamilyKind::BivariateNormal => panic!("density on a bivariate family needs two coordinates"),
        }
    }

    /// Log density; −∞ outside the support.
    pub fn ln_density(&self, x: f64) -> f64 {
        let t = &self.theta;
        match self.kind {
            FamilyKind::Normal1D => ln_phi((x - t[0]) / t[1]) - t[1].ln(),
            FamilyKind::LogNormal1D => {
                if x > 0.0 {
                    ln_phi((x.ln() - t[0]) / t[1]) - t[1].ln() - x.ln()
                } else {
                    f64::NEG_INFINITY
                }
            }
            _ => self.density(x).ln(),
        }
    }

    /// Distribution function at `x` (±∞ allowed).
    pub fn dist(&self, x: f64) -> f64 {
        let t = &self.theta;
        match self.kind {
            FamilyKind::Normal1D => big_phi((x - t[0]) / t[1]),
            FamilyKind::LogNormal1D => {
                if x > 0.0 {
                    big_phi((x.ln() - t[0]) / t[1])
                } else {
                    0.0
                }
            }
            FamilyKind::SkewNormal1D => self.skew.expect("skew params").cdf(x),
            FamilyKind::Uniform1D => ((x - t[0]) / (t[1] - t[0])).clamp(0.0, 1.0),
            FamilyKind::BivariateNormal => panic!("dist on a bivariate family needs two coordinates"),
        }
    }

    /// Survival function 1 − G(x), computed without cancellation where possible.
    pub fn surv(&self, x: f64) -> f64 {
        let t = &self.theta;
        match self.kind {
            FamilyKind::Normal1D => big_phi(-(x - t[0]) / t[1]),
            FamilyKind::LogNormal1D => {
                if x > 0.0 {
                    big_phi(-(x.ln() - t[0]) / t[1])
                } else {
                    1.0
                }
            }
            FamilyKind::SkewNormal1D => self.skew.expect("skew params").sf(x),
            _ => 1.0 - self.dist(x),
        }
    }

    /// Probability of `(a, b]`, floored at zero.
    pub fn mass(&self, a: f64, b: f64) -> f64 {
        if b == f64::INFINITY {
            return self.surv(a);
        }
        if a == f64::NEG_INFINITY {
            return self.dist(b);
        }
        let lower_tail = self.dist(a);
        if lower_tail > 0.5 {
            (self.surv(a) - self.surv(b)).max(0.0)
        } else {
            (self.dist(b) - lower_tail).max(0.0)
        }
    }

    // ---- bivariate primitives ----

    /// Joint density of a bivariate normal at `(x1, x2)`.
    pub fn bvn_density(&self, x1: f64, x2: f64) -> f64 {
        let t = &self.theta;
        let (z1, z2, r) = ((x1 - t[0]) / t[2], (x2 - t[1]) / t[3], t[4]);
        let om = 1.0 - r * r;
        (-(z1 * z1 - 2.0 * r * z1 * z2 + z2 * z2) / (2.0 * om)).exp() / (2.0 * PI * t[2] * t[3] * om.sqrt())
    }

    /// Joint distribution function of a bivariate normal (±∞ allowed).
    pub fn bvn_cdf(&self, x1: f64, x2: f64) -> f64 {
        let t = &self.theta;
        std_bvn_cdf((x1 - t[0]) / t[2], (x2 - t[1]) / t[3], t[4])
    }

    /// Mass of the rectangle `(l1, u1] × (l2, u2]`, floored at zero.
    pub fn bvn_rect(&self, l1: f64, l2: f64, u1: f64, u2: f64) -> f64 {
        (self.bvn_cdf(u1, u2) - self.bvn_cdf(l1, u2) - self.bvn_cdf(u1, l2) + self.bvn_cdf(l1, l2)).max(0.0)
    }

    /// Distribution function of coordinate `target` (0-based) given the other
    /// coordinate equals `v`.
    pub fn cond_dist(&self, target: usize, v: f64, x: f64) -> f64 {
        let t = &self.theta;
        let (i, j) = if target == 0 { (1, 0) } else { (0, 1) };
        let (mu_i, mu_j, s_i, s_j, r) = (t[i], t[j], t[2 + i], t[2 + j], t[4]);
        let m = mu_j + r * s_j / s_i * (v - mu_i);
        let s = s_j * (1.0 - r * r).sqrt();
        big_phi((x - m) / s)
    }

    /// Univariate marginal (0-based coordinate) of a bivariate normal.
    pub fn marginal(&self, coord: usize) -> Result<Family> {
        self.require_dim(2)?;
        if coord > 1 {
            return Err(Error::IndexOutOfRange(format!("coordinate {coord} of a bivariate family")));
        }
        Family::normal(self.theta[coord], self.theta[2 + coord])
    }

    /// The bivariate family with its two coordinates exchanged.
    pub fn swapped(&self) -> Family {
        match self.kind {
            FamilyKind::BivariateNormal => {
                let t = &self.theta;
                Family::bivariate_normal(t[1], t[0], t[3], t[2], t[4]).expect("valid by construction")
            }
            _ => *self,
        }
    }

    // ---- checked public operations ----

    /// Density g(x; θ).
    pub fn pdf(&self, x: &[f64]) -> Result<f64> {
        self.require_dim(x.len())?;
        if self.dim() == 2 {
            return Ok(self.bvn_density(x[0], x[1]));
        }
        if !self.in_support(x[0]) {
            return Err(Error::Domain { family: self.kind.name(), value: x[0] });
        }
        Ok(self.density(x[0]))
    }

    /// Distribution function G(x; θ); joint for bivariate families.
    pub fn cdf(&self, x: &[f64]) -> Result<f64> {
        self.require_dim(x.len())?;
        if x.iter().any(|v| v.is_nan()) {
            return Err(Error::InvalidParameter("NaN argument".into()));
        }
        Ok(if self.dim() == 2 { self.bvn_cdf(x[0], x[1]) } else { self.dist(x[0]) })
    }

    /// Conditional distribution function of coordinate `target_index` (1 or 2)
    /// given the other coordinate equals `value_at_other`.
    pub fn conditional_cdf(&self, target_index: usize, value_at_other: f64, x: f64) -> Result<f64> {
        self.require_dim(2)?;
        if target_index != 1 && target_index != 2 {
            return Err(Error::IndexOutOfRange(format!("target index {target_index}, expected 1 or 2")));
        }
        Ok(self.cond_dist(target_index - 1, value_at_other, x))
    }

    /// Probability mass of the axis-aligned box `[lower, upper]`.
    pub fn rect_prob(&self, lower: &[f64], upper: &[f64]) -> Result<f64> {
        self.require_dim(lower.len())?;
        self.require_dim(upper.len())?;
        for (coord, (&l, &u)) in lower.iter().zip(upper).enumerate() {
            if l.is_nan() || u.is_nan() {
                return Err(Error::InvalidParameter("NaN bound".into()));
            }
            if l > u {
                return Err(Error::Ordering { coord: coord + 1, lower: l, upper: u });
            }
        }
        if lower == upper {
            return Ok(0.0);
        }
        Ok(if self.dim() == 2 {
            self.bvn_rect(lower[0], lower[1], upper[0], upper[1])
        } else {
            self.mass(lower[0], upper[0])
        })
    }

    /// `n` independent draws.
    pub fn sample(&self, n: usize, rng: &mut SymRng) -> Result<DataMatrix> {
        if n == 0 {
            return Err(Error::InvalidParameter("sample size must be at least 1".into()));
        }
        let t = &self.theta;
        let mut z = || -> f64 { rng.sample(StandardNormal) };
        let values: Vec<f64> = match self.kind {
            FamilyKind::Normal1D => (0..n).map(|_| t[0] + t[1] * z()).collect(),
            FamilyKind::LogNormal1D => (0..n).map(|_| (t[0] + t[1] * z()).exp()).collect(),
            FamilyKind::SkewNormal1D => {
                let sp = self.skew.expect("skew params");
                let delta = sp.delta();
                let c = (1.0 - delta * delta).sqrt();
                (0..n)
                    .map(|_| {
                        let u0 = z().abs();
                        let u1 = z();
                        sp.xi + sp.omega * (delta * u0 + c * u1)
                    })
                    .collect()
            }
            FamilyKind::Uniform1D => (0..n).map(|_| t[0] + (t[1] - t[0]) * rng.random::<f64>()).collect(),
            FamilyKind::BivariateNormal => {
                let c = (1.0 - t[4] * t[4]).sqrt();
                let mut v = Vec::with_capacity(2 * n);
                for _ in 0..n {
                    let z1 = z();
                    let z2 = z();
                    v.push(t[0] + t[2] * z1);
                    v.push(t[1] + t[3] * (t[4] * z1 + c * z2));
                }
                v
            }
        };
        DataMatrix::new(values, self.dim())
    }

    // ---- unconstrained parameterisation ----

    /// Maps θ to the unconstrained coordinates used by the optimiser.
    pub fn to_unconstrained(&self) -> Vec<f64> {
        let t = &self.theta;
        match self.kind {
            FamilyKind::Normal1D | FamilyKind::LogNormal1D => vec![t[0], t[1].ln()],
            FamilyKind::SkewNormal1D => vec![t[0], t[1].ln(), t[2]],
            FamilyKind::Uniform1D => vec![t[0], (t[1] - t[0]).ln()],
            FamilyKind::BivariateNormal => vec![t[0], t[1], t[2].ln(), t[3].ln(), t[4].atanh()],
        }
    }

    /// Inverse of [`Family::to_unconstrained`].
    pub fn from_unconstrained(kind: FamilyKind, u: &[f64]) -> Result<Self> {
        if u.len() != kind.n_params() {
            return Err(Error::Dimension { expected: kind.n_params(), got: u.len() });
        }
        let theta: Vec<f64> = match kind {
            FamilyKind::Normal1D | FamilyKind::LogNormal1D => vec![u[0], u[1].exp()],
            FamilyKind::SkewNormal1D => vec![u[0], u[1].exp(), u[2]],
            FamilyKind::Uniform1D => vec![u[0], u[0] + u[1].exp()],
            FamilyKind::BivariateNormal => vec![u[0], u[1], u[2].exp(), u[3].exp(), u[4].tanh()],
        };
        Family::new(kind, &theta)
    }

    /// Population mean and standard deviation of a univariate family.
    pub fn mean_sd(&self) -> Result<(f64, f64)> {
        self.require_dim(1)?;
        let t = &self.theta;
        Ok(match self.kind {
            FamilyKind::Normal1D => (t[0], t[1]),
            FamilyKind::LogNormal1D => {
                let m = (t[0] + 0.5 * t[1] * t[1]).exp();
                (m, m * (t[1] * t[1]).exp_m1().sqrt())
            }
            FamilyKind::SkewNormal1D => (t[0], t[1].sqrt()),
            FamilyKind::Uniform1D => (0.5 * (t[0] + t[1]), (t[1] - t[0]) / 12f64.sqrt()),
            FamilyKind::BivariateNormal => unreachable!(),
        })
    }
}
