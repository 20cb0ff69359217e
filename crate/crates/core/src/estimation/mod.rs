//! Maximum likelihood fitting over symbols.

pub mod meta;
pub mod nelder_mead;

use crate::distributions::{Family, FamilyKind};
use crate::error::{Error, Result};
use crate::likelihood::{dataset_loglik_with, RectLikelihood};
use crate::rng::seeded;
use crate::symbols::Symbol;
use nalgebra::DMatrix;
use nelder_mead::{minimize, NelderMeadOptions};
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

pub use meta::{meta_mean_luo, meta_sd_shi, meta_sd_wan, meta_symbolic, MetaEstimates, MetaMethod};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitOptions {
    pub max_iter: usize,
    pub tol: f64,
    pub rect: RectLikelihood,
    /// Number of jittered restarts tried when the local-optimum check fails.
    pub restarts: usize,
    pub compute_stderr: bool,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self { max_iter: 5000, tol: 1e-9, rect: RectLikelihood::Full, restarts: 3, compute_stderr: false }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub family: FamilyKind,
    pub theta_hat: Vec<f64>,
    pub param_names: Vec<String>,
    pub loglik_at_max: f64,
    pub iterations: usize,
    pub converged: bool,
    pub local_optimum: bool,
    pub starts: usize,
    pub stderr: Option<Vec<f64>>,
    pub stderr_note: Option<String>,
    /// Unconstrained coordinates the optimiser worked in.
    pub transform: Vec<String>,
}

impl FitResult {
    pub fn fitted(&self) -> Result<Family> {
        Family::new(self.family, &self.theta_hat)
    }
}

fn transform_names(kind: FamilyKind) -> Vec<String> {
    let v: &[&str] = match kind {
        FamilyKind::Normal1D | FamilyKind::LogNormal1D => &["mu", "log sigma"],
        FamilyKind::SkewNormal1D => &["mean", "log variance", "shape"],
        FamilyKind::Uniform1D => &["a", "log(b - a)"],
        FamilyKind::BivariateNormal => &["mu1", "mu2", "log sigma1", "log sigma2", "atanh rho"],
    };
    v.iter().map(|s| s.to_string()).collect()
}

/// Log likelihood at unconstrained coordinates; invalid parameters map to −∞.
fn objective(symbols: &[Symbol], kind: FamilyKind, rect: RectLikelihood, u: &[f64]) -> f64 {
    match Family::from_unconstrained(kind, u) {
        Ok(fam) => dataset_loglik_with(symbols, &fam, rect).unwrap_or(f64::NEG_INFINITY),
        Err(_) => f64::NEG_INFINITY,
    }
}

fn local_step(u: f64) -> f64 {
    1e-4 * u.abs().max(1.0)
}

/// True when no coordinate-wise perturbation of `u` raises the log
/// likelihood by more than `10 * tol`.
fn is_local_optimum(symbols: &[Symbol], kind: FamilyKind, rect: RectLikelihood, u: &[f64], ll: f64, tol: f64) -> bool {
    for j in 0..u.len() {
        for sign in [-1.0, 1.0] {
            let mut v = u.to_vec();
            v[j] += sign * local_step(u[j]);
            if objective(symbols, kind, rect, &v) > ll + 10.0 * tol {
                return false;
            }
        }
    }
    true
}

/// Maximises the dataset log likelihood with Nelder–Mead in unconstrained
/// coordinates.
pub fn fit_mle(symbols: &[Symbol], kind: FamilyKind, theta0: &[f64], opts: &FitOptions) -> Result<FitResult> {
    if symbols.is_empty() {
        return Err(Error::InvalidSymbol("no symbols to fit".into()));
    }
    for s in symbols {
        s.validate()?;
    }
    let start = Family::new(kind, theta0)?;
    // surfaces structural errors (mixed types, wrong dimension) before optimising
    let ll0 = dataset_loglik_with(symbols, &start, opts.rect)?;
    if ll0 == f64::NEG_INFINITY {
        return Err(Error::ZeroLikelihoodStart);
    }
    let nm = NelderMeadOptions { max_iter: opts.max_iter, tol: opts.tol };
    let cost = |u: &[f64]| -objective(symbols, kind, opts.rect, u);
    let u0 = start.to_unconstrained();
    let mut best = minimize(cost, &u0, nm);
    let mut iterations = best.iterations;
    let mut starts = 1;
    let mut local = is_local_optimum(symbols, kind, opts.rect, &best.x, -best.value, opts.tol);
    if !local {
        let mut rng = seeded(0x5_eed0_ff17);
        let centre = best.x.clone();
        for _ in 0..opts.restarts {
            let jittered: Vec<f64> = centre
                .iter()
                .map(|&c| {
                    let z: f64 = rng.sample(StandardNormal);
                    c + 0.1 * c.abs().max(1.0) * z
                })
                .collect();
            let m = minimize(cost, &jittered, nm);
            iterations += m.iterations;
            starts += 1;
            if m.value < best.value {
                best = m;
            }
        }
        local = is_local_optimum(symbols, kind, opts.rect, &best.x, -best.value, opts.tol);
    }
    let fam = Family::from_unconstrained(kind, &best.x)?;
    let mut result = FitResult {
        family: kind,
        theta_hat: fam.theta().to_vec(),
        param_names: kind.param_names().iter().map(|s| s.to_string()).collect(),
        loglik_at_max: -best.value,
        iterations,
        converged: best.converged,
        local_optimum: local,
        starts,
        stderr: None,
        stderr_note: None,
        transform: transform_names(kind),
    };
    if !result.loglik_at_max.is_finite() {
        return Err(Error::Numerical("optimiser ended at a zero-likelihood point".into()));
    }
    if opts.compute_stderr {
        match stderr_hessian(&result, symbols, opts.rect) {
            Ok(se) => result.stderr = Some(se),
            Err(e) => result.stderr_note = Some(e.to_string()),
        }
    }
    Ok(result)
}

/// Standard errors from the inverse of the negative finite-difference
/// Hessian of the log likelihood in the original parameterisation.
pub fn stderr_hessian(fit: &FitResult, symbols: &[Symbol], rect: RectLikelihood) -> Result<Vec<f64>> {
    let theta = &fit.theta_hat;
    let k = theta.len();
    let eval = |t: &[f64]| -> Result<f64> {
        let fam = Family::new(fit.family, t)?;
        let v = dataset_loglik_with(symbols, &fam, rect)?;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::Numerical("log likelihood not finite near the estimate".into()))
        }
    };
    let h: Vec<f64> = theta.iter().map(|t| 1e-4f64.max(1e-4 * t.abs())).collect();
    let shifted = |moves: &[(usize, f64)]| -> Vec<f64> {
        let mut t = theta.clone();
        for &(j, s) in moves {
            t[j] += s * h[j];
        }
        t
    };
    let f0 = eval(theta)?;
    let mut hess = DMatrix::<f64>::zeros(k, k);
    for i in 0..k {
        let fp = eval(&shifted(&[(i, 1.0)]))?;
        let fm = eval(&shifted(&[(i, -1.0)]))?;
        hess[(i, i)] = (fp - 2.0 * f0 + fm) / (h[i] * h[i]);
        for j in 0..i {
            let fpp = eval(&shifted(&[(i, 1.0), (j, 1.0)]))?;
            let fpm = eval(&shifted(&[(i, 1.0), (j, -1.0)]))?;
            let fmp = eval(&shifted(&[(i, -1.0), (j, 1.0)]))?;
            let fmm = eval(&shifted(&[(i, -1.0), (j, -1.0)]))?;
            let v = (fpp - fpm - fmp + fmm) / (4.0 * h[i] * h[j]);
            hess[(i, j)] = v;
            hess[(j, i)] = v;
        }
    }
    let info = -hess;
    let chol = info
        .cholesky()
        .ok_or_else(|| Error::Numerical("negative Hessian is not positive definite; standard errors unavailable".into()))?;
    let cov = chol.inverse();
    Ok((0..k).map(|i| cov[(i, i)].sqrt()).collect())
}
