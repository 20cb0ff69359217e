use super::SymbolSpec;
use crate::distributions::{Family, FamilyKind};
use crate::error::{Error, Result};
use crate::estimation::{fit_mle, FitOptions};
use crate::likelihood::RectLikelihood;
use crate::rng::derive_stream;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF};
use std::time::Instant;

fn default_max_iter() -> usize {
    5000
}

fn default_tol() -> f64 {
    1e-9
}

/// Published mean and standard deviation of one parameter's estimates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Expectation {
    pub param: String,
    pub mean: f64,
    pub sd: f64,
}

/// One replicated estimation experiment: `replicates` datasets of `m`
/// classes with `n_c` rows each, drawn from `family(theta0)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub family: FamilyKind,
    pub theta0: Vec<f64>,
    pub m: usize,
    pub n_c: usize,
    pub replicates: usize,
    pub symbol: SymbolSpec,
    #[serde(default)]
    pub rect: RectLikelihood,
    /// Set by the caller; never read from configuration files.
    #[serde(default, skip_deserializing)]
    pub master_seed: u64,
    #[serde(default = "default_max_iter")]
    pub max_iter: usize,
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default)]
    pub expect: Vec<Expectation>,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.replicates == 0 || self.m == 0 || self.n_c == 0 {
            return Err(Error::Config("replicates, m and n_c must all be at least 1".into()));
        }
        let fam = Family::new(self.family, &self.theta0)?;
        self.symbol.check_dim(fam.dim())?;
        for e in &self.expect {
            self.param_index(&e.param)?;
        }
        Ok(())
    }

    pub fn param_index(&self, name: &str) -> Result<usize> {
        self.family
            .param_names()
            .iter()
            .position(|p| *p == name)
            .ok_or_else(|| Error::Config(format!("{} has no parameter '{name}'", self.family)))
    }

    /// Copy with the replicate count multiplied by `scale` (at least one).
    pub fn scaled(&self, scale: f64) -> Self {
        let mut c = self.clone();
        c.replicates = ((self.replicates as f64 * scale).round() as usize).max(1);
        c
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplicateOutcome {
    pub index: usize,
    pub theta_hat: Option<Vec<f64>>,
    pub loglik: Option<f64>,
    pub converged: bool,
    pub error: Option<String>,
}

impl ReplicateOutcome {
    fn usable(&self) -> Option<&[f64]> {
        if self.converged {
            self.theta_hat.as_deref()
        } else {
            None
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSummary {
    pub param_names: Vec<String>,
    pub replicates: usize,
    pub used: usize,
    pub failures: usize,
    pub mean: Vec<f64>,
    /// Absent with fewer than two usable replicates.
    pub sd: Option<Vec<f64>>,
    pub wall_time_s: f64,
    pub outcomes: Vec<ReplicateOutcome>,
}

/// Outcome of comparing a summary with an [`Expectation`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExpectationCheck {
    pub param: String,
    pub target_mean: f64,
    pub mean: f64,
    /// Three standard errors of the published mean at the replicate count used.
    pub mean_tolerance: f64,
    pub target_sd: f64,
    pub sd: Option<f64>,
    /// 99% chi-square band for the sample sd when the population sd is the target.
    pub sd_band: Option<(f64, f64)>,
    pub passed: bool,
}

impl ExperimentSummary {
    pub fn check(&self, cfg: &ExperimentConfig, e: &Expectation) -> Result<ExpectationCheck> {
        let j = cfg.param_index(&e.param)?;
        let t = self.used as f64;
        let mean = self.mean[j];
        let mean_tolerance = 3.0 * e.sd / t.sqrt();
        let sd = self.sd.as_ref().map(|s| s[j]);
        let sd_band = if self.used >= 2 {
            let chi = ChiSquared::new(t - 1.0).map_err(|e| Error::Numerical(e.to_string()))?;
            let lo = e.sd * (chi.inverse_cdf(0.005) / (t - 1.0)).sqrt();
            let hi = e.sd * (chi.inverse_cdf(0.995) / (t - 1.0)).sqrt();
            Some((lo, hi))
        } else {
            None
        };
        let sd_ok = match (sd, sd_band) {
            (Some(s), Some((lo, hi))) => lo <= s && s <= hi,
            _ => true,
        };
        Ok(ExpectationCheck {
            param: e.param.clone(),
            target_mean: e.mean,
            mean,
            mean_tolerance,
            target_sd: e.sd,
            sd,
            sd_band,
            passed: (mean - e.mean).abs() <= mean_tolerance && sd_ok,
        })
    }
}

fn replicate(cfg: &ExperimentConfig, fam: &Family, index: usize) -> ReplicateOutcome {
    let mut rng = derive_stream(cfg.master_seed, index as u64);
    let mut run = || -> Result<_> {
        let mut symbols = Vec::with_capacity(cfg.m);
        for _ in 0..cfg.m {
            let x = fam.sample(cfg.n_c, &mut rng)?;
            symbols.push(cfg.symbol.build(&x)?);
        }
        let rect = match cfg.rect {
            RectLikelihood::Marginalized { mc_samples, .. } => {
                RectLikelihood::Marginalized { mc_samples, seed: rng.random() }
            }
            other => other,
        };
        let opts = FitOptions { max_iter: cfg.max_iter, tol: cfg.tol, rect, ..Default::default() };
        fit_mle(&symbols, cfg.family, &cfg.theta0, &opts)
    };
    match run() {
        Ok(fit) => ReplicateOutcome {
            index,
            converged: fit.converged,
            loglik: Some(fit.loglik_at_max),
            theta_hat: Some(fit.theta_hat),
            error: None,
        },
        Err(e) => ReplicateOutcome { index, theta_hat: None, loglik: None, converged: false, error: Some(e.to_string()) },
    }
}

/// Runs every replicate (in parallel on the current rayon pool) and
/// summarises the converged estimates in replicate order.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentSummary> {
    cfg.validate()?;
    let start = Instant::now();
    let fam = Family::new(cfg.family, &cfg.theta0)?;
    let outcomes: Vec<ReplicateOutcome> =
        (0..cfg.replicates).into_par_iter().map(|r| replicate(cfg, &fam, r)).collect();
    for o in outcomes.iter().filter(|o| o.usable().is_none()) {
        log::warn!("replicate {} unusable: {}", o.index, o.error.as_deref().unwrap_or("not converged"));
    }
    let used: Vec<&[f64]> = outcomes.iter().filter_map(ReplicateOutcome::usable).collect();
    if used.is_empty() {
        return Err(Error::Numerical("no replicate produced a converged fit".into()));
    }
    let k = cfg.family.n_params();
    let t = used.len() as f64;
    let mean: Vec<f64> = (0..k).map(|j| used.iter().map(|v| v[j]).sum::<f64>() / t).collect();
    let sd = (used.len() >= 2).then(|| {
        (0..k)
            .map(|j| (used.iter().map(|v| (v[j] - mean[j]).powi(2)).sum::<f64>() / (t - 1.0)).sqrt())
            .collect()
    });
    Ok(ExperimentSummary {
        param_names: cfg.family.param_names().iter().map(|s| s.to_string()).collect(),
        replicates: cfg.replicates,
        used: used.len(),
        failures: cfg.replicates - used.len(),
        mean,
        sd,
        wall_time_s: start.elapsed().as_secs_f64(),
        outcomes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn classical_cfg(replicates: usize) -> ExperimentConfig {
        ExperimentConfig {
            family: FamilyKind::Normal1D,
            theta0: vec![1.0, 2.0],
            m: 4,
            n_c: 10,
            replicates,
            symbol: SymbolSpec::Classical,
            rect: RectLikelihood::Full,
            master_seed: 11,
            max_iter: 5000,
            tol: 1e-13,
            expect: vec![],
        }
    }

    #[test]
    fn single_replicate_has_no_sd() {
        let s = run_experiment(&classical_cfg(1)).unwrap();
        assert_eq!(s.used, 1);
        assert!(s.sd.is_none());
    }

    #[test]
    fn reproducible_and_pool_size_independent() {
        let cfg = classical_cfg(12);
        let a = run_experiment(&cfg).unwrap();
        let pool = rayon::ThreadPoolBuilder::new().num_threads(3).build().unwrap();
        let b = pool.install(|| run_experiment(&cfg)).unwrap();
        assert_eq!(a.outcomes, b.outcomes);
        assert_eq!(a.mean, b.mean);
        assert_eq!(a.sd, b.sd);
    }

    #[test]
    fn classical_symbols_give_the_pooled_mle() {
        // every replicate's μ̂ is the pooled sample mean of its m·n_c rows
        let cfg = classical_cfg(5);
        let s = run_experiment(&cfg).unwrap();
        let fam = Family::normal(1.0, 2.0).unwrap();
        for o in &s.outcomes {
            let mut rng = derive_stream(cfg.master_seed, o.index as u64);
            let mut all = vec![];
            for _ in 0..cfg.m {
                all.extend(fam.sample(cfg.n_c, &mut rng).unwrap().column(0));
            }
            let mean = all.iter().sum::<f64>() / all.len() as f64;
            assert!((o.theta_hat.as_ref().unwrap()[0] - mean).abs() < 1e-6);
        }
    }

    #[test]
    fn scale_and_validation() {
        assert_eq!(classical_cfg(100).scaled(0.1).replicates, 10);
        assert_eq!(classical_cfg(100).scaled(0.0).replicates, 1);
        let mut bad = classical_cfg(3);
        bad.symbol = SymbolSpec::RectMinmax;
        assert!(bad.validate().is_err());
        bad = classical_cfg(3);
        bad.expect.push(Expectation { param: "rho".into(), mean: 0.0, sd: 1.0 });
        assert!(bad.validate().is_err());
    }

    #[test]
    fn chi_square_band_matches_tables() {
        let cfg = classical_cfg(100);
        let s = ExperimentSummary {
            param_names: vec![],
            replicates: 100,
            used: 100,
            failures: 0,
            mean: vec![1.0, 2.0],
            sd: Some(vec![0.2, 0.3]),
            wall_time_s: 0.0,
            outcomes: vec![],
        };
        let c = s.check(&cfg, &Expectation { param: "mu".into(), mean: 1.0, sd: 0.2 }).unwrap();
        // chi-square(99) quantiles 66.5101 and 138.9868
        let (lo, hi) = c.sd_band.unwrap();
        assert!((lo - 0.2 * (66.5101f64 / 99.0).sqrt()).abs() < 1e-5);
        assert!((hi - 0.2 * (138.9868f64 / 99.0).sqrt()).abs() < 1e-5);
        assert!(c.passed);
        assert!((c.mean_tolerance - 0.06).abs() < 1e-15);
    }
}
