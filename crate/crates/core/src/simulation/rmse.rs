use super::mean_sd;
use crate::distributions::{Family, FamilyKind};
use crate::error::{Error, Result};
use crate::estimation::{fit_mle, FitOptions};
use crate::rng::derive_stream;
use crate::symbols::{make_hist_random, make_interval, Symbol};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

fn default_replicates() -> usize {
    2000
}

/// Relative efficiency of symmetric order-statistic symbols for a normal
/// sample of size `n = 4Q + 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RmseConfig {
    pub n: usize,
    pub mu0: f64,
    pub sigma0: f64,
    #[serde(default = "default_replicates")]
    pub replicates: usize,
    /// Set by the caller; never read from configuration files.
    #[serde(default, skip_deserializing)]
    pub master_seed: u64,
}

impl RmseConfig {
    pub fn q(&self) -> Result<usize> {
        if self.n < 5 || self.n % 4 != 1 {
            return Err(Error::Config(format!("n = {} is not of the form 4Q + 1", self.n)));
        }
        Ok((self.n - 1) / 4)
    }

    pub fn scaled(&self, scale: f64) -> Self {
        let mut c = self.clone();
        c.replicates = ((self.replicates as f64 * scale).round() as usize).max(1);
        c
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SymbolKind {
    /// Sample mean and sd compared with themselves.
    Classical,
    /// Order statistics `(i, n + 1 − i)`.
    Interval,
    /// Order statistics `(i, 2Q + 1, n + 1 − i)`.
    Histogram,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RmseRow {
    pub kind: SymbolKind,
    pub i: usize,
    /// `(n + 1 − i) / n`.
    pub q: f64,
    pub rmse_mu: f64,
    pub rmse_sigma: f64,
    /// Replicates whose fit converged.
    pub used: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RmseCurve {
    pub n: usize,
    pub replicates: usize,
    pub rows: Vec<RmseRow>,
}

impl RmseCurve {
    pub fn row(&self, kind: SymbolKind, i: usize) -> Option<&RmseRow> {
        self.rows.iter().find(|r| r.kind == kind && r.i == i)
    }
}

struct ReplicateFits {
    mean: f64,
    sd: f64,
    // (μ̂, σ̃) per i for intervals then histograms
    interval: Vec<Option<(f64, f64)>>,
    histogram: Vec<Option<(f64, f64)>>,
}

fn fit_one(sym: Symbol, theta0: &[f64], n: usize) -> Option<(f64, f64)> {
    let opts = FitOptions::default();
    let fit = fit_mle(&[sym], FamilyKind::Normal1D, theta0, &opts).ok()?;
    fit.converged.then(|| (fit.theta_hat[0], (n as f64 / (n as f64 - 1.0)).sqrt() * fit.theta_hat[1]))
}

/// Fits every interval and histogram symbol of each replicate sample and
/// reports squared-error ratios against the sample mean and sd.
pub fn run_rmse_study(cfg: &RmseConfig) -> Result<RmseCurve> {
    let q = cfg.q()?;
    if cfg.replicates == 0 {
        return Err(Error::Config("replicates must be at least 1".into()));
    }
    let n = cfg.n;
    let fam = Family::normal(cfg.mu0, cfg.sigma0)?;
    let theta0 = [cfg.mu0, cfg.sigma0];
    let reps: Vec<Result<ReplicateFits>> = (0..cfg.replicates)
        .into_par_iter()
        .map(|t| {
            let mut rng = derive_stream(cfg.master_seed, t as u64);
            let x = fam.sample(n, &mut rng)?.column(0);
            let (mean, sd) = mean_sd(&x);
            let mut interval = Vec::with_capacity(2 * q);
            let mut histogram = Vec::with_capacity(2 * q);
            for i in 1..=2 * q {
                let iv = Symbol::Interval(make_interval(&x, i, n + 1 - i)?);
                interval.push(fit_one(iv, &theta0, n));
                let h = Symbol::HistRandom(make_hist_random(&x, &[i, 2 * q + 1, n + 1 - i])?);
                histogram.push(fit_one(h, &theta0, n));
            }
            Ok(ReplicateFits { mean, sd, interval, histogram })
        })
        .collect();
    let reps: Vec<ReplicateFits> = reps.into_iter().collect::<Result<_>>()?;

    let ratio = |pick: &dyn Fn(&ReplicateFits) -> Option<(f64, f64)>| -> (f64, f64, usize) {
        let (mut nm, mut dm, mut ns, mut ds, mut used) = (0.0, 0.0, 0.0, 0.0, 0);
        for r in &reps {
            if let Some((m, s)) = pick(r) {
                nm += (m - cfg.mu0).powi(2);
                ns += (s - cfg.sigma0).powi(2);
                dm += (r.mean - cfg.mu0).powi(2);
                ds += (r.sd - cfg.sigma0).powi(2);
                used += 1;
            }
        }
        (nm / dm, ns / ds, used)
    };
    let mut rows = Vec::with_capacity(4 * q + 1);
    let (rm, rs, used) = ratio(&|r| Some((r.mean, r.sd)));
    rows.push(RmseRow { kind: SymbolKind::Classical, i: 0, q: f64::NAN, rmse_mu: rm, rmse_sigma: rs, used });
    for (kind, get) in [
        (SymbolKind::Interval, (|r: &ReplicateFits, j: usize| r.interval[j]) as fn(&ReplicateFits, usize) -> _),
        (SymbolKind::Histogram, |r: &ReplicateFits, j: usize| r.histogram[j]),
    ] {
        for i in 1..=2 * q {
            let (rm, rs, used) = ratio(&|r| get(r, i - 1));
            let qv = (n + 1 - i) as f64 / n as f64;
            rows.push(RmseRow { kind, i, q: qv, rmse_mu: rm, rmse_sigma: rs, used });
        }
    }
    Ok(RmseCurve { n, replicates: cfg.replicates, rows })
}
