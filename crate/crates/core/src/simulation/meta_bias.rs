use super::mean_sd;
use crate::distributions::{Family, FamilyKind};
use crate::error::{Error, Result};
use crate::estimation::meta::five_number_orders;
use crate::estimation::{meta_mean_luo, meta_sd_shi, meta_sd_wan, meta_symbolic, MetaMethod};
use crate::rng::derive_stream;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

fn default_replicates() -> usize {
    1000
}

fn all_methods() -> Vec<MetaMethod> {
    vec![MetaMethod::Luo, MetaMethod::Wan, MetaMethod::Shi, MetaMethod::SymbolicNormal, MetaMethod::SymbolicLogNormal]
}

/// Bias of five-number-summary estimators of the sample mean and sd.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MetaBiasConfig {
    pub population: FamilyKind,
    pub theta0: Vec<f64>,
    /// Sample sizes, each of the form 4Q + 1.
    pub ns: Vec<usize>,
    #[serde(default = "default_replicates")]
    pub replicates: usize,
    /// Set by the caller; never read from configuration files.
    #[serde(default, skip_deserializing)]
    pub master_seed: u64,
    #[serde(default = "all_methods")]
    pub methods: Vec<MetaMethod>,
}

impl MetaBiasConfig {
    pub fn scaled(&self, scale: f64) -> Self {
        let mut c = self.clone();
        c.replicates = ((self.replicates as f64 * scale).round() as usize).max(2);
        c
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Statistic {
    Mean,
    Sd,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetaBiasRow {
    pub n: usize,
    pub method: MetaMethod,
    pub statistic: Statistic,
    /// Mean of (estimate − sample statistic).
    pub bias: f64,
    pub se: f64,
    pub lower: f64,
    pub upper: f64,
    pub used: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetaBiasTable {
    pub rows: Vec<MetaBiasRow>,
}

impl MetaBiasTable {
    pub fn get(&self, n: usize, method: MetaMethod, statistic: Statistic) -> Option<&MetaBiasRow> {
        self.rows.iter().find(|r| r.n == n && r.method == method && r.statistic == statistic)
    }
}

fn targets(method: MetaMethod) -> &'static [Statistic] {
    match method {
        MetaMethod::Luo => &[Statistic::Mean],
        MetaMethod::Wan | MetaMethod::Shi => &[Statistic::Sd],
        MetaMethod::SymbolicNormal | MetaMethod::SymbolicLogNormal => &[Statistic::Mean, Statistic::Sd],
    }
}

// (mean estimate, sd estimate) or None when the estimator fails
fn estimate(method: MetaMethod, q: &[f64; 5], n: usize) -> Option<(Option<f64>, Option<f64>)> {
    Some(match method {
        MetaMethod::Luo => (Some(meta_mean_luo(q, n).ok()?), None),
        MetaMethod::Wan => (None, Some(meta_sd_wan(q, n).ok()?)),
        MetaMethod::Shi => (None, Some(meta_sd_shi(q, n).ok()?)),
        MetaMethod::SymbolicNormal => {
            let e = meta_symbolic(q, n, FamilyKind::Normal1D).ok()?;
            (e.mean_hat, e.sd_hat)
        }
        MetaMethod::SymbolicLogNormal => {
            let e = meta_symbolic(q, n, FamilyKind::LogNormal1D).ok()?;
            (e.mean_hat, e.sd_hat)
        }
    })
}

/// For each sample size, averages estimator errors against the true sample
/// mean and sd over independent replicate samples.
pub fn run_meta_bias_study(cfg: &MetaBiasConfig) -> Result<MetaBiasTable> {
    if !matches!(cfg.population, FamilyKind::Normal1D | FamilyKind::LogNormal1D) {
        return Err(Error::Config("population must be normal or lognormal".into()));
    }
    if cfg.replicates < 2 {
        return Err(Error::Config("at least two replicates are needed".into()));
    }
    let fam = Family::new(cfg.population, &cfg.theta0)?;
    let mut rows = Vec::new();
    for &n in &cfg.ns {
        let k = five_number_orders(n).map_err(|e| Error::Config(e.to_string()))?;
        // errors[method][statistic] per replicate
        let per_rep: Vec<Vec<[Option<f64>; 2]>> = (0..cfg.replicates)
            .into_par_iter()
            .map(|t| {
                let mut rng = derive_stream(cfg.master_seed, ((n as u64) << 32) | t as u64);
                let mut x = fam.sample(n, &mut rng).expect("n >= 5").column(0);
                let (m0, s0) = mean_sd(&x);
                x.sort_by(f64::total_cmp);
                let q = k.map(|i| x[i - 1]);
                cfg.methods
                    .iter()
                    .map(|&method| match estimate(method, &q, n) {
                        Some((m, s)) => [m.map(|v| v - m0), s.map(|v| v - s0)],
                        None => [None, None],
                    })
                    .collect()
            })
            .collect();
        for (mi, &method) in cfg.methods.iter().enumerate() {
            for &stat in targets(method) {
                let col = if stat == Statistic::Mean { 0 } else { 1 };
                let errs: Vec<f64> = per_rep.iter().filter_map(|r| r[mi][col]).collect();
                if errs.len() < 2 {
                    log::warn!("{} at n = {n}: fewer than two successful estimates", method.name());
                    continue;
                }
                let (bias, sd) = mean_sd(&errs);
                let se = sd / (errs.len() as f64).sqrt();
                rows.push(MetaBiasRow {
                    n,
                    method,
                    statistic: stat,
                    bias,
                    se,
                    lower: bias - 1.96 * se,
                    upper: bias + 1.96 * se,
                    used: errs.len(),
                });
            }
        }
    }
    Ok(MetaBiasTable { rows })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn symbolic_sd_is_exact_at_n5_and_wan_overestimates_lognormal() {
        let cfg = MetaBiasConfig {
            population: FamilyKind::Normal1D,
            theta0: vec![50.0, 17.0],
            ns: vec![5],
            replicates: 50,
            master_seed: 9,
            methods: vec![MetaMethod::SymbolicNormal],
        };
        let t = run_meta_bias_study(&cfg).unwrap();
        let r = t.get(5, MetaMethod::SymbolicNormal, Statistic::Sd).unwrap();
        assert!(r.bias.abs() < 1e-5, "{r:?}");
        assert_eq!(r.used, 50);

        let cfg = MetaBiasConfig {
            population: FamilyKind::LogNormal1D,
            theta0: vec![4.0, 0.3],
            ns: vec![9],
            replicates: 400,
            master_seed: 9,
            methods: vec![MetaMethod::Wan],
        };
        let t = run_meta_bias_study(&cfg).unwrap();
        assert!(t.get(9, MetaMethod::Wan, Statistic::Sd).unwrap().lower > 0.0);
    }
}
