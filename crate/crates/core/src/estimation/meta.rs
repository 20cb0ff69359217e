//! Estimating a sample mean and standard deviation from the five-number
//! summary (minimum, quartiles, median, maximum).

use super::{fit_mle, FitOptions};
use crate::distributions::normal::big_phi_inv;
use crate::distributions::FamilyKind;
use crate::error::{Error, Result};
use crate::symbols::{RandomBinHistogramSymbol, Symbol};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MetaMethod {
    Luo,
    Wan,
    Shi,
    SymbolicNormal,
    #[serde(rename = "symbolic_lognormal")]
    SymbolicLogNormal,
}

impl MetaMethod {
    pub fn name(self) -> &'static str {
        match self {
            MetaMethod::Luo => "luo",
            MetaMethod::Wan => "wan",
            MetaMethod::Shi => "shi",
            MetaMethod::SymbolicNormal => "symbolic_normal",
            MetaMethod::SymbolicLogNormal => "symbolic_lognormal",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Ok(match s.trim().to_ascii_lowercase().replace('-', "_").as_str() {
            "luo" => MetaMethod::Luo,
            "wan" => MetaMethod::Wan,
            "shi" => MetaMethod::Shi,
            "symbolic_normal" | "symbolic" => MetaMethod::SymbolicNormal,
            "symbolic_lognormal" => MetaMethod::SymbolicLogNormal,
            other => return Err(Error::Config(format!("unknown meta-analysis method '{other}'"))),
        })
    }
}

/// Mean and/or standard deviation estimate; quantile-only methods estimate
/// just one of the two.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetaEstimates {
    pub method: MetaMethod,
    pub mean_hat: Option<f64>,
    pub sd_hat: Option<f64>,
}

fn check_quantiles(q: &[f64; 5], n: usize) -> Result<()> {
    if n < 5 {
        return Err(Error::InvalidParameter(format!("n = {n} < 5")));
    }
    if q.iter().any(|v| !v.is_finite()) {
        return Err(Error::Data("quantiles must be finite".into()));
    }
    if q.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::Data(format!("quantiles {q:?} are not nondecreasing")));
    }
    Ok(())
}

/// Weighted combination of midrange, mid-quartile range and median.
pub fn meta_mean_luo(q: &[f64; 5], n: usize) -> Result<f64> {
    check_quantiles(q, n)?;
    let nf = n as f64;
    let w1 = 2.2 / (2.2 + nf.powf(0.75));
    let w2 = 0.7 - 0.72 / nf.powf(0.55);
    Ok(w1 * (q[0] + q[4]) / 2.0 + w2 * (q[1] + q[3]) / 2.0 + (1.0 - w1 - w2) * q[2])
}

fn degenerate(q: &[f64; 5]) -> bool {
    q[4] == q[0]
}

/// Range and interquartile range scaled by expected normal spacings.
pub fn meta_sd_wan(q: &[f64; 5], n: usize) -> Result<f64> {
    check_quantiles(q, n)?;
    if degenerate(q) {
        log::warn!("all quantiles equal; standard deviation estimate is 0");
        return Ok(0.0);
    }
    let nf = n as f64;
    let zeta = 2.0 * big_phi_inv((nf - 0.375) / (nf + 0.25));
    let eta = 2.0 * big_phi_inv((0.75 * nf - 0.125) / (nf + 0.25));
    Ok(0.5 * ((q[4] - q[0]) / zeta + (q[3] - q[1]) / eta))
}

/// Shi's weighted variant of the range and interquartile range scaling.
pub fn meta_sd_shi(q: &[f64; 5], n: usize) -> Result<f64> {
    check_quantiles(q, n)?;
    if degenerate(q) {
        log::warn!("all quantiles equal; standard deviation estimate is 0");
        return Ok(0.0);
    }
    let nf = n as f64;
    let theta1 = (2.0 + 0.14 * nf.powf(0.6)) * big_phi_inv((nf - 0.375) / (nf + 0.25));
    let theta2 = (2.0 + 2.0 / (0.07 * nf.powf(0.6))) * big_phi_inv((0.75 * nf - 0.125) / (nf + 0.25));
    Ok((q[4] - q[0]) / theta1 + (q[3] - q[1]) / theta2)
}

/// Order indices of the five-number summary of `n = 4Q + 1` points.
pub fn five_number_orders(n: usize) -> Result<[usize; 5]> {
    if n < 5 || n % 4 != 1 {
        return Err(Error::InvalidParameter(format!("n = {n} is not of the form 4Q + 1 with Q >= 1")));
    }
    let q = (n - 1) / 4;
    Ok([1, q + 1, 2 * q + 1, 3 * q + 1, n])
}

/// Fits a normal or lognormal model to the five-number summary treated as a
/// random-bin histogram, and reports the fitted population mean and the
/// fitted standard deviation scaled by √(n/(n−1)).
pub fn meta_symbolic(q: &[f64; 5], n: usize, base: FamilyKind) -> Result<MetaEstimates> {
    check_quantiles(q, n)?;
    let k = five_number_orders(n)?;
    if q.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Data(format!("quantiles {q:?} must be strictly increasing")));
    }
    let method = match base {
        FamilyKind::Normal1D => MetaMethod::SymbolicNormal,
        FamilyKind::LogNormal1D => MetaMethod::SymbolicLogNormal,
        other => return Err(Error::Unsupported(format!("symbolic meta-analysis with {other}"))),
    };
    let theta0 = if base == FamilyKind::LogNormal1D {
        if q[0] <= 0.0 {
            return Err(Error::Data("lognormal base needs positive quantiles".into()));
        }
        let lq = q.map(f64::ln);
        [meta_mean_luo(&lq, n)?, meta_sd_wan(&lq, n)?]
    } else {
        [meta_mean_luo(q, n)?, meta_sd_wan(q, n)?]
    };
    let sym = Symbol::HistRandom(RandomBinHistogramSymbol { s: q.to_vec(), k: k.to_vec(), n });
    let opts = FitOptions { tol: 1e-13, max_iter: 20_000, ..Default::default() };
    let fit = fit_mle(&[sym], base, &theta0, &opts)?;
    let (mean, sd) = fit.fitted()?.mean_sd()?;
    let nf = n as f64;
    Ok(MetaEstimates { method, mean_hat: Some(mean), sd_hat: Some((nf / (nf - 1.0)).sqrt() * sd) })
}
