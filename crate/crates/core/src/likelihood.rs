//! Log symbolic likelihoods.
//!
//! Every evaluator returns the natural log of the exact likelihood including
//! its combinatorial constant. Zero-probability configurations give `-inf`;
//! a factor raised to the power zero contributes exactly zero whatever its
//! base.

use crate::data::DataMatrix;
use crate::distributions::bivariate::std_bvn_cdf;
use crate::distributions::normal::big_phi;
use crate::distributions::{Family, FamilyKind};
use crate::error::{Error, Result};
use crate::rng::{derive_stream, SymRng};
use crate::symbols::{
    Construction, FixedBinHistogramSymbol, IntervalSymbol, OrderRectSymbol, RandomBinHistogramSymbol,
    RectMinMaxSymbol, Symbol,
};
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use std::collections::hash_map::Entry;
use std::collections::HashMap;

/// ln k!
pub fn ln_factorial(k: usize) -> f64 {
    if k < 2 {
        0.0
    } else {
        libm::lgamma(k as f64 + 1.0)
    }
}

/// `e * ln(base)` with the conventions 0·ln(anything) = 0 and e·ln(0) = −∞.
fn pow_ln(e: usize, base: f64) -> f64 {
    if e == 0 {
        0.0
    } else if base > 0.0 {
        e as f64 * base.ln()
    } else {
        f64::NEG_INFINITY
    }
}

fn ln_pos(x: f64) -> f64 {
    if x > 0.0 {
        x.ln()
    } else {
        f64::NEG_INFINITY
    }
}

fn nan_guard(v: f64) -> Result<f64> {
    if v.is_nan() {
        Err(Error::Numerical("likelihood evaluated to NaN".into()))
    } else {
        Ok(v)
    }
}

/// Compensated (Neumaier) summation.
#[derive(Debug, Default, Clone, Copy)]
pub struct NeumaierSum {
    sum: f64,
    comp: f64,
}

impl NeumaierSum {
    pub fn add(&mut self, x: f64) {
        if x.is_infinite() || self.sum.is_infinite() {
            self.sum += x;
            return;
        }
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        if self.sum.is_infinite() {
            self.sum
        } else {
            self.sum + self.comp
        }
    }
}

fn require_univariate(family: &Family) -> Result<()> {
    if family.dim() != 1 {
        return Err(Error::Dimension { expected: 1, got: family.dim() });
    }
    Ok(())
}

fn require_bvn(family: &Family) -> Result<()> {
    if family.kind() != FamilyKind::BivariateNormal {
        return Err(Error::Unsupported(format!("rectangle likelihoods need a bivariate normal family, got {}", family.kind())));
    }
    Ok(())
}

// ---------------------------------------------------------------- intervals

/// Order-statistic interval likelihood.
pub fn loglik_interval(sym: &IntervalSymbol, family: &Family) -> Result<f64> {
    sym.validate()?;
    require_univariate(family)?;
    let (n, l, u) = (sym.n, sym.l, sym.u);
    let ll = ln_factorial(n) - ln_factorial(l - 1) - ln_factorial(u - l - 1) - ln_factorial(n - u)
        + pow_ln(l - 1, family.mass(f64::NEG_INFINITY, sym.s_l))
        + pow_ln(u - l - 1, family.mass(sym.s_l, sym.s_u))
        + pow_ln(n - u, family.mass(sym.s_u, f64::INFINITY))
        + family.ln_density(sym.s_l)
        + family.ln_density(sym.s_u);
    nan_guard(ll)
}

/// Random-bin histogram likelihood; bins are bounded by consecutive order
/// statistics with the two outer bins unbounded.
pub fn loglik_hist_random(sym: &RandomBinHistogramSymbol, family: &Family) -> Result<f64> {
    sym.validate()?;
    require_univariate(family)?;
    let mut ll = ln_factorial(sym.n);
    let mut prev_s = f64::NEG_INFINITY;
    let mut prev_k = 0;
    let ends = sym.s.iter().copied().chain(std::iter::once(f64::INFINITY));
    let ks = sym.k.iter().copied().chain(std::iter::once(sym.n + 1));
    for (s, k) in ends.zip(ks) {
        let c = k - prev_k - 1;
        ll += pow_ln(c, family.mass(prev_s, s)) - ln_factorial(c);
        if s.is_finite() {
            ll += family.ln_density(s);
        }
        prev_s = s;
        prev_k = k;
    }
    nan_guard(ll)
}

/// Fixed-bin histogram likelihood, renormalised to the grid hull.
pub fn loglik_hist_fixed(sym: &FixedBinHistogramSymbol, family: &Family) -> Result<f64> {
    sym.validate()?;
    if sym.grids.len() != family.dim() {
        return Err(Error::Dimension { expected: family.dim(), got: sym.grids.len() });
    }
    let probs = cell_probabilities(sym, family)?;
    let hull: f64 = probs.iter().sum();
    if hull.is_nan() || hull <= 0.0 {
        return Ok(f64::NEG_INFINITY);
    }
    let mut acc = NeumaierSum::default();
    acc.add(ln_factorial(sym.n));
    for (&c, &p) in sym.counts.iter().zip(&probs) {
        if c > 0 {
            acc.add(-ln_factorial(c as usize));
            acc.add(pow_ln(c as usize, p / hull));
        }
    }
    nan_guard(acc.value())
}

fn cell_probabilities(sym: &FixedBinHistogramSymbol, family: &Family) -> Result<Vec<f64>> {
    match family.dim() {
        1 => Ok(sym.grids[0].windows(2).map(|w| family.mass(w[0], w[1])).collect()),
        2 => {
            require_bvn(family)?;
            let (g1, g2) = (&sym.grids[0], &sym.grids[1]);
            let cdf: Vec<Vec<f64>> = g1.iter().map(|&a| g2.iter().map(|&b| family.bvn_cdf(a, b)).collect()).collect();
            let mut out = Vec::with_capacity((g1.len() - 1) * (g2.len() - 1));
            for i in 0..g1.len() - 1 {
                for j in 0..g2.len() - 1 {
                    let p = cdf[i + 1][j + 1] - cdf[i][j + 1] - cdf[i + 1][j] + cdf[i][j];
                    out.push(p.max(0.0));
                }
            }
            Ok(out)
        }
        d => Err(Error::Unsupported(format!("histograms over {d}-dimensional families"))),
    }
}

/// Product of per-margin interval likelihoods.
pub fn loglik_rect_marginal_orders(sym: &OrderRectSymbol, families: &[Family]) -> Result<f64> {
    sym.validate()?;
    if sym.construction != Construction::Marginal {
        return Err(Error::InvalidSymbol("expected a marginal-order rectangle".into()));
    }
    if families.len() != sym.d() {
        return Err(Error::Dimension { expected: sym.d(), got: families.len() });
    }
    let mut ll = 0.0;
    for (i, fam) in families.iter().enumerate() {
        let iv = IntervalSymbol { s_l: sym.s_l[i], s_u: sym.s_u[i], n: sym.n, l: sym.l[i], u: sym.u[i] };
        ll += loglik_interval(&iv, fam)?;
    }
    Ok(ll)
}

// ---------------------------------------------------------------- bivariate helpers

/// P(X1 ⋚ x1, X2 ⋚ x2); `upper` selects the “greater than” side.
fn orthant(f: &Family, x1: f64, upper1: bool, x2: f64, upper2: bool) -> f64 {
    let t = f.theta();
    let mut z1 = (x1 - t[0]) / t[2];
    let mut z2 = (x2 - t[1]) / t[3];
    let mut r = t[4];
    if upper1 {
        z1 = -z1;
        r = -r;
    }
    if upper2 {
        z2 = -z2;
        r = -r;
    }
    std_bvn_cdf(z1, z2, r)
}

/// Conditional probability that coordinate `target` lies in `(a, b)` given
/// the other coordinate equals `v`.
fn cond_mass(f: &Family, target: usize, v: f64, a: f64, b: f64) -> f64 {
    let t = f.theta();
    let (i, j) = if target == 0 { (1, 0) } else { (0, 1) };
    let (mu_i, mu_j, s_i, s_j, r) = (t[i], t[j], t[2 + i], t[2 + j], t[4]);
    let m = mu_j + r * s_j / s_i * (v - mu_i);
    let s = s_j * (1.0 - r * r).sqrt();
    let (za, zb) = ((a - m) / s, (b - m) / s);
    if za > 0.0 {
        (big_phi(-za) - big_phi(-zb)).max(0.0)
    } else {
        (big_phi(zb) - big_phi(za)).max(0.0)
    }
}

fn ln_marginal_density(f: &Family, coord: usize, x: f64) -> f64 {
    let t = f.theta();
    let z = (x - t[coord]) / t[2 + coord];
    crate::distributions::normal::ln_phi(z) - t[2 + coord].ln()
}

// ---------------------------------------------------------------- min/max rectangles

/// Which data rows built a min/max rectangle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RectConfig {
    /// p = 2, bottom-left and top-right.
    MainDiagonal,
    /// p = 2, top-left and bottom-right.
    AntiDiagonal,
    /// p = 3 with the doubly-extreme point at the given corner, encoded as
    /// (is_max_1, is_max_2).
    Corner(bool, bool),
    /// p = 4.
    Four,
}

impl RectConfig {
    pub const ALL: [RectConfig; 7] = [
        RectConfig::MainDiagonal,
        RectConfig::AntiDiagonal,
        RectConfig::Corner(false, false),
        RectConfig::Corner(true, false),
        RectConfig::Corner(false, true),
        RectConfig::Corner(true, true),
        RectConfig::Four,
    ];

    pub fn p(self) -> usize {
        match self {
            RectConfig::MainDiagonal | RectConfig::AntiDiagonal => 2,
            RectConfig::Corner(..) => 3,
            RectConfig::Four => 4,
        }
    }

    fn index(self) -> usize {
        RectConfig::ALL.iter().position(|&c| c == self).expect("listed")
    }

    /// Configuration recorded in a symbol.
    pub fn of(sym: &RectMinMaxSymbol) -> RectConfig {
        match sym.p {
            2 => {
                if sym.main_diagonal() {
                    RectConfig::MainDiagonal
                } else {
                    RectConfig::AntiDiagonal
                }
            }
            3 => {
                let c = &sym.locations[0];
                RectConfig::Corner(c[0] == sym.s_max[0], c[1] == sym.s_max[1])
            }
            _ => RectConfig::Four,
        }
    }
}

/// Log likelihood of the bounding box under a given construction
/// configuration.
pub fn loglik_rect_config(
    s_min: &[f64],
    s_max: &[f64],
    n: usize,
    config: RectConfig,
    family: &Family,
) -> Result<f64> {
    require_bvn(family)?;
    let p = config.p();
    if n < p {
        return Err(Error::Degenerate(format!("n = {n} is smaller than p = {p}")));
    }
    let f = family;
    let interior = f.bvn_rect(s_min[0], s_min[1], s_max[0], s_max[1]);
    let ext = |coord: usize, is_max: bool| if is_max { s_max[coord] } else { s_min[coord] };
    // point on the edge x_coord = v with the other coordinate free inside the box
    let edge = |coord: usize, v: f64| {
        let other = 1 - coord;
        ln_marginal_density(f, coord, v) + ln_pos(cond_mass(f, other, v, s_min[other], s_max[other]))
    };
    let ell = match config {
        RectConfig::MainDiagonal => {
            f.bvn_density(s_min[0], s_min[1]).ln() + f.bvn_density(s_max[0], s_max[1]).ln()
        }
        RectConfig::AntiDiagonal => {
            f.bvn_density(s_min[0], s_max[1]).ln() + f.bvn_density(s_max[0], s_min[1]).ln()
        }
        RectConfig::Corner(m1, m2) => {
            f.bvn_density(ext(0, m1), ext(1, m2)).ln() + edge(0, ext(0, !m1)) + edge(1, ext(1, !m2))
        }
        RectConfig::Four => edge(0, s_min[0]) + edge(0, s_max[0]) + edge(1, s_min[1]) + edge(1, s_max[1]),
    };
    let ll = ln_factorial(n) - ln_factorial(n - p) + pow_ln(n - p, interior) + ell;
    nan_guard(ll)
}

/// Min/max rectangle likelihood using the recorded construction points.
pub fn loglik_rect_full(sym: &RectMinMaxSymbol, family: &Family) -> Result<f64> {
    sym.validate()?;
    loglik_rect_config(&sym.s_min, &sym.s_max, sym.n, RectConfig::of(sym), family)
}

/// Min/max rectangle likelihood assuming four distinct construction points.
pub fn loglik_rect_2d(sym: &RectMinMaxSymbol, family: &Family) -> Result<f64> {
    let forced = RectMinMaxSymbol { p: 4, locations: vec![], ..sym.clone() };
    forced.validate()?;
    loglik_rect_config(&forced.s_min, &forced.s_max, forced.n, RectConfig::Four, family)
}

/// Minimum Monte Carlo size for configuration probabilities.
pub const MIN_MC_SAMPLES: usize = 1_000;
pub const DEFAULT_MC_SAMPLES: usize = 100_000;

/// Monte Carlo estimate of the probability of each construction
/// configuration for `n` bivariate normal points with correlation `rho`.
///
/// Configurations are invariant to marginal location and scale, so only
/// `rho` matters. The draws come from a clone of `rng`, giving common random
/// numbers across calls.
pub fn config_probabilities(n: usize, rho: f64, mc_samples: usize, rng: &SymRng) -> Result<[f64; 7]> {
    if mc_samples < MIN_MC_SAMPLES {
        return Err(Error::InvalidParameter(format!("mc_samples = {mc_samples} is below {MIN_MC_SAMPLES}")));
    }
    if n < 2 {
        return Err(Error::Degenerate(format!("n = {n} < 2")));
    }
    let mut rng = rng.clone();
    let c = (1.0 - rho * rho).sqrt();
    let mut counts = [0usize; 7];
    let mut x = vec![0.0; n];
    let mut y = vec![0.0; n];
    for _ in 0..mc_samples {
        for i in 0..n {
            let z1: f64 = rng.sample(StandardNormal);
            let z2: f64 = rng.sample(StandardNormal);
            x[i] = z1;
            y[i] = rho * z1 + c * z2;
        }
        counts[classify(&x, &y).index()] += 1;
    }
    Ok(counts.map(|k| k as f64 / mc_samples as f64))
}

fn argext(v: &[f64]) -> (usize, usize) {
    let (mut lo, mut hi) = (0, 0);
    for i in 1..v.len() {
        if v[i] < v[lo] {
            lo = i;
        }
        if v[i] > v[hi] {
            hi = i;
        }
    }
    (lo, hi)
}

/// Configuration generated by a sample with no ties.
pub fn classify(x: &[f64], y: &[f64]) -> RectConfig {
    let (xmin, xmax) = argext(x);
    let (ymin, ymax) = argext(y);
    let same = |a: usize, b: usize| a == b;
    let pairs = [same(xmin, ymin), same(xmin, ymax), same(xmax, ymin), same(xmax, ymax)];
    match pairs.iter().filter(|&&b| b).count() {
        0 => RectConfig::Four,
        1 => {
            if pairs[0] {
                RectConfig::Corner(false, false)
            } else if pairs[1] {
                RectConfig::Corner(false, true)
            } else if pairs[2] {
                RectConfig::Corner(true, false)
            } else {
                RectConfig::Corner(true, true)
            }
        }
        _ => {
            if pairs[0] {
                RectConfig::MainDiagonal
            } else {
                RectConfig::AntiDiagonal
            }
        }
    }
}

/// Likelihood of the bounding box alone, averaging the full likelihood over
/// construction configurations weighted by their estimated probabilities.
pub fn loglik_rect_marginalized(sym: &RectMinMaxSymbol, family: &Family, mc_samples: usize, rng: &SymRng) -> Result<f64> {
    require_bvn(family)?;
    let probs = config_probabilities(sym.n, family.theta()[4], mc_samples, rng)?;
    loglik_rect_marginalized_with(sym, family, &probs)
}

/// [`loglik_rect_marginalized`] with precomputed configuration probabilities.
pub fn loglik_rect_marginalized_with(sym: &RectMinMaxSymbol, family: &Family, probs: &[f64; 7]) -> Result<f64> {
    let bare = RectMinMaxSymbol { p: 4.min(sym.n), locations: vec![], ..sym.clone() };
    if bare.n >= 4 {
        bare.validate()?;
    }
    let mut terms = Vec::with_capacity(7);
    for (cfg, &w) in RectConfig::ALL.iter().zip(probs) {
        if cfg.p() > sym.n || w <= 0.0 {
            continue;
        }
        terms.push(loglik_rect_config(&sym.s_min, &sym.s_max, sym.n, *cfg, family)? + w.ln());
    }
    Ok(log_sum_exp(&terms))
}

fn log_sum_exp(v: &[f64]) -> f64 {
    let m = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return m;
    }
    m + v.iter().map(|x| (x - m).exp()).sum::<f64>().ln()
}

// ---------------------------------------------------------------- nested order rectangles

// symbol and family rotated so the first processed axis is coordinate 0
fn oriented(sym: &OrderRectSymbol, family: &Family) -> ([f64; 2], [f64; 2], [usize; 2], [usize; 2], Family) {
    let (a, b) = sym.axes();
    let fam = if a == 0 { *family } else { family.swapped() };
    (
        [sym.s_l[a], sym.s_l[b]],
        [sym.s_u[a], sym.s_u[b]],
        [sym.l[a], sym.l[b]],
        [sym.u[a], sym.u[b]],
        fam,
    )
}

/// Sequential-nesting rectangle likelihood.
pub fn loglik_rect_seq_nest(sym: &OrderRectSymbol, family: &Family) -> Result<f64> {
    sym.validate()?;
    if sym.construction != Construction::SeqNest {
        return Err(Error::InvalidSymbol("expected a sequential-nesting rectangle".into()));
    }
    require_bvn(family)?;
    let (sl, su, l, u, f) = oriented(sym, family);
    let n = sym.n;
    let above = u[0] - l[0] - 1 - u[1];
    let constant = ln_factorial(n)
        - ln_factorial(l[0] - 1)
        - ln_factorial(n - u[0])
        - ln_factorial(l[1] - 1)
        - ln_factorial(u[1] - l[1] - 1)
        - ln_factorial(above);
    let m1 = f.marginal(0)?;
    let band_below = orthant(&f, su[0], false, sl[1], false) - orthant(&f, sl[0], false, sl[1], false);
    let band_above = orthant(&f, su[0], false, su[1], true) - orthant(&f, sl[0], false, su[1], true);
    let ll = constant
        + pow_ln(l[0] - 1, m1.mass(f64::NEG_INFINITY, sl[0]))
        + pow_ln(n - u[0], m1.mass(su[0], f64::INFINITY))
        + ln_marginal_density(&f, 0, sl[0])
        + ln_marginal_density(&f, 0, su[0])
        + ln_marginal_density(&f, 1, sl[1])
        + ln_marginal_density(&f, 1, su[1])
        + ln_pos(cond_mass(&f, 0, sl[1], sl[0], su[0]))
        + ln_pos(cond_mass(&f, 0, su[1], sl[0], su[0]))
        + pow_ln(l[1] - 1, band_below.max(0.0))
        + pow_ln(u[1] - l[1] - 1, f.bvn_rect(sl[0], sl[1], su[0], su[1]))
        + pow_ln(above, band_above.max(0.0));
    nan_guard(ll)
}

/// Iterative-segmentation rectangle likelihood (upper index counted from the
/// bottom of the upper subset).
pub fn loglik_rect_iter_seg(sym: &OrderRectSymbol, family: &Family) -> Result<f64> {
    sym.validate()?;
    if sym.construction != Construction::IterSeg {
        return Err(Error::InvalidSymbol("expected an iterative-segmentation rectangle".into()));
    }
    require_bvn(family)?;
    let (sl, su, l, u, f) = oriented(sym, family);
    let n = sym.n;
    let constant = ln_factorial(n)
        - ln_factorial(l[1] - 1)
        - ln_factorial(l[0] - l[1] - 1)
        - ln_factorial(u[0] - l[0] - 1)
        - ln_factorial(u[1] - 1)
        - ln_factorial(n - u[0] - u[1]);
    let m1 = f.marginal(0)?;
    let ll = constant
        + pow_ln(u[0] - l[0] - 1, m1.mass(sl[0], su[0]))
        + ln_marginal_density(&f, 0, sl[0])
        + ln_marginal_density(&f, 0, su[0])
        + ln_marginal_density(&f, 1, sl[1])
        + ln_marginal_density(&f, 1, su[1])
        + ln_pos(cond_mass(&f, 0, sl[1], f64::NEG_INFINITY, sl[0]))
        + ln_pos(cond_mass(&f, 0, su[1], su[0], f64::INFINITY))
        + pow_ln(l[0] - l[1] - 1, orthant(&f, sl[0], false, sl[1], true))
        + pow_ln(u[1] - 1, orthant(&f, su[0], true, su[1], false))
        + pow_ln(l[1] - 1, orthant(&f, sl[0], false, sl[1], false))
        + pow_ln(n - u[0] - u[1], orthant(&f, su[0], true, su[1], true));
    nan_guard(ll)
}

// ---------------------------------------------------------------- datasets

/// Which likelihood to use for min/max rectangles.
#[derive(Debug, Default, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum RectLikelihood {
    /// Uses the recorded construction points.
    #[default]
    Full,
    /// Assumes four distinct construction points.
    FourPoint,
    /// Averages over construction configurations.
    Marginalized {
        mc_samples: usize,
        #[serde(default)]
        seed: u64,
    },
}

/// Log likelihood of a single symbol.
pub fn symbol_loglik(sym: &Symbol, family: &Family, rect: RectLikelihood) -> Result<f64> {
    match sym {
        Symbol::Interval(s) => loglik_interval(s, family),
        Symbol::HistRandom(s) => loglik_hist_random(s, family),
        Symbol::HistFixed(s) => loglik_hist_fixed(s, family),
        Symbol::RectMinmax(s) => match rect {
            RectLikelihood::Full => loglik_rect_full(s, family),
            RectLikelihood::FourPoint => loglik_rect_2d(s, family),
            RectLikelihood::Marginalized { mc_samples, seed } => {
                loglik_rect_marginalized(s, family, mc_samples, &derive_stream(seed, s.n as u64))
            }
        },
        Symbol::RectOrder(s) => match s.construction {
            Construction::SeqNest => loglik_rect_seq_nest(s, family),
            Construction::IterSeg => loglik_rect_iter_seg(s, family),
            Construction::Marginal => {
                if s.d() == 1 {
                    loglik_rect_marginal_orders(s, &[*family])
                } else {
                    require_bvn(family)?;
                    loglik_rect_marginal_orders(s, &[family.marginal(0)?, family.marginal(1)?])
                }
            }
        },
    }
}

/// Log likelihood of a list of symbols of one type (sum over symbols, in
/// list order, with compensated summation).
pub fn dataset_loglik(symbols: &[Symbol], family: &Family) -> Result<f64> {
    dataset_loglik_with(symbols, family, RectLikelihood::Full)
}

/// [`dataset_loglik`] with an explicit rectangle likelihood.
pub fn dataset_loglik_with(symbols: &[Symbol], family: &Family, rect: RectLikelihood) -> Result<f64> {
    let Some(first) = symbols.first() else {
        return Ok(0.0);
    };
    if let Some(other) = symbols.iter().find(|s| s.type_name() != first.type_name()) {
        return Err(Error::MixedSymbols(first.type_name(), other.type_name()));
    }
    let mut acc = NeumaierSum::default();
    if let (RectLikelihood::Marginalized { mc_samples, seed }, Symbol::RectMinmax(_)) = (rect, first) {
        require_bvn(family)?;
        // one Monte Carlo estimate per distinct n
        let mut cache: HashMap<usize, [f64; 7]> = HashMap::new();
        for s in symbols {
            let Symbol::RectMinmax(r) = s else { unreachable!() };
            let probs = match cache.entry(r.n) {
                Entry::Occupied(e) => e.into_mut(),
                Entry::Vacant(e) => e.insert(config_probabilities(r.n, family.theta()[4], mc_samples, &derive_stream(seed, r.n as u64))?),
            };
            acc.add(loglik_rect_marginalized_with(r, family, probs)?);
        }
        return Ok(acc.value());
    }
    for s in symbols {
        acc.add(symbol_loglik(s, family, rect)?);
    }
    Ok(acc.value())
}

/// Classical i.i.d. log likelihood of micro-data.
pub fn classical_loglik(x: &DataMatrix, family: &Family) -> Result<f64> {
    if x.d() != family.dim() {
        return Err(Error::Dimension { expected: family.dim(), got: x.d() });
    }
    let mut acc = NeumaierSum::default();
    for row in x.rows() {
        let v = if family.dim() == 2 {
            family.bvn_density(row[0], row[1]).ln()
        } else {
            let v = family.ln_density(row[0]);
            if v == f64::NEG_INFINITY {
                return Err(Error::Domain { family: family.kind().name(), value: row[0] });
            }
            v
        };
        acc.add(v);
    }
    nan_guard(acc.value())
}
