//! Monte Carlo checks of the closed-form symbol likelihoods.
//!
//! Symbols are simulated from the micro-data model. The discrete part of a
//! symbol (construction configuration, histogram counts) is matched exactly;
//! the continuous part is compared through box counts: for a probe box `B`
//! the number of simulated symbols falling in `B` is binomial with success
//! probability `∫_B exp(loglik)`, which is computed by tensor Gauss–Legendre
//! quadrature. Box half-widths follow Silverman's rule per component.

use crate::data::DataMatrix;
use crate::distributions::Family;
use crate::error::{Error, Result};
use crate::likelihood::{symbol_loglik, RectConfig, RectLikelihood};
use crate::quadrature::gauss_legendre;
use crate::rng::{derive_stream, SymRng};
use crate::symbols::{
    make_hist_fixed, make_hist_random, make_interval, make_rect_minmax, make_rect_seq_nest, make_rect_iter_seg_with,
    RectMinMaxSymbol, Symbol, UpperIndex,
};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, HashMap};

// probe hits and discrete-cell tallies of one chunk of simulations
type ChunkCounts = (Vec<u64>, HashMap<Vec<u64>, u64>);

pub const MIN_SIMS: usize = 100_000;
pub const DEFAULT_THRESHOLD: f64 = 4.0;
const PILOT: usize = 4000;
const PROBES: usize = 20;
const CHUNK: usize = 50_000;
const GL_ORDER: usize = 6;
const MIN_EXPECTED: f64 = 30.0;

/// Symbol construction checked by the oracle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum OracleCase {
    Interval { n: usize, l: usize, u: usize },
    HistRandom { n: usize, k: Vec<usize> },
    /// Micro-data are drawn from the family truncated to the grid hull.
    HistFixed { n: usize, grids: Vec<Vec<f64>> },
    RectMinmax { n: usize },
    SeqNest { n: usize, l: Vec<usize>, u: Vec<usize>, axis_order: Vec<usize> },
    IterSeg { n: usize, l: Vec<usize>, u: Vec<usize>, axis_order: Vec<usize>, convention: UpperIndex },
}

impl OracleCase {
    pub fn name(&self) -> String {
        match self {
            OracleCase::Interval { n, l, u } => format!("interval n={n} l={l} u={u}"),
            OracleCase::HistRandom { n, k } => format!("hist_random n={n} k={k:?}"),
            OracleCase::HistFixed { n, grids } => format!("hist_fixed n={n} bins={:?}", grids.iter().map(|g| g.len() - 1).collect::<Vec<_>>()),
            OracleCase::RectMinmax { n } => format!("rect_minmax n={n}"),
            OracleCase::SeqNest { n, l, u, axis_order } => format!("seq_nest n={n} l={l:?} u={u:?} axes={axis_order:?}"),
            OracleCase::IterSeg { n, l, u, axis_order, convention } => {
                format!("iter_seg n={n} l={l:?} u={u:?} axes={axis_order:?} {convention:?}")
            }
        }
    }

    fn simulate(&self, fam: &Family, rng: &mut SymRng) -> Result<Symbol> {
        Ok(match self {
            OracleCase::Interval { n, l, u } => Symbol::Interval(make_interval(&fam.sample(*n, rng)?.column(0), *l, *u)?),
            OracleCase::HistRandom { n, k } => Symbol::HistRandom(make_hist_random(&fam.sample(*n, rng)?.column(0), k)?),
            OracleCase::HistFixed { n, grids } => {
                let d = grids.len();
                let inside = |r: &[f64]| (0..d).all(|j| grids[j][0] <= r[j] && r[j] <= *grids[j].last().expect("grid"));
                let mut vals = Vec::with_capacity(n * d);
                while vals.len() < n * d {
                    let x = fam.sample(*n, rng)?;
                    for r in x.rows().filter(|r| inside(r)) {
                        if vals.len() < n * d {
                            vals.extend_from_slice(r);
                        }
                    }
                }
                Symbol::HistFixed(make_hist_fixed(&DataMatrix::new(vals, d)?, grids)?)
            }
            OracleCase::RectMinmax { n } => Symbol::RectMinmax(make_rect_minmax(&fam.sample(*n, rng)?)?),
            OracleCase::SeqNest { n, l, u, axis_order } => {
                Symbol::RectOrder(make_rect_seq_nest(&fam.sample(*n, rng)?, l, u, axis_order)?)
            }
            OracleCase::IterSeg { n, l, u, axis_order, convention } => {
                Symbol::RectOrder(make_rect_iter_seg_with(&fam.sample(*n, rng)?, l, u, axis_order, *convention)?)
            }
        })
    }
}

/// Discrete key and continuous components of a symbol.
fn features(sym: &Symbol) -> (Vec<u64>, Vec<f64>) {
    match sym {
        Symbol::Interval(s) => (vec![], vec![s.s_l, s.s_u]),
        Symbol::HistRandom(s) => (vec![], s.s.clone()),
        Symbol::HistFixed(s) => (s.counts.clone(), vec![]),
        Symbol::RectMinmax(s) => {
            let cfg = RectConfig::of(s);
            let idx = RectConfig::ALL.iter().position(|&c| c == cfg).expect("listed") as u64;
            (vec![idx], vec![s.s_min[0], s.s_min[1], s.s_max[0], s.s_max[1]])
        }
        Symbol::RectOrder(s) => (vec![], s.s_l.iter().chain(&s.s_u).copied().collect()),
    }
}

/// `template` with its continuous components replaced by `cont`.
fn with_features(template: &Symbol, key: &[u64], cont: &[f64]) -> Symbol {
    match template {
        Symbol::Interval(s) => Symbol::Interval(crate::symbols::IntervalSymbol { s_l: cont[0], s_u: cont[1], ..s.clone() }),
        Symbol::HistRandom(s) => Symbol::HistRandom(crate::symbols::RandomBinHistogramSymbol { s: cont.to_vec(), ..s.clone() }),
        Symbol::HistFixed(s) => {
            Symbol::HistFixed(crate::symbols::FixedBinHistogramSymbol { counts: key.to_vec(), ..s.clone() })
        }
        Symbol::RectMinmax(s) => {
            let (s_min, s_max) = ([cont[0], cont[1]], [cont[2], cont[3]]);
            let ext = |c: usize, hi: bool| if hi { s_max[c] } else { s_min[c] };
            let (p, locations) = match RectConfig::ALL[key[0] as usize] {
                RectConfig::MainDiagonal => (2, vec![vec![s_min[0], s_min[1]], vec![s_max[0], s_max[1]]]),
                RectConfig::AntiDiagonal => (2, vec![vec![s_min[0], s_max[1]], vec![s_max[0], s_min[1]]]),
                RectConfig::Corner(a, b) => (3, vec![vec![ext(0, a), ext(1, b)]]),
                RectConfig::Four => (4, vec![]),
            };
            Symbol::RectMinmax(RectMinMaxSymbol { s_min: s_min.to_vec(), s_max: s_max.to_vec(), p, locations, n: s.n })
        }
        Symbol::RectOrder(s) => {
            let d = s.d();
            Symbol::RectOrder(crate::symbols::OrderRectSymbol {
                s_l: cont[..d].to_vec(),
                s_u: cont[d..].to_vec(),
                ..s.clone()
            })
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeCheck {
    pub key: Vec<u64>,
    pub centre: Vec<f64>,
    pub half_width: Vec<f64>,
    /// Closed-form probability of the box.
    pub probability: f64,
    pub observed: u64,
    pub z: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellCheck {
    pub key: Vec<u64>,
    pub probability: f64,
    pub observed: u64,
    pub z: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleReport {
    pub case: String,
    pub n_sims: usize,
    pub probes: Vec<ProbeCheck>,
    pub cells: Vec<CellCheck>,
    pub max_abs_z: f64,
    pub threshold: f64,
    pub passed: bool,
}

fn z_score(observed: u64, p: f64, n: usize) -> f64 {
    let nf = n as f64;
    let var = nf * p * (1.0 - p);
    if var <= 0.0 {
        return if observed as f64 == nf * p { 0.0 } else { f64::INFINITY };
    }
    (observed as f64 - nf * p) / var.sqrt()
}

type Likelihood<'a> = dyn Fn(&Symbol, &Family) -> Result<f64> + Sync + 'a;

fn density(lik: &Likelihood, sym: &Symbol, fam: &Family) -> f64 {
    match lik(sym, fam) {
        Ok(v) if v.is_finite() => v.exp(),
        _ => 0.0,
    }
}

/// Closed-form probability of the box `centre ± h`, or `None` when a corner
/// of the box lies outside the support.
fn box_probability(lik: &Likelihood, fam: &Family, template: &Symbol, key: &[u64], centre: &[f64], h: &[f64]) -> Option<f64> {
    let d = centre.len();
    let mut pt = vec![0.0; d];
    for corner in 0..(1usize << d) {
        for j in 0..d {
            pt[j] = centre[j] + if corner >> j & 1 == 1 { h[j] } else { -h[j] };
        }
        if density(lik, &with_features(template, key, &pt), fam) <= 0.0 {
            return None;
        }
    }
    let rule = gauss_legendre(GL_ORDER);
    let mut total = 0.0;
    let mut idx = vec![0usize; d];
    loop {
        let mut w = 1.0;
        for j in 0..d {
            let (x, wj) = rule[idx[j]];
            pt[j] = centre[j] + h[j] * x;
            w *= wj * h[j];
        }
        total += w * density(lik, &with_features(template, key, &pt), fam);
        let mut j = 0;
        loop {
            if j == d {
                return Some(total);
            }
            idx[j] += 1;
            if idx[j] < GL_ORDER {
                break;
            }
            idx[j] = 0;
            j += 1;
        }
    }
}

fn in_box(x: &[f64], centre: &[f64], h: &[f64]) -> bool {
    x.iter().zip(centre).zip(h).all(|((v, c), w)| (v - c).abs() <= *w)
}

/// [`mc_density_oracle_with`] against the library's likelihoods.
pub fn mc_density_oracle(case: &OracleCase, family: &Family, n_sims: usize, seed: u64) -> Result<OracleReport> {
    mc_density_oracle_with(case, family, n_sims, seed, &|s: &Symbol, f: &Family| {
        symbol_loglik(s, f, RectLikelihood::Full)
    })
}

/// Simulates `n_sims` symbols and compares them with `loglik`. Fails the
/// check when any standardized discrepancy reaches [`DEFAULT_THRESHOLD`].
pub fn mc_density_oracle_with(
    case: &OracleCase,
    family: &Family,
    n_sims: usize,
    seed: u64,
    loglik: &Likelihood,
) -> Result<OracleReport> {
    if n_sims < MIN_SIMS {
        return Err(Error::InvalidParameter(format!("n_sims = {n_sims} is below the minimum {MIN_SIMS}")));
    }
    // pilot draws choose probes and bandwidths
    let mut rng = derive_stream(seed, 0);
    let mut pilot = Vec::with_capacity(PILOT);
    for _ in 0..PILOT {
        pilot.push(case.simulate(family, &mut rng)?);
    }
    let feats: Vec<(Vec<u64>, Vec<f64>)> = pilot.iter().map(features).collect();
    let d = feats[0].1.len();

    let mut probes: Vec<ProbeCheck> = Vec::new();
    let mut cells: Vec<CellCheck> = Vec::new();
    if d > 0 {
        let factor = (4.0 / (d as f64 + 2.0)).powf(1.0 / (d as f64 + 4.0)) * (n_sims as f64).powf(-1.0 / (d as f64 + 4.0));
        let h: Vec<f64> = (0..d)
            .map(|j| {
                let col: Vec<f64> = feats.iter().map(|f| f.1[j]).collect();
                super::mean_sd(&col).1 * factor
            })
            .collect();
        let mut by_key: BTreeMap<Vec<u64>, Vec<usize>> = BTreeMap::new();
        for (i, f) in feats.iter().enumerate() {
            by_key.entry(f.0.clone()).or_default().push(i);
        }
        let mut cursors: Vec<(Vec<u64>, Vec<usize>, usize)> = by_key
            .into_iter()
            .filter(|(_, v)| v.len() * 100 >= PILOT)
            .map(|(k, v)| (k, v, 0))
            .collect();
        while probes.len() < PROBES && cursors.iter().any(|c| c.2 < c.1.len()) {
            for (key, idx, cur) in cursors.iter_mut() {
                if probes.len() == PROBES {
                    break;
                }
                while *cur < idx.len() {
                    let i = idx[*cur];
                    *cur += 1;
                    let centre = &feats[i].1;
                    if let Some(p) = box_probability(loglik, family, &pilot[i], key, centre, &h) {
                        if p * n_sims as f64 >= MIN_EXPECTED {
                            probes.push(ProbeCheck {
                                key: key.clone(),
                                centre: centre.clone(),
                                half_width: h.clone(),
                                probability: p,
                                observed: 0,
                                z: 0.0,
                            });
                            break;
                        }
                    }
                }
            }
        }
    } else {
        let mut seen: BTreeMap<Vec<u64>, usize> = BTreeMap::new();
        for (i, f) in feats.iter().enumerate() {
            seen.entry(f.0.clone()).or_insert(i);
        }
        for (key, i) in seen {
            let p = density(loglik, &with_features(&pilot[i], &key, &[]), family);
            if p * n_sims as f64 >= MIN_EXPECTED {
                cells.push(CellCheck { key, probability: p, observed: 0, z: 0.0 });
            }
        }
    }
    if probes.is_empty() && cells.is_empty() {
        return Err(Error::Numerical("the oracle found nothing to compare".into()));
    }

    let n_chunks = n_sims.div_ceil(CHUNK);
    let counts: Vec<Result<ChunkCounts>> = (0..n_chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = derive_stream(seed, c as u64 + 1);
            let size = CHUNK.min(n_sims - c * CHUNK);
            let mut hits = vec![0u64; probes.len()];
            let mut keys: HashMap<Vec<u64>, u64> = HashMap::new();
            for _ in 0..size {
                let (key, cont) = features(&case.simulate(family, &mut rng)?);
                for (hit, p) in hits.iter_mut().zip(&probes) {
                    if p.key == key && in_box(&cont, &p.centre, &p.half_width) {
                        *hit += 1;
                    }
                }
                if d == 0 {
                    *keys.entry(key).or_default() += 1;
                }
            }
            Ok((hits, keys))
        })
        .collect();
    for chunk in counts {
        let (hits, keys) = chunk?;
        for (p, h) in probes.iter_mut().zip(hits) {
            p.observed += h;
        }
        for c in cells.iter_mut() {
            c.observed += keys.get(&c.key).copied().unwrap_or(0);
        }
    }
    let mut max_abs_z: f64 = 0.0;
    for p in probes.iter_mut() {
        p.z = z_score(p.observed, p.probability, n_sims);
        max_abs_z = max_abs_z.max(p.z.abs());
    }
    for c in cells.iter_mut() {
        c.z = z_score(c.observed, c.probability, n_sims);
        max_abs_z = max_abs_z.max(c.z.abs());
    }
    Ok(OracleReport {
        case: case.name(),
        n_sims,
        probes,
        cells,
        max_abs_z,
        threshold: DEFAULT_THRESHOLD,
        passed: max_abs_z < DEFAULT_THRESHOLD,
    })
}

/// A labelled oracle case with the family it is simulated from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleEntry {
    pub label: String,
    pub family: crate::distributions::FamilyKind,
    pub theta: Vec<f64>,
    #[serde(rename = "symbol")]
    pub case: OracleCase,
}

impl OracleEntry {
    pub fn family(&self) -> Result<Family> {
        Family::new(self.family, &self.theta)
    }
}

/// Bivariate family used by the default rectangle cases and the convention
/// check.
pub fn default_bivariate() -> Family {
    Family::bivariate_normal(0.5, -1.0, 1.0, 2.0, 0.6).expect("valid parameters")
}

/// One case per likelihood: intervals, fixed- and random-bin histograms,
/// min/max rectangles and both nested rectangle constructions.
pub fn default_suite() -> Vec<OracleEntry> {
    use crate::distributions::FamilyKind::*;
    let bvn = default_bivariate().theta().to_vec();
    let e = |label: &str, family, theta: Vec<f64>, case| OracleEntry { label: label.into(), family, theta, case };
    vec![
        e("interval_uniform", Uniform1D, vec![0.0, 1.0], OracleCase::Interval { n: 5, l: 2, u: 4 }),
        e("interval_normal", Normal1D, vec![0.0, 1.0], OracleCase::Interval { n: 10, l: 2, u: 9 }),
        e(
            "hist_fixed_1d",
            Normal1D,
            vec![0.2, 1.0],
            OracleCase::HistFixed { n: 6, grids: vec![vec![-1.5, -0.5, 0.5, 1.5]] },
        ),
        e(
            "hist_fixed_2d",
            BivariateNormal,
            bvn.clone(),
            OracleCase::HistFixed { n: 4, grids: vec![vec![-2.0, 0.0, 3.0], vec![-6.0, -1.0, 4.0]] },
        ),
        e("hist_random", Normal1D, vec![1.0, 2.0], OracleCase::HistRandom { n: 9, k: vec![2, 5, 8] }),
        e("rect_minmax", BivariateNormal, bvn.clone(), OracleCase::RectMinmax { n: 5 }),
        e(
            "seq_nest",
            BivariateNormal,
            bvn.clone(),
            OracleCase::SeqNest { n: 20, l: vec![3, 2], u: vec![18, 12], axis_order: vec![1, 2] },
        ),
        e(
            "iter_seg",
            BivariateNormal,
            bvn,
            OracleCase::IterSeg {
                n: 20,
                l: vec![2, 4],
                u: vec![1, 16],
                axis_order: vec![2, 1],
                convention: crate::symbols::ITER_SEG_UPPER_INDEX,
            },
        ),
    ]
}

/// Both iterative-segmentation upper-index conventions checked against the
/// likelihood.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConventionResolution {
    pub from_bottom: OracleReport,
    pub from_top: OracleReport,
    /// The convention that passes, when exactly one does.
    pub resolved: Option<UpperIndex>,
}

/// Runs the oracle on an iterative-segmentation case whose upper subset is
/// large enough for the two conventions to differ.
pub fn resolve_iter_seg_convention(family: &Family, n_sims: usize, seed: u64) -> Result<ConventionResolution> {
    let case = |convention| OracleCase::IterSeg { n: 20, l: vec![4, 2], u: vec![16, 1], axis_order: vec![1, 2], convention };
    let from_bottom = mc_density_oracle(&case(UpperIndex::FromBottom), family, n_sims, seed)?;
    let from_top = mc_density_oracle(&case(UpperIndex::FromTop), family, n_sims, seed)?;
    let resolved = match (from_bottom.passed, from_top.passed) {
        (true, false) => Some(UpperIndex::FromBottom),
        (false, true) => Some(UpperIndex::FromTop),
        _ => None,
    };
    Ok(ConventionResolution { from_bottom, from_top, resolved })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::likelihood::loglik_interval;

    #[test]
    fn rejects_too_few_sims() {
        let case = OracleCase::Interval { n: 5, l: 1, u: 5 };
        let fam = Family::normal(0.0, 1.0).unwrap();
        assert!(mc_density_oracle(&case, &fam, 1000, 1).is_err());
    }

    #[test]
    fn uniform_interval_passes_and_corrupted_exponent_fails() {
        let case = OracleCase::Interval { n: 5, l: 2, u: 4 };
        let fam = Family::uniform(0.0, 1.0).unwrap();
        let ok = mc_density_oracle(&case, &fam, MIN_SIMS, 5).unwrap();
        assert!(ok.passed, "{ok:?}");
        assert_eq!(ok.probes.len(), PROBES);
        let bad = mc_density_oracle_with(&case, &fam, MIN_SIMS, 5, &|s: &Symbol, f: &Family| {
            let Symbol::Interval(iv) = s else { unreachable!() };
            loglik_interval(&crate::symbols::IntervalSymbol { n: iv.n + 1, ..iv.clone() }, f)
        })
        .unwrap();
        assert!(!bad.passed);
    }

    #[test]
    fn fixed_histogram_frequencies_match() {
        let case = OracleCase::HistFixed { n: 6, grids: vec![vec![-1.5, -0.5, 0.5, 1.5]] };
        let fam = Family::normal(0.2, 1.0).unwrap();
        let r = mc_density_oracle(&case, &fam, MIN_SIMS, 8).unwrap();
        assert!(r.passed, "{r:?}");
        assert!(r.cells.len() >= 10);
    }

    #[test]
    fn feature_round_trip_rebuilds_rectangles() {
        let fam = Family::bivariate_normal(0.0, 0.0, 1.0, 1.0, 0.8).unwrap();
        let mut rng = derive_stream(4, 0);
        for _ in 0..200 {
            let s = OracleCase::RectMinmax { n: 4 }.simulate(&fam, &mut rng).unwrap();
            let (k, c) = features(&s);
            assert_eq!(with_features(&s, &k, &c), s);
        }
    }
}
