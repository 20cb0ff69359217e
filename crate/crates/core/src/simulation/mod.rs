//! Replicated experiments and Monte Carlo checks of the likelihoods.

mod experiment;
mod meta_bias;
pub mod oracle;
mod rmse;

pub use experiment::{
    run_experiment, Expectation, ExpectationCheck, ExperimentConfig, ExperimentSummary, ReplicateOutcome,
};
pub use meta_bias::{run_meta_bias_study, MetaBiasConfig, MetaBiasRow, MetaBiasTable, Statistic};
pub use oracle::{
    default_suite, mc_density_oracle, mc_density_oracle_with, resolve_iter_seg_convention, ConventionResolution,
    OracleCase, OracleEntry, OracleReport,
};
pub use rmse::{run_rmse_study, RmseConfig, RmseCurve, RmseRow, SymbolKind};

use crate::data::DataMatrix;
use crate::error::{Error, Result};
use crate::symbols::{
    make_hist_fixed, make_hist_random, make_interval, make_rect_iter_seg, make_rect_marginal, make_rect_minmax,
    make_rect_seq_nest, Construction, Symbol,
};
use serde::{Deserialize, Serialize};

/// Aggregation applied to each class.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum SymbolSpec {
    Interval {
        l: usize,
        u: usize,
    },
    /// Minimum and maximum of a class of any size.
    Range,
    /// Random-bin histogram with selected order indices.
    HistRandom {
        k: Vec<usize>,
    },
    /// Every order statistic, i.e. the sorted sample.
    Classical,
    HistFixed {
        grids: Vec<Vec<f64>>,
    },
    RectMinmax,
    RectOrder {
        construction: Construction,
        l: Vec<usize>,
        u: Vec<usize>,
        #[serde(default = "default_axis_order")]
        axis_order: Vec<usize>,
    },
}

fn default_axis_order() -> Vec<usize> {
    vec![1, 2]
}

impl SymbolSpec {
    /// Aggregates one class. Univariate specs use the first column.
    pub fn build(&self, x: &DataMatrix) -> Result<Symbol> {
        Ok(match self {
            SymbolSpec::Interval { l, u } => Symbol::Interval(make_interval(&x.column(0), *l, *u)?),
            SymbolSpec::Range => Symbol::Interval(make_interval(&x.column(0), 1, x.n())?),
            SymbolSpec::HistRandom { k } => Symbol::HistRandom(make_hist_random(&x.column(0), k)?),
            SymbolSpec::Classical => {
                let k: Vec<usize> = (1..=x.n()).collect();
                Symbol::HistRandom(make_hist_random(&x.column(0), &k)?)
            }
            SymbolSpec::HistFixed { grids } => Symbol::HistFixed(make_hist_fixed(x, grids)?),
            SymbolSpec::RectMinmax => Symbol::RectMinmax(make_rect_minmax(x)?),
            SymbolSpec::RectOrder { construction, l, u, axis_order } => Symbol::RectOrder(match construction {
                Construction::Marginal => make_rect_marginal(x, l, u)?,
                Construction::SeqNest => make_rect_seq_nest(x, l, u, axis_order)?,
                Construction::IterSeg => make_rect_iter_seg(x, l, u, axis_order)?,
            }),
        })
    }

    /// Dimension of the micro-data this symbol type aggregates.
    pub fn dim(&self) -> usize {
        match self {
            SymbolSpec::Interval { .. } | SymbolSpec::Range | SymbolSpec::HistRandom { .. } | SymbolSpec::Classical => 1,
            SymbolSpec::HistFixed { grids } => grids.len(),
            SymbolSpec::RectMinmax => 2,
            SymbolSpec::RectOrder { l, .. } => l.len(),
        }
    }

    pub fn check_dim(&self, d: usize) -> Result<()> {
        if self.dim() != d {
            return Err(Error::Config(format!(
                "symbol spec is {}-dimensional but the family is {d}-dimensional",
                self.dim()
            )));
        }
        Ok(())
    }
}

/// Mean and sample standard deviation (n − 1 divisor).
pub(crate) fn mean_sd(x: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let m = x.iter().sum::<f64>() / n;
    let ss: f64 = x.iter().map(|v| (v - m) * (v - m)).sum();
    (m, if x.len() > 1 { (ss / (n - 1.0)).sqrt() } else { f64::NAN })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn symbol_spec_toml_round_trip() {
        let spec = SymbolSpec::RectOrder {
            construction: Construction::IterSeg,
            l: vec![6, 3],
            u: vec![55, 3],
            axis_order: vec![1, 2],
        };
        let s = toml::to_string(&spec).unwrap();
        let back: SymbolSpec = toml::from_str(&s).unwrap();
        assert_eq!(spec, back);
        let parsed: SymbolSpec = toml::from_str("type = \"rect_minmax\"").unwrap();
        assert_eq!(parsed, SymbolSpec::RectMinmax);
    }

    #[test]
    fn classical_spec_keeps_every_point() {
        let x = DataMatrix::from_column(&[3.0, 1.0, 2.0]).unwrap();
        let Symbol::HistRandom(h) = SymbolSpec::Classical.build(&x).unwrap() else { panic!() };
        assert_eq!(h.s, vec![1.0, 2.0, 3.0]);
        assert_eq!(h.k, vec![1, 2, 3]);
    }
}
