//! Aggregation functions turning micro-data into symbols.
//!
//! All order indices are 1-based, so `l = 1` selects the sample minimum.
//! Multivariate order vectors are stored in coordinate order; the axis
//! processed first by the nested constructions is given by `axis_order`.

use crate::data::DataMatrix;
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Order statistics `x_(l) <= x_(u)` of a univariate sample of size `n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntervalSymbol {
    pub s_l: f64,
    pub s_u: f64,
    pub n: usize,
    pub l: usize,
    pub u: usize,
}

/// Bounding box of a bivariate sample with its construction points.
///
/// `locations` holds the two defining points when `p == 2`, the corner point
/// attaining two extremes when `p == 3` and nothing when `p == 4`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RectMinMaxSymbol {
    pub s_min: Vec<f64>,
    pub s_max: Vec<f64>,
    pub p: usize,
    pub locations: Vec<Vec<f64>>,
    pub n: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Construction {
    Marginal,
    SeqNest,
    IterSeg,
}

/// Rectangle from marginal, nested or segmented order statistics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrderRectSymbol {
    pub s_l: Vec<f64>,
    pub s_u: Vec<f64>,
    pub l: Vec<usize>,
    pub u: Vec<usize>,
    pub n: usize,
    pub construction: Construction,
    pub axis_order: Vec<usize>,
}

/// Counts of a sample over a fixed grid; `counts` is row-major over the grid
/// cells with the last coordinate varying fastest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FixedBinHistogramSymbol {
    pub grids: Vec<Vec<f64>>,
    pub counts: Vec<u64>,
    pub n: usize,
}

/// Selected order statistics `x_(k_1) <= ... <= x_(k_B)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RandomBinHistogramSymbol {
    pub s: Vec<f64>,
    pub k: Vec<usize>,
    pub n: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Symbol {
    Interval(IntervalSymbol),
    RectMinmax(RectMinMaxSymbol),
    RectOrder(OrderRectSymbol),
    HistFixed(FixedBinHistogramSymbol),
    HistRandom(RandomBinHistogramSymbol),
}

impl Symbol {
    pub fn type_name(&self) -> &'static str {
        match self {
            Symbol::Interval(_) => "interval",
            Symbol::RectMinmax(_) => "rect_minmax",
            Symbol::RectOrder(_) => "rect_order",
            Symbol::HistFixed(_) => "hist_fixed",
            Symbol::HistRandom(_) => "hist_random",
        }
    }

    pub fn n(&self) -> usize {
        match self {
            Symbol::Interval(s) => s.n,
            Symbol::RectMinmax(s) => s.n,
            Symbol::RectOrder(s) => s.n,
            Symbol::HistFixed(s) => s.n,
            Symbol::HistRandom(s) => s.n,
        }
    }

    /// Dimension of the underlying micro-data.
    pub fn dim(&self) -> usize {
        match self {
            Symbol::Interval(_) | Symbol::HistRandom(_) => 1,
            Symbol::RectMinmax(s) => s.s_min.len(),
            Symbol::RectOrder(s) => s.s_l.len(),
            Symbol::HistFixed(s) => s.grids.len(),
        }
    }

    /// Checks the structural invariants; used on symbols read from files.
    pub fn validate(&self) -> Result<()> {
        match self {
            Symbol::Interval(s) => s.validate(),
            Symbol::RectMinmax(s) => s.validate(),
            Symbol::RectOrder(s) => s.validate(),
            Symbol::HistFixed(s) => s.validate(),
            Symbol::HistRandom(s) => s.validate(),
        }
    }
}

fn sorted(x: &[f64]) -> Vec<f64> {
    let mut v = x.to_vec();
    v.sort_by(f64::total_cmp);
    v
}

fn check_finite(values: &[f64], what: &str) -> Result<()> {
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidSymbol(format!("{what} must be finite")));
    }
    Ok(())
}

fn check_orders(l: usize, u: usize, n: usize) -> Result<()> {
    if l < 1 || u > n {
        return Err(Error::IndexOutOfRange(format!("orders ({l}, {u}) outside 1..={n}")));
    }
    if l >= u {
        return Err(Error::Constraint(format!("need l < u, got l = {l}, u = {u}")));
    }
    Ok(())
}

impl IntervalSymbol {
    pub fn validate(&self) -> Result<()> {
        check_orders(self.l, self.u, self.n)?;
        check_finite(&[self.s_l, self.s_u], "interval bounds")?;
        if self.s_l > self.s_u {
            return Err(Error::Ordering { coord: 1, lower: self.s_l, upper: self.s_u });
        }
        Ok(())
    }
}

/// `(x_(l), x_(u), n)` of a univariate sample.
pub fn make_interval(x: &[f64], l: usize, u: usize) -> Result<IntervalSymbol> {
    check_finite(x, "data")?;
    let n = x.len();
    check_orders(l, u, n)?;
    let s = sorted(x);
    Ok(IntervalSymbol { s_l: s[l - 1], s_u: s[u - 1], n, l, u })
}

fn require_d2(x: &DataMatrix) -> Result<()> {
    if x.d() != 2 {
        return Err(Error::Dimension { expected: 2, got: x.d() });
    }
    Ok(())
}

impl RectMinMaxSymbol {
    pub fn validate(&self) -> Result<()> {
        if self.s_min.len() != 2 || self.s_max.len() != 2 {
            return Err(Error::Unsupported("min/max rectangles are implemented for d = 2".into()));
        }
        check_finite(&self.s_min, "s_min")?;
        check_finite(&self.s_max, "s_max")?;
        for i in 0..2 {
            if self.s_min[i] > self.s_max[i] {
                return Err(Error::Ordering { coord: i + 1, lower: self.s_min[i], upper: self.s_max[i] });
            }
        }
        if self.n < 2 {
            return Err(Error::Degenerate(format!("n = {} < 2", self.n)));
        }
        if !(2..=4).contains(&self.p) || self.p > self.n {
            return Err(Error::InvalidSymbol(format!("p = {} with n = {}", self.p, self.n)));
        }
        let on_extreme = |pt: &Vec<f64>, i: usize| pt[i] == self.s_min[i] || pt[i] == self.s_max[i];
        let expected = match self.p {
            2 => 2,
            3 => 1,
            _ => 0,
        };
        if self.locations.len() != expected {
            return Err(Error::InvalidSymbol(format!(
                "p = {} needs {expected} location(s), got {}",
                self.p,
                self.locations.len()
            )));
        }
        for pt in &self.locations {
            if pt.len() != 2 || !on_extreme(pt, 0) || !on_extreme(pt, 1) {
                return Err(Error::InvalidSymbol(format!("location {pt:?} is not a rectangle corner")));
            }
        }
        if self.p == 2 {
            let (a, b) = (&self.locations[0], &self.locations[1]);
            if a[0] == b[0] || a[1] == b[1] {
                return Err(Error::InvalidSymbol("p = 2 locations must be opposite corners".into()));
            }
        }
        Ok(())
    }

    /// True when the two defining points lie on the main diagonal
    /// (bottom-left and top-right). Only meaningful for `p == 2`.
    pub fn main_diagonal(&self) -> bool {
        let a = &self.locations[0];
        (a[0] == self.s_min[0]) == (a[1] == self.s_min[1])
    }
}

/// Unique row attaining the minimum (`want_max == false`) or maximum of column `j`.
fn unique_extreme(x: &DataMatrix, j: usize, want_max: bool) -> Result<usize> {
    let col = x.column(j);
    let target = if want_max {
        col.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    } else {
        col.iter().copied().fold(f64::INFINITY, f64::min)
    };
    let hits: Vec<usize> = (0..col.len()).filter(|&i| col[i] == target).collect();
    if hits.len() > 1 {
        return Err(Error::Tie(format!(
            "the {} of margin {} is attained by {} rows",
            if want_max { "maximum" } else { "minimum" },
            j + 1,
            hits.len()
        )));
    }
    Ok(hits[0])
}

/// Bounding box of a bivariate sample with the number and location of the
/// rows that define it.
pub fn make_rect_minmax(x: &DataMatrix) -> Result<RectMinMaxSymbol> {
    require_d2(x)?;
    if x.n() < 2 {
        return Err(Error::Degenerate(format!("n = {} < 2", x.n())));
    }
    let idx = [
        unique_extreme(x, 0, false)?,
        unique_extreme(x, 0, true)?,
        unique_extreme(x, 1, false)?,
        unique_extreme(x, 1, true)?,
    ];
    let s_min = vec![x.get(idx[0], 0), x.get(idx[2], 1)];
    let s_max = vec![x.get(idx[1], 0), x.get(idx[3], 1)];
    let mut rows = idx.to_vec();
    rows.sort_unstable();
    rows.dedup();
    let p = rows.len();
    let locations = match p {
        2 => {
            // the row holding the margin-1 minimum comes first
            let other = if rows[0] == idx[0] { rows[1] } else { rows[0] };
            vec![x.row(idx[0]).to_vec(), x.row(other).to_vec()]
        }
        3 => {
            let corner = rows
                .iter()
                .copied()
                .find(|r| idx.iter().filter(|&&i| i == *r).count() == 2)
                .expect("one row attains two extremes");
            vec![x.row(corner).to_vec()]
        }
        _ => vec![],
    };
    Ok(RectMinMaxSymbol { s_min, s_max, p, locations, n: x.n() })
}

fn check_axis_order(axis_order: &[usize], d: usize) -> Result<()> {
    let mut seen = axis_order.to_vec();
    seen.sort_unstable();
    if seen != (1..=d).collect::<Vec<_>>() {
        return Err(Error::InvalidSymbol(format!("axis order {axis_order:?} is not a permutation of 1..={d}")));
    }
    Ok(())
}

impl OrderRectSymbol {
    pub fn d(&self) -> usize {
        self.s_l.len()
    }

    /// (first, second) axes as 0-based coordinates.
    pub fn axes(&self) -> (usize, usize) {
        (self.axis_order[0] - 1, self.axis_order.get(1).map(|a| a - 1).unwrap_or(0))
    }

    pub fn validate(&self) -> Result<()> {
        let d = self.s_l.len();
        if d == 0 || self.s_u.len() != d || self.l.len() != d || self.u.len() != d {
            return Err(Error::InvalidSymbol("order rectangle fields have inconsistent lengths".into()));
        }
        check_axis_order(&self.axis_order, d)?;
        check_finite(&self.s_l, "s_l")?;
        check_finite(&self.s_u, "s_u")?;
        // the second segmentation axis takes its bounds from disjoint subsets,
        // so they may cross
        let free = match self.construction {
            Construction::IterSeg if d == 2 => Some(self.axes().1),
            _ => None,
        };
        for i in 0..d {
            if Some(i) != free && self.s_l[i] > self.s_u[i] {
                return Err(Error::Ordering { coord: i + 1, lower: self.s_l[i], upper: self.s_u[i] });
            }
        }
        match self.construction {
            Construction::Marginal => {
                for i in 0..d {
                    check_orders(self.l[i], self.u[i], self.n)?;
                }
                Ok(())
            }
            Construction::SeqNest => {
                if d != 2 {
                    return Err(Error::Unsupported("sequential nesting is implemented for d = 2".into()));
                }
                let (a, b) = self.axes();
                seq_nest_constraints(self.n, [self.l[a], self.l[b]], [self.u[a], self.u[b]])
            }
            Construction::IterSeg => {
                if d != 2 {
                    return Err(Error::Unsupported("iterative segmentation is implemented for d = 2".into()));
                }
                let (a, b) = self.axes();
                iter_seg_constraints(self.n, [self.l[a], self.l[b]], [self.u[a], self.u[b]])
            }
        }
    }
}

/// Per-margin order statistics computed independently.
pub fn make_rect_marginal(x: &DataMatrix, l: &[usize], u: &[usize]) -> Result<OrderRectSymbol> {
    let d = x.d();
    if l.len() != d || u.len() != d {
        return Err(Error::Dimension { expected: d, got: l.len().min(u.len()) });
    }
    let mut s_l = Vec::with_capacity(d);
    let mut s_u = Vec::with_capacity(d);
    for j in 0..d {
        let iv = make_interval(&x.column(j), l[j], u[j])?;
        s_l.push(iv.s_l);
        s_u.push(iv.s_u);
    }
    Ok(OrderRectSymbol {
        s_l,
        s_u,
        l: l.to_vec(),
        u: u.to_vec(),
        n: x.n(),
        construction: Construction::Marginal,
        axis_order: (1..=d).collect(),
    })
}

// l, u given as (first axis, second axis)
fn seq_nest_constraints(n: usize, l: [usize; 2], u: [usize; 2]) -> Result<()> {
    check_orders(l[0], u[0], n)?;
    let inner = u[0] - l[0] - 1;
    if l[1] < 1 || u[1] < 2 || l[1] >= u[1] || u[1] > inner {
        return Err(Error::Constraint(format!(
            "sequential nesting needs 1 <= l2 < u2 <= u1 - l1 - 1 = {inner}, got l2 = {}, u2 = {}",
            l[1], u[1]
        )));
    }
    Ok(())
}

fn iter_seg_constraints(n: usize, l: [usize; 2], u: [usize; 2]) -> Result<()> {
    check_orders(l[0], u[0], n)?;
    if l[1] < 1 || l[1] + 1 >= l[0] {
        return Err(Error::Constraint(format!(
            "iterative segmentation needs 1 <= l2 < l1 - 1, got l1 = {}, l2 = {}",
            l[0], l[1]
        )));
    }
    if u[1] < 1 || u[1] >= n - u[0] {
        return Err(Error::Constraint(format!(
            "iterative segmentation needs 1 <= u2 < n - u1 = {}, got u2 = {}",
            n - u[0],
            u[1]
        )));
    }
    Ok(())
}

fn distinct_column(x: &DataMatrix, j: usize) -> Result<Vec<f64>> {
    let s = sorted(&x.column(j));
    if s.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::Tie(format!("margin {} has repeated values", j + 1)));
    }
    Ok(s)
}

fn parse_axis_order(axis_order: &[usize]) -> Result<(usize, usize)> {
    check_axis_order(axis_order, 2)?;
    Ok((axis_order[0] - 1, axis_order[1] - 1))
}

/// Sequential nesting: the second axis' order statistics are taken among the
/// rows strictly inside the first axis' interval.
pub fn make_rect_seq_nest(x: &DataMatrix, l: &[usize], u: &[usize], axis_order: &[usize]) -> Result<OrderRectSymbol> {
    require_d2(x)?;
    if l.len() != 2 || u.len() != 2 {
        return Err(Error::Dimension { expected: 2, got: l.len().min(u.len()) });
    }
    let (a, b) = parse_axis_order(axis_order)?;
    let n = x.n();
    seq_nest_constraints(n, [l[a], l[b]], [u[a], u[b]])?;
    let first = distinct_column(x, a)?;
    distinct_column(x, b)?;
    let (lo, hi) = (first[l[a] - 1], first[u[a] - 1]);
    let inner: Vec<f64> = x.rows().filter(|r| r[a] > lo && r[a] < hi).map(|r| r[b]).collect();
    let inner = sorted(&inner);
    let mut s_l = vec![0.0; 2];
    let mut s_u = vec![0.0; 2];
    s_l[a] = lo;
    s_u[a] = hi;
    s_l[b] = inner[l[b] - 1];
    s_u[b] = inner[u[b] - 1];
    Ok(OrderRectSymbol {
        s_l,
        s_u,
        l: l.to_vec(),
        u: u.to_vec(),
        n,
        construction: Construction::SeqNest,
        axis_order: axis_order.to_vec(),
    })
}

/// How the second-axis upper order index is counted within the rows above
/// the first axis' upper bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UpperIndex {
    /// `u_2`-th smallest value of the upper subset.
    FromBottom,
    /// `u_2`-th largest value of the upper subset.
    FromTop,
}

/// Convention matching the iterative-segmentation likelihood.
pub const ITER_SEG_UPPER_INDEX: UpperIndex = UpperIndex::FromBottom;

/// Iterative segmentation: the second axis' lower bound is taken among rows
/// below the first axis' lower bound, its upper bound among rows above the
/// first axis' upper bound.
pub fn make_rect_iter_seg(x: &DataMatrix, l: &[usize], u: &[usize], axis_order: &[usize]) -> Result<OrderRectSymbol> {
    make_rect_iter_seg_with(x, l, u, axis_order, ITER_SEG_UPPER_INDEX)
}

/// [`make_rect_iter_seg`] with an explicit upper-index convention.
pub fn make_rect_iter_seg_with(
    x: &DataMatrix,
    l: &[usize],
    u: &[usize],
    axis_order: &[usize],
    convention: UpperIndex,
) -> Result<OrderRectSymbol> {
    require_d2(x)?;
    if l.len() != 2 || u.len() != 2 {
        return Err(Error::Dimension { expected: 2, got: l.len().min(u.len()) });
    }
    let (a, b) = parse_axis_order(axis_order)?;
    let n = x.n();
    iter_seg_constraints(n, [l[a], l[b]], [u[a], u[b]])?;
    let first = distinct_column(x, a)?;
    distinct_column(x, b)?;
    let (lo, hi) = (first[l[a] - 1], first[u[a] - 1]);
    let below = sorted(&x.rows().filter(|r| r[a] < lo).map(|r| r[b]).collect::<Vec<_>>());
    let above = sorted(&x.rows().filter(|r| r[a] > hi).map(|r| r[b]).collect::<Vec<_>>());
    if below.is_empty() || above.is_empty() {
        return Err(Error::Constraint("empty segmentation subset".into()));
    }
    let mut s_l = vec![0.0; 2];
    let mut s_u = vec![0.0; 2];
    s_l[a] = lo;
    s_u[a] = hi;
    s_l[b] = below[l[b] - 1];
    s_u[b] = match convention {
        UpperIndex::FromBottom => above[u[b] - 1],
        UpperIndex::FromTop => above[above.len() - u[b]],
    };
    Ok(OrderRectSymbol {
        s_l,
        s_u,
        l: l.to_vec(),
        u: u.to_vec(),
        n,
        construction: Construction::IterSeg,
        axis_order: axis_order.to_vec(),
    })
}

impl FixedBinHistogramSymbol {
    /// Number of bins along each coordinate.
    pub fn shape(&self) -> Vec<usize> {
        self.grids.iter().map(|g| g.len().saturating_sub(1)).collect()
    }

    pub fn validate(&self) -> Result<()> {
        validate_grids(&self.grids)?;
        let cells: usize = self.shape().iter().product();
        if self.counts.len() != cells {
            return Err(Error::InvalidSymbol(format!("{} counts for {cells} cells", self.counts.len())));
        }
        let total: u64 = self.counts.iter().sum();
        if total != self.n as u64 {
            return Err(Error::InvalidSymbol(format!("counts sum to {total}, n = {}", self.n)));
        }
        Ok(())
    }

    /// Cell bounds `(lower, upper)` of flat index `cell`.
    pub fn cell_bounds(&self, cell: usize) -> (Vec<f64>, Vec<f64>) {
        let shape = self.shape();
        let mut rem = cell;
        let mut idx = vec![0; shape.len()];
        for j in (0..shape.len()).rev() {
            idx[j] = rem % shape[j];
            rem /= shape[j];
        }
        let lower = idx.iter().enumerate().map(|(j, &b)| self.grids[j][b]).collect();
        let upper = idx.iter().enumerate().map(|(j, &b)| self.grids[j][b + 1]).collect();
        (lower, upper)
    }
}

fn validate_grids(grids: &[Vec<f64>]) -> Result<()> {
    if grids.is_empty() {
        return Err(Error::InvalidSymbol("no grids".into()));
    }
    for (j, g) in grids.iter().enumerate() {
        check_finite(g, "grid edges")?;
        if g.len() < 2 {
            return Err(Error::InvalidSymbol(format!("grid {} has no bins", j + 1)));
        }
        if g.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidSymbol(format!("grid {} is not strictly increasing", j + 1)));
        }
    }
    Ok(())
}

fn bin_of(grid: &[f64], v: f64) -> Option<usize> {
    let (first, last) = (grid[0], grid[grid.len() - 1]);
    if v < first || v > last {
        return None;
    }
    if v == first {
        return Some(0);
    }
    // first edge >= v closes the bin (left, right]
    let pos = grid.partition_point(|&e| e < v);
    Some(pos - 1)
}

/// Counts over a fixed grid with bins `(left, right]`; the leftmost edge is
/// included in the first bin.
pub fn make_hist_fixed(x: &DataMatrix, grids: &[Vec<f64>]) -> Result<FixedBinHistogramSymbol> {
    if grids.len() != x.d() {
        return Err(Error::Dimension { expected: x.d(), got: grids.len() });
    }
    validate_grids(grids)?;
    let shape: Vec<usize> = grids.iter().map(|g| g.len() - 1).collect();
    let mut counts = vec![0u64; shape.iter().product()];
    for (i, row) in x.rows().enumerate() {
        let mut flat = 0;
        for (j, &v) in row.iter().enumerate() {
            let b = bin_of(&grids[j], v)
                .ok_or_else(|| Error::Data(format!("row {} lies outside the grid in margin {}", i + 1, j + 1)))?;
            flat = flat * shape[j] + b;
        }
        counts[flat] += 1;
    }
    Ok(FixedBinHistogramSymbol { grids: grids.to_vec(), counts, n: x.n() })
}

impl RandomBinHistogramSymbol {
    pub fn validate(&self) -> Result<()> {
        if self.k.is_empty() || self.k.len() != self.s.len() {
            return Err(Error::InvalidSymbol("k and s must be non-empty and of equal length".into()));
        }
        check_k(&self.k, self.n)?;
        check_finite(&self.s, "order statistics")?;
        if self.s.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::InvalidSymbol("order statistics must be nondecreasing".into()));
        }
        Ok(())
    }

    /// Number of points strictly between consecutive order statistics,
    /// including the two unbounded end bins.
    pub fn implied_counts(&self) -> Vec<usize> {
        let mut prev = 0;
        let mut out = Vec::with_capacity(self.k.len() + 1);
        for &k in self.k.iter().chain(std::iter::once(&(self.n + 1))) {
            out.push(k - prev - 1);
            prev = k;
        }
        out
    }
}

fn check_k(k: &[usize], n: usize) -> Result<()> {
    if k[0] < 1 || k[k.len() - 1] > n {
        return Err(Error::IndexOutOfRange(format!("orders {k:?} outside 1..={n}")));
    }
    if k.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Constraint(format!("orders {k:?} are not strictly increasing")));
    }
    Ok(())
}

/// Selected order statistics of a univariate sample.
pub fn make_hist_random(x: &[f64], k: &[usize]) -> Result<RandomBinHistogramSymbol> {
    check_finite(x, "data")?;
    if k.is_empty() {
        return Err(Error::InvalidSymbol("no order indices".into()));
    }
    check_k(k, x.len())?;
    let s = sorted(x);
    Ok(RandomBinHistogramSymbol { s: k.iter().map(|&i| s[i - 1]).collect(), k: k.to_vec(), n: x.len() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::Family;
    use crate::rng::seeded;
    use proptest::prelude::*;
    use rand::seq::SliceRandom;

    fn rows(v: &[(f64, f64)]) -> DataMatrix {
        DataMatrix::from_rows(&v.iter().map(|&(a, b)| vec![a, b]).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn interval_examples() {
        let s = make_interval(&[3.0, 1.0, 2.0], 1, 3).unwrap();
        assert_eq!((s.s_l, s.s_u, s.n), (1.0, 3.0, 3));
        let s = make_interval(&[5.0, 5.0, 5.0], 1, 3).unwrap();
        assert_eq!((s.s_l, s.s_u), (5.0, 5.0));
        assert!(matches!(make_interval(&[1.0, 2.0], 2, 2), Err(Error::Constraint(_))));
        assert!(matches!(make_interval(&[1.0, 2.0], 0, 2), Err(Error::IndexOutOfRange(_))));
        assert!(matches!(make_interval(&[1.0, 2.0], 1, 3), Err(Error::IndexOutOfRange(_))));
    }

    #[test]
    fn minmax_configurations() {
        let s = make_rect_minmax(&rows(&[(0.0, 0.0), (1.0, 1.0)])).unwrap();
        assert_eq!(s.p, 2);
        assert_eq!(s.locations, vec![vec![0.0, 0.0], vec![1.0, 1.0]]);
        assert!(s.main_diagonal());

        let s = make_rect_minmax(&rows(&[(0.0, 0.0), (1.0, 2.0), (2.0, 1.0)])).unwrap();
        assert_eq!(s.p, 3);
        assert_eq!(s.locations, vec![vec![0.0, 0.0]]);
        assert_eq!((s.s_min.clone(), s.s_max.clone()), (vec![0.0, 0.0], vec![2.0, 2.0]));

        let s = make_rect_minmax(&rows(&[(0.0, 1.0), (1.0, 0.0), (2.0, 1.5), (1.2, 3.0), (1.0, 1.0)])).unwrap();
        assert_eq!(s.p, 4);
        assert!(s.locations.is_empty());

        let s = make_rect_minmax(&rows(&[(0.0, 5.0), (0.5, 0.7), (3.0, -1.0)])).unwrap();
        assert_eq!(s.p, 2);
        assert!(!s.main_diagonal());

        assert!(matches!(make_rect_minmax(&rows(&[(0.0, 0.0), (0.0, 1.0), (1.0, 0.5)])), Err(Error::Tie(_))));
        assert!(matches!(make_rect_minmax(&rows(&[(0.0, 0.0)])), Err(Error::Degenerate(_))));
    }

    #[test]
    fn seq_nest_matches_two_stage_sort() {
        let fam = Family::bivariate_normal(0.0, 0.0, 1.0, 1.0, 0.4).unwrap();
        let x = fam.sample(60, &mut seeded(11)).unwrap();
        let s = make_rect_seq_nest(&x, &[6, 5], &[55, 35], &[1, 2]).unwrap();
        let c0 = sorted(&x.column(0));
        assert_eq!((s.s_l[0], s.s_u[0]), (c0[5], c0[54]));
        let mut inner: Vec<f64> = x.rows().filter(|r| r[0] > c0[5] && r[0] < c0[54]).map(|r| r[1]).collect();
        assert_eq!(inner.len(), 48);
        inner.sort_by(f64::total_cmp);
        assert_eq!((s.s_l[1], s.s_u[1]), (inner[4], inner[34]));
        assert!(make_rect_seq_nest(&x, &[6, 5], &[55, 49], &[1, 2]).is_err());
        assert!(make_rect_seq_nest(&x, &[6, 5], &[55, 48], &[1, 2]).is_ok());
    }

    #[test]
    fn seq_nest_boundary_case_matches_bounding_box() {
        let fam = Family::bivariate_normal(0.0, 0.0, 1.0, 1.0, 0.0).unwrap();
        let mut hits = 0;
        for seed in 0..40 {
            let x = fam.sample(12, &mut seeded(seed)).unwrap();
            let mm = make_rect_minmax(&x).unwrap();
            let sn = make_rect_seq_nest(&x, &[1, 1], &[12, 10], &[1, 2]).unwrap();
            assert_eq!((sn.s_l[0], sn.s_u[0]), (mm.s_min[0], mm.s_max[0]));
            if mm.p == 4 {
                hits += 1;
                assert_eq!(sn.s_l, mm.s_min);
                assert_eq!(sn.s_u, mm.s_max);
            }
        }
        assert!(hits > 10);
    }

    #[test]
    fn axis_order_swaps_roles() {
        let fam = Family::bivariate_normal(0.0, 0.0, 1.0, 1.0, 0.6).unwrap();
        let x = fam.sample(60, &mut seeded(5)).unwrap();
        let mirrored = DataMatrix::new(x.rows().flat_map(|r| [r[1], r[0]]).collect(), 2).unwrap();
        let a = make_rect_seq_nest(&x, &[6, 5], &[55, 35], &[1, 2]).unwrap();
        let b = make_rect_seq_nest(&mirrored, &[5, 6], &[35, 55], &[2, 1]).unwrap();
        assert_eq!(a.s_l, vec![b.s_l[1], b.s_l[0]]);
        assert_eq!(a.s_u, vec![b.s_u[1], b.s_u[0]]);
        let a = make_rect_iter_seg(&x, &[6, 3], &[55, 3], &[1, 2]).unwrap();
        let b = make_rect_iter_seg(&mirrored, &[3, 6], &[3, 55], &[2, 1]).unwrap();
        assert_eq!(a.s_l, vec![b.s_l[1], b.s_l[0]]);
        assert_eq!(a.s_u, vec![b.s_u[1], b.s_u[0]]);
    }

    #[test]
    fn iter_seg_regions() {
        let fam = Family::bivariate_normal(0.0, 0.0, 1.0, 1.0, 0.7).unwrap();
        let x = fam.sample(60, &mut seeded(3)).unwrap();
        let s = make_rect_iter_seg(&x, &[6, 3], &[55, 3], &[1, 2]).unwrap();
        let below: Vec<&[f64]> = x.rows().filter(|r| r[0] < s.s_l[0]).collect();
        let above: Vec<&[f64]> = x.rows().filter(|r| r[0] > s.s_u[0]).collect();
        assert_eq!((below.len(), above.len()), (5, 5));
        assert_eq!(below.iter().filter(|r| r[1] < s.s_l[1]).count(), 2);
        assert_eq!(above.iter().filter(|r| r[1] < s.s_u[1]).count(), 2);
        assert!(matches!(make_rect_iter_seg(&x, &[6, 5], &[55, 3], &[1, 2]), Err(Error::Constraint(_))));
        assert!(matches!(make_rect_iter_seg(&x, &[6, 3], &[55, 5], &[1, 2]), Err(Error::Constraint(_))));

        let big = fam.sample(300, &mut seeded(4)).unwrap();
        let s = make_rect_iter_seg(&big, &[30, 15], &[275, 15], &[1, 2]).unwrap();
        assert_eq!(big.rows().filter(|r| r[0] < s.s_l[0]).count(), 29);
        assert_eq!(big.rows().filter(|r| r[0] > s.s_u[0]).count(), 25);
    }

    #[test]
    fn iter_seg_conventions_differ_only_in_upper_bound() {
        let fam = Family::bivariate_normal(0.0, 0.0, 1.0, 1.0, 0.3).unwrap();
        let x = fam.sample(20, &mut seeded(8)).unwrap();
        let a = make_rect_iter_seg_with(&x, &[6, 2], &[14, 2], &[1, 2], UpperIndex::FromBottom).unwrap();
        let b = make_rect_iter_seg_with(&x, &[6, 2], &[14, 2], &[1, 2], UpperIndex::FromTop).unwrap();
        assert_eq!(a.s_l, b.s_l);
        assert_eq!(a.s_u[0], b.s_u[0]);
        assert!(a.s_u[1] < b.s_u[1]);
    }

    #[test]
    fn fixed_histogram_binning() {
        let x = DataMatrix::from_column(&[0.5, 1.5, 1.0]).unwrap();
        let h = make_hist_fixed(&x, &[vec![0.0, 1.0, 2.0]]).unwrap();
        assert_eq!(h.counts, vec![2, 1]);
        let x = DataMatrix::from_column(&[0.0, 2.0]).unwrap();
        assert_eq!(make_hist_fixed(&x, &[vec![0.0, 1.0, 2.0]]).unwrap().counts, vec![1, 1]);
        let x = DataMatrix::from_column(&[2.5]).unwrap();
        assert!(matches!(make_hist_fixed(&x, &[vec![0.0, 1.0, 2.0]]), Err(Error::Data(_))));
        assert!(make_hist_fixed(&x, &[vec![0.0, 0.0, 3.0]]).is_err());
    }

    #[test]
    fn fixed_histogram_2d_matches_double_loop() {
        let fam = Family::bivariate_normal(0.0, 0.0, 1.0, 1.0, 0.5).unwrap();
        let x = fam.sample(10_000, &mut seeded(21)).unwrap();
        let g: Vec<f64> = (0..=10).map(|i| -6.0 + 1.2 * i as f64).collect();
        let h = make_hist_fixed(&x, &[g.clone(), g.clone()]).unwrap();
        let mut naive = vec![0u64; 100];
        for r in x.rows() {
            for bi in 0..10 {
                for bj in 0..10 {
                    let in_i = (r[0] > g[bi] || (bi == 0 && r[0] == g[0])) && r[0] <= g[bi + 1];
                    let in_j = (r[1] > g[bj] || (bj == 0 && r[1] == g[0])) && r[1] <= g[bj + 1];
                    if in_i && in_j {
                        naive[bi * 10 + bj] += 1;
                    }
                }
            }
        }
        assert_eq!(h.counts, naive);
        h.validate().unwrap();
        let (lo, hi) = h.cell_bounds(23);
        assert_eq!((lo, hi), (vec![g[2], g[3]], vec![g[3], g[4]]));
    }

    #[test]
    fn random_histogram_examples() {
        let x = [4.0, 2.0, 5.0, 1.0, 3.0];
        let h = make_hist_random(&x, &[1, 2, 3, 4, 5]).unwrap();
        assert_eq!(h.s, vec![1.0, 2.0, 3.0, 4.0, 5.0]);
        assert_eq!(h.implied_counts(), vec![0; 6]);
        let x: Vec<f64> = (0..21).map(|i| ((i * 8) % 21) as f64).collect();
        let h = make_hist_random(&x, &[1, 6, 11, 16, 21]).unwrap();
        assert_eq!(h.s, vec![0.0, 5.0, 10.0, 15.0, 20.0]);
        assert_eq!(h.implied_counts(), vec![0, 4, 4, 4, 4, 0]);
        assert!(matches!(make_hist_random(&x, &[2, 2]), Err(Error::Constraint(_))));
    }

    #[test]
    fn json_round_trip_is_bit_identical() {
        let fam = Family::bivariate_normal(0.1, -0.3, 1.0, 2.0, 0.5).unwrap();
        let x = fam.sample(30, &mut seeded(2)).unwrap();
        let syms = vec![
            Symbol::Interval(make_interval(&x.column(0), 2, 29).unwrap()),
            Symbol::RectMinmax(make_rect_minmax(&x).unwrap()),
            Symbol::RectOrder(make_rect_iter_seg(&x, &[2, 6], &[2, 25], &[2, 1]).unwrap()),
            Symbol::HistFixed(make_hist_fixed(&x, &[vec![-9.0, 0.0, 9.0], vec![-9.0, 9.0]]).unwrap()),
            Symbol::HistRandom(make_hist_random(&x.column(1), &[1, 15, 30]).unwrap()),
        ];
        let text = serde_json::to_string(&syms).unwrap();
        let back: Vec<Symbol> = serde_json::from_str(&text).unwrap();
        assert_eq!(back, syms);
        assert_eq!(serde_json::to_string(&back).unwrap(), text);
        assert!(text.contains("\"type\":\"rect_minmax\""));
        for s in &back {
            s.validate().unwrap();
        }
    }

    proptest! {
        #[test]
        fn constructors_are_permutation_invariant(seed in 0u64..10_000, rho in -0.9f64..0.9) {
            let fam = Family::bivariate_normal(0.0, 0.0, 1.0, 1.0, rho).unwrap();
            let x = fam.sample(40, &mut seeded(seed)).unwrap();
            let mut rows: Vec<Vec<f64>> = x.rows().map(|r| r.to_vec()).collect();
            rows.shuffle(&mut seeded(seed + 1));
            let y = DataMatrix::from_rows(&rows).unwrap();
            prop_assert_eq!(make_rect_minmax(&x).unwrap(), make_rect_minmax(&y).unwrap());
            prop_assert_eq!(
                make_rect_seq_nest(&x, &[3, 2], &[37, 30], &[1, 2]).unwrap(),
                make_rect_seq_nest(&y, &[3, 2], &[37, 30], &[1, 2]).unwrap()
            );
            prop_assert_eq!(
                make_rect_iter_seg(&x, &[3, 8], &[2, 33], &[2, 1]).unwrap(),
                make_rect_iter_seg(&y, &[3, 8], &[2, 33], &[2, 1]).unwrap()
            );
            prop_assert_eq!(
                make_hist_random(&x.column(0), &[1, 20, 40]).unwrap(),
                make_hist_random(&y.column(0), &[1, 20, 40]).unwrap()
            );
        }

        #[test]
        fn minmax_interior_points_are_strictly_inside(seed in 0u64..10_000, rho in -0.95f64..0.95, n in 2usize..30) {
            let fam = Family::bivariate_normal(0.0, 0.0, 1.0, 1.0, rho).unwrap();
            let x = fam.sample(n, &mut seeded(seed)).unwrap();
            let s = make_rect_minmax(&x).unwrap();
            let strictly_inside = x
                .rows()
                .filter(|r| r[0] > s.s_min[0] && r[0] < s.s_max[0] && r[1] > s.s_min[1] && r[1] < s.s_max[1])
                .count();
            prop_assert_eq!(strictly_inside, n - s.p);
            s.validate().unwrap();
        }

        #[test]
        fn histogram_counts_partition_the_sample(seed in 0u64..10_000, n in 1usize..200) {
            let fam = Family::normal(0.0, 1.0).unwrap();
            let x = fam.sample(n, &mut seeded(seed)).unwrap();
            let h = make_hist_fixed(&x, &[vec![-50.0, -1.0, 0.0, 0.5, 50.0]]).unwrap();
            prop_assert_eq!(h.counts.iter().sum::<u64>(), n as u64);
            if n >= 3 {
                let r = make_hist_random(&x.column(0), &[1, n / 2 + 1, n]).unwrap();
                prop_assert_eq!(r.implied_counts().iter().sum::<usize>(), n - 3);
            }
        }
    }
}
