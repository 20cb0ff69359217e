//! Independent numerical oracles shared by the integration tests.

#![allow(dead_code)]

/// Adaptive Simpson quadrature on `[a, b]`.
pub fn simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    #[allow(clippy::too_many_arguments)]
    fn rec<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let diff = left + right - whole;
        if depth == 0 || diff.abs() <= 15.0 * tol {
            return left + right + diff / 15.0;
        }
        rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) + rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
    }
    if a == b {
        return 0.0;
    }
    let m = 0.5 * (a + b);
    let (fa, fm, fb) = (f(a), f(m), f(b));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    rec(f, a, b, fa, fm, fb, whole, tol, 40)
}

/// Adaptive Simpson applied on `panels` equal sub-intervals, so that narrow
/// peaks are not missed by the first coarse estimate.
pub fn simpson_panels<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, panels: usize, tol: f64) -> f64 {
    let w = (b - a) / panels as f64;
    (0..panels).map(|i| simpson(f, a + i as f64 * w, a + (i + 1) as f64 * w, tol / panels as f64)).sum()
}

/// `∫_lo^hi ∫_x^hi f(x, y) dy dx` by nested adaptive Simpson.
pub fn simpson_triangle<F: Fn(f64, f64) -> f64>(f: &F, lo: f64, hi: f64, tol: f64) -> f64 {
    let outer = |x: f64| simpson_panels(&|y| f(x, y), x, hi, 16, tol * 0.01);
    simpson_panels(&outer, lo, hi, 64, tol)
}

/// All compositions of `n` into `b` nonnegative parts.
pub fn compositions(n: u64, b: usize) -> Vec<Vec<u64>> {
    if b == 1 {
        return vec![vec![n]];
    }
    let mut out = vec![];
    for first in 0..=n {
        for mut rest in compositions(n - first, b - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// Sample mean and sd with an `n − 1` divisor, accumulated in a second pass.
pub fn mean_sd(x: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let m = x.iter().sum::<f64>() / n;
    let v = x.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / (n - 1.0);
    (m, v.sqrt())
}
