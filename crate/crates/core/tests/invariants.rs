use proptest::prelude::*;
use symlik::estimation::{fit_mle, meta_mean_luo, FitOptions};
use symlik::likelihood::{dataset_loglik, loglik_hist_random, loglik_interval, symbol_loglik, RectLikelihood};
use symlik::quadrature::integrate;
use symlik::rng::seeded;
use symlik::symbols::{
    make_hist_fixed, make_hist_random, make_interval, make_rect_iter_seg, make_rect_marginal, make_rect_minmax,
    make_rect_seq_nest, Symbol,
};
use symlik::{DataMatrix, Family, FamilyKind};

fn univariate() -> impl Strategy<Value = Family> {
    prop_oneof![
        (-20.0f64..20.0, 0.05f64..10.0).prop_map(|(m, s)| Family::normal(m, s).unwrap()),
        (-2.0f64..3.0, 0.05f64..1.5).prop_map(|(m, s)| Family::lognormal(m, s).unwrap()),
        (-5.0f64..5.0, 0.1f64..9.0, -6.0f64..6.0).prop_map(|(m, v, g)| Family::skew_normal(m, v, g).unwrap()),
        (-5.0f64..5.0, 0.1f64..10.0).prop_map(|(a, w)| Family::uniform(a, a + w).unwrap()),
    ]
}

fn bivariate() -> impl Strategy<Value = Family> {
    (-3.0f64..3.0, -3.0f64..3.0, 0.2f64..3.0, 0.2f64..3.0, -0.95f64..0.95)
        .prop_map(|(m1, m2, s1, s2, r)| Family::bivariate_normal(m1, m2, s1, s2, r).unwrap())
}

/// Points spread over the bulk and far tails of a univariate family.
fn probes(f: &Family) -> Vec<f64> {
    let (m, s) = f.mean_sd().unwrap();
    (-60..=60).map(|i| m + s * i as f64 / 5.0).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn pdf_nonnegative_and_cdf_monotone(f in univariate()) {
        let mut prev = 0.0;
        for x in probes(&f) {
            prop_assert!(f.density(x) >= 0.0);
            let c = f.dist(x);
            prop_assert!((0.0..=1.0).contains(&c));
            prop_assert!(c >= prev - 1e-15, "cdf decreased at {x}");
            prev = c;
        }
        let (_, s) = f.mean_sd().unwrap();
        prop_assert_eq!(f.dist(-1e10 * s - 1e10), 0.0);
        prop_assert!((f.dist(1e10 * s + 1e10) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn one_dimensional_partitions_tile_to_one(f in univariate(), mut cuts in prop::collection::vec(-10.0f64..10.0, 1..8)) {
        let (m, s) = f.mean_sd().unwrap();
        cuts.sort_by(f64::total_cmp);
        let mut edges = vec![f64::NEG_INFINITY];
        edges.extend(cuts.iter().map(|c| m + s * c));
        edges.push(f64::INFINITY);
        let total: f64 = edges.windows(2).map(|w| f.rect_prob(&[w[0]], &[w[1]]).unwrap()).sum();
        prop_assert!((total - 1.0).abs() < 1e-10, "{total}");
    }

    #[test]
    fn bivariate_rectangles_are_probabilities(f in bivariate(), a in -4.0f64..4.0, b in -4.0f64..4.0, w in 0.0f64..5.0, h in 0.0f64..5.0) {
        let lo = [a, b];
        let hi = [a + w, b + h];
        let p = f.rect_prob(&lo, &hi).unwrap();
        prop_assert!((-1e-12..=1.0 + 1e-12).contains(&p));
        let q = f.swapped().rect_prob(&[b, a], &[b + h, a + w]).unwrap();
        prop_assert!((p - q).abs() < 1e-10);
        // four quadrants around (a, b) tile the plane
        let inf = f64::INFINITY;
        let total = f.rect_prob(&[-inf, -inf], &[a, b]).unwrap()
            + f.rect_prob(&[a, -inf], &[inf, b]).unwrap()
            + f.rect_prob(&[-inf, b], &[a, inf]).unwrap()
            + f.rect_prob(&[a, b], &[inf, inf]).unwrap();
        prop_assert!((total - 1.0).abs() < 1e-8, "{total}");
    }

    #[test]
    fn skew_normal_with_zero_shape_is_normal(m in -10.0f64..10.0, s in 0.1f64..5.0, x in -30.0f64..30.0) {
        let sn = Family::skew_normal(m, s * s, 0.0).unwrap();
        let n = Family::normal(m, s).unwrap();
        prop_assert!((sn.density(x) - n.density(x)).abs() < 1e-12);
        prop_assert!((sn.dist(x) - n.dist(x)).abs() < 1e-12);
    }

    #[test]
    fn histogram_counts_add_up(seed in 0u64..10_000, n in 2usize..60, b in 1usize..6) {
        let f = Family::normal(0.0, 1.0).unwrap();
        let x = f.sample(n, &mut seeded(seed)).unwrap().column(0);
        let lo = x.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = x.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let mut grid: Vec<f64> = (0..=b).map(|i| lo + (hi - lo) * i as f64 / b as f64).collect();
        grid[b] = hi;
        let h = make_hist_fixed(&DataMatrix::from_column(&x).unwrap(), &[grid]).unwrap();
        prop_assert_eq!(h.counts.iter().sum::<u64>() as usize, n);

        let k: Vec<usize> = (1..=n).step_by(1 + n / (b + 1)).collect();
        let r = make_hist_random(&x, &k).unwrap();
        prop_assert_eq!(r.implied_counts().iter().sum::<usize>(), n - k.len());
    }

    #[test]
    fn minmax_interior_points_are_strictly_inside(f in bivariate(), seed in 0u64..10_000, n in 2usize..30) {
        let x = f.sample(n, &mut seeded(seed)).unwrap();
        let r = make_rect_minmax(&x).unwrap();
        let inside = x
            .rows()
            .filter(|p| (0..2).all(|j| r.s_min[j] < p[j] && p[j] < r.s_max[j]))
            .count();
        prop_assert_eq!(inside, n - r.p);
        prop_assert!(r.p >= 2 && r.p <= 4.min(n));
    }

    #[test]
    fn symbol_json_round_trip_is_bit_identical(f in bivariate(), seed in 0u64..10_000) {
        let x = f.sample(24, &mut seeded(seed)).unwrap();
        let c0 = x.column(0);
        let symbols = vec![
            Symbol::Interval(make_interval(&c0, 3, 20).unwrap()),
            Symbol::HistRandom(make_hist_random(&c0, &[2, 9, 17]).unwrap()),
            Symbol::RectMinmax(make_rect_minmax(&x).unwrap()),
            Symbol::RectOrder(make_rect_marginal(&x, &[2, 3], &[22, 21]).unwrap()),
            Symbol::RectOrder(make_rect_seq_nest(&x, &[3, 2], &[22, 12], &[1, 2]).unwrap()),
            Symbol::RectOrder(make_rect_iter_seg(&x, &[2, 4], &[3, 18], &[2, 1]).unwrap()),
            Symbol::HistFixed(make_hist_fixed(&x, &[vec![-1e3, 0.1, 1e3], vec![-1e3, -0.7, 0.0, 1e3]]).unwrap()),
        ];
        let s1 = serde_json::to_string(&symbols).unwrap();
        let back: Vec<Symbol> = serde_json::from_str(&s1).unwrap();
        prop_assert_eq!(&back, &symbols);
        prop_assert_eq!(serde_json::to_string(&back).unwrap(), s1);
    }

    #[test]
    fn likelihoods_never_nan(sample_from in bivariate(), eval in bivariate(), seed in 0u64..10_000) {
        let x = sample_from.sample(12, &mut seeded(seed)).unwrap();
        let c0 = x.column(0);
        let margin = eval.marginal(0).unwrap();
        let symbols = [
            Symbol::RectMinmax(make_rect_minmax(&x).unwrap()),
            Symbol::RectOrder(make_rect_seq_nest(&x, &[2, 2], &[11, 6], &[1, 2]).unwrap()),
            Symbol::RectOrder(make_rect_iter_seg(&x, &[3, 1], &[9, 2], &[1, 2]).unwrap()),
            Symbol::HistFixed(make_hist_fixed(&x, &[vec![-50.0, 0.0, 50.0], vec![-50.0, 1.0, 50.0]]).unwrap()),
        ];
        for s in &symbols {
            for rect in [RectLikelihood::Full, RectLikelihood::FourPoint] {
                let v = symbol_loglik(s, &eval, rect).unwrap();
                prop_assert!(!v.is_nan() && v < f64::INFINITY, "{s:?}");
            }
        }
        for s in [
            Symbol::Interval(make_interval(&c0, 1, 12).unwrap()),
            Symbol::HistRandom(make_hist_random(&c0, &[1, 6, 12]).unwrap()),
        ] {
            let v = symbol_loglik(&s, &margin, RectLikelihood::Full).unwrap();
            prop_assert!(!v.is_nan() && v < f64::INFINITY);
            let u = symbol_loglik(&s, &Family::uniform(-0.5, 0.5).unwrap(), RectLikelihood::Full).unwrap();
            prop_assert!(!u.is_nan());
        }
    }

    #[test]
    fn two_bin_histogram_is_an_interval(f in univariate(), seed in 0u64..10_000, n in 2usize..40, a in 0.0f64..1.0, b in 0.0f64..1.0) {
        let x = f.sample(n, &mut seeded(seed)).unwrap().column(0);
        let l = 1 + ((n - 1) as f64 * a.min(b)) as usize;
        let u = (l + 1 + ((n - l - 1) as f64 * a.max(b)) as usize).min(n);
        let iv = make_interval(&x, l, u).unwrap();
        let h = make_hist_random(&x, &[l, u]).unwrap();
        let (p, q) = (loglik_interval(&iv, &f).unwrap(), loglik_hist_random(&h, &f).unwrap());
        prop_assert!(p == q || (p - q).abs() < 1e-12 * p.abs().max(1.0), "{p} {q}");
    }

    #[test]
    fn dataset_likelihood_is_a_sum(f in univariate(), seed in 0u64..10_000) {
        let mut rng = seeded(seed);
        let mut symbols: Vec<Symbol> = (0..6)
            .map(|_| Symbol::Interval(make_interval(&f.sample(7, &mut rng).unwrap().column(0), 2, 6).unwrap()))
            .collect();
        let one = dataset_loglik(&symbols[..1], &f).unwrap();
        prop_assert_eq!(one, symbol_loglik(&symbols[0], &f, RectLikelihood::Full).unwrap());
        let twice = dataset_loglik(&[symbols[0].clone(), symbols[0].clone()], &f).unwrap();
        prop_assert_eq!(twice, 2.0 * one);
        let all = dataset_loglik(&symbols, &f).unwrap();
        prop_assert_eq!(all, dataset_loglik(&symbols, &f).unwrap());
        symbols.reverse();
        let rev = dataset_loglik(&symbols, &f).unwrap();
        prop_assert!((all - rev).abs() <= 1e-12 * all.abs().max(1.0));
    }

    #[test]
    fn luo_mean_of_symmetric_summary_is_the_median(c in -1e3f64..1e3, a in 0.0f64..50.0, b in 0.0f64..50.0, q in 1usize..50) {
        let q5 = [c - a - b, c - a, c, c + a, c + a + b];
        let m = meta_mean_luo(&q5, 4 * q + 1).unwrap();
        prop_assert!((m - c).abs() <= 1e-12 * (c.abs() + a + b).max(1.0), "{m} vs {c}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn interval_density_integrates_to_one(f in univariate(), n in 2usize..9, a in 0.0f64..1.0, b in 0.0f64..1.0) {
        let l = 1 + ((n - 1) as f64 * a.min(b)) as usize;
        let u = (l + 1 + ((n - l - 1) as f64 * a.max(b)) as usize).min(n);
        let (m, s) = f.mean_sd().unwrap();
        // lognormal is integrated over t = ln s, where its mass is not squeezed against zero
        let log_scale = f.kind() == FamilyKind::LogNormal1D;
        let (lo, hi) = match f.kind() {
            FamilyKind::Uniform1D => (f.theta()[0], f.theta()[1]),
            FamilyKind::LogNormal1D => (f.theta()[0] - 12.0 * f.theta()[1], f.theta()[0] + 12.0 * f.theta()[1]),
            _ => (m - 12.0 * s, m + 12.0 * s),
        };
        let dens = |tl: f64, tu: f64| {
            let (sl, su, jac) = if log_scale { (tl.exp(), tu.exp(), (tl + tu).exp()) } else { (tl, tu, 1.0) };
            let sym = symlik::symbols::IntervalSymbol { s_l: sl, s_u: su, n, l, u };
            jac * loglik_interval(&sym, &f).map(f64::exp).unwrap_or(0.0)
        };
        let total = integrate(|sl| integrate(|su| dens(sl, su), sl, hi, 1e-11, 1e-10), lo, hi, 1e-9, 1e-9);
        prop_assert!((total - 1.0).abs() < 1e-6, "{total}");
    }

    #[test]
    fn fitted_points_are_local_optima(seed in 0u64..10_000, mu in -5.0f64..5.0, sigma in 0.5f64..3.0) {
        let f = Family::normal(mu, sigma).unwrap();
        let mut rng = seeded(seed);
        let symbols: Vec<Symbol> = (0..15)
            .map(|_| Symbol::HistRandom(make_hist_random(&f.sample(9, &mut rng).unwrap().column(0), &[1, 3, 5, 7, 9]).unwrap()))
            .collect();
        let fit = fit_mle(&symbols, FamilyKind::Normal1D, &[0.0, 1.0], &FitOptions::default()).unwrap();
        prop_assert!(fit.converged && fit.local_optimum);
        prop_assert!(fit.loglik_at_max.is_finite());
        let again = fit_mle(&symbols, FamilyKind::Normal1D, &[0.0, 1.0], &FitOptions::default()).unwrap();
        prop_assert_eq!(&fit.theta_hat, &again.theta_hat);
    }
}
