// Fit a normal model to min/max intervals and compare with the classical fit.

use symlik::estimation::{fit_mle, FitOptions};
use symlik::rng::seeded;
use symlik::symbols::{make_interval, Symbol};
use symlik::{Family, FamilyKind};

pub fn run_example() -> symlik::Result<()> {
    let truth = Family::normal(10.0, 3.0)?;
    let mut rng = seeded(11);
    let mut symbols = vec![];
    let mut pooled = vec![];
    for _ in 0..30 {
        let x = truth.sample(8, &mut rng)?.column(0);
        symbols.push(Symbol::Interval(make_interval(&x, 1, 8)?));
        pooled.extend(x);
    }
    let opts = FitOptions { compute_stderr: true, ..FitOptions::default() };
    let fit = fit_mle(&symbols, FamilyKind::Normal1D, &[0.0, 1.0], &opts)?;
    let se = fit.stderr.clone().unwrap_or_default();
    println!("interval fit: mu {:.4} (se {:.4}), sigma {:.4} (se {:.4})", fit.theta_hat[0], se[0], fit.theta_hat[1], se[1]);

    let n = pooled.len() as f64;
    let mean = pooled.iter().sum::<f64>() / n;
    let sd = (pooled.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n).sqrt();
    println!("classical fit on the {n} hidden points: mu {mean:.4}, sigma {sd:.4}");
    assert!(fit.converged);
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("example failed");
}
