// Fixed-bin and random-bin histograms as symbols.

use symlik::estimation::{fit_mle, FitOptions};
use symlik::likelihood::{loglik_hist_fixed, loglik_hist_random};
use symlik::rng::seeded;
use symlik::symbols::{make_hist_fixed, make_hist_random, Symbol};
use symlik::{DataMatrix, Family, FamilyKind};

pub fn run_example() -> symlik::Result<()> {
    let truth = Family::normal(0.5, 1.5)?;
    let mut rng = seeded(5);
    let grid = vec![-3.0, -1.0, 0.0, 1.0, 2.0, 4.0];

    let x = truth.sample(200, &mut rng)?;
    // fixed bins only see points inside the grid
    let inside: Vec<f64> = x.column(0).into_iter().filter(|v| (grid[0]..=grid[5]).contains(v)).collect();
    let h = make_hist_fixed(&DataMatrix::from_column(&inside)?, std::slice::from_ref(&grid))?;
    println!("counts {:?}, loglik at truth {:.4}", h.counts, loglik_hist_fixed(&h, &truth)?);

    // quartile summaries of 40 classes of 9
    let mut symbols = vec![];
    for _ in 0..40 {
        let c = truth.sample(9, &mut rng)?.column(0);
        let s = make_hist_random(&c, &[1, 3, 5, 7, 9])?;
        if symbols.is_empty() {
            println!("first class: orders {:?} at {:?}, loglik {:.4}", s.k, s.s, loglik_hist_random(&s, &truth)?);
        }
        symbols.push(Symbol::HistRandom(s));
    }
    let fit = fit_mle(&symbols, FamilyKind::Normal1D, &[0.0, 1.0], &FitOptions::default())?;
    println!("random-bin fit: mu {:.4}, sigma {:.4}", fit.theta_hat[0], fit.theta_hat[1]);
    assert!(fit.converged);
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("example failed");
}
