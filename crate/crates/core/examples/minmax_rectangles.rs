// Min/max rectangles: the full likelihood against the four-point approximation.

use symlik::estimation::{fit_mle, FitOptions};
use symlik::likelihood::{RectConfig, RectLikelihood};
use symlik::rng::seeded;
use symlik::symbols::{make_rect_minmax, Symbol};
use symlik::{Family, FamilyKind};

pub fn run_example() -> symlik::Result<()> {
    let truth = Family::bivariate_normal(2.0, 5.0, 0.7, 0.7, 0.9)?;
    let mut rng = seeded(3);
    let mut symbols = vec![];
    let mut distinct = 0;
    for _ in 0..60 {
        let r = make_rect_minmax(&truth.sample(5, &mut rng)?)?;
        if RectConfig::of(&r).p() == 4 {
            distinct += 1;
        }
        symbols.push(Symbol::RectMinmax(r));
    }
    println!("{distinct} of 60 rectangles have four distinct construction points");
    let theta0 = truth.theta().to_vec();
    for rect in [RectLikelihood::Full, RectLikelihood::FourPoint] {
        let opts = FitOptions { rect, ..FitOptions::default() };
        let fit = fit_mle(&symbols, FamilyKind::BivariateNormal, &theta0, &opts)?;
        println!("{rect:?}: rho {:.4}, sigma1 {:.4}, sigma2 {:.4}", fit.theta_hat[4], fit.theta_hat[2], fit.theta_hat[3]);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("example failed");
}
