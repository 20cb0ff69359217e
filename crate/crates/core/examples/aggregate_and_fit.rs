// Micro-data to symbols to estimates, the same path the `aggregate` and
// `fit` commands take.

use symlik::estimation::{fit_mle, FitOptions};
use symlik::rng::seeded;
use symlik::simulation::SymbolSpec;
use symlik::symbols::Symbol;
use symlik::{DataMatrix, Family, FamilyKind};

pub fn run_example() -> symlik::Result<()> {
    let truth = Family::bivariate_normal(1.0, -1.0, 2.0, 1.0, -0.4)?;
    let mut rng = seeded(42);
    let x = truth.sample(300, &mut rng)?;
    let labels: Vec<usize> = (0..300).map(|i| i % 30 + 1).collect();
    let x = DataMatrix::new(x.values().to_vec(), 2)?.with_labels(labels)?;

    let spec = SymbolSpec::RectMinmax;
    let symbols: Vec<Symbol> = x.split_by_class().iter().map(|(_, c)| spec.build(c)).collect::<Result<_, _>>()?;
    let json = serde_json::to_string(&symbols).expect("symbols serialise");
    println!("{} rectangles, {} bytes of JSON", symbols.len(), json.len());

    let back: Vec<Symbol> = serde_json::from_str(&json).expect("symbols parse");
    let opts = FitOptions { compute_stderr: true, ..FitOptions::default() };
    let fit = fit_mle(&back, FamilyKind::BivariateNormal, &[0.0, 0.0, 1.0, 1.0, 0.0], &opts)?;
    let se = fit.stderr.clone().unwrap_or_default();
    for (j, p) in fit.param_names.iter().enumerate() {
        println!("{p:<7} {:>8.4} +/- {:.4}", fit.theta_hat[j], se.get(j).copied().unwrap_or(f64::NAN));
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("example failed");
}
