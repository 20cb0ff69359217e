// A small reproducible simulation: the same seed gives the same table on any
// number of threads.

use symlik::likelihood::RectLikelihood;
use symlik::simulation::{run_experiment, ExperimentConfig, SymbolSpec};
use symlik::FamilyKind;

pub fn run_example() -> symlik::Result<()> {
    let cfg = ExperimentConfig {
        family: FamilyKind::Normal1D,
        theta0: vec![50.0, 17.0],
        m: 20,
        n_c: 9,
        replicates: 8,
        symbol: SymbolSpec::HistRandom { k: vec![1, 3, 5, 7, 9] },
        rect: RectLikelihood::Full,
        master_seed: 2024,
        max_iter: 5000,
        tol: 1e-9,
        expect: vec![],
    };
    let a = run_experiment(&cfg)?;
    let b = run_experiment(&cfg)?;
    assert_eq!(a.mean, b.mean);
    let sd = a.sd.clone().unwrap_or_default();
    for (j, p) in a.param_names.iter().enumerate() {
        println!("{p:<6} mean {:.4} sd {:.4}", a.mean[j], sd[j]);
    }
    println!("{} of {} replicates used", a.used, a.replicates);
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("example failed");
}
