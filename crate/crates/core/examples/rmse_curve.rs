// How much information intervals and histograms keep, relative to the full sample.

use symlik::simulation::{run_rmse_study, RmseConfig, SymbolKind};

pub fn run_example() -> symlik::Result<()> {
    let cfg = RmseConfig { n: 21, mu0: 50.0, sigma0: 17.0, replicates: 20, master_seed: 9 };
    let curve = run_rmse_study(&cfg)?;
    println!("{:<10} {:>3} {:>6} {:>9} {:>9}", "kind", "i", "q", "mu", "sigma");
    for r in curve.rows.iter().filter(|r| r.kind == SymbolKind::Classical || r.i % 3 == 1) {
        println!("{:<10} {:>3} {:>6.3} {:>9.3} {:>9.3}", format!("{:?}", r.kind), r.i, r.q, r.rmse_mu, r.rmse_sigma);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("example failed");
}
