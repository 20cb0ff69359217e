// Checks a likelihood against simulated symbols, then shows the check
// catching a deliberately wrong one.

use symlik::likelihood::{loglik_interval, symbol_loglik, RectLikelihood};
use symlik::simulation::oracle::OracleCase;
use symlik::simulation::{mc_density_oracle, mc_density_oracle_with};
use symlik::symbols::{IntervalSymbol, Symbol};
use symlik::Family;

pub fn run_example() -> symlik::Result<()> {
    let fam = Family::uniform(0.0, 1.0)?;
    let case = OracleCase::Interval { n: 5, l: 2, u: 4 };
    let good = mc_density_oracle(&case, &fam, 100_000, 1)?;
    println!("{}: max |z| {:.2}, passed {}", good.case, good.max_abs_z, good.passed);

    let wrong = |s: &Symbol, f: &Family| match s {
        Symbol::Interval(iv) => loglik_interval(&IntervalSymbol { n: iv.n + 1, ..iv.clone() }, f),
        other => symbol_loglik(other, f, RectLikelihood::Full),
    };
    let bad = mc_density_oracle_with(&case, &fam, 100_000, 1, &wrong)?;
    println!("with n + 1: max |z| {:.2}, passed {}", bad.max_abs_z, bad.passed);
    assert!(good.passed && !bad.passed);
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("example failed");
}
