// Sample mean and sd from a reported five-number summary.

use symlik::estimation::{meta_mean_luo, meta_sd_shi, meta_sd_wan, meta_symbolic};
use symlik::FamilyKind;

pub fn run_example() -> symlik::Result<()> {
    // minimum, lower quartile, median, upper quartile, maximum of n = 41 patients
    let q = [12.0, 21.5, 26.0, 33.0, 58.0];
    let n = 41;
    println!("Luo mean        {:.4}", meta_mean_luo(&q, n)?);
    println!("Wan sd          {:.4}", meta_sd_wan(&q, n)?);
    println!("Shi sd          {:.4}", meta_sd_shi(&q, n)?);
    for base in [FamilyKind::Normal1D, FamilyKind::LogNormal1D] {
        let e = meta_symbolic(&q, n, base)?;
        println!("symbolic {:<9} mean {:.4}, sd {:.4}", base.name(), e.mean_hat.unwrap_or(f64::NAN), e.sd_hat.unwrap_or(f64::NAN));
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("example failed");
}
