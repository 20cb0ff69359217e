// Bivariate normal probabilities, conditional CDFs and the skew-normal family.

use symlik::Family;

pub fn run_example() -> symlik::Result<()> {
    let bvn = Family::bivariate_normal(0.0, 0.0, 1.0, 1.0, 0.5)?;
    // orthant probability has a closed form: 1/4 + asin(rho) / (2 pi)
    let p = bvn.cdf(&[0.0, 0.0])?;
    let exact = 0.25 + 0.5f64.asin() / (2.0 * std::f64::consts::PI);
    println!("P(X <= 0, Y <= 0) = {p:.15} (closed form {exact:.15})");
    assert!((p - exact).abs() < 1e-12);

    let box_p = bvn.rect_prob(&[-1.0, -0.5], &[1.0, 2.0])?;
    println!("P(box) = {box_p:.12}");
    let c = bvn.conditional_cdf(1, 0.3, 0.0)?;
    println!("P(Y <= 0 | X = 0.3) = {c:.12}");

    let sn = Family::skew_normal(1.0, 2.0, 2.0)?;
    let (m, s) = sn.mean_sd()?;
    println!("skew normal: mean {m:.6}, sd {s:.6}, F(1) = {:.6}", sn.dist(1.0));
    assert!((m - 1.0).abs() < 1e-12 && (s * s - 2.0).abs() < 1e-12);
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("example failed");
}
