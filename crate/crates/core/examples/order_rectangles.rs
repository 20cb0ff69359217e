// Quantile rectangles built by marginal orders, sequential nesting and
// iterative segmentation.

use symlik::likelihood::{loglik_rect_iter_seg, loglik_rect_marginal_orders, loglik_rect_seq_nest};
use symlik::rng::seeded;
use symlik::symbols::{make_rect_iter_seg, make_rect_marginal, make_rect_seq_nest};
use symlik::Family;

pub fn run_example() -> symlik::Result<()> {
    let fam = Family::bivariate_normal(0.0, 0.0, 1.0, 2.0, 0.6)?;
    let x = fam.sample(20, &mut seeded(8))?;

    let m = make_rect_marginal(&x, &[3, 2], &[18, 19])?;
    let margins = [fam.marginal(0)?, fam.marginal(1)?];
    println!("marginal orders  s_l {:?} s_u {:?} loglik {:.4}", m.s_l, m.s_u, loglik_rect_marginal_orders(&m, &margins)?);

    let s = make_rect_seq_nest(&x, &[3, 2], &[18, 12], &[1, 2])?;
    println!("sequential nest  s_l {:?} s_u {:?} loglik {:.4}", s.s_l, s.s_u, loglik_rect_seq_nest(&s, &fam)?);

    let t = make_rect_iter_seg(&x, &[4, 2], &[16, 1], &[1, 2])?;
    println!("iter. segment    s_l {:?} s_u {:?} loglik {:.4}", t.s_l, t.s_u, loglik_rect_iter_seg(&t, &fam)?);
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("example failed");
}
