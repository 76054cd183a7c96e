// Chebyshev growth checks and error lower-bound curves.

use qqw::poly::{self, BoundParams, UnivariatePoly};
use qqw::{Result, RngSeed};

pub fn run() -> Result<()> {
    println!("T_5 = {:?}", UnivariatePoly::chebyshev(5).coefficients());
    for (d, mu) in [(10, 0.01), (100, 0.5), (200, 3.0)] {
        let c = poly::paturi_check(d, mu)?;
        println!("d={d} mu={mu}: ln T_d(1+mu)={:.3} <= {:.3}: {}", c.ln_lhs, c.ln_rhs, c.holds);
    }

    let mut rng = RngSeed(1).rng();
    let q = poly::random_bounded_poly(8, &mut rng);
    println!(
        "random bounded degree-{} polynomial dominated by T_8 beyond 1: {}",
        q.degree(),
        poly::extremal_check(&q, &[1.1, 1.5, 2.0, 3.0])?
    );

    let params = BoundParams::default();
    println!("b floor = {:.6}", poly::b_floor());
    let rows = poly::bound_curve(1024, 1, 40, params)?;
    let mut out = Vec::new();
    poly::write_bound_csv(&rows[..5], &mut out)?;
    print!("{}", String::from_utf8_lossy(&out));
    Ok(())
}

fn main() -> Result<()> {
    run()
}
