// Small-error search and the error/query trade-off.

use qqw::search::{self, SearchPlan, SmallErrorPlan};
use qqw::{BitOracle, Result, RngSeed};

pub fn run() -> Result<()> {
    let n = 4096;
    println!("worst-case queries of the small-error construction, N={n}:");
    for k in [1, 4, 8, 12] {
        let plan = SmallErrorPlan::new(n, 2f64.powi(-k))?;
        let bound = 2.45 * ((n * k as usize) as f64).sqrt();
        println!(
            "  eps=2^-{k:<2} t0={:<2} queries={:<4} 2.45*sqrt(N log(1/eps))={bound:.1} error(t=1)={:.2e}",
            plan.t0,
            plan.worst_case_queries(),
            plan.failure_prob(1)
        );
    }

    let mut rng = RngSeed(11).rng();
    let mut oracle = BitOracle::planted(n, 100, &mut rng)?;
    let out = search::theorem3_search(&mut oracle, 2f64.powi(-6), &mut rng)?;
    println!("t=100, eps=2^-6: found {:?} with {} queries", out.found(), out.queries.total());

    // With a promise of many solutions, repeating a cheap search wins.
    let plan = SearchPlan::choose(n, n / 8, 2f64.powi(-10))?;
    println!(
        "t=N/8, eps=2^-10: {:?} strategy, {} worst-case queries",
        plan.strategy(),
        plan.worst_case_queries()
    );

    let grid = [(1024, 1, 0.25), (1024, 32, 2f64.powi(-6)), (1024, 128, 2f64.powi(-10))];
    for r in search::tradeoff_sweep(&grid, 2000, RngSeed(5))? {
        println!(
            "N={} t={} eps={:.2e}: T_mean={:.1} T_max={} measured={:.4} analytic={:.2e} ratio={:.3}",
            r.n,
            r.t,
            r.eps_target,
            r.t_mean,
            r.t_max,
            r.eps_measured,
            r.eps_analytic,
            r.tradeoff_ratio()
        );
    }
    Ok(())
}

fn main() -> Result<()> {
    run()
}
