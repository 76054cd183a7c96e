// Search primitives on a black-box input: fixed-iteration Grover, exact
// search with a known solution count, and search with an unknown count.

use qqw::amplitude::{self, ExactPlan, IterationSchedule, SCHEDULE_FACTOR};
use qqw::{BitOracle, Result, RngSeed};

pub fn run() -> Result<()> {
    let mut rng = RngSeed(2024).rng();
    let n = 1024;

    // Success probability of k iterations with one marked item.
    let best_k = (std::f64::consts::FRAC_PI_4 * (n as f64).sqrt()).floor() as u64;
    for k in [0, best_k / 2, best_k] {
        println!("N={n} t=1 k={k}: success {:.6}", amplitude::grover_success_prob(n, 1, k)?);
    }

    // Exact search: certainty when the count is known.
    let mut oracle = BitOracle::planted(n, 3, &mut rng)?;
    let plan = ExactPlan::new(n, 3)?;
    let out = amplitude::exact_search(&mut oracle, 3, &mut rng)?;
    println!(
        "exact search t=3: found {:?} with {} queries (plan {} queries, success {:.12})",
        out.found(),
        out.queries.total(),
        plan.queries(),
        plan.success_prob(3)
    );

    // Unknown count: growing iteration schedule with a query cutoff.
    let cutoff = amplitude::default_cutoff(n);
    let schedule = IterationSchedule::new(n, SCHEDULE_FACTOR, cutoff)?;
    let mut oracle = BitOracle::planted(n, 5, &mut rng)?;
    let out = amplitude::unknown_t_search(&mut oracle, &mut rng, SCHEDULE_FACTOR, cutoff)?;
    println!(
        "unknown count (t=5): found {:?}, {} quantum + {} verification queries, analytic failure {:.4}",
        out.found(),
        out.queries.quantum_queries,
        out.queries.classical_verification_queries,
        schedule.failure_prob(5)
    );

    // No solutions: never a false positive.
    let mut empty = BitOracle::new(vec![false; n])?;
    let out = amplitude::unknown_t_search(&mut empty, &mut rng, SCHEDULE_FACTOR, cutoff)?;
    println!("empty input: {:?} after {} queries", out.result, out.queries.total());
    Ok(())
}

fn main() -> Result<()> {
    run()
}
