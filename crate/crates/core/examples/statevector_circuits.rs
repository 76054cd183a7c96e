// Statevector simulation of query circuits and the degree of their
// acceptance probability.

use qqw::poly::{degree_via_differences, symmetrize};
use qqw::statevector::{acceptance_table, run_circuit, Circuit};
use qqw::{Result, RngSeed};

pub fn run() -> Result<()> {
    let n = 8;
    let mut x = vec![false; n];
    x[5] = true;
    for k in 0..=2 {
        let c = Circuit::grover(n, k)?;
        let (p, q) = run_circuit(&c, &x)?;
        println!("Grover k={k}: acceptance {p:.6} with {q} queries");
    }

    let c = Circuit::exact_search(n, 2)?;
    let mut y = vec![false; n];
    y[1] = true;
    y[6] = true;
    println!("exact search t=2: acceptance {:.12}", run_circuit(&c, &y)?.0);

    let mut rng = RngSeed(9).rng();
    let circuits = [
        ("grover k=1", Circuit::grover(4, 1)?),
        ("grover k=2", Circuit::grover(6, 2)?),
        ("random T=2", Circuit::random(4, 1, 2, &mut rng)?),
        ("random T=3", Circuit::random(5, 0, 3, &mut rng)?),
    ];
    for (name, c) in &circuits {
        let table = acceptance_table(c, c.n)?;
        let profile = symmetrize(&table)?;
        println!(
            "{name}: N={} T={} symmetrized degree {} (at most 2T = {})",
            c.n,
            c.queries(),
            degree_via_differences(&profile),
            2 * c.queries()
        );
    }
    Ok(())
}

fn main() -> Result<()> {
    run()
}
