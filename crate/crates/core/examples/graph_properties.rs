// Graph properties: STAR, Majority and edge existence.

use qqw::graph::{self, GraphOracle, StarCertificate};
use qqw::{BitOracle, Result, RngSeed};

pub fn run() -> Result<()> {
    let mut rng = RngSeed(8).rng();
    let n = 16;
    let ev = graph::star_evaluator(n)?;
    // Vertex 3 points at everyone; every other vertex misses one edge.
    let mut g = GraphOracle::from_fn(n, |i, j| i == 3 || j != (i + 1) % n)?;
    let v = graph::star_zero_error(&ev, &mut g, &mut rng, 50_000)?;
    if let Some(cert) = v.certificate() {
        let star = StarCertificate::from_certificate(n, cert)?;
        println!("STAR: {star:?}");
        println!("  re-verified: {}", star.verify(&mut g));
    }

    for n in [4, 12, 16] {
        let mut worst = 0;
        for x in 0..1u32 << n {
            let bits: Vec<bool> = (0..n).map(|j| x >> j & 1 == 1).collect();
            worst = worst.max(graph::majority_exact(&mut BitOracle::new(bits)?)?.queries);
        }
        println!("Majority N={n}: worst case {worst} queries, N - e(N) + 1 = {}", n + 1 - graph::e_of(n) as usize);
    }

    let mut single = GraphOracle::from_fn(64, |i, j| i == 10 && j < 3)?;
    let e = graph::edge_exists(&mut single, &mut rng)?;
    println!("three edges among 64*63 slots: found {:?} with {} queries", e.edge, e.queries.total());
    Ok(())
}

fn main() -> Result<()> {
    run()
}
