// Two-party certificate finding and Disjointness through it.

use qqw::andor::{self, Gate, TreeShape};
use qqw::comm::{self, CertRelationInstance};
use qqw::{Result, RngSeed};

fn bits(s: &str) -> Vec<bool> {
    s.chars().map(|c| c == '1').collect()
}

pub fn run() -> Result<()> {
    let shape = TreeShape::new(vec![2, 2], Gate::And)?;
    let (x, y) = (bits("1011"), bits("1111"));
    let c = comm::indices_from_mask("1001")?;
    println!("(1011, 1111, 1001) in R: {}", comm::verify_relation(&x, &y, &c, &shape)?);

    let mut rng = RngSeed(12).rng();
    let inst = CertRelationInstance::new(x, y, shape.clone())?;
    let (run, channel) = comm::distributed_certificate(&inst, &mut rng)?;
    println!(
        "protocol certificate {:?}: {} queries, {} qubits ({} per query), {} messages",
        run.indices(),
        run.queries.total(),
        run.qubits_sent,
        channel.qubits_per_query(),
        channel.transcript().len()
    );

    let big = andor::make_theorem9_shape(512)?;
    let k = 8 * 63;
    let mut hits = 0;
    let trials = 200;
    for _ in 0..trials {
        let mut a = vec![false; k];
        let mut b = vec![false; k];
        a[100] = true;
        b[100] = true;
        b[7] = true;
        hits += usize::from(comm::disjointness_via_r(&a, &b, &big, &mut rng)?.output);
    }
    println!("k={k}, one common element: detected in {hits}/{trials} runs");
    let r = comm::disjointness_via_r(&vec![true; k], &vec![false; k], &big, &mut rng)?;
    println!("disjoint sets: output {} after {} qubits", u8::from(r.output), r.qubits_sent);
    Ok(())
}

fn main() -> Result<()> {
    run()
}
