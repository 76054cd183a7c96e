// Zero-error AND-OR tree evaluation with classically checked certificates.

use qqw::andor::{self, InputClass, TreeShape, Verdict, ZeroErrorEvaluator};
use qqw::{BitOracle, Result, RngSeed};

pub fn run() -> Result<()> {
    let shape = andor::make_theorem9_shape(512)?;
    let ev = ZeroErrorEvaluator::new(shape.clone())?;
    println!(
        "{shape}: nominal cost of a 1-certificate {:.0}, of a 0-certificate {:.0}",
        ev.nominal_queries(true),
        ev.nominal_queries(false)
    );

    let mut rng = RngSeed(77).rng();
    let x = andor::hard_instance(&shape, false, &mut rng);
    let mut oracle = BitOracle::new(x.clone())?;
    let v = ev.evaluate(&mut oracle, &mut rng, 20_000)?;
    match &v.verdict {
        Verdict::Value { value, certificate } => println!(
            "value {} (true value {}), certificate of {} leaves, {} quantum + {} verification queries",
            u8::from(*value),
            u8::from(andor::eval_tree(&shape, &x)?),
            certificate.len(),
            v.queries.quantum_queries,
            v.queries.classical_verification_queries
        ),
        Verdict::DontKnow => println!("don't know"),
    }

    // Cutoff at twice a calibrated mean: answers are never wrong, and at
    // most about half the runs give up.
    let report = andor::run_trials(&ev, InputClass::Mixed, 400, RngSeed(1), 2.0)?;
    println!(
        "400 runs: mean queries {:.0}, cutoff {}, don't-know rate {:.3}, wrong answers {}",
        report.mean_queries(),
        report.cutoff,
        report.dont_know_rate(),
        report.unsound
    );

    let small = TreeShape::uniform(2, 2, andor::Gate::And)?;
    let mut oracle = BitOracle::parse("1011")?;
    let cert = andor::find_certificate_a1(&small, &mut oracle, &mut rng, 10.0, 10_000)?;
    println!("(x0 v x1) ^ (x2 v x3) on 1011: 1-certificate {:?}", cert.entries);
    Ok(())
}

fn main() -> Result<()> {
    run()
}
