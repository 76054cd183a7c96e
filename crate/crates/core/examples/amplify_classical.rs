// Amplifying a one-sided classical algorithm by searching its coin space.

use qqw::search::{amplify_one_sided, SampleSpace};
use qqw::{BitOracle, Result, RngSeed};

pub fn run() -> Result<()> {
    let mut rng = RngSeed(3).rng();
    // A(x, r) accepts on half of its 256 coin sequences.
    let mut half = BitOracle::planted(256, 128, &mut rng)?;
    let out = amplify_one_sided(&mut half, 2f64.powi(-5), SampleSpace::KnownFraction(0.5), &mut rng)?;
    println!("q=1/2: accept={} after {} calls", out.accept, out.calls);

    // A single accepting coin sequence, only |S| known.
    let mut rare = BitOracle::planted(256, 1, &mut rng)?;
    let out = amplify_one_sided(&mut rare, 2f64.powi(-4), SampleSpace::KnownSize, &mut rng)?;
    println!("q=1/256: accept={} after {} calls", out.accept, out.calls);

    let mut never = BitOracle::new(vec![false; 256])?;
    let out = amplify_one_sided(&mut never, 2f64.powi(-4), SampleSpace::KnownSize, &mut rng)?;
    println!("rejecting algorithm: accept={} after {} calls", out.accept, out.calls);
    Ok(())
}

fn main() -> Result<()> {
    run()
}
