// Brute-force decision-tree depth, degree and sensitivity.

use qqw::andor::{self, Gate, TreeShape};
use qqw::boolfn::{self, TruthTable};
use qqw::Result;

fn report(name: &str, f: &TruthTable) -> Result<()> {
    println!(
        "{name:<14} N={:<2} D={:<2} deg={:<2} s={:<2} monotone={}",
        f.n,
        boolfn::decision_tree_depth(f)?,
        boolfn::degree(f)?,
        boolfn::sensitivity(f)?,
        boolfn::is_monotone(f)
    );
    Ok(())
}

pub fn run() -> Result<()> {
    report("OR_6", &TruthTable::or(6)?)?;
    report("majority_5", &TruthTable::threshold(5, 3)?)?;
    for (fanout, depth) in [(2, 2), (3, 2), (2, 3)] {
        let shape = TreeShape::uniform(depth, fanout, Gate::Or)?;
        let f = TruthTable::from_fn(shape.len(), |x| andor::eval_tree(&shape, x).expect("arity"))?;
        report(&shape.id(), &f)?;
    }
    // STAR on 3 vertices: some vertex points at both others.
    let star = boolfn::graph_property(3, |e| (0..3).any(|i| (0..3).filter(|&j| j != i).all(|j| e(i, j))))?;
    report("star_3", &star)?;

    let mut out = Vec::new();
    TruthTable::from_fn(4, |x| (x[0] || x[1]) && (x[2] || x[3]))?.write(&mut out)?;
    print!("truth-table file:\n{}", String::from_utf8_lossy(&out));
    Ok(())
}

fn main() -> Result<()> {
    run()
}
