// Acceptance gate: one pass/fail line per criterion, nonzero exit if any fails.

use std::collections::BTreeSet;
use std::time::Instant;

use rand::Rng;
use rayon::prelude::*;

use qqw::amplitude::{self, ExactPlan};
use qqw::andor::{self, Gate, InputClass, TreeShape, ZeroErrorEvaluator};
use qqw::boolfn::{self, TruthTable};
use qqw::comm::{self, CertRelationInstance};
use qqw::graph;
use qqw::poly::{self, BoundParams, ErrorBound};
use qqw::search::{self, SmallErrorPlan, TRADEOFF_BAND};
use qqw::statevector::{acceptance_table, Circuit};
use qqw::{BitOracle, Harness, RngSeed};

// Pinned tolerances.
const EXACT_SUCCESS_FLOOR: f64 = 1.0 - 1e-9;
const SEARCH_CONSTANT: f64 = 2.45;
const SEARCH_SLACK: f64 = 64.0;
const BAND_WIDTH_MAX: f64 = 16.0;
const DEGREE_REL_TOL: f64 = 1e-7;
const BOUND_A: f64 = 1.0;
const BOUND_B: f64 = 0.0416;
const ZERO_ERROR_MULTIPLIER: f64 = 2.0;
const SIGMAS: f64 = 3.0;
const TWO_LEVEL_RATIO: (f64, f64) = (0.65 * 4.0, 1.35 * 4.0);
const STAR_RATIO: (f64, f64) = (0.65, 1.35);

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn sigma(p: f64, n: usize) -> f64 {
    (p * (1.0 - p) / n as f64).sqrt()
}

fn exact_search_correct() -> Outcome {
    let cells: Vec<(usize, usize)> = (2..=64usize).flat_map(|n| (1..=n).map(move |t| (n, t))).collect();
    let results: Vec<(usize, f64)> = cells
        .par_iter()
        .map(|&(n, t)| {
            let analytic = ExactPlan::new(n, t).unwrap().success_prob(t);
            let seed = RngSeed(1).child((n * 100 + t) as u64);
            let mut rng = seed.rng();
            let mut failures = 0;
            for _ in 0..1000 {
                let mut oracle = BitOracle::planted(n, t, &mut rng).unwrap();
                let out = amplitude::exact_search(&mut oracle, t, &mut rng).unwrap();
                match out.found() {
                    Some(j) if oracle.bits(&Harness::new())[j] => {}
                    _ => failures += 1,
                }
            }
            (failures, analytic)
        })
        .collect();
    let failures: usize = results.iter().map(|r| r.0).sum();
    let worst = results.iter().map(|r| r.1).fold(1.0, f64::min);
    outcome(
        failures == 0 && worst >= EXACT_SUCCESS_FLOOR,
        format!("{} cells x 1000 trials, failures {failures}, min analytic success {worst:.12}", cells.len()),
    )
}

fn small_error_bound() -> Outcome {
    let n = 4096;
    let mut pass = true;
    let mut worst_slack = f64::NEG_INFINITY;
    let mut worst_err_ratio = 0.0f64;
    for k in 1..=12 {
        let eps = 2f64.powi(-k);
        let plan = SmallErrorPlan::new(n, eps).unwrap();
        let t0 = plan.t0 as usize;
        let bound = SEARCH_CONSTANT * ((n * k as usize) as f64).sqrt();
        for t in [1, t0, 4 * t0, n / 4] {
            let analytic = plan.failure_prob(t);
            worst_err_ratio = worst_err_ratio.max(analytic / eps);
            pass &= analytic <= eps;
            let max_queries = (0..300u64)
                .into_par_iter()
                .map(|i| {
                    let mut rng = RngSeed(2).child((k * 10_000) as u64 + t as u64).child(i).rng();
                    let mut oracle = BitOracle::planted(n, t, &mut rng).unwrap();
                    plan.run(&mut oracle, &mut rng).queries.total()
                })
                .max()
                .unwrap();
            worst_slack = worst_slack.max(max_queries as f64 - bound);
            pass &= max_queries as f64 <= bound + SEARCH_SLACK;
        }
    }
    outcome(
        pass,
        format!("max (T - 2.45 sqrt(N k)) = {worst_slack:.1} (slack {SEARCH_SLACK}), max analytic error / eps = {worst_err_ratio:.3}"),
    )
}

fn tradeoff_band() -> Outcome {
    let records = search::tradeoff_sweep(&search::default_tradeoff_grid(), 2000, RngSeed(3)).unwrap();
    let ratios: Vec<f64> = records.iter().map(|r| r.tradeoff_ratio()).collect();
    let (lo, hi) = ratios.iter().fold((f64::INFINITY, 0.0f64), |(a, b), &r| (a.min(r), b.max(r)));
    let (c1, c2) = TRADEOFF_BAND;
    outcome(
        records.len() >= 12 && c2 / c1 <= BAND_WIDTH_MAX && lo >= c1 && hi <= c2,
        format!("{} points, ratios in [{lo:.3}, {hi:.3}], band [{c1}, {c2}]", records.len()),
    )
}

// (library degree, independently recomputed degree)
fn symmetrized_degree(c: &Circuit) -> (usize, usize) {
    let table = acceptance_table(c, c.n).unwrap();
    let profile = poly::symmetrize(&table).unwrap();
    let mut diffs = profile.values.clone();
    let scale = diffs.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    let mut degree = 0;
    for order in 1..diffs.len() {
        diffs = diffs.windows(2).map(|w| w[1] - w[0]).collect();
        if diffs.iter().any(|v| v.abs() > DEGREE_REL_TOL * scale * (1u64 << order) as f64) {
            degree = order;
        }
    }
    (poly::degree_via_differences(&profile), degree)
}

fn polynomial_degree() -> Outcome {
    let mut rng = RngSeed(4).rng();
    let mut circuits = Vec::new();
    for n in [2, 4, 8] {
        for k in 0..=2 {
            circuits.push(Circuit::grover(n, k).unwrap());
        }
    }
    for (n, t) in [(4, 1), (8, 1), (8, 2), (6, 3)] {
        let c = Circuit::exact_search(n, t).unwrap();
        if c.queries() <= 3 {
            circuits.push(c);
        }
    }
    for n in 1..=6 {
        for queries in 1..=3 {
            circuits.push(Circuit::random(n, usize::from(n <= 3), queries, &mut rng).unwrap());
        }
    }
    let mut pass = circuits.len() >= 20;
    let mut worst_gap = i64::MIN;
    for c in &circuits {
        pass &= c.n <= 8 && c.queries() <= 3;
        let (deg, independent) = symmetrized_degree(c);
        worst_gap = worst_gap.max(deg.max(independent) as i64 - 2 * c.queries() as i64);
        pass &= deg <= 2 * c.queries() && independent <= 2 * c.queries();
    }
    outcome(pass, format!("{} circuits, max (degree - 2T) = {worst_gap}", circuits.len()))
}

fn polynomial_checks() -> Outcome {
    let mut grid_fail = 0;
    let mut grid_points = 0;
    for d in 1..=200 {
        for i in 0..=300 {
            grid_points += 1;
            if !poly::paturi_check(d, i as f64 * 0.01).unwrap().holds {
                grid_fail += 1;
            }
        }
    }
    let mut rng = RngSeed(5).rng();
    let mut extremal_fail = 0;
    for _ in 0..1000 {
        let q = poly::random_bounded_poly(8, &mut rng);
        if !poly::extremal_check(&q, &[1.1, 1.5, 2.0, 3.0]).unwrap() {
            extremal_fail += 1;
        }
    }
    let params = BoundParams::new(BOUND_A, BOUND_B).unwrap();
    let records = search::tradeoff_sweep(&search::default_tradeoff_grid(), 200, RngSeed(3)).unwrap();
    let (mut compared, mut bound_fail) = (0, 0);
    for r in &records {
        match poly::theorem2_bound(r.n, r.t, r.worst_case_bound as usize, params).unwrap() {
            ErrorBound::Value(b) => {
                compared += 1;
                if b > r.eps_analytic {
                    bound_fail += 1;
                }
            }
            ErrorBound::Vacuous => {}
        }
    }
    outcome(
        grid_fail == 0 && extremal_fail == 0 && bound_fail == 0 && compared > 0,
        format!(
            "growth grid {grid_points} points / {grid_fail} failures, extremal 1000 samples / {extremal_fail} failures, error bound {compared} points / {bound_fail} above measured"
        ),
    )
}

struct ZeroErrorStats {
    shape: TreeShape,
    trials: usize,
    unsound: usize,
    dont_know: f64,
    mean: f64,
}

fn zero_error_batch(shape: TreeShape, class: InputClass, trials: usize, seed: RngSeed) -> ZeroErrorStats {
    let ev = ZeroErrorEvaluator::new(shape.clone()).unwrap();
    let report = andor::run_trials(&ev, class, trials, seed, ZERO_ERROR_MULTIPLIER).unwrap();
    ZeroErrorStats {
        shape,
        trials,
        unsound: report.unsound,
        dont_know: report.dont_know_rate(),
        mean: report.mean_queries(),
    }
}

fn zero_error_soundness(batches: &[ZeroErrorStats]) -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for b in batches {
        let limit = 0.5 + SIGMAS * sigma(0.5, b.trials);
        pass &= b.unsound == 0 && b.dont_know <= limit;
        parts.push(format!("{} unsound {} dontknow {:.3}<={limit:.3}", b.shape.id(), b.unsound, b.dont_know));
    }
    let total: usize = batches.iter().map(|b| b.trials).sum();
    pass &= total >= 10_000;
    outcome(pass, format!("{total} runs; {}", parts.join("; ")))
}

fn zero_error_scaling(batches: &[ZeroErrorStats]) -> Outcome {
    let mean_at = |n: usize| batches.iter().find(|b| b.shape.len() == n && b.shape.depth() == 2).unwrap().mean;
    let ratio = mean_at(4096) / mean_at(512);
    outcome(
        (TWO_LEVEL_RATIO.0..=TWO_LEVEL_RATIO.1).contains(&ratio),
        format!("mean {:.0} / {:.0} = {ratio:.3}, window [{:.2}, {:.2}]", mean_at(4096), mean_at(512), TWO_LEVEL_RATIO.0, TWO_LEVEL_RATIO.1),
    )
}

fn star_scaling() -> Outcome {
    let mut pass = true;
    let mut worst_means = Vec::new();
    let mut parts = Vec::new();
    for (i, n) in [16usize, 32, 64].into_iter().enumerate() {
        let mut worst: f64 = 0.0;
        for class in [InputClass::One, InputClass::Zero] {
            let b = zero_error_batch(graph::star_shape(n).unwrap(), class, 2500, RngSeed(8).child(i as u64 * 2 + class as u64));
            pass &= b.unsound == 0 && b.dont_know <= 0.5 + SIGMAS * sigma(0.5, b.trials);
            worst = worst.max(b.mean);
        }
        worst_means.push(worst);
        parts.push(format!("n={n} worst-class mean {worst:.0}"));
    }
    let target = 2f64.powf(1.5);
    for w in worst_means.windows(2) {
        let r = w[1] / w[0];
        pass &= (target * STAR_RATIO.0..=target * STAR_RATIO.1).contains(&r);
        parts.push(format!("ratio {r:.3}"));
    }
    outcome(pass, format!("{}, window [{:.3}, {:.3}]", parts.join(", "), target * STAR_RATIO.0, target * STAR_RATIO.1))
}

fn majority_exhaustive() -> Outcome {
    let mut pass = true;
    let mut worst12 = 0;
    for n in 1..=16usize {
        let worst = (0..1u32 << n)
            .into_par_iter()
            .map(|x| {
                let bits: Vec<bool> = (0..n).map(|j| x >> j & 1 == 1).collect();
                let ones = bits.iter().filter(|&&b| b).count();
                let out = graph::majority_exact(&mut BitOracle::new(bits).unwrap()).unwrap();
                (out.value == (2 * ones >= n), out.queries)
            })
            .fold(|| (true, 0u64), |a, b| (a.0 && b.0, a.1.max(b.1)))
            .reduce(|| (true, 0), |a, b| (a.0 && b.0, a.1.max(b.1)));
        let bound = (n - n.count_ones() as usize + 1) as u64;
        pass &= worst.0 && worst.1 == bound;
        if n == 12 {
            worst12 = worst.1;
        }
    }
    pass &= worst12 <= 11;
    outcome(pass, format!("N = 1..16 exhaustive, worst case equals N - e(N) + 1, N=12 worst {worst12}"))
}

fn bits(s: &str) -> Vec<bool> {
    s.chars().map(|c| c == '1').collect()
}

fn sets<R: Rng>(k: usize, intersect: bool, rng: &mut R) -> (Vec<bool>, Vec<bool>) {
    let mut x = vec![false; k];
    let mut y = vec![false; k];
    for i in 0..k {
        match rng.random_range(0..3) {
            0 => x[i] = true,
            1 => y[i] = true,
            _ => {}
        }
    }
    if intersect {
        let i = rng.random_range(0..k);
        x[i] = true;
        y[i] = true;
    }
    (x, y)
}

fn communication() -> Outcome {
    let mut pass = true;
    let small = TreeShape::new(vec![2, 2], Gate::And).unwrap();
    let c: BTreeSet<usize> = [0, 3].into_iter().collect();
    let example = comm::verify_relation(&bits("1011"), &bits("1111"), &c, &small).unwrap();
    pass &= example;

    let per_query = |n: usize| 2 * ((n as f64).log2().ceil() as u64 + 1);
    let mut qubit_mismatch = 0;
    let mut rng = RngSeed(10).rng();
    for _ in 0..200 {
        let shape = TreeShape::new(vec![3, 5], Gate::And).unwrap();
        let x: Vec<bool> = (0..15).map(|_| rng.random_bool(0.6)).collect();
        let y: Vec<bool> = (0..15).map(|_| rng.random_bool(0.6)).collect();
        let inst = CertRelationInstance::new(x.clone(), y.clone(), shape.clone()).unwrap();
        let (run, channel) = comm::distributed_certificate(&inst, &mut rng).unwrap();
        if run.qubits_sent != per_query(15) * run.queries.total() || channel.qubits_sent() != run.qubits_sent {
            qubit_mismatch += 1;
        }
        if !comm::verify_relation(&x, &y, &run.indices(), &shape).unwrap() {
            pass = false;
        }
    }

    let shape = andor::make_theorem9_shape(512).unwrap();
    let k = shape.branching()[0] * (shape.branching()[1] - 1);
    let runs = |intersect: bool, count: usize, seed: u64| -> Vec<(bool, bool)> {
        (0..count)
            .into_par_iter()
            .map(|i| {
                let mut rng = RngSeed(seed).child(i as u64).rng();
                let (x, y) = sets(k, intersect, &mut rng);
                let r = comm::disjointness_via_r(&x, &y, &shape, &mut rng).unwrap();
                (r.output, r.qubits_sent == per_query(512) * r.queries)
            })
            .collect()
    };
    let disjoint = runs(false, 10_000, 11);
    let false_positives = disjoint.iter().filter(|r| r.0).count();
    let intersecting = runs(true, 2000, 12);
    let detected = intersecting.iter().filter(|r| r.0).count() as f64 / intersecting.len() as f64;
    qubit_mismatch += disjoint.iter().chain(&intersecting).filter(|r| !r.1).count();
    let floor = 0.5 - SIGMAS * sigma(0.5, intersecting.len());
    pass &= false_positives == 0 && detected >= floor && qubit_mismatch == 0;
    outcome(
        pass,
        format!(
            "example in R: {example}, qubit mismatches {qubit_mismatch}, k={k} N=512: false positives {false_positives}/10000, detection {detected:.3} >= {floor:.3}"
        ),
    )
}

fn boolean_structure() -> Outcome {
    let mut pass = true;
    for n in 1..=14 {
        let f = TruthTable::or(n).unwrap();
        pass &= boolfn::decision_tree_depth(&f).unwrap() == n && boolfn::degree(&f).unwrap() == n;
    }
    let mut corpus = Vec::new();
    for n in 1..=7 {
        corpus.push(TruthTable::or(n).unwrap());
        corpus.push(TruthTable::and(n).unwrap());
        for k in 1..=n {
            corpus.push(TruthTable::threshold(n, k).unwrap());
        }
    }
    let trees: Vec<TreeShape> = [(2, 2), (3, 2), (2, 3)]
        .into_iter()
        .flat_map(|(d, b)| [Gate::Or, Gate::And].map(|g| TreeShape::uniform(d, b, g).unwrap()))
        .collect();
    let tree_tables: Vec<TruthTable> = trees
        .iter()
        .map(|s| TruthTable::from_fn(s.len(), |x| andor::eval_tree(s, x).unwrap()).unwrap())
        .collect();
    corpus.extend(tree_tables.iter().cloned());
    corpus.push(
        boolfn::graph_property(3, |e| (0..3).any(|i| (0..3).filter(|&j| j != i).all(|j| e(i, j)))).unwrap(),
    );
    corpus.push(boolfn::graph_property(3, |e| e(0, 1) && e(1, 2)).unwrap());
    let mut monotone = 0;
    for f in &corpus {
        pass &= boolfn::is_monotone(f);
        let r = boolfn::check_monotone_relations(f).unwrap();
        pass &= r.depth_within_sensitivity_squared;
        monotone += 1;
    }
    for (s, f) in trees.iter().zip(&tree_tables) {
        let n = s.len();
        pass &= 2 * boolfn::degree(f).unwrap() >= n && boolfn::decision_tree_depth(f).unwrap() == n;
    }
    outcome(
        pass,
        format!("OR_N for N <= 14, {monotone} monotone functions, {} uniform trees", trees.len()),
    )
}

fn main() {
    let start = Instant::now();
    let mut results: Vec<(usize, Outcome)> = Vec::new();
    let mut run = |id: usize, f: &dyn Fn() -> Outcome| {
        let t = Instant::now();
        let o = f();
        println!(
            "criterion {id:>2}: {} ({:.1}s) {}",
            if o.pass { "PASS" } else { "FAIL" },
            t.elapsed().as_secs_f64(),
            o.detail
        );
        results.push((id, o));
    };
    run(1, &exact_search_correct);
    run(2, &small_error_bound);
    run(3, &tradeoff_band);
    run(4, &polynomial_degree);
    run(5, &polynomial_checks);
    let shapes = [
        andor::make_theorem9_shape(64).unwrap(),
        andor::make_theorem9_shape(512).unwrap(),
        andor::make_theorem9_shape(4096).unwrap(),
        TreeShape::uniform(3, 8, Gate::Or).unwrap(),
    ];
    let batches: Vec<ZeroErrorStats> = shapes
        .into_iter()
        .enumerate()
        .map(|(i, s)| zero_error_batch(s, InputClass::Mixed, 2500, RngSeed(6).child(i as u64)))
        .collect();
    run(6, &|| zero_error_soundness(&batches));
    run(7, &|| zero_error_scaling(&batches));
    run(8, &star_scaling);
    run(9, &majority_exhaustive);
    run(10, &communication);
    run(11, &boolean_structure);
    let failed: Vec<usize> = results.iter().filter(|r| !r.1.pass).map(|r| r.0).collect();
    println!(
        "acceptance: {}/{} passed in {:.1}s",
        results.len() - failed.len(),
        results.len(),
        start.elapsed().as_secs_f64()
    );
    if !failed.is_empty() {
        println!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
}
