use std::collections::BTreeSet;

use proptest::prelude::*;

use qqw::amplitude::{self, IterationSchedule, SCHEDULE_FACTOR};
use qqw::andor::{self, Gate, TreeShape, ZeroErrorEvaluator};
use qqw::boolfn::TruthTable;
use qqw::comm::{self, Channel};
use qqw::graph;
use qqw::poly::{self, UnivariatePoly};
use qqw::search::SmallErrorPlan;
use qqw::{BitOracle, Harness, RngSeed};

fn shapes() -> impl Strategy<Value = TreeShape> {
    (prop::collection::vec(2usize..5, 1..4), any::<bool>()).prop_map(|(b, or)| {
        TreeShape::new(b, if or { Gate::Or } else { Gate::And }).unwrap()
    })
}

fn shape_and_input() -> impl Strategy<Value = (TreeShape, Vec<bool>)> {
    shapes().prop_flat_map(|s| {
        let n = s.len();
        (Just(s), prop::collection::vec(any::<bool>(), n))
    })
}

// independent recursive evaluation
fn eval_naive(shape: &TreeShape, level: usize, x: &[bool]) -> bool {
    if level == shape.depth() {
        return x[0];
    }
    let cs = shape.subtree_size(level + 1);
    let mut values = x.chunks(cs).map(|c| eval_naive(shape, level + 1, c));
    match shape.gate_at(level) {
        Gate::Or => values.any(|v| v),
        Gate::And => values.all(|v| v),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn edge_positions_round_trip(n in 2usize..40, i in 0usize..40, j in 0usize..40) {
        let (i, j) = (i % n, j % n);
        prop_assume!(i != j);
        let p = graph::position(n, i, j);
        prop_assert!(p < n * (n - 1));
        prop_assert_eq!(graph::unmap(n, p), (i, j));
    }

    #[test]
    fn query_kinds_are_counted_apart(bits in prop::collection::vec(any::<bool>(), 1..64), reads in 0usize..20, checks in 0usize..20) {
        let n = bits.len();
        let mut o = BitOracle::new(bits.clone()).unwrap();
        for r in 0..reads {
            prop_assert_eq!(o.query(r % n), bits[r % n]);
        }
        for c in 0..checks {
            prop_assert_eq!(o.verify_query(c % n), bits[c % n]);
        }
        let s = o.stats();
        prop_assert_eq!(s.quantum_queries, reads as u64);
        prop_assert_eq!(s.classical_verification_queries, checks as u64);
    }

    #[test]
    fn exact_search_finds_a_marked_index(n in 1usize..200, frac in 0.0f64..1.0, seed in any::<u64>()) {
        let t = 1 + ((n - 1) as f64 * frac) as usize;
        let mut rng = RngSeed(seed).rng();
        let mut o = BitOracle::planted(n, t, &mut rng).unwrap();
        let out = amplitude::exact_search(&mut o, t, &mut rng).unwrap();
        let j = out.found().expect("known count is found");
        prop_assert!(o.bits(&Harness::new())[j]);
    }

    #[test]
    fn unknown_count_search_is_one_sided(n in 1usize..300, t in 0usize..5, seed in any::<u64>()) {
        let t = t.min(n);
        let mut rng = RngSeed(seed).rng();
        let mut o = BitOracle::planted(n, t, &mut rng).unwrap();
        let out = amplitude::unknown_t_search(&mut o, &mut rng, SCHEDULE_FACTOR, amplitude::default_cutoff(n)).unwrap();
        match out.found() {
            Some(j) => prop_assert!(o.bits(&Harness::new())[j]),
            None => {}
        }
        if t == 0 {
            prop_assert!(out.found().is_none());
        }
    }

    #[test]
    fn schedule_costs_are_consistent(n in 2usize..5000, t in 1usize..5000, cutoff in 1u64..2000) {
        let t = t.min(n);
        let s = IterationSchedule::new(n, SCHEDULE_FACTOR, cutoff).unwrap();
        let fail = s.failure_prob(t);
        prop_assert!((0.0..=1.0).contains(&fail));
        prop_assert!(s.expected_queries(t) <= s.max_queries() as f64 + 1e-9);
        prop_assert!(s.max_queries() <= cutoff.max(1));
    }

    #[test]
    fn small_error_plan_meets_target(n in 4usize..400, k in 1i32..9) {
        let eps = 2f64.powi(-k);
        prop_assume!(eps >= 2f64.powi(-(n as i32)));
        let plan = SmallErrorPlan::new(n, eps).unwrap();
        for t in 1..=n {
            prop_assert!(plan.failure_prob(t) <= eps * (1.0 + 1e-12));
        }
    }

    #[test]
    fn tree_evaluations_agree((shape, x) in shape_and_input()) {
        let v = andor::eval_tree(&shape, &x).unwrap();
        prop_assert_eq!(v, eval_naive(&shape, 0, &x));
        let mut o = BitOracle::new(x.clone()).unwrap();
        prop_assert_eq!(andor::eval_tree_classical(&shape, &mut o).unwrap(), v);
    }

    #[test]
    fn zero_error_verdicts_are_certified((shape, x) in shape_and_input(), seed in any::<u64>()) {
        let ev = ZeroErrorEvaluator::new(shape.clone()).unwrap();
        let mut rng = RngSeed(seed).rng();
        let mut o = BitOracle::new(x.clone()).unwrap();
        let cutoff = (2.0 * (ev.nominal_queries(true) + ev.nominal_queries(false))) as u64;
        let v = ev.evaluate(&mut o, &mut rng, cutoff).unwrap();
        if let Some(value) = v.value() {
            prop_assert_eq!(value, eval_naive(&shape, 0, &x));
            let cert = v.certificate().unwrap();
            prop_assert!(cert.forces(&shape));
            for (&j, &b) in &cert.entries {
                prop_assert_eq!(x[j], b);
            }
        }
    }

    #[test]
    fn majority_is_exact_and_cheap(bits in prop::collection::vec(any::<bool>(), 1..80)) {
        let n = bits.len();
        let ones = bits.iter().filter(|&&b| b).count();
        let out = graph::majority_exact(&mut BitOracle::new(bits).unwrap()).unwrap();
        prop_assert_eq!(out.value, 2 * ones >= n);
        prop_assert_eq!(out.tie, 2 * ones == n);
        prop_assert!(out.queries <= (n - graph::e_of(n) as usize + 1) as u64);
    }

    #[test]
    fn chebyshev_forms_agree(d in 0usize..30, x in -1.0f64..1.0) {
        let coeff = UnivariatePoly::chebyshev(d).eval(x);
        let rec = poly::chebyshev_eval(d, x);
        prop_assert!((coeff - rec).abs() < 1e-6);
        prop_assert!(rec.abs() <= 1.0 + 1e-12);
        prop_assert!((rec - (d as f64 * x.acos()).cos()).abs() < 1e-9);
    }

    #[test]
    fn interpolation_reproduces_points(ys in prop::collection::vec(-5.0f64..5.0, 1..9)) {
        let xs: Vec<f64> = (0..ys.len()).map(|i| i as f64).collect();
        let p = UnivariatePoly::interpolate(&xs, &ys).unwrap();
        prop_assert!(p.degree() < ys.len());
        for (x, y) in xs.iter().zip(&ys) {
            prop_assert!((p.eval(*x) - y).abs() < 1e-6);
        }
    }

    #[test]
    fn truth_tables_round_trip(n in 0usize..8, seed in any::<u64>()) {
        let f = TruthTable::from_fn(n, |x| {
            let h = x.iter().fold(seed, |h, &b| h.rotate_left(7) ^ u64::from(b).wrapping_add(0x9e37));
            h & 1 == 1
        }).unwrap();
        let mut buf = Vec::new();
        f.write(&mut buf).unwrap();
        prop_assert_eq!(TruthTable::read(buf.as_slice()).unwrap(), f);
    }

    #[test]
    fn relation_membership_matches_definition((shape, x) in shape_and_input(), y_seed in any::<u64>(), mask in any::<u64>()) {
        let n = shape.len();
        prop_assume!(n <= 64);
        let y: Vec<bool> = (0..n).map(|i| y_seed >> (i % 64) & 1 == 1).collect();
        let c: BTreeSet<usize> = (0..n).filter(|&i| mask >> (i % 64) & 1 == 1).collect();
        let z: Vec<bool> = x.iter().zip(&y).map(|(a, b)| *a && *b).collect();
        // c is a certificate for z iff every completion agreeing with z on c has z's value
        let value = eval_naive(&shape, 0, &z);
        let partial: Vec<Option<bool>> = (0..n).map(|i| c.contains(&i).then_some(z[i])).collect();
        let forced = andor::eval_partial(&shape, &partial).unwrap();
        prop_assert_eq!(comm::verify_relation(&x, &y, &c, &shape).unwrap(), forced == Some(value));
    }

    #[test]
    fn channel_charges_per_query(n in 2usize..5000, reads in 0usize..50) {
        let channel = Channel::new(n);
        let mut o = BitOracle::new(vec![false; n]).unwrap();
        o.set_tap(Box::new(channel.clone()));
        for r in 0..reads {
            o.query(r % n);
        }
        let per = 2 * ((n as f64).log2().ceil() as u64 + 1);
        prop_assert_eq!(channel.qubits_per_query(), per);
        prop_assert_eq!(channel.qubits_sent(), per * reads as u64);
        prop_assert_eq!(channel.classical_bits_sent(), 0);
    }
}
