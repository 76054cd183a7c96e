//! Closed-form two-dimensional simulation of Grover-type search.
//!
//! For an input with `t` marked items out of `n`, the uniform start state and
//! every Grover iterate stay in the plane spanned by the uniform superposition
//! over marked items and the one over unmarked items. With `sin²θ = t/n`,
//! `k` iterations leave the marked subspace with probability
//! `sin²((2k+1)θ)`.
//!
//! Every primitive here ends with one classical verification query on the
//! measured index, so a `Found` is never reported for a non-solution.

use std::f64::consts::{FRAC_PI_2, PI};
use std::ops::Range;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::oracle::{BitOracle, QueryStats};

/// Probability tolerance below which a success probability counts as 1.
pub const CERTAINTY_TOLERANCE: f64 = 1e-9;

/// Default growth factor of the unknown-count iteration schedule.
pub const SCHEDULE_FACTOR: f64 = 6.0 / 5.0;

/// `θ` with `sin²θ = t/n`.
pub fn rotation_angle(n: usize, t: usize) -> Result<f64> {
    check_counts(n, t)?;
    Ok((t as f64 / n as f64).sqrt().asin())
}

fn check_counts(n: usize, t: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::EmptyInput);
    }
    if t > n {
        return Err(Error::TooManySolutions { requested: t, len: n });
    }
    Ok(())
}

/// Success probability of `k` Grover iterations with `t` of `n` marked.
pub fn grover_success_prob(n: usize, t: usize, k: u64) -> Result<f64> {
    let theta = rotation_angle(n, t)?;
    if t == 0 {
        return Ok(0.0);
    }
    Ok(success_at(theta, k))
}

pub(crate) fn success_at(theta: f64, k: u64) -> f64 {
    ((2 * k + 1) as f64 * theta).sin().powi(2).clamp(0.0, 1.0)
}

/// Mean of `sin²((2k+1)θ)` over `k` uniform in `[0, m)`.
pub fn mean_success(theta: f64, m: u64) -> f64 {
    debug_assert!(m >= 1);
    let s2 = (2.0 * theta).sin();
    let p = if s2.abs() < 1e-9 {
        (0..m).map(|k| success_at(theta, k)).sum::<f64>() / m as f64
    } else {
        0.5 - (4.0 * m as f64 * theta).sin() / (4.0 * m as f64 * s2)
    };
    p.clamp(0.0, 1.0)
}

/// Amplitude-plane state after `k` iterations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RotationState {
    pub theta: f64,
    pub k: u64,
    pub success_prob: f64,
}

impl RotationState {
    pub fn new(n: usize, t: usize, k: u64) -> Result<Self> {
        let theta = rotation_angle(n, t)?;
        Ok(RotationState {
            theta,
            k,
            success_prob: grover_success_prob(n, t, k)?,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SearchResult {
    Found(usize),
    NotFound,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchOutcome {
    pub result: SearchResult,
    pub queries: QueryStats,
}

impl SearchOutcome {
    pub fn found(&self) -> Option<usize> {
        match self.result {
            SearchResult::Found(j) => Some(j),
            SearchResult::NotFound => None,
        }
    }
}

/// Measures after a circuit whose success probability is `p`: samples a
/// marked index with probability `p`, otherwise an unmarked one, then spends
/// one verification query on it.
pub(crate) fn measure_and_verify<R: Rng + ?Sized>(
    oracle: &mut BitOracle,
    range: Range<usize>,
    target: bool,
    p: f64,
    rng: &mut R,
) -> Option<usize> {
    let hit = p >= 1.0 - CERTAINTY_TOLERANCE || rng.random::<f64>() < p;
    let pool = oracle.marked_in(range.clone(), if hit { target } else { !target });
    let j = if pool.is_empty() {
        // Only reachable when p rounds to a value the marked set cannot
        // support; measure anywhere in range.
        rng.random_range(range)
    } else {
        pool[rng.random_range(0..pool.len())]
    };
    (oracle.verify_query(j) == target).then_some(j)
}

/// One Grover run of `k` iterations on the indices in `range`, searching for
/// positions whose bit equals `target`. Charges `k` quantum queries and one
/// verification query.
pub(crate) fn grover_run<R: Rng + ?Sized>(
    oracle: &mut BitOracle,
    range: Range<usize>,
    target: bool,
    k: u64,
    rng: &mut R,
) -> Option<usize> {
    let n = range.len();
    let t = oracle.count_in(range.clone(), target);
    oracle.charge_quantum(k);
    let p = if t == 0 {
        0.0
    } else {
        success_at(((t as f64) / n as f64).sqrt().asin(), k)
    };
    measure_and_verify(oracle, range, target, p, rng)
}

fn outcome(oracle: &BitOracle, before: QueryStats, found: Option<usize>) -> SearchOutcome {
    let after = oracle.stats();
    SearchOutcome {
        result: found.map_or(SearchResult::NotFound, SearchResult::Found),
        queries: QueryStats {
            quantum_queries: after.quantum_queries - before.quantum_queries,
            classical_verification_queries: after.classical_verification_queries
                - before.classical_verification_queries,
        },
    }
}

/// Grover search with a fixed number of iterations.
pub fn fixed_iteration_search<R: Rng + ?Sized>(
    oracle: &mut BitOracle,
    k: u64,
    rng: &mut R,
) -> SearchOutcome {
    let before = oracle.stats();
    let n = oracle.len();
    let found = grover_run(oracle, 0..n, true, k, rng);
    outcome(oracle, before, found)
}

/// Measurement distribution over indices after `k` iterations, as predicted
/// by the plane model.
pub fn fixed_iteration_distribution(marked: &[bool], k: u64) -> Vec<f64> {
    let n = marked.len();
    let t = marked.iter().filter(|&&b| b).count();
    if t == 0 {
        return vec![1.0 / n as f64; n];
    }
    let p = success_at((t as f64 / n as f64).sqrt().asin(), k);
    marked
        .iter()
        .map(|&m| {
            if m {
                p / t as f64
            } else if t < n {
                (1.0 - p) / (n - t) as f64
            } else {
                0.0
            }
        })
        .collect()
}

/// Iteration plan for exact search with a known number of solutions:
/// `ordinary` standard iterations followed, unless they already land exactly
/// on the marked subspace, by one iteration with adjusted phases.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExactPlan {
    pub n: usize,
    pub t_known: usize,
    pub ordinary: u64,
    /// `(oracle_phase, reflection_phase)` of the final iteration.
    pub final_phases: Option<(f64, f64)>,
}

impl ExactPlan {
    pub fn new(n: usize, t_known: usize) -> Result<Self> {
        check_counts(n, t_known)?;
        if t_known == 0 {
            return Err(Error::InvalidParameter(
                "exact search needs t_known >= 1".into(),
            ));
        }
        let theta = rotation_angle(n, t_known)?;
        let mut m = (PI / (4.0 * theta) - 0.5 + 1e-12).floor().max(0.0) as u64;
        while m > 0 && (2 * m + 1) as f64 * theta > FRAC_PI_2 + 1e-12 {
            m -= 1;
        }
        let alpha = (2 * m + 1) as f64 * theta;
        let final_phases = if alpha.cos().abs() < 1e-9 {
            None
        } else {
            let cot_alpha = alpha.cos() / alpha.sin();
            let cot_2theta = (2.0 * theta).cos() / (2.0 * theta).sin();
            let oracle_phase = (-cot_alpha * cot_2theta).clamp(-1.0, 1.0).acos();
            let a = theta.sin() * alpha.sin();
            let b = theta.cos() * alpha.cos();
            let beta = (Complex64::from_polar(a, oracle_phase) + b).arg();
            Some((oracle_phase, PI - 2.0 * beta))
        };
        Ok(ExactPlan {
            n,
            t_known,
            ordinary: m,
            final_phases,
        })
    }

    /// Oracle applications, excluding the verification query.
    pub fn iterations(&self) -> u64 {
        self.ordinary + u64::from(self.final_phases.is_some())
    }

    /// Total charged queries including verification.
    pub fn queries(&self) -> u64 {
        self.iterations() + 1
    }

    /// Success probability when the input actually has `t_actual` solutions.
    pub fn success_prob(&self, t_actual: usize) -> f64 {
        if t_actual == 0 {
            return 0.0;
        }
        let theta = (t_actual as f64 / self.n as f64).sqrt().asin();
        let alpha = (2 * self.ordinary + 1) as f64 * theta;
        let (good, bad) = (alpha.sin(), alpha.cos());
        let p = match self.final_phases {
            None => good * good,
            Some((oracle_phase, refl_phase)) => {
                let g = Complex64::from_polar(good, oracle_phase);
                let b = Complex64::new(bad, 0.0);
                let (ps, pc) = (theta.sin(), theta.cos());
                let overlap = g * ps + b * pc;
                let u = Complex64::new(1.0, 0.0) - Complex64::from_polar(1.0, refl_phase);
                (g - u * overlap * ps).norm_sqr()
            }
        };
        p.clamp(0.0, 1.0)
    }
}

/// Exact search given the number of solutions. Succeeds with certainty when
/// the promise holds; otherwise may return `NotFound` but never an unverified
/// index.
pub fn exact_search<R: Rng + ?Sized>(
    oracle: &mut BitOracle,
    t_known: usize,
    rng: &mut R,
) -> Result<SearchOutcome> {
    let plan = ExactPlan::new(oracle.len(), t_known)?;
    Ok(run_exact_plan(oracle, &plan, rng))
}

pub(crate) fn run_exact_plan<R: Rng + ?Sized>(
    oracle: &mut BitOracle,
    plan: &ExactPlan,
    rng: &mut R,
) -> SearchOutcome {
    let before = oracle.stats();
    let n = oracle.len();
    let t = oracle.count_in(0..n, true);
    oracle.charge_quantum(plan.iterations());
    let found = measure_and_verify(oracle, 0..n, true, plan.success_prob(t), rng);
    outcome(oracle, before, found)
}

/// Exponentially growing iteration schedule for search with an unknown
/// number of solutions. Round `i` draws `k` uniformly from `[0, choices[i])`.
/// Rounds are admitted while the worst-case cumulative cost stays within the
/// cutoff, so the schedule (and its failure probability) is deterministic.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationSchedule {
    pub n: usize,
    pub factor: f64,
    pub cutoff: u64,
    pub choices: Vec<u64>,
}

impl IterationSchedule {
    pub fn new(n: usize, factor: f64, cutoff: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyInput);
        }
        if factor.is_nan() || factor <= 1.0 {
            return Err(Error::InvalidParameter(format!(
                "schedule factor must exceed 1, got {factor}"
            )));
        }
        if cutoff == 0 {
            return Err(Error::InvalidParameter("cutoff must be >= 1".into()));
        }
        let mut spent = 0u64;
        let mut choices = Vec::new();
        for c in round_sizes(n, factor) {
            // worst case: c - 1 iterations plus one verification
            if spent + c > cutoff {
                break;
            }
            spent += c;
            choices.push(c);
        }
        Ok(IterationSchedule {
            n,
            factor,
            cutoff,
            choices,
        })
    }

    /// Worst-case queries of a full run.
    pub fn max_queries(&self) -> u64 {
        self.choices.iter().sum()
    }

    /// Probability that every round misses when `t` items are marked.
    pub fn failure_prob(&self, t: usize) -> f64 {
        if t == 0 {
            return 1.0;
        }
        let theta = (t as f64 / self.n as f64).sqrt().asin();
        self.choices
            .iter()
            .map(|&m| 1.0 - mean_success(theta, m))
            .product()
    }

    /// Expected charged queries when `t` items are marked.
    pub fn expected_queries(&self, t: usize) -> f64 {
        let theta = if t == 0 {
            0.0
        } else {
            (t as f64 / self.n as f64).sqrt().asin()
        };
        let mut reach = 1.0;
        let mut total = 0.0;
        for &m in &self.choices {
            // mean iterations (m-1)/2 plus one verification
            total += reach * ((m - 1) as f64 / 2.0 + 1.0);
            let p = if t == 0 { 0.0 } else { mean_success(theta, m) };
            reach *= 1.0 - p;
        }
        total
    }

    /// Expected number of oracle iterations and of verification checks when
    /// `t` items are marked.
    pub fn expected_iterations_and_checks(&self, t: usize) -> (f64, f64) {
        let theta = if t == 0 {
            0.0
        } else {
            (t as f64 / self.n as f64).sqrt().asin()
        };
        let mut reach = 1.0;
        let (mut iters, mut checks) = (0.0, 0.0);
        for &m in &self.choices {
            iters += reach * (m - 1) as f64 / 2.0;
            checks += reach;
            let p = if t == 0 { 0.0 } else { mean_success(theta, m) };
            reach *= 1.0 - p;
        }
        (iters, checks)
    }

    /// Runs the schedule on `range`, looking for a bit equal to `target`.
    pub(crate) fn run<R: Rng + ?Sized>(
        &self,
        oracle: &mut BitOracle,
        range: Range<usize>,
        target: bool,
        rng: &mut R,
    ) -> Option<usize> {
        for &m in &self.choices {
            let k = rng.random_range(0..m);
            if let Some(j) = grover_run(oracle, range.clone(), target, k, rng) {
                return Some(j);
            }
        }
        None
    }
}

/// Round sizes `⌈m⌉` for `m = 1, λ, λ², …`, capped at `√n`.
fn round_sizes(n: usize, factor: f64) -> impl Iterator<Item = u64> {
    let cap = (n as f64).sqrt().max(1.0);
    std::iter::successors(Some(1.0_f64), move |m| Some((m * factor).min(cap)))
        .map(|m| m.ceil() as u64)
}

/// Smallest cutoff whose schedule fails with probability at most `target`
/// for every solution count in `t_min..=n`.
pub fn cutoff_for_error(n: usize, t_min: usize, factor: f64, target: f64) -> Result<u64> {
    let t_min = t_min.max(1);
    check_counts(n, t_min)?;
    if factor.is_nan() || factor <= 1.0 {
        return Err(Error::InvalidParameter(format!(
            "schedule factor must exceed 1, got {factor}"
        )));
    }
    if !(target > 0.0) {
        return Err(Error::InvalidParameter("target error must be positive".into()));
    }
    let thetas: Vec<f64> = (t_min..=n)
        .map(|t| (t as f64 / n as f64).sqrt().asin())
        .collect();
    let mut fail = vec![1.0_f64; thetas.len()];
    let mut cutoff = 0u64;
    for m in round_sizes(n, factor) {
        cutoff += m;
        let mut worst = 0.0_f64;
        for (f, &th) in fail.iter_mut().zip(&thetas) {
            *f *= 1.0 - mean_success(th, m);
            worst = worst.max(*f);
        }
        if worst <= target {
            return Ok(cutoff);
        }
    }
    unreachable!("round_sizes is infinite")
}

/// Default cutoff for unknown-count search on `n` items: success at least
/// 1/2 whenever there is at least one solution.
pub fn default_cutoff(n: usize) -> u64 {
    cutoff_for_error(n, 1, SCHEDULE_FACTOR, 0.5).expect("n >= 1")
}

/// Search with an unknown number of solutions.
pub fn unknown_t_search<R: Rng + ?Sized>(
    oracle: &mut BitOracle,
    rng: &mut R,
    schedule_factor: f64,
    cutoff_queries: u64,
) -> Result<SearchOutcome> {
    let schedule = IterationSchedule::new(oracle.len(), schedule_factor, cutoff_queries)?;
    Ok(run_schedule(oracle, &schedule, rng))
}

pub(crate) fn run_schedule<R: Rng + ?Sized>(
    oracle: &mut BitOracle,
    schedule: &IterationSchedule,
    rng: &mut R,
) -> SearchOutcome {
    let before = oracle.stats();
    let n = oracle.len();
    let found = schedule.run(oracle, 0..n, true, rng);
    outcome(oracle, before, found)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::RngSeed;

    #[test]
    fn closed_form_examples() {
        assert!((grover_success_prob(4, 1, 1).unwrap() - 1.0).abs() < 1e-12);
        assert!((grover_success_prob(4, 1, 0).unwrap() - 0.25).abs() < 1e-12);
        assert!((grover_success_prob(16, 4, 1).unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(grover_success_prob(10, 0, 3).unwrap(), 0.0);
        assert!(grover_success_prob(4, 5, 0).is_err());
    }

    #[test]
    fn zero_iterations_is_fraction() {
        for n in 1..40 {
            for t in 0..=n {
                let p = grover_success_prob(n, t, 0).unwrap();
                assert!((p - t as f64 / n as f64).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn mean_success_matches_direct_sum() {
        for &(n, t, m) in &[(64usize, 1usize, 9u64), (100, 7, 5), (16, 4, 3), (10, 10, 4)] {
            let th = rotation_angle(n, t).unwrap();
            let direct = (0..m).map(|k| success_at(th, k)).sum::<f64>() / m as f64;
            assert!((mean_success(th, m) - direct).abs() < 1e-12);
        }
    }

    #[test]
    fn fixed_iteration_on_tiny_input() {
        let mut rng = RngSeed(1).rng();
        let mut o = BitOracle::parse("0010").unwrap();
        let out = fixed_iteration_search(&mut o, 1, &mut rng);
        assert_eq!(out.result, SearchResult::Found(2));
        assert_eq!(out.queries.total(), 2);
        let mut z = BitOracle::parse("00000000").unwrap();
        for k in 0..5 {
            assert_eq!(
                fixed_iteration_search(&mut z, k, &mut rng).result,
                SearchResult::NotFound
            );
        }
    }

    #[test]
    fn exact_plan_examples() {
        let p = ExactPlan::new(4, 1).unwrap();
        assert_eq!(p.ordinary, 1);
        assert!(p.final_phases.is_none());
        assert_eq!(p.queries(), 2);
        assert!((ExactPlan::new(16, 4).unwrap().success_prob(4) - 1.0).abs() < 1e-12);
        let p = ExactPlan::new(1024, 1).unwrap();
        let bound = (PI / (4.0 * (1.0f64 / 32.0).asin())).ceil() as u64 + 2;
        assert!(p.queries() <= bound);
        assert!(p.success_prob(1) > 1.0 - 1e-9);
        assert!(ExactPlan::new(8, 0).is_err());
    }

    #[test]
    fn exact_plan_hits_every_count() {
        for n in 1..=64 {
            for t in 1..=n {
                let p = ExactPlan::new(n, t).unwrap();
                let s = p.success_prob(t);
                assert!(s >= 1.0 - 1e-9, "n={n} t={t} success={s}");
                let theta = rotation_angle(n, t).unwrap();
                assert!(p.queries() <= (PI / (4.0 * theta)).ceil() as u64 + 2);
            }
        }
    }

    #[test]
    fn schedule_respects_cutoff() {
        let s = IterationSchedule::new(4096, SCHEDULE_FACTOR, 100).unwrap();
        assert!(s.max_queries() <= 100);
        let mut o = BitOracle::new(vec![false; 4096]).unwrap();
        let mut rng = RngSeed(2).rng();
        let out = run_schedule(&mut o, &s, &mut rng);
        assert_eq!(out.result, SearchResult::NotFound);
        assert!(out.queries.total() <= 100);
        assert!(IterationSchedule::new(10, 1.0, 5).is_err());
        assert!(IterationSchedule::new(10, 1.2, 0).is_err());
    }

    #[test]
    fn default_cutoff_halves_failure() {
        for n in [1usize, 2, 7, 64, 1000] {
            let c = default_cutoff(n);
            let s = IterationSchedule::new(n, SCHEDULE_FACTOR, c).unwrap();
            for t in 1..=n {
                assert!(s.failure_prob(t) <= 0.5, "n={n} t={t}");
            }
        }
    }

    #[test]
    fn all_solutions_found_immediately() {
        let mut rng = RngSeed(5).rng();
        let mut o = BitOracle::new(vec![true; 50]).unwrap();
        let out = unknown_t_search(&mut o, &mut rng, SCHEDULE_FACTOR, 100).unwrap();
        assert!(out.found().is_some());
        assert_eq!(out.queries.total(), 1);
    }
}
