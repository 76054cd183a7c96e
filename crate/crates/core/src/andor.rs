//! Uniform AND-OR trees, certificates, and zero-error evaluation by
//! certificate finding.
//!
//! Leaves are numbered left to right, so every subtree covers a contiguous
//! index range. Level 0 is the root; a node at level `l` has `branching[l]`
//! children, and gates alternate from level to level.
//!
//! The certificate finders compose search runs classically (restarts,
//! sequential sub-calls, dovetailing) and simulate each search run at the
//! distribution level: a run over noisy child evaluations first samples what
//! every child evaluation would report, then runs two-dimensional Grover
//! against that sampled marked set.

use std::collections::BTreeMap;
use std::fmt;

use rand::{Rng, SeedableRng};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::amplitude::{cutoff_for_error, success_at, IterationSchedule, SCHEDULE_FACTOR};
use crate::error::{Error, Result};
use crate::oracle::{BitOracle, QueryStats, RngSeed, TrialRng};

/// Error target of a coherent (fixed-cost) child evaluation.
pub const INNER_ERROR: f64 = 0.1;
/// Error target of a measured search over a node's children.
pub const OUTER_ERROR: f64 = 0.25;
/// A sub-call is abandoned after this many times its expected cost.
pub const DEFAULT_RESTART_FACTOR: f64 = 10.0;
pub const DEFAULT_CUTOFF_MULTIPLIER: f64 = 2.0;
/// Runs used to estimate expected cost before setting a cutoff.
pub const PILOT_RUNS: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Gate {
    Or,
    And,
}

impl Gate {
    pub fn flip(self) -> Gate {
        match self {
            Gate::Or => Gate::And,
            Gate::And => Gate::Or,
        }
    }

    /// The child value that decides the gate on its own.
    pub fn witness(self) -> bool {
        self == Gate::Or
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeShape {
    branching: Vec<usize>,
    root_gate: Gate,
}

impl TreeShape {
    pub fn new(branching: Vec<usize>, root_gate: Gate) -> Result<Self> {
        if branching.is_empty() {
            return Err(Error::InvalidParameter("tree depth must be >= 1".into()));
        }
        if branching.contains(&0) {
            return Err(Error::InvalidParameter("branching factors must be >= 1".into()));
        }
        branching
            .iter()
            .try_fold(1usize, |acc, &b| acc.checked_mul(b))
            .ok_or_else(|| Error::InvalidParameter("tree too large".into()))?;
        Ok(TreeShape { branching, root_gate })
    }

    /// `depth` levels of `fanout` children each.
    pub fn uniform(depth: usize, fanout: usize, root_gate: Gate) -> Result<Self> {
        Self::new(vec![fanout; depth], root_gate)
    }

    pub fn branching(&self) -> &[usize] {
        &self.branching
    }

    pub fn root_gate(&self) -> Gate {
        self.root_gate
    }

    pub fn depth(&self) -> usize {
        self.branching.len()
    }

    /// Number of leaves.
    pub fn len(&self) -> usize {
        self.branching.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn gate_at(&self, level: usize) -> Gate {
        if level % 2 == 0 {
            self.root_gate
        } else {
            self.root_gate.flip()
        }
    }

    /// Leaves under a node at `level`.
    pub fn subtree_size(&self, level: usize) -> usize {
        self.branching[level..].iter().product()
    }

    /// Short identifier such as `and-8x64`.
    pub fn id(&self) -> String {
        let dims: Vec<String> = self.branching.iter().map(|b| b.to_string()).collect();
        let gate = match self.root_gate {
            Gate::Or => "or",
            Gate::And => "and",
        };
        format!("{gate}-{}", dims.join("x"))
    }

    fn eval_node(&self, level: usize, start: usize, leaf: &dyn Fn(usize) -> Option<bool>) -> Option<bool> {
        if level == self.depth() {
            return leaf(start);
        }
        let w = self.gate_at(level).witness();
        let cs = self.subtree_size(level + 1);
        let mut all_decided = true;
        for i in 0..self.branching[level] {
            match self.eval_node(level + 1, start + i * cs, leaf) {
                Some(v) if v == w => return Some(w),
                Some(_) => {}
                None => all_decided = false,
            }
        }
        all_decided.then_some(!w)
    }
}

impl fmt::Display for TreeShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.id())
    }
}

/// AND of `N^{1/3}` ORs of `N^{2/3}` leaves each.
pub fn make_theorem9_shape(n: usize) -> Result<TreeShape> {
    let root = (n as f64).cbrt().round() as usize;
    if root == 0 || root * root * root != n {
        return Err(Error::InvalidParameter(format!("{n} is not a perfect cube")));
    }
    TreeShape::new(vec![root, root * root], Gate::And)
}

pub fn eval_tree(shape: &TreeShape, assignment: &[bool]) -> Result<bool> {
    check_len(shape, assignment.len())?;
    Ok(shape
        .eval_node(0, 0, &|j| Some(assignment[j]))
        .expect("full assignment decides the tree"))
}

/// Three-valued evaluation: `None` leaves are unknown.
pub fn eval_partial(shape: &TreeShape, assignment: &[Option<bool>]) -> Result<Option<bool>> {
    check_len(shape, assignment.len())?;
    Ok(shape.eval_node(0, 0, &|j| assignment[j]))
}

/// Classical baseline: reads every leaf.
pub fn eval_tree_classical(shape: &TreeShape, oracle: &mut BitOracle) -> Result<bool> {
    check_len(shape, oracle.len())?;
    let bits: Vec<bool> = (0..oracle.len()).map(|j| oracle.query(j)).collect();
    eval_tree(shape, &bits)
}

fn check_len(shape: &TreeShape, len: usize) -> Result<()> {
    if len != shape.len() {
        return Err(Error::DimensionMismatch {
            expected: shape.len(),
            actual: len,
        });
    }
    Ok(())
}

/// Leaf values that force the tree to `claimed_value`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub entries: BTreeMap<usize, bool>,
    pub claimed_value: bool,
}

impl Certificate {
    pub fn new(entries: BTreeMap<usize, bool>, claimed_value: bool) -> Self {
        Certificate {
            entries,
            claimed_value,
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.entries.keys().copied()
    }

    /// Whether the entries alone force `claimed_value`, without looking at
    /// any input.
    pub fn forces(&self, shape: &TreeShape) -> bool {
        if self.entries.keys().any(|&j| j >= shape.len()) {
            return false;
        }
        let mut partial = vec![None; shape.len()];
        for (&j, &v) in &self.entries {
            partial[j] = Some(v);
        }
        eval_partial(shape, &partial).expect("length matches") == Some(self.claimed_value)
    }
}

/// Queries exactly the certificate's indices (as verification queries) and
/// checks that they match and force the claimed value.
pub fn verify_certificate(shape: &TreeShape, oracle: &mut BitOracle, cert: &Certificate) -> bool {
    if oracle.len() != shape.len() || cert.entries.keys().any(|&j| j >= shape.len()) {
        return false;
    }
    let mut matches = true;
    for (&j, &v) in &cert.entries {
        matches &= oracle.verify_query(j) == v;
    }
    matches && cert.forces(shape)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Verdict {
    Value { value: bool, certificate: Certificate },
    DontKnow,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZeroErrorVerdict {
    pub verdict: Verdict,
    pub queries: QueryStats,
    /// Combined query cutoff that was in force.
    pub cutoff: u64,
}

impl ZeroErrorVerdict {
    pub fn value(&self) -> Option<bool> {
        match &self.verdict {
            Verdict::Value { value, .. } => Some(*value),
            Verdict::DontKnow => None,
        }
    }

    pub fn certificate(&self) -> Option<&Certificate> {
        match &self.verdict {
            Verdict::Value { certificate, .. } => Some(certificate),
            Verdict::DontKnow => None,
        }
    }

    pub fn is_dont_know(&self) -> bool {
        self.verdict == Verdict::DontKnow
    }
}

/// Precomputed per-level search schedules and costs.
#[derive(Debug, Clone)]
struct Plan {
    shape: TreeShape,
    sizes: Vec<usize>,
    inner: Vec<IterationSchedule>,
    outer: Vec<IterationSchedule>,
    reps: Vec<usize>,
    step: Vec<u64>,
    check: Vec<u64>,
    eval_cost: Vec<u64>,
    search_cost: Vec<u64>,
    nominal: Vec<[f64; 2]>,
    restart_factor: f64,
}

fn ceil_log2(b: usize) -> usize {
    if b <= 1 {
        0
    } else {
        (usize::BITS - (b - 1).leading_zeros()) as usize
    }
}

fn schedule_for(n: usize, target: f64) -> Result<IterationSchedule> {
    let cutoff = cutoff_for_error(n, 1, SCHEDULE_FACTOR, target)?;
    IterationSchedule::new(n, SCHEDULE_FACTOR, cutoff)
}

fn schedule_cost(s: &IterationSchedule, step: u64, check: u64) -> u64 {
    s.choices
        .iter()
        .map(|&m| (m - 1).saturating_mul(step).saturating_add(check))
        .fold(0u64, u64::saturating_add)
}

impl Plan {
    fn new(shape: TreeShape, restart_factor: f64) -> Result<Self> {
        if !(restart_factor >= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "restart factor must be >= 1, got {restart_factor}"
            )));
        }
        let d = shape.depth();
        let sizes: Vec<usize> = (0..=d).map(|l| shape.subtree_size(l)).collect();
        let mut inner = Vec::with_capacity(d);
        let mut outer = Vec::with_capacity(d);
        for &b in shape.branching() {
            inner.push(schedule_for(b, INNER_ERROR)?);
            outer.push(schedule_for(b, OUTER_ERROR)?);
        }
        let reps: Vec<usize> = (0..d)
            .map(|l| if l + 1 == d { 1 } else { 2 * ceil_log2(shape.branching()[l]) + 1 })
            .collect();
        let (mut step, mut check, mut eval_cost, mut search_cost) =
            (vec![0; d], vec![0; d], vec![0; d], vec![0; d]);
        for l in (0..d).rev() {
            if l + 1 == d {
                step[l] = 1;
                check[l] = 1;
            } else {
                let child = eval_cost[l + 1];
                check[l] = (reps[l] as u64).saturating_mul(child);
                step[l] = check[l].saturating_mul(2);
            }
            eval_cost[l] = schedule_cost(&inner[l], step[l], check[l]);
            search_cost[l] = schedule_cost(&outer[l], step[l], check[l]);
        }
        let mut nominal = vec![[1.0; 2]; d + 1];
        for l in (0..d).rev() {
            for b in [false, true] {
                let below = nominal[l + 1][b as usize];
                nominal[l][b as usize] = if shape.gate_at(l).witness() == b {
                    if l + 1 == d {
                        outer[l].expected_queries(1) / (1.0 - outer[l].failure_prob(1))
                    } else {
                        search_cost[l] as f64 + below
                    }
                } else {
                    shape.branching()[l] as f64 * below
                };
            }
        }
        Ok(Plan {
            shape,
            sizes,
            inner,
            outer,
            reps,
            step,
            check,
            eval_cost,
            search_cost,
            nominal,
            restart_factor,
        })
    }
}

struct Stuck;

type Step<T> = std::result::Result<T, Stuck>;

/// One simulated certificate-finding run with a query limit.
struct Sim<'a, R: Rng> {
    plan: &'a Plan,
    bits: &'a [bool],
    rng: &'a mut R,
    spent: u64,
    limit: u64,
}

fn binomial_majority(r: usize, p: f64) -> f64 {
    // P(Bin(r, p) > r/2)
    let mut total = 0.0;
    let mut coeff = 1.0;
    for k in 0..=r {
        if k > 0 {
            coeff = coeff * (r - k + 1) as f64 / k as f64;
        }
        if 2 * k > r {
            total += coeff * p.powi(k as i32) * (1.0 - p).powi((r - k) as i32);
        }
    }
    total
}

fn pick_index<R: Rng>(marked: &[bool], t: usize, p: f64, rng: &mut R) -> usize {
    let hit = t > 0 && (p >= 1.0 - 1e-12 || rng.random::<f64>() < p);
    let want = if hit { true } else { t == marked.len() };
    let pool: Vec<usize> = (0..marked.len()).filter(|&i| marked[i] == want).collect();
    pool[rng.random_range(0..pool.len())]
}

fn theta_of(t: usize, n: usize) -> f64 {
    (t as f64 / n as f64).sqrt().asin()
}

impl<'a, R: Rng> Sim<'a, R> {
    fn charge(&mut self, c: u64) -> Step<()> {
        if self.spent.saturating_add(c) > self.limit {
            self.spent = self.limit;
            Err(Stuck)
        } else {
            self.spent += c;
            Ok(())
        }
    }

    /// The run can never finish from here: it spins until its limit.
    fn stall(&mut self) -> Stuck {
        self.spent = self.limit;
        Stuck
    }

    fn children(&self, level: usize, start: usize) -> impl Iterator<Item = usize> {
        let cs = self.plan.sizes[level + 1];
        (0..self.plan.shape.branching()[level]).map(move |i| start + i * cs)
    }

    /// What one coherent evaluation of the node reports.
    fn sample_eval(&mut self, level: usize, start: usize) -> bool {
        let w = self.plan.shape.gate_at(level).witness();
        let b = self.plan.shape.branching()[level];
        let t = if level + 1 == self.plan.shape.depth() {
            self.bits[start..start + b].iter().filter(|&&v| v == w).count()
        } else {
            let kids: Vec<usize> = self.children(level, start).collect();
            kids.into_iter()
                .filter(|&c| self.amplified(level + 1, c) == w)
                .count()
        };
        let p = 1.0 - self.plan.inner[level].failure_prob(t);
        if self.rng.random::<f64>() < p {
            w
        } else {
            !w
        }
    }

    /// What the majority of repeated evaluations of a child node reports.
    fn amplified(&mut self, level: usize, start: usize) -> bool {
        let d = self.plan.shape.depth();
        if level == d {
            return self.bits[start];
        }
        let r = self.plan.reps[level - 1];
        if level + 1 == d {
            let w = self.plan.shape.gate_at(level).witness();
            let b = self.plan.shape.branching()[level];
            let t = self.bits[start..start + b].iter().filter(|&&v| v == w).count();
            let p = 1.0 - self.plan.inner[level].failure_prob(t);
            let says_w = self.rng.random::<f64>() < binomial_majority(r, p);
            return if says_w { w } else { !w };
        }
        let votes = (0..r).filter(|_| self.sample_eval(level, start)).count();
        2 * votes > r
    }

    /// One measured search over the node's children for one whose (noisily
    /// evaluated) value is `target`. Returns the child index and whether its
    /// check passed.
    fn search_children(&mut self, level: usize, start: usize, target: bool) -> Step<(usize, bool)> {
        let leaves = level + 1 == self.plan.shape.depth();
        let kids: Vec<usize> = self.children(level, start).collect();
        let marked: Vec<bool> = if leaves {
            kids.iter().map(|&c| self.bits[c] == target).collect()
        } else {
            kids.iter().map(|&c| self.amplified(level + 1, c) == target).collect()
        };
        let t = marked.iter().filter(|&&m| m).count();
        let theta = theta_of(t, marked.len());
        let (step, check) = (self.plan.step[level], self.plan.check[level]);
        for i in 0..self.plan.outer[level].choices.len() {
            let m = self.plan.outer[level].choices[i];
            let k = self.rng.random_range(0..m);
            self.charge(k.saturating_mul(step))?;
            let p = if t == 0 { 0.0 } else { success_at(theta, k) };
            let j = pick_index(&marked, t, p, self.rng);
            self.charge(check)?;
            if marked[j] {
                return Ok((j, true));
            }
        }
        Ok((self.rng.random_range(0..marked.len()), false))
    }

    fn certificate(&mut self, level: usize, start: usize, b: bool, out: &mut BTreeMap<usize, bool>) -> Step<()> {
        let d = self.plan.shape.depth();
        if level == d {
            self.charge(1)?;
            if self.bits[start] == b {
                out.insert(start, b);
                return Ok(());
            }
            return Err(self.stall());
        }
        let cs = self.plan.sizes[level + 1];
        if self.plan.shape.gate_at(level).witness() != b {
            for c in self.children(level, start).collect::<Vec<_>>() {
                self.certificate(level + 1, c, b, out)?;
            }
            return Ok(());
        }
        if level + 1 == d {
            // search the leaves until a check succeeds
            loop {
                let (j, ok) = self.search_children(level, start, b)?;
                if ok {
                    out.insert(start + j * cs, b);
                    return Ok(());
                }
            }
        }
        let allowance = (self.plan.restart_factor * self.plan.nominal[level + 1][b as usize]).ceil() as u64;
        loop {
            let (j, _) = self.search_children(level, start, b)?;
            let outer_limit = self.limit;
            self.limit = outer_limit.min(self.spent.saturating_add(allowance));
            let mut sub = BTreeMap::new();
            let res = self.certificate(level + 1, start + j * cs, b, &mut sub);
            self.limit = outer_limit;
            match res {
                Ok(()) => {
                    out.extend(sub);
                    return Ok(());
                }
                Err(Stuck) if self.spent >= self.limit => return Err(Stuck),
                Err(Stuck) => {}
            }
        }
    }
}

/// Query-limited certificate search for one value.
#[derive(Debug, Clone, PartialEq)]
struct RunResult {
    certificate: Option<BTreeMap<usize, bool>>,
    queries: u64,
}

/// Zero-error AND-OR evaluation by dovetailed certificate finding.
#[derive(Debug, Clone)]
pub struct ZeroErrorEvaluator {
    plan: Plan,
}

impl ZeroErrorEvaluator {
    pub fn new(shape: TreeShape) -> Result<Self> {
        Ok(ZeroErrorEvaluator {
            plan: Plan::new(shape, DEFAULT_RESTART_FACTOR)?,
        })
    }

    pub fn with_restart_factor(self, restart_factor: f64) -> Result<Self> {
        Ok(ZeroErrorEvaluator {
            plan: Plan::new(self.plan.shape, restart_factor)?,
        })
    }

    pub fn shape(&self) -> &TreeShape {
        &self.plan.shape
    }

    /// Nominal expected queries to find a `value`-certificate on a
    /// worst-case input with that value.
    pub fn nominal_queries(&self, value: bool) -> f64 {
        self.plan.nominal[0][value as usize]
    }

    /// Fixed cost of one coherent evaluation of a node at `level`.
    pub fn evaluation_cost(&self, level: usize) -> u64 {
        self.plan.eval_cost[level]
    }

    /// Worst-case cost of one measured search over the root's children.
    pub fn root_search_cost(&self) -> u64 {
        self.plan.search_cost[0]
    }

    fn run(&self, bits: &[bool], value: bool, seed: u64, limit: u64) -> RunResult {
        let mut rng = TrialRng::seed_from_u64(seed);
        let mut sim = Sim {
            plan: &self.plan,
            bits,
            rng: &mut rng,
            spent: 0,
            limit,
        };
        let mut out = BTreeMap::new();
        let certificate = sim.certificate(0, 0, value, &mut out).ok().map(|()| out);
        RunResult {
            certificate,
            queries: sim.spent,
        }
    }

    /// Searches for a `value`-certificate, giving up after `budget` queries.
    /// Never terminates on its own when the tree evaluates to `!value`.
    pub fn find_certificate<R: Rng + ?Sized>(
        &self,
        oracle: &mut BitOracle,
        value: bool,
        rng: &mut R,
        budget: u64,
    ) -> Result<Certificate> {
        check_len(&self.plan.shape, oracle.len())?;
        let res = self.run(oracle.hidden(), value, rng.random(), budget);
        oracle.charge_quantum(res.queries);
        res.certificate
            .map(|entries| Certificate::new(entries, value))
            .ok_or(Error::NonTermination { budget })
    }

    /// One measured search over the root's children for a child whose value
    /// is `target`. May return a wrong child.
    pub fn multilevel_grover<R: Rng + ?Sized>(
        &self,
        oracle: &mut BitOracle,
        target: bool,
        rng: &mut R,
    ) -> Result<usize> {
        check_len(&self.plan.shape, oracle.len())?;
        let mut r = TrialRng::seed_from_u64(rng.random());
        let mut sim = Sim {
            plan: &self.plan,
            bits: oracle.hidden(),
            rng: &mut r,
            spent: 0,
            limit: u64::MAX,
        };
        let (j, _) = sim.search_children(0, 0, target).ok().expect("unlimited run");
        let spent = sim.spent;
        oracle.charge_quantum(spent);
        Ok(j)
    }

    /// Runs both certificate finders in strict alternation, one query each
    /// turn. The first to finish supplies the answer, which is then verified
    /// classically. If the combined count would exceed `cutoff`, the answer is
    /// DontKnow.
    pub fn evaluate<R: Rng + ?Sized>(&self, oracle: &mut BitOracle, rng: &mut R, cutoff: u64) -> Result<ZeroErrorVerdict> {
        check_len(&self.plan.shape, oracle.len())?;
        let (seed1, seed0) = (rng.random::<u64>(), rng.random::<u64>());
        let (spent, found) = self.dovetail(oracle.hidden(), seed1, seed0, cutoff);
        oracle.charge_quantum(spent);
        let before = oracle.stats().classical_verification_queries;
        let verdict = match found {
            Some((value, entries)) => {
                let certificate = Certificate::new(entries, value);
                if verify_certificate(&self.plan.shape, oracle, &certificate) {
                    Verdict::Value { value, certificate }
                } else {
                    Verdict::DontKnow
                }
            }
            None => Verdict::DontKnow,
        };
        Ok(ZeroErrorVerdict {
            verdict,
            queries: QueryStats {
                quantum_queries: spent,
                classical_verification_queries: oracle.stats().classical_verification_queries - before,
            },
            cutoff,
        })
    }

    /// Global step counts: the 1-finder moves on odd steps, the 0-finder on
    /// even ones, so a finder done after `q` own queries finishes at step
    /// `2q - 1` or `2q` respectively.
    fn dovetail(&self, bits: &[bool], seed1: u64, seed0: u64, cutoff: u64) -> (u64, Option<(bool, BTreeMap<usize, bool>)>) {
        let one = self.run(bits, true, seed1, cutoff.div_ceil(2));
        let finish1 = one.certificate.as_ref().map(|_| 2 * one.queries - 1);
        let limit0 = match finish1 {
            Some(s) => (s / 2).min(cutoff / 2),
            None => cutoff / 2,
        };
        let zero = self.run(bits, false, seed0, limit0);
        let finish0 = zero.certificate.as_ref().map(|_| 2 * zero.queries);
        match (finish1, finish0) {
            (_, Some(s0)) if finish1.is_none_or(|s1| s0 < s1) => (s0, zero.certificate.map(|c| (false, c))),
            (Some(s1), _) => (s1, one.certificate.map(|c| (true, c))),
            _ => (cutoff, None),
        }
    }

    /// Mean combined queries of uncut dovetailed runs over `inputs`, using
    /// doubling cutoffs with replayed seeds until each run answers.
    pub fn calibrate(&self, inputs: &[Vec<bool>], seed: RngSeed) -> Result<f64> {
        if inputs.is_empty() {
            return Err(Error::EmptyInput);
        }
        for x in inputs {
            check_len(&self.plan.shape, x.len())?;
        }
        let start = self.nominal_queries(true).min(self.nominal_queries(false)).max(2.0) as u64;
        let total: u64 = inputs
            .par_iter()
            .enumerate()
            .map(|(i, x)| {
                let mut rng = seed.child(i as u64).rng();
                let (seed1, seed0) = (rng.random::<u64>(), rng.random::<u64>());
                let mut cutoff = start;
                loop {
                    let (spent, found) = self.dovetail(x, seed1, seed0, cutoff);
                    if found.is_some() {
                        return spent;
                    }
                    cutoff = cutoff.saturating_mul(2);
                }
            })
            .sum();
        Ok(total as f64 / inputs.len() as f64)
    }
}

/// Cutoff rule: `multiplier` times an expected query count.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Cutoff {
    pub expected: f64,
    pub multiplier: f64,
}

impl Cutoff {
    pub fn new(expected: f64, multiplier: f64) -> Result<Self> {
        if !(multiplier >= 1.0) || !(expected > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "cutoff needs multiplier >= 1 and positive expectation, got {multiplier} x {expected}"
            )));
        }
        Ok(Cutoff { expected, multiplier })
    }

    pub fn queries(&self) -> u64 {
        (self.expected * self.multiplier).floor() as u64
    }
}

pub fn zero_error_evaluate<R: Rng + ?Sized>(
    shape: &TreeShape,
    oracle: &mut BitOracle,
    rng: &mut R,
    cutoff: Cutoff,
) -> Result<ZeroErrorVerdict> {
    ZeroErrorEvaluator::new(shape.clone())?.evaluate(oracle, rng, cutoff.queries())
}

/// Finds a 1-certificate, or reports non-termination after `budget` queries.
pub fn find_certificate_a1<R: Rng + ?Sized>(
    shape: &TreeShape,
    oracle: &mut BitOracle,
    rng: &mut R,
    restart_factor: f64,
    budget: u64,
) -> Result<Certificate> {
    ZeroErrorEvaluator::new(shape.clone())?
        .with_restart_factor(restart_factor)?
        .find_certificate(oracle, true, rng, budget)
}

/// Finds a 0-certificate, or reports non-termination after `budget` queries.
pub fn find_certificate_a0<R: Rng + ?Sized>(
    shape: &TreeShape,
    oracle: &mut BitOracle,
    rng: &mut R,
    restart_factor: f64,
    budget: u64,
) -> Result<Certificate> {
    ZeroErrorEvaluator::new(shape.clone())?
        .with_restart_factor(restart_factor)?
        .find_certificate(oracle, false, rng, budget)
}

pub fn multilevel_grover<R: Rng + ?Sized>(
    shape: &TreeShape,
    oracle: &mut BitOracle,
    target: bool,
    rng: &mut R,
) -> Result<usize> {
    ZeroErrorEvaluator::new(shape.clone())?.multilevel_grover(oracle, target, rng)
}

/// Families of test inputs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InputClass {
    /// Value 1 with a single deciding child at every deciding node.
    One,
    /// Value 0, likewise minimal.
    Zero,
    /// `One` or `Zero` with equal probability.
    Mixed,
}

impl InputClass {
    pub fn name(self) -> &'static str {
        match self {
            InputClass::One => "one",
            InputClass::Zero => "zero",
            InputClass::Mixed => "mixed",
        }
    }
}

impl std::str::FromStr for InputClass {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "one" => Ok(InputClass::One),
            "zero" => Ok(InputClass::Zero),
            "mixed" => Ok(InputClass::Mixed),
            _ => Err(Error::Parse(format!("unknown input class {s:?}"))),
        }
    }
}

/// An input with tree value `value` in which every node whose value is
/// decided by a witness child has exactly one such child.
pub fn hard_instance<R: Rng + ?Sized>(shape: &TreeShape, value: bool, rng: &mut R) -> Vec<bool> {
    fn fill<R: Rng + ?Sized>(shape: &TreeShape, level: usize, start: usize, v: bool, out: &mut [bool], rng: &mut R) {
        if level == shape.depth() {
            out[start] = v;
            return;
        }
        let b = shape.branching()[level];
        let cs = shape.subtree_size(level + 1);
        let special = (v == shape.gate_at(level).witness()).then(|| rng.random_range(0..b));
        for i in 0..b {
            let child_value = if Some(i) == special { v } else if special.is_some() { !v } else { v };
            fill(shape, level + 1, start + i * cs, child_value, out, rng);
        }
    }
    let mut out = vec![false; shape.len()];
    fill(shape, 0, 0, value, &mut out, rng);
    out
}

pub fn sample_input<R: Rng + ?Sized>(shape: &TreeShape, class: InputClass, rng: &mut R) -> Vec<bool> {
    let value = match class {
        InputClass::One => true,
        InputClass::Zero => false,
        InputClass::Mixed => rng.random(),
    };
    hard_instance(shape, value, rng)
}

/// One CSV row of a zero-error experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AndOrRecord {
    pub shape_id: String,
    #[serde(rename = "N")]
    pub n: usize,
    pub d: usize,
    pub input_class: String,
    pub verdict: String,
    pub queries_quantum: u64,
    pub queries_classical: u64,
    pub dontknow: bool,
    pub seed: u64,
}

/// Outcome of a batch of zero-error runs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AndOrReport {
    pub expected_queries: f64,
    pub cutoff: u64,
    pub records: Vec<AndOrRecord>,
    /// Runs whose answer disagreed with the true value or whose certificate
    /// did not check out. Zero for a sound evaluator.
    pub unsound: usize,
}

impl AndOrReport {
    pub fn dont_know_rate(&self) -> f64 {
        self.records.iter().filter(|r| r.dontknow).count() as f64 / self.records.len().max(1) as f64
    }

    pub fn mean_queries(&self) -> f64 {
        self.records
            .iter()
            .map(|r| (r.queries_quantum + r.queries_classical) as f64)
            .sum::<f64>()
            / self.records.len().max(1) as f64
    }
}

/// Calibrates on `PILOT_RUNS` inputs of `class`, then runs `trials`
/// zero-error evaluations at `multiplier` times the pilot mean.
pub fn run_trials(
    evaluator: &ZeroErrorEvaluator,
    class: InputClass,
    trials: usize,
    seed: RngSeed,
    multiplier: f64,
) -> Result<AndOrReport> {
    let shape = evaluator.shape();
    let pilot_seed = seed.child(u64::MAX);
    let mut pilot_rng = pilot_seed.rng();
    let pilot: Vec<Vec<bool>> = (0..PILOT_RUNS).map(|_| sample_input(shape, class, &mut pilot_rng)).collect();
    let expected = evaluator.calibrate(&pilot, pilot_seed.child(1))?;
    let cutoff = Cutoff::new(expected, multiplier)?.queries();
    let rows: Vec<(AndOrRecord, bool)> = (0..trials)
        .into_par_iter()
        .map(|i| {
            let trial_seed = seed.child(i as u64);
            let mut rng = trial_seed.rng();
            let x = sample_input(shape, class, &mut rng);
            let truth = eval_tree(shape, &x).expect("length matches");
            let mut oracle = BitOracle::new(x.clone()).expect("nonempty");
            let v = evaluator.evaluate(&mut oracle, &mut rng, cutoff).expect("length matches");
            let sound = match &v.verdict {
                Verdict::DontKnow => true,
                Verdict::Value { value, certificate } => {
                    *value == truth
                        && certificate.claimed_value == truth
                        && certificate.forces(shape)
                        && certificate.entries.iter().all(|(&j, &b)| x[j] == b)
                }
            };
            let record = AndOrRecord {
                shape_id: shape.id(),
                n: shape.len(),
                d: shape.depth(),
                input_class: class.name().to_string(),
                verdict: match v.value() {
                    Some(b) => u8::from(b).to_string(),
                    None => "dontknow".to_string(),
                },
                queries_quantum: v.queries.quantum_queries,
                queries_classical: v.queries.classical_verification_queries,
                dontknow: v.is_dont_know(),
                seed: trial_seed.0,
            };
            (record, sound)
        })
        .collect();
    let unsound = rows.iter().filter(|(_, s)| !s).count();
    Ok(AndOrReport {
        expected_queries: expected,
        cutoff,
        records: rows.into_iter().map(|(r, _)| r).collect(),
        unsound,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn or_of_ands() -> TreeShape {
        // (x0 v x1) ^ (x2 v x3)
        TreeShape::new(vec![2, 2], Gate::And).unwrap()
    }

    fn bits(s: &str) -> Vec<bool> {
        s.chars().map(|c| c == '1').collect()
    }

    #[test]
    fn eval_examples() {
        let s = or_of_ands();
        assert!(eval_tree(&s, &bits("1011")).unwrap());
        assert!(!eval_tree(&s, &bits("0011")).unwrap());
        let flat = TreeShape::new(vec![5], Gate::Or).unwrap();
        assert!(!eval_tree(&flat, &[false; 5]).unwrap());
        let t = TreeShape::uniform(3, 2, Gate::Or).unwrap();
        assert!(eval_tree(&t, &[true; 8]).unwrap());
        assert!(eval_tree(&s, &bits("101")).is_err());
    }

    #[test]
    fn eval_matches_truth_table_oracle() {
        let s = TreeShape::new(vec![2, 3], Gate::Or).unwrap();
        for x in 0..64u32 {
            let a: Vec<bool> = (0..6).map(|j| x >> (5 - j) & 1 == 1).collect();
            let want = (a[0] && a[1] && a[2]) || (a[3] && a[4] && a[5]);
            assert_eq!(eval_tree(&s, &a).unwrap(), want);
        }
    }

    #[test]
    fn shape_basics() {
        let s = make_theorem9_shape(512).unwrap();
        assert_eq!(s.branching(), &[8, 64]);
        assert_eq!(s.root_gate(), Gate::And);
        assert_eq!(s.len(), 512);
        assert_eq!(make_theorem9_shape(8).unwrap().branching(), &[2, 4]);
        assert!(make_theorem9_shape(100).is_err());
        assert!(TreeShape::new(vec![], Gate::Or).is_err());
        assert!(TreeShape::new(vec![3, 0], Gate::Or).is_err());
        assert_eq!(s.id(), "and-8x64");
    }

    #[test]
    fn certificate_examples() {
        let s = or_of_ands();
        let mut o = BitOracle::parse("1011").unwrap();
        let c = Certificate::new(BTreeMap::from([(0, true), (3, true)]), true);
        assert!(verify_certificate(&s, &mut o, &c));
        assert_eq!(o.stats().classical_verification_queries, 2);
        assert_eq!(o.stats().quantum_queries, 0);
        let empty = Certificate::new(BTreeMap::new(), true);
        assert!(!verify_certificate(&s, &mut o, &empty));
        let wrong = Certificate::new(BTreeMap::from([(1, true), (3, true)]), true);
        assert!(!verify_certificate(&s, &mut o, &wrong));
        let partial = Certificate::new(BTreeMap::from([(0, true)]), true);
        assert!(!verify_certificate(&s, &mut o, &partial));
        let oob = Certificate::new(BTreeMap::from([(9, true)]), true);
        assert!(!verify_certificate(&s, &mut o, &oob));
    }

    #[test]
    fn classical_baseline_reads_everything() {
        let s = TreeShape::uniform(2, 3, Gate::Or).unwrap();
        let mut o = BitOracle::new(vec![true; 9]).unwrap();
        assert!(eval_tree_classical(&s, &mut o).unwrap());
        assert_eq!(o.query_count(), 9);
    }

    #[test]
    fn majority_tail() {
        assert!((binomial_majority(1, 0.3) - 0.3).abs() < 1e-15);
        assert!((binomial_majority(3, 0.5) - 0.5).abs() < 1e-15);
        // 3p^2(1-p) + p^3
        let p: f64 = 0.2;
        assert!((binomial_majority(3, p) - (3.0 * p * p * (1.0 - p) + p.powi(3))).abs() < 1e-15);
        assert_eq!(ceil_log2(1), 0);
        assert_eq!(ceil_log2(8), 3);
        assert_eq!(ceil_log2(9), 4);
    }

    #[test]
    fn flat_or_certificates() {
        let s = TreeShape::new(vec![16], Gate::Or).unwrap();
        let mut rng = RngSeed(4).rng();
        let mut x = vec![false; 16];
        x[11] = true;
        let mut o = BitOracle::new(x).unwrap();
        let c = find_certificate_a1(&s, &mut o, &mut rng, 10.0, 1_000_000).unwrap();
        assert_eq!(c.entries, BTreeMap::from([(11, true)]));
        let mut z = BitOracle::new(vec![false; 16]).unwrap();
        let c = find_certificate_a0(&s, &mut z, &mut rng, 10.0, 1_000_000).unwrap();
        assert_eq!(c.entries, (0..16).map(|j| (j, false)).collect());
        let err = find_certificate_a1(&s, &mut z, &mut rng, 10.0, 5_000).unwrap_err();
        assert_eq!(err, Error::NonTermination { budget: 5_000 });
    }

    #[test]
    fn two_level_certificates() {
        let s = TreeShape::uniform(2, 8, Gate::Or).unwrap();
        let mut rng = RngSeed(5).rng();
        for trial in 0..50 {
            let x = hard_instance(&s, trial % 2 == 0, &mut rng);
            let value = eval_tree(&s, &x).unwrap();
            let mut o = BitOracle::new(x).unwrap();
            let c = if value {
                find_certificate_a1(&s, &mut o, &mut rng, 10.0, 1_000_000).unwrap()
            } else {
                find_certificate_a0(&s, &mut o, &mut rng, 10.0, 1_000_000).unwrap()
            };
            assert!(verify_certificate(&s, &mut o, &c));
            assert_eq!(c.claimed_value, value);
            let wrong = if value {
                find_certificate_a0(&s, &mut o, &mut rng, 10.0, 100_000)
            } else {
                find_certificate_a1(&s, &mut o, &mut rng, 10.0, 100_000)
            };
            assert_eq!(wrong.unwrap_err(), Error::NonTermination { budget: 100_000 });
        }
    }

    #[test]
    fn hard_instances_have_requested_value() {
        let mut rng = RngSeed(6).rng();
        for shape in [make_theorem9_shape(64).unwrap(), TreeShape::uniform(3, 3, Gate::Or).unwrap()] {
            for v in [false, true] {
                for _ in 0..20 {
                    assert_eq!(eval_tree(&shape, &hard_instance(&shape, v, &mut rng)).unwrap(), v);
                }
            }
        }
    }

    #[test]
    fn tiny_constant_instance_is_answered() {
        let s = or_of_ands();
        let mut rng = RngSeed(8).rng();
        for _ in 0..100 {
            let mut o = BitOracle::parse("1111").unwrap();
            let v = zero_error_evaluate(&s, &mut o, &mut rng, Cutoff::new(1000.0, 2.0).unwrap()).unwrap();
            assert_eq!(v.value(), Some(true));
            assert!(v.certificate().unwrap().forces(&s));
        }
    }

    #[test]
    fn multilevel_grover_finds_the_satisfied_subtree() {
        let s = TreeShape::uniform(2, 8, Gate::Or).unwrap();
        let mut rng = RngSeed(9).rng();
        let trials = 2000;
        let mut hits = 0;
        for _ in 0..trials {
            let x = hard_instance(&s, true, &mut rng);
            let good = (0..8).find(|&i| x[i * 8..i * 8 + 8].iter().all(|&b| b)).unwrap();
            let mut o = BitOracle::new(x).unwrap();
            hits += usize::from(multilevel_grover(&s, &mut o, true, &mut rng).unwrap() == good);
        }
        assert!(hits as f64 / trials as f64 >= 2.0 / 3.0, "{hits}");
    }

    #[test]
    fn dovetailed_runs_are_sound() {
        let s = TreeShape::uniform(3, 4, Gate::Or).unwrap();
        let ev = ZeroErrorEvaluator::new(s).unwrap();
        let report = run_trials(&ev, InputClass::Mixed, 300, RngSeed(10), 2.0).unwrap();
        assert_eq!(report.unsound, 0);
        assert!(report.dont_know_rate() <= 0.5, "{}", report.dont_know_rate());
    }
}
