//! Small-error search and the error/query trade-off experiments.
//!
//! Two constructions are provided:
//!
//! * [`SmallErrorPlan`]: exact search for every solution count
//!   `1..=t₀` (`t₀ = ⌈log₂(1/ε)⌉`), then at least `t₀` randomized Grover runs
//!   of up to `⌈√(N/t₀)⌉` iterations each. Inputs with at most `t₀` solutions
//!   are found with certainty in the first phase. The run count is the least
//!   one whose closed-form failure is at most `ε` for every larger count.
//! * [`AmplifiedPlan`]: a bounded-error unknown-count search, repeated
//!   `⌈log₂(1/ε)⌉` times. Cheaper when the promised solution count is large.
//!
//! Both are one-sided: with no solution they always answer `NotFound`.
//! Failure probabilities are available in closed form for any true solution
//! count, so error targets far below Monte Carlo resolution can be checked.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::amplitude::{
    self, cutoff_for_error, mean_success, ExactPlan, IterationSchedule, SearchOutcome,
    SearchResult, SCHEDULE_FACTOR,
};
use crate::error::{Error, Result};
use crate::oracle::{BitOracle, QueryStats, RngSeed};

/// Rounds needed to push error below `eps` by halving: `⌈log₂(1/ε)⌉`.
pub fn halvings(eps: f64) -> u32 {
    ((1.0 / eps).log2() - 1e-9).ceil().max(1.0) as u32
}

fn check_eps(n: usize, eps: f64) -> Result<()> {
    let floor = 2f64.powi(-(n.min(1074) as i32));
    if !(eps > 0.0 && eps < 1.0) || eps < floor {
        return Err(Error::InvalidEpsilon(eps));
    }
    Ok(())
}

/// Query plan of the small-error search for a given `N` and `ε`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SmallErrorPlan {
    pub n: usize,
    pub eps: f64,
    pub t0: u32,
    pub exact: Vec<ExactPlan>,
    /// Second-phase runs draw their iteration count from `[0, phase2_choices)`.
    pub phase2_choices: u64,
    /// Number of second-phase runs: the least `r ≥ t₀` meeting `ε` for every
    /// solution count.
    pub phase2_runs: u32,
}

impl SmallErrorPlan {
    pub fn new(n: usize, eps: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyInput);
        }
        check_eps(n, eps)?;
        let t0 = halvings(eps);
        let exact = (1..=(t0 as usize).min(n))
            .map(|t| ExactPlan::new(n, t))
            .collect::<Result<Vec<_>>>()?;
        let phase2_choices = (n as f64 / t0 as f64).sqrt().ceil().max(1.0) as u64;
        let mut plan = SmallErrorPlan {
            n,
            eps,
            t0,
            exact,
            phase2_choices,
            phase2_runs: t0,
        };
        plan.phase2_runs = ((t0 as usize + 1)..=n)
            .map(|t| {
                let (phase1, single) = plan.phase_failures(t);
                if phase1 <= eps || single <= 0.0 {
                    t0
                } else {
                    ((eps / phase1).ln() / single.ln() - 1e-9).ceil().max(t0 as f64) as u32
                }
            })
            .max()
            .unwrap_or(t0);
        Ok(plan)
    }

    // (failure of the exact phase, failure of one second-phase run)
    fn phase_failures(&self, t_actual: usize) -> (f64, f64) {
        let phase1: f64 = self
            .exact
            .iter()
            .map(|p| 1.0 - p.success_prob(t_actual))
            .product();
        let theta = (t_actual as f64 / self.n as f64).sqrt().asin();
        (phase1, 1.0 - mean_success(theta, self.phase2_choices))
    }

    /// Worst-case charged queries, verification included.
    pub fn worst_case_queries(&self) -> u64 {
        self.exact.iter().map(ExactPlan::queries).sum::<u64>()
            + self.phase2_runs as u64 * self.phase2_choices
    }

    /// Probability of answering `NotFound` on an input with `t_actual ≥ 1`
    /// solutions.
    pub fn failure_prob(&self, t_actual: usize) -> f64 {
        if t_actual == 0 {
            return 0.0;
        }
        let (phase1, single) = self.phase_failures(t_actual);
        (phase1 * single.powi(self.phase2_runs as i32)).clamp(0.0, 1.0)
    }

    pub fn run<R: Rng + ?Sized>(&self, oracle: &mut BitOracle, rng: &mut R) -> SearchOutcome {
        let before = oracle.stats();
        let n = oracle.len();
        let mut found = None;
        for plan in &self.exact {
            let out = amplitude::run_exact_plan(oracle, plan, rng);
            if let Some(j) = out.found() {
                found = Some(j);
                break;
            }
        }
        if found.is_none() {
            for _ in 0..self.phase2_runs {
                let k = rng.random_range(0..self.phase2_choices);
                if let Some(j) = amplitude::grover_run(oracle, 0..n, true, k, rng) {
                    found = Some(j);
                    break;
                }
            }
        }
        finish(oracle, before, found)
    }
}

/// Bounded-error unknown-count search, repeated to reach error `ε`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AmplifiedPlan {
    pub n: usize,
    pub t: usize,
    pub eps: f64,
    pub repetitions: u32,
    pub schedule: IterationSchedule,
}

impl AmplifiedPlan {
    pub fn new(n: usize, t: usize, eps: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyInput);
        }
        if t == 0 || t > n {
            return Err(Error::InvalidParameter(format!(
                "promise t must be in 1..={n}, got {t}"
            )));
        }
        check_eps(n, eps)?;
        let cutoff = cutoff_for_error(n, t, SCHEDULE_FACTOR, 0.5)?;
        Ok(AmplifiedPlan {
            n,
            t,
            eps,
            repetitions: halvings(eps),
            schedule: IterationSchedule::new(n, SCHEDULE_FACTOR, cutoff)?,
        })
    }

    pub fn worst_case_queries(&self) -> u64 {
        self.repetitions as u64 * self.schedule.max_queries()
    }

    pub fn failure_prob(&self, t_actual: usize) -> f64 {
        if t_actual == 0 {
            return 0.0;
        }
        self.schedule
            .failure_prob(t_actual)
            .powi(self.repetitions as i32)
    }

    pub fn run<R: Rng + ?Sized>(&self, oracle: &mut BitOracle, rng: &mut R) -> SearchOutcome {
        let before = oracle.stats();
        let n = oracle.len();
        let mut found = None;
        for _ in 0..self.repetitions {
            found = self.schedule.run(oracle, 0..n, true, rng);
            if found.is_some() {
                break;
            }
        }
        finish(oracle, before, found)
    }
}

fn finish(oracle: &BitOracle, before: QueryStats, found: Option<usize>) -> SearchOutcome {
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

/// Small-error search with error at most `eps` on any input with a solution.
pub fn theorem3_search<R: Rng + ?Sized>(
    oracle: &mut BitOracle,
    eps: f64,
    rng: &mut R,
) -> Result<SearchOutcome> {
    Ok(SmallErrorPlan::new(oracle.len(), eps)?.run(oracle, rng))
}

/// Repeated bounded-error search under the promise of at least `t` solutions.
pub fn case2_amplify<R: Rng + ?Sized>(
    oracle: &mut BitOracle,
    t: usize,
    eps: f64,
    rng: &mut R,
) -> Result<SearchOutcome> {
    Ok(AmplifiedPlan::new(oracle.len(), t, eps)?.run(oracle, rng))
}

/// Either construction, chosen per grid point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum SearchPlan {
    SmallError(SmallErrorPlan),
    Amplified(AmplifiedPlan),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum Strategy {
    /// Query count at least `√(tN)`: the small-error construction.
    #[default]
    SmallError,
    /// Query count below `√(tN)`: repeated bounded-error search.
    Amplified,
}

impl SearchPlan {
    /// Picks the construction for promise `t` and target `eps`. With `T` the
    /// cheaper worst-case query count, `T ≥ √(tN)` selects the small-error
    /// construction and `T < √(tN)` the amplified one.
    pub fn choose(n: usize, t: usize, eps: f64) -> Result<Self> {
        let small = SmallErrorPlan::new(n, eps)?;
        let amp = AmplifiedPlan::new(n, t, eps)?;
        let best = small.worst_case_queries().min(amp.worst_case_queries());
        if best as f64 >= ((t * n) as f64).sqrt() {
            Ok(SearchPlan::SmallError(small))
        } else {
            Ok(SearchPlan::Amplified(amp))
        }
    }

    pub fn strategy(&self) -> Strategy {
        match self {
            SearchPlan::SmallError(_) => Strategy::SmallError,
            SearchPlan::Amplified(_) => Strategy::Amplified,
        }
    }

    pub fn n(&self) -> usize {
        match self {
            SearchPlan::SmallError(p) => p.n,
            SearchPlan::Amplified(p) => p.n,
        }
    }

    pub fn worst_case_queries(&self) -> u64 {
        match self {
            SearchPlan::SmallError(p) => p.worst_case_queries(),
            SearchPlan::Amplified(p) => p.worst_case_queries(),
        }
    }

    pub fn failure_prob(&self, t_actual: usize) -> f64 {
        match self {
            SearchPlan::SmallError(p) => p.failure_prob(t_actual),
            SearchPlan::Amplified(p) => p.failure_prob(t_actual),
        }
    }

    /// Largest failure probability over true counts `t_min..=N`, and the
    /// count attaining it.
    pub fn worst_failure(&self, t_min: usize) -> (usize, f64) {
        (t_min.max(1)..=self.n())
            .map(|t| (t, self.failure_prob(t)))
            .fold((t_min.max(1), -1.0), |acc, x| if x.1 > acc.1 { x } else { acc })
    }

    pub fn run<R: Rng + ?Sized>(&self, oracle: &mut BitOracle, rng: &mut R) -> SearchOutcome {
        match self {
            SearchPlan::SmallError(p) => p.run(oracle, rng),
            SearchPlan::Amplified(p) => p.run(oracle, rng),
        }
    }
}

/// Frozen band `[c₁, c₂]` for [`TradeoffRecord::tradeoff_ratio`], with
/// `c₂/c₁ = 16`.
pub const TRADEOFF_BAND: (f64, f64) = (0.125, 2.0);

/// The 18-point grid `N ∈ {1024, 4096}`, `t ∈ {1, √N, N/8}`,
/// `ε ∈ {2⁻², 2⁻⁶, 2⁻¹⁰}`.
pub fn default_tradeoff_grid() -> Vec<(usize, usize, f64)> {
    let mut grid = Vec::new();
    for n in [1024usize, 4096] {
        let root = (n as f64).sqrt() as usize;
        for t in [1, root, n / 8] {
            for k in [2, 6, 10] {
                grid.push((n, t, 2f64.powi(-k)));
            }
        }
    }
    grid
}

/// One point of the trade-off experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TradeoffRecord {
    #[serde(rename = "N")]
    pub n: usize,
    pub t: usize,
    pub q: f64,
    pub eps_target: f64,
    pub eps_measured: f64,
    pub eps_analytic: f64,
    #[serde(rename = "T_mean")]
    pub t_mean: f64,
    #[serde(rename = "T_max")]
    pub t_max: u64,
    pub trials: u64,
    pub seed: u64,
    #[serde(skip)]
    pub strategy: Strategy,
    /// Planted solution count of the trials (the hardest count for the plan).
    #[serde(skip)]
    pub t_planted: usize,
    #[serde(skip)]
    pub worst_case_bound: u64,
}

impl TradeoffRecord {
    /// `log₂(1/ε) / (T²/N + T√(t/N))` with `ε` the analytic worst-case error
    /// and `T` the worst-case query bound of the plan.
    pub fn tradeoff_ratio(&self) -> f64 {
        let n = self.n as f64;
        let t = self.worst_case_bound as f64;
        let denom = t * t / n + t * (self.t as f64 / n).sqrt();
        (1.0 / self.eps_analytic).log2() / denom
    }
}

/// Runs `trials` independent searches per grid point `(N, t, ε)` on inputs
/// with the hardest solution count allowed by the promise.
pub fn tradeoff_sweep(
    grid: &[(usize, usize, f64)],
    trials: u64,
    seed: RngSeed,
) -> Result<Vec<TradeoffRecord>> {
    grid.iter()
        .enumerate()
        .map(|(i, &(n, t, eps))| {
            if t > n {
                return Err(Error::TooManySolutions { requested: t, len: n });
            }
            let plan = SearchPlan::choose(n, t.max(1), eps)?;
            let (t_planted, eps_analytic) = plan.worst_failure(t);
            let point_seed = seed.child(i as u64);
            let runs: Vec<(bool, u64)> = (0..trials)
                .into_par_iter()
                .map(|trial| {
                    let mut rng = point_seed.child(trial).rng();
                    let mut oracle =
                        BitOracle::planted(n, t_planted, &mut rng).expect("valid planted input");
                    let out = plan.run(&mut oracle, &mut rng);
                    (out.found().is_none(), out.queries.total())
                })
                .collect();
            let failures = runs.iter().filter(|r| r.0).count();
            let total: u64 = runs.iter().map(|r| r.1).sum();
            Ok(TradeoffRecord {
                n,
                t,
                q: t as f64 / n as f64,
                eps_target: eps,
                eps_measured: failures as f64 / trials.max(1) as f64,
                eps_analytic,
                t_mean: total as f64 / trials.max(1) as f64,
                t_max: runs.iter().map(|r| r.1).max().unwrap_or(0),
                trials,
                seed: point_seed.0,
                strategy: plan.strategy(),
                t_planted,
                worst_case_bound: plan.worst_case_queries(),
            })
        })
        .collect()
}

/// What is known about the sample space of the algorithm being amplified.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SampleSpace {
    /// Only `|S|` is known.
    KnownSize,
    /// At least a fraction `q` of the coin sequences accept on 1-inputs.
    KnownFraction(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AmplifyOutcome {
    /// Whether some accepting coin sequence was found.
    pub accept: bool,
    /// Calls to the classical algorithm.
    pub calls: u64,
}

/// Amplifies a one-sided classical algorithm, exposed as the oracle
/// `r ↦ A(x, r)` over its sample space, to error at most `eps`.
pub fn amplify_one_sided<R: Rng + ?Sized>(
    algorithm: &mut BitOracle,
    eps: f64,
    space: SampleSpace,
    rng: &mut R,
) -> Result<AmplifyOutcome> {
    let before = algorithm.query_count();
    let out = match space {
        SampleSpace::KnownSize => theorem3_search(algorithm, eps, rng)?,
        SampleSpace::KnownFraction(q) => {
            if !(q > 0.0 && q <= 1.0) {
                return Err(Error::InvalidParameter(format!("fraction {q} not in (0,1]")));
            }
            let s = algorithm.len();
            let t = ((q * s as f64).ceil() as usize).clamp(1, s);
            case2_amplify(algorithm, t, eps, rng)?
        }
    };
    Ok(AmplifyOutcome {
        accept: out.found().is_some(),
        calls: algorithm.query_count() - before,
    })
}
