//! Batch experiment driver behind the `qqw` binary.

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufReader, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::amplitude::ExactPlan;
use crate::andor::{self, Gate, InputClass, TreeShape, ZeroErrorEvaluator};
use crate::boolfn::{self, TruthTable};
use crate::comm::{self, CertRelationInstance, CommRecord};
use crate::error::{Error, Result};
use crate::graph::{self, GraphRecord};
use crate::oracle::{BitOracle, RngSeed};
use crate::poly::{self, BoundParams};
use crate::search::{self, TRADEOFF_BAND};

pub const SCHEMA_VERSION: u32 = 1;
pub const SEED_ENV: &str = "QQW_SEED";

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_CHECK_FAILED: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "qqw", version, about = "Quantum query-complexity experiments")]
struct Cli {
    /// Base seed; falls back to $QQW_SEED, then 0.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Output file; stdout when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Evaluate the experiment's pass thresholds; exit 3 on failure.
    #[arg(long, global = true)]
    check: bool,
    /// Worker threads for trial batches.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Error/query trade-off of small-error search.
    SearchTradeoff(TradeoffArgs),
    /// Exact search with a known number of solutions.
    ExactSearch(ExactArgs),
    /// Zero-error AND-OR tree evaluation.
    Andor(AndOrArgs),
    /// Zero-error STAR graph property.
    Star(StarArgs),
    /// Exact Majority by comparisons.
    Majority(MajorityArgs),
    /// Two-party certificate protocol and Disjointness.
    Comm(CommArgs),
    /// Chebyshev checks and error lower-bound curves.
    Polybounds(PolyArgs),
    /// Brute-force measures of a truth table.
    Oracle(OracleArgs),
}

#[derive(Debug, Args)]
struct TradeoffArgs {
    #[arg(long = "N", value_delimiter = ',')]
    n: Vec<usize>,
    #[arg(long, value_delimiter = ',')]
    t: Vec<usize>,
    /// Error targets, e.g. `2^-6` or `0.01`.
    #[arg(long, value_delimiter = ',', value_parser = parse_eps)]
    eps: Vec<f64>,
    #[arg(long, default_value_t = 1000)]
    trials: u64,
}

#[derive(Debug, Args)]
struct ExactArgs {
    #[arg(long = "N", value_delimiter = ',', required = true)]
    n: Vec<usize>,
    /// Solution counts; every `1..=N` when absent.
    #[arg(long, value_delimiter = ',')]
    t: Vec<usize>,
    #[arg(long, default_value_t = 1000)]
    trials: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ShapeKind {
    /// AND of N^{1/3} ORs of N^{2/3} leaves.
    TwoLevel,
    Uniform,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum RootGate {
    Or,
    And,
}

impl From<RootGate> for Gate {
    fn from(g: RootGate) -> Gate {
        match g {
            RootGate::Or => Gate::Or,
            RootGate::And => Gate::And,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ClassArg {
    One,
    Zero,
    Mixed,
}

impl From<ClassArg> for InputClass {
    fn from(c: ClassArg) -> InputClass {
        match c {
            ClassArg::One => InputClass::One,
            ClassArg::Zero => InputClass::Zero,
            ClassArg::Mixed => InputClass::Mixed,
        }
    }
}

#[derive(Debug, Args)]
struct AndOrArgs {
    #[arg(long, value_enum, default_value_t = ShapeKind::TwoLevel)]
    shape: ShapeKind,
    #[arg(long = "N", default_value_t = 512)]
    n: usize,
    /// Depth of a uniform shape; the fanout is `N^{1/depth}`.
    #[arg(long, default_value_t = 2)]
    depth: usize,
    #[arg(long, value_enum, default_value_t = RootGate::Or)]
    root: RootGate,
    #[arg(long, value_enum, default_value_t = ClassArg::Mixed)]
    class: ClassArg,
    #[arg(long, default_value_t = 1000)]
    trials: usize,
    #[arg(long, default_value_t = andor::DEFAULT_CUTOFF_MULTIPLIER)]
    multiplier: f64,
    #[arg(long, default_value_t = andor::DEFAULT_RESTART_FACTOR)]
    restart_factor: f64,
}

#[derive(Debug, Args)]
struct StarArgs {
    /// Vertex counts.
    #[arg(long, value_delimiter = ',', default_value = "16")]
    n: Vec<usize>,
    #[arg(long, value_enum, default_value_t = ClassArg::Mixed)]
    class: ClassArg,
    #[arg(long, default_value_t = 1000)]
    trials: usize,
    #[arg(long, default_value_t = andor::DEFAULT_CUTOFF_MULTIPLIER)]
    multiplier: f64,
}

#[derive(Debug, Args)]
struct MajorityArgs {
    #[arg(long = "N", required = true)]
    n: usize,
    /// Run every input of length N (N <= 24).
    #[arg(long)]
    exhaustive: bool,
    /// A single input as a bit string.
    #[arg(long)]
    input: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum CommMode {
    /// Find certificates of g(x AND y) on random instances.
    Relation,
    /// Decide set intersection through the certificate protocol.
    Disjointness,
    /// Check one given triple (x, y, c).
    Verify,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum DisjClass {
    Disjoint,
    Intersecting,
}

#[derive(Debug, Args)]
struct CommArgs {
    #[arg(long, value_enum, default_value_t = CommMode::Disjointness)]
    mode: CommMode,
    /// Input length of the AND-of-ORs function (a perfect cube).
    #[arg(long = "N", default_value_t = 512)]
    n: usize,
    #[arg(long, value_enum, default_value_t = DisjClass::Intersecting)]
    class: DisjClass,
    #[arg(long, default_value_t = 1000)]
    trials: usize,
    /// Alice's input for `--mode verify`.
    #[arg(long)]
    x: Option<String>,
    /// Bob's input for `--mode verify`.
    #[arg(long)]
    y: Option<String>,
    /// Candidate certificate as an index mask, for `--mode verify`.
    #[arg(long)]
    c: Option<String>,
    /// Branching of the shape for `--mode verify`, e.g. `2,2`.
    #[arg(long, value_delimiter = ',', default_value = "2,2")]
    branching: Vec<usize>,
    #[arg(long, value_enum, default_value_t = RootGate::And)]
    root: RootGate,
}

#[derive(Debug, Args)]
struct PolyArgs {
    /// Check the Chebyshev growth bound on d in 1..=200, mu in [0,3] step 0.01.
    #[arg(long)]
    paturi_grid: bool,
    /// Check the extremal property on this many random bounded degree-8
    /// polynomials.
    #[arg(long)]
    extremal: Option<usize>,
    /// Emit the query lower-bound curve for --N, --t, --max-T.
    #[arg(long)]
    curve: bool,
    #[arg(long = "N", default_value_t = 1024)]
    n: usize,
    #[arg(long, default_value_t = 1)]
    t: usize,
    #[arg(long = "max-T", default_value_t = 64)]
    max_t: usize,
    #[arg(long, default_value_t = 1.0)]
    a: f64,
    /// Defaults to the floor implied by the refined search constant.
    #[arg(long)]
    b: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Builtin {
    Or,
    And,
    Majority,
    /// (x0 v x1) ^ (x2 v x3) style uniform two-level tree.
    Tree,
}

#[derive(Debug, Args)]
struct OracleArgs {
    /// Truth-table file: N on the first line, 2^N bits on the second.
    #[arg(long)]
    file: Option<PathBuf>,
    #[arg(long, value_enum)]
    builtin: Option<Builtin>,
    #[arg(long = "N", default_value_t = 4)]
    n: usize,
}

/// Parses `2^-k` or a decimal probability.
pub fn parse_eps(s: &str) -> std::result::Result<f64, String> {
    let v = if let Some(k) = s.strip_prefix("2^-") {
        let k: i32 = k.parse().map_err(|_| format!("bad exponent in {s:?}"))?;
        2f64.powi(-k)
    } else {
        s.parse::<f64>().map_err(|_| format!("not a probability: {s:?}"))?
    };
    if !(v > 0.0 && v < 1.0) {
        return Err(format!("probability must be in (0, 1), got {s:?}"));
    }
    Ok(v)
}

fn parse_bits(s: &str) -> Result<Vec<bool>> {
    s.chars()
        .map(|c| match c {
            '0' => Ok(false),
            '1' => Ok(true),
            _ => Err(Error::Parse(format!("invalid bit {c:?} in {s:?}"))),
        })
        .collect()
}

struct Output {
    format: Format,
    out: Option<PathBuf>,
}

impl Output {
    fn write<T: Serialize>(&self, command: &str, records: &[T]) -> Result<()> {
        let sink: Box<dyn Write> = match &self.out {
            Some(p) => Box::new(File::create(p)?),
            None => Box::new(io::stdout().lock()),
        };
        match self.format {
            Format::Csv => {
                let mut w = csv::WriterBuilder::new()
                    .terminator(csv::Terminator::Any(b'\n'))
                    .from_writer(sink);
                for r in records {
                    w.serialize(r)?;
                }
                w.flush()?;
            }
            Format::Json => {
                #[derive(Serialize)]
                struct Doc<'a, T> {
                    schema_version: u32,
                    command: &'a str,
                    records: &'a [T],
                }
                let mut sink = sink;
                serde_json::to_writer_pretty(
                    &mut sink,
                    &Doc {
                        schema_version: SCHEMA_VERSION,
                        command,
                        records,
                    },
                )
                .map_err(|e| Error::Io(e.to_string()))?;
                sink.write_all(b"\n")?;
            }
        }
        Ok(())
    }
}

/// Result of one subcommand: whether its checks passed, and a summary.
struct Report {
    passed: bool,
    summary: String,
}

/// Runs the CLI on `argv` (program name first) and returns the exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let seed = match cli.seed {
        Some(s) => s,
        None => match std::env::var(SEED_ENV) {
            Ok(v) => match v.trim().parse() {
                Ok(s) => s,
                Err(_) => {
                    eprintln!("error: {SEED_ENV} is not an unsigned integer: {v:?}");
                    return EXIT_USAGE;
                }
            },
            Err(_) => 0,
        },
    };
    let pool = match rayon::ThreadPoolBuilder::new()
        .num_threads(cli.jobs.unwrap_or(0))
        .build()
    {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_USAGE;
        }
    };
    let output = Output {
        format: cli.format,
        out: cli.out.clone(),
    };
    let seed = RngSeed(seed);
    let result = pool.install(|| dispatch(&cli.command, seed, &output));
    match result {
        Ok(report) => {
            eprintln!("{}", report.summary);
            if cli.check && !report.passed {
                eprintln!("check failed");
                EXIT_CHECK_FAILED
            } else {
                EXIT_OK
            }
        }
        Err(Error::Io(e)) => {
            eprintln!("error: {e}");
            1
        }
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_USAGE
        }
    }
}

fn dispatch(command: &Command, seed: RngSeed, output: &Output) -> Result<Report> {
    match command {
        Command::SearchTradeoff(a) => search_tradeoff(a, seed, output),
        Command::ExactSearch(a) => exact_search(a, seed, output),
        Command::Andor(a) => andor_cmd(a, seed, output),
        Command::Star(a) => star(a, seed, output),
        Command::Majority(a) => majority(a, output),
        Command::Comm(a) => comm_cmd(a, seed, output),
        Command::Polybounds(a) => polybounds(a, seed, output),
        Command::Oracle(a) => oracle_cmd(a, output),
    }
}

fn search_tradeoff(a: &TradeoffArgs, seed: RngSeed, output: &Output) -> Result<Report> {
    let grid = if a.n.is_empty() && a.t.is_empty() && a.eps.is_empty() {
        search::default_tradeoff_grid()
    } else {
        if a.n.is_empty() || a.t.is_empty() || a.eps.is_empty() {
            return Err(Error::InvalidParameter("give all of --N, --t and --eps, or none".into()));
        }
        let mut grid = Vec::new();
        for &n in &a.n {
            for &t in &a.t {
                for &eps in &a.eps {
                    if t == 0 || t > n {
                        return Err(Error::TooManySolutions { requested: t, len: n });
                    }
                    grid.push((n, t, eps));
                }
            }
        }
        grid
    };
    let records = search::tradeoff_sweep(&grid, a.trials, seed)?;
    output.write("search-tradeoff", &records)?;
    let ratios: Vec<f64> = records.iter().map(|r| r.tradeoff_ratio()).collect();
    let lo = ratios.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = ratios.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let within_eps = records.iter().all(|r| r.eps_analytic <= r.eps_target * (1.0 + 1e-9));
    let passed = within_eps && lo >= TRADEOFF_BAND.0 && hi <= TRADEOFF_BAND.1;
    Ok(Report {
        passed,
        summary: format!(
            "search-tradeoff: {} points, ratio range [{lo:.4}, {hi:.4}], band [{}, {}]",
            records.len(),
            TRADEOFF_BAND.0,
            TRADEOFF_BAND.1
        ),
    })
}

#[derive(Debug, Serialize)]
struct ExactRecord {
    #[serde(rename = "N")]
    n: usize,
    t: usize,
    queries: u64,
    success_prob: f64,
    failures: u64,
    trials: u64,
    seed: u64,
}

fn exact_search(a: &ExactArgs, seed: RngSeed, output: &Output) -> Result<Report> {
    let mut cells = Vec::new();
    for &n in &a.n {
        if n == 0 {
            return Err(Error::EmptyInput);
        }
        let ts: Vec<usize> = if a.t.is_empty() { (1..=n).collect() } else { a.t.clone() };
        for t in ts {
            if t == 0 || t > n {
                return Err(Error::TooManySolutions { requested: t, len: n });
            }
            cells.push((n, t));
        }
    }
    let records: Vec<ExactRecord> = cells
        .par_iter()
        .enumerate()
        .map(|(i, &(n, t))| {
            let plan = ExactPlan::new(n, t)?;
            let cell_seed = seed.child(i as u64);
            let mut rng = cell_seed.rng();
            let mut failures = 0;
            for _ in 0..a.trials {
                let mut o = BitOracle::planted(n, t, &mut rng)?;
                let out = crate::amplitude::exact_search(&mut o, t, &mut rng)?;
                failures += u64::from(out.found().is_none());
            }
            Ok(ExactRecord {
                n,
                t,
                queries: plan.queries(),
                success_prob: plan.success_prob(t),
                failures,
                trials: a.trials,
                seed: cell_seed.0,
            })
        })
        .collect::<Result<_>>()?;
    output.write("exact-search", &records)?;
    let failures: u64 = records.iter().map(|r| r.failures).sum();
    let min_p = records.iter().map(|r| r.success_prob).fold(1.0, f64::min);
    Ok(Report {
        passed: failures == 0 && min_p >= 1.0 - 1e-9,
        summary: format!(
            "exact-search: {} cells, {failures} failures, min success probability {min_p:.12}",
            records.len()
        ),
    })
}

fn andor_cmd(a: &AndOrArgs, seed: RngSeed, output: &Output) -> Result<Report> {
    let shape = match a.shape {
        ShapeKind::TwoLevel => andor::make_theorem9_shape(a.n)?,
        ShapeKind::Uniform => {
            if a.depth == 0 {
                return Err(Error::InvalidParameter("depth must be >= 1".into()));
            }
            let fanout = (a.n as f64).powf(1.0 / a.depth as f64).round() as usize;
            if fanout.checked_pow(a.depth as u32) != Some(a.n) {
                return Err(Error::InvalidParameter(format!(
                    "{} is not a perfect {}-th power",
                    a.n, a.depth
                )));
            }
            TreeShape::uniform(a.depth, fanout, a.root.into())?
        }
    };
    let ev = ZeroErrorEvaluator::new(shape)?.with_restart_factor(a.restart_factor)?;
    let report = andor::run_trials(&ev, a.class.into(), a.trials, seed, a.multiplier)?;
    output.write("andor", &report.records)?;
    let dk = report.dont_know_rate();
    let sigma = (0.25 / a.trials.max(1) as f64).sqrt();
    Ok(Report {
        passed: report.unsound == 0 && dk <= 0.5 + 3.0 * sigma,
        summary: format!(
            "andor {}: {} runs, {} unsound, dontknow rate {dk:.4}, mean queries {:.1}, cutoff {}",
            ev.shape(),
            report.records.len(),
            report.unsound,
            report.mean_queries(),
            report.cutoff
        ),
    })
}

fn star(a: &StarArgs, seed: RngSeed, output: &Output) -> Result<Report> {
    let mut records = Vec::new();
    let mut passed = true;
    let mut lines = Vec::new();
    for (i, &n) in a.n.iter().enumerate() {
        let ev = graph::star_evaluator(n)?;
        let report = andor::run_trials(&ev, a.class.into(), a.trials, seed.child(i as u64), a.multiplier)?;
        let sigma = (0.25 / a.trials.max(1) as f64).sqrt();
        passed &= report.unsound == 0 && report.dont_know_rate() <= 0.5 + 3.0 * sigma;
        lines.push(format!(
            "n={n}: mean queries {:.1}, dontknow {:.4}, unsound {}",
            report.mean_queries(),
            report.dont_know_rate(),
            report.unsound
        ));
        records.extend(report.records.into_iter().map(|r| GraphRecord {
            n,
            big_n: r.n,
            property: "star".into(),
            verdict: r.verdict,
            queries_quantum: r.queries_quantum,
            queries_classical: r.queries_classical,
            seed: r.seed,
        }));
    }
    output.write("star", &records)?;
    Ok(Report {
        passed,
        summary: format!("star: {}", lines.join("; ")),
    })
}

#[derive(Debug, Serialize)]
struct MajorityRecord {
    #[serde(rename = "N")]
    n: usize,
    input: String,
    value: u8,
    tie: bool,
    queries: u64,
    bound: u64,
    correct: bool,
}

fn majority(a: &MajorityArgs, output: &Output) -> Result<Report> {
    let n = a.n;
    if n == 0 {
        return Err(Error::EmptyInput);
    }
    let bound = (n - graph::e_of(n) as usize + 1) as u64;
    let inputs: Vec<Vec<bool>> = match (&a.input, a.exhaustive) {
        (Some(s), false) => {
            let bits = parse_bits(s)?;
            if bits.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    actual: bits.len(),
                });
            }
            vec![bits]
        }
        (None, true) => {
            if n > 24 {
                return Err(Error::SizeCap { size: n, cap: 24 });
            }
            (0..1usize << n).map(|x| boolfn::input_bits(x, n)).collect()
        }
        _ => {
            return Err(Error::InvalidParameter(
                "give exactly one of --exhaustive and --input".into(),
            ))
        }
    };
    let records: Vec<MajorityRecord> = inputs
        .par_iter()
        .map(|bits| {
            let ones = bits.iter().filter(|&&b| b).count();
            let mut o = BitOracle::new(bits.clone())?;
            let m = graph::majority_exact(&mut o)?;
            let correct = if 2 * ones == n { m.tie } else { m.value == (2 * ones > n) };
            Ok(MajorityRecord {
                n,
                input: crate::oracle::bit_string(bits),
                value: u8::from(m.value),
                tie: m.tie,
                queries: m.queries,
                bound,
                correct,
            })
        })
        .collect::<Result<_>>()?;
    let worst = records.iter().map(|r| r.queries).max().unwrap_or(0);
    let all_correct = records.iter().all(|r| r.correct);
    output.write("majority", &records)?;
    Ok(Report {
        passed: all_correct && worst <= bound,
        summary: format!(
            "majority N={n}: {} inputs, all correct: {all_correct}, max queries {worst} (bound {bound})",
            records.len()
        ),
    })
}

fn comm_cmd(a: &CommArgs, seed: RngSeed, output: &Output) -> Result<Report> {
    if a.mode == CommMode::Verify {
        let (Some(x), Some(y), Some(c)) = (&a.x, &a.y, &a.c) else {
            return Err(Error::InvalidParameter("--mode verify needs --x, --y and --c".into()));
        };
        let shape = TreeShape::new(a.branching.clone(), a.root.into())?;
        let (x, y) = (parse_bits(x)?, parse_bits(y)?);
        let c = comm::indices_from_mask(c)?;
        let member = comm::verify_relation(&x, &y, &c, &shape)?;
        #[derive(Serialize)]
        struct VerifyRecord {
            shape: String,
            member: bool,
        }
        output.write(
            "comm",
            &[VerifyRecord {
                shape: shape.id(),
                member,
            }],
        )?;
        return Ok(Report {
            passed: member,
            summary: format!("comm verify: member of relation: {member}"),
        });
    }
    let shape = andor::make_theorem9_shape(a.n)?;
    let (blocks, width) = (shape.branching()[0], shape.branching()[1]);
    let k = blocks * (width - 1);
    let qpq = comm::Channel::new(a.n).qubits_per_query();
    let rows: Vec<(CommRecord, bool)> = (0..a.trials)
        .into_par_iter()
        .map(|i| {
            let trial_seed = seed.child(i as u64);
            let mut rng = trial_seed.rng();
            match a.mode {
                CommMode::Relation => {
                    let x: Vec<bool> = (0..a.n).map(|_| rng.random_bool(0.75)).collect();
                    let y: Vec<bool> = (0..a.n).map(|_| rng.random_bool(0.75)).collect();
                    let inst = CertRelationInstance::new(x, y, shape.clone())?;
                    let (run, _) = comm::distributed_certificate(&inst, &mut rng)?;
                    let ok = comm::verify_relation(&inst.x, &inst.y, &run.indices(), &shape)?
                        && run.qubits_sent == qpq * run.queries.total();
                    Ok((
                        CommRecord {
                            n: a.n,
                            k,
                            instance_class: "random".into(),
                            output: u8::from(run.certificate.claimed_value),
                            qubits_sent: run.qubits_sent,
                            queries: run.queries.total(),
                            seed: trial_seed.0,
                        },
                        ok,
                    ))
                }
                _ => {
                    let (x, y) = disjointness_instance(k, a.class, &mut rng);
                    let run = comm::disjointness_via_r(&x, &y, &shape, &mut rng)?;
                    let ok = (a.class == DisjClass::Intersecting || !run.output)
                        && run.qubits_sent == qpq * run.queries;
                    Ok((
                        CommRecord {
                            n: a.n,
                            k,
                            instance_class: match a.class {
                                DisjClass::Disjoint => "disjoint".into(),
                                DisjClass::Intersecting => "intersecting".into(),
                            },
                            output: u8::from(run.output),
                            qubits_sent: run.qubits_sent,
                            queries: run.queries,
                            seed: trial_seed.0,
                        },
                        ok,
                    ))
                }
            }
        })
        .collect::<Result<_>>()?;
    let bad = rows.iter().filter(|r| !r.1).count();
    let ones = rows.iter().filter(|r| r.0.output == 1).count();
    let rate = ones as f64 / rows.len().max(1) as f64;
    let sigma = (0.25 / rows.len().max(1) as f64).sqrt();
    let passed = bad == 0
        && (a.mode != CommMode::Disjointness
            || a.class == DisjClass::Disjoint
            || rate >= 0.5 - 3.0 * sigma);
    let records: Vec<CommRecord> = rows.into_iter().map(|r| r.0).collect();
    output.write("comm", &records)?;
    Ok(Report {
        passed,
        summary: format!(
            "comm N={} k={k}: {} runs, output-1 rate {rate:.4}, {bad} failed checks",
            a.n,
            records.len()
        ),
    })
}

/// `k`-bit inputs: disjoint, or with exactly one common 1.
pub fn disjointness_instance<R: Rng + ?Sized>(k: usize, class: impl Into<bool>, rng: &mut R) -> (Vec<bool>, Vec<bool>) {
    let intersecting: bool = class.into();
    let mut x = vec![false; k];
    let mut y = vec![false; k];
    for j in 0..k {
        match rng.random_range(0..3) {
            0 => x[j] = true,
            1 => y[j] = true,
            _ => {}
        }
    }
    if intersecting {
        let j = rng.random_range(0..k);
        x[j] = true;
        y[j] = true;
    }
    (x, y)
}

impl From<DisjClass> for bool {
    fn from(c: DisjClass) -> bool {
        c == DisjClass::Intersecting
    }
}

#[derive(Debug, Serialize)]
struct GrowthRecord {
    d: usize,
    mu: f64,
    ln_lhs: f64,
    ln_rhs: f64,
    holds: bool,
}

#[derive(Debug, Serialize)]
struct ExtremalRecord {
    sample: usize,
    degree: usize,
    holds: bool,
}

fn polybounds(a: &PolyArgs, seed: RngSeed, output: &Output) -> Result<Report> {
    let chosen = [a.paturi_grid, a.extremal.is_some(), a.curve].iter().filter(|&&b| b).count();
    if chosen != 1 {
        return Err(Error::InvalidParameter(
            "give exactly one of --paturi-grid, --extremal, --curve".into(),
        ));
    }
    if a.paturi_grid {
        let mut records = Vec::new();
        for d in 1..=200 {
            for i in 0..=300 {
                let mu = i as f64 / 100.0;
                let c = poly::paturi_check(d, mu)?;
                records.push(GrowthRecord {
                    d,
                    mu,
                    ln_lhs: c.ln_lhs,
                    ln_rhs: c.ln_rhs,
                    holds: c.holds,
                });
            }
        }
        let failures = records.iter().filter(|r| !r.holds).count();
        output.write("polybounds", &records)?;
        return Ok(Report {
            passed: failures == 0,
            summary: format!("growth grid: {} points, {failures} failures", records.len()),
        });
    }
    if let Some(count) = a.extremal {
        let xs = [1.1, 1.5, 2.0, 3.0];
        let mut rng = seed.rng();
        let records: Vec<ExtremalRecord> = (0..count)
            .map(|sample| {
                let q = poly::random_bounded_poly(8, &mut rng);
                Ok(ExtremalRecord {
                    sample,
                    degree: q.degree(),
                    holds: poly::extremal_check(&q, &xs)?,
                })
            })
            .collect::<Result<_>>()?;
        let failures = records.iter().filter(|r| !r.holds).count();
        output.write("polybounds", &records)?;
        return Ok(Report {
            passed: failures == 0,
            summary: format!("extremal: {count} polynomials, {failures} failures"),
        });
    }
    let params = BoundParams::new(a.a, a.b.unwrap_or_else(poly::b_floor))?;
    let rows = poly::bound_curve(a.n, a.t, a.max_t, params)?;
    output.write("polybounds", &rows)?;
    Ok(Report {
        passed: true,
        summary: format!("bound curve: N={} t={} T=0..={}", a.n, a.t, a.max_t),
    })
}

#[derive(Debug, Serialize)]
struct OracleRecord {
    #[serde(rename = "N")]
    n: usize,
    degree: usize,
    decision_tree_depth: usize,
    sensitivity: usize,
    monotone: bool,
}

fn oracle_cmd(a: &OracleArgs, output: &Output) -> Result<Report> {
    let f = match (&a.file, a.builtin) {
        (Some(p), None) => TruthTable::read(BufReader::new(File::open(p)?))?,
        (None, Some(b)) => match b {
            Builtin::Or => TruthTable::or(a.n)?,
            Builtin::And => TruthTable::and(a.n)?,
            Builtin::Majority => TruthTable::threshold(a.n, a.n / 2 + 1)?,
            Builtin::Tree => {
                let fanout = (a.n as f64).sqrt().round() as usize;
                if fanout * fanout != a.n {
                    return Err(Error::InvalidParameter(format!("{} is not a perfect square", a.n)));
                }
                let shape = TreeShape::uniform(2, fanout, Gate::And)?;
                TruthTable::from_fn(a.n, |x| andor::eval_tree(&shape, x).expect("length matches"))?
            }
        },
        _ => return Err(Error::InvalidParameter("give exactly one of --file and --builtin".into())),
    };
    let rec = OracleRecord {
        n: f.n,
        degree: boolfn::degree(&f)?,
        decision_tree_depth: boolfn::decision_tree_depth(&f)?,
        sensitivity: boolfn::sensitivity(&f)?,
        monotone: boolfn::is_monotone(&f),
    };
    let passed = !rec.monotone || rec.decision_tree_depth <= rec.sensitivity * rec.sensitivity;
    let summary = format!(
        "oracle N={}: deg={} D={} s={} monotone={}",
        rec.n, rec.degree, rec.decision_tree_depth, rec.sensitivity, rec.monotone
    );
    output.write("oracle", &[rec])?;
    Ok(Report { passed, summary })
}
