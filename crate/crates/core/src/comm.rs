//! Two-party certificate protocol: Alice holds `x`, Bob holds `y`, and they
//! look for a certificate of `g(x ∧ y)` for an AND-OR function `g`.
//!
//! Alice runs the zero-error certificate finder on `z = x ∧ y`. Each query to
//! `z_j` is a round trip: Alice sends the index register plus an answer qubit
//! (`⌈log₂N⌉ + 1` qubits), Bob applies his bit and sends it back.

use std::cell::RefCell;
use std::collections::BTreeSet;
use std::io::Write;
use std::rc::Rc;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use serde::{Deserialize, Serialize};

use crate::andor::{eval_partial, Certificate, Gate, TreeShape, Verdict, ZeroErrorEvaluator, DEFAULT_CUTOFF_MULTIPLIER};
use crate::error::{Error, Result};
use crate::oracle::{BitOracle, QueryKind, QueryStats, QueryTap, TrialRng};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    AliceToBob,
    BobToAlice,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Message {
    pub direction: Direction,
    pub payload_qubits: u64,
    pub cumulative_qubits: u64,
}

#[derive(Debug, Default)]
struct ChannelLog {
    qubits_sent: u64,
    classical_bits_sent: u64,
    queries: u64,
    transcript: Vec<Message>,
}

/// Communication counter. Clones share the same log, so one handle can be
/// installed as an oracle's query tap while another reads the totals.
#[derive(Debug, Clone)]
pub struct Channel {
    register_qubits: u64,
    log: Rc<RefCell<ChannelLog>>,
}

impl Channel {
    /// A channel for queries into an `n`-bit input.
    pub fn new(n: usize) -> Self {
        Channel {
            register_qubits: index_qubits(n) + 1,
            log: Rc::default(),
        }
    }

    /// Qubits charged for one query round trip.
    pub fn qubits_per_query(&self) -> u64 {
        2 * self.register_qubits
    }

    pub fn qubits_sent(&self) -> u64 {
        self.log.borrow().qubits_sent
    }

    pub fn classical_bits_sent(&self) -> u64 {
        self.log.borrow().classical_bits_sent
    }

    /// Queries routed through the channel.
    pub fn queries(&self) -> u64 {
        self.log.borrow().queries
    }

    pub fn transcript(&self) -> Vec<Message> {
        self.log.borrow().transcript.clone()
    }

    /// Records a classical message of `bits` bits.
    pub fn send_classical(&self, bits: u64) {
        self.log.borrow_mut().classical_bits_sent += bits;
    }

    /// Writes the transcript as line-delimited JSON records.
    pub fn write_transcript<W: Write>(&self, mut w: W) -> Result<()> {
        for m in &self.log.borrow().transcript {
            serde_json::to_writer(&mut w, m).map_err(|e| Error::Io(e.to_string()))?;
            w.write_all(b"\n")?;
        }
        Ok(())
    }
}

impl QueryTap for Channel {
    fn on_query(&mut self, _kind: QueryKind, count: u64) {
        let payload = count * self.register_qubits;
        let mut log = self.log.borrow_mut();
        log.queries += count;
        for direction in [Direction::AliceToBob, Direction::BobToAlice] {
            log.qubits_sent += payload;
            let cumulative_qubits = log.qubits_sent;
            log.transcript.push(Message {
                direction,
                payload_qubits: payload,
                cumulative_qubits,
            });
        }
    }
}

/// `⌈log₂ n⌉`.
pub fn index_qubits(n: usize) -> u64 {
    if n <= 1 {
        0
    } else {
        u64::from(usize::BITS - (n - 1).leading_zeros())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertRelationInstance {
    pub x: Vec<bool>,
    pub y: Vec<bool>,
    pub shape: TreeShape,
}

impl CertRelationInstance {
    pub fn new(x: Vec<bool>, y: Vec<bool>, shape: TreeShape) -> Result<Self> {
        for v in [&x, &y] {
            if v.len() != shape.len() {
                return Err(Error::DimensionMismatch {
                    expected: shape.len(),
                    actual: v.len(),
                });
            }
        }
        Ok(CertRelationInstance { x, y, shape })
    }

    /// `x ∧ y`. Neither party holds this.
    pub fn z(&self) -> Vec<bool> {
        self.x.iter().zip(&self.y).map(|(&a, &b)| a && b).collect()
    }
}

/// `(x, y, c)` is in the relation iff the values `x_i ∧ y_i` for `i ∈ c`
/// determine `g(x ∧ y)`.
pub fn verify_relation(x: &[bool], y: &[bool], c: &BTreeSet<usize>, shape: &TreeShape) -> Result<bool> {
    let n = shape.len();
    for v in [x, y] {
        if v.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                actual: v.len(),
            });
        }
    }
    if c.iter().any(|&i| i >= n) {
        return Ok(false);
    }
    let mut partial = vec![None; n];
    for &i in c {
        partial[i] = Some(x[i] && y[i]);
    }
    Ok(eval_partial(shape, &partial)?.is_some())
}

/// Index set from a mask string such as `"1001"` (position 0 first).
pub fn indices_from_mask(mask: &str) -> Result<BTreeSet<usize>> {
    mask.chars()
        .enumerate()
        .filter_map(|(i, ch)| match ch {
            '1' => Some(Ok(i)),
            '0' => None,
            _ => Some(Err(Error::Parse(format!("invalid mask character {ch:?}")))),
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistributedRun {
    pub certificate: Certificate,
    pub queries: QueryStats,
    pub qubits_sent: u64,
    /// Zero-error runs made, including those that answered DontKnow.
    pub attempts: u32,
}

impl DistributedRun {
    pub fn indices(&self) -> BTreeSet<usize> {
        self.certificate.indices().collect()
    }
}

/// Runs the zero-error evaluator at Alice on `z = x ∧ y`, every query going
/// through the channel, retrying after DontKnow. Returns the channel for
/// transcript inspection.
pub fn distributed_certificate<R: Rng + ?Sized>(
    instance: &CertRelationInstance,
    rng: &mut R,
) -> Result<(DistributedRun, Channel)> {
    let evaluator = ZeroErrorEvaluator::new(instance.shape.clone())?;
    let expected = evaluator.nominal_queries(true) + evaluator.nominal_queries(false);
    let cutoff = (DEFAULT_CUTOFF_MULTIPLIER * expected).ceil() as u64;
    let channel = Channel::new(instance.shape.len());
    let mut oracle = BitOracle::new(instance.z())?;
    oracle.set_tap(Box::new(channel.clone()));
    let mut attempts = 0;
    loop {
        attempts += 1;
        let v = evaluator.evaluate(&mut oracle, rng, cutoff)?;
        if let Verdict::Value { certificate, .. } = v.verdict {
            let run = DistributedRun {
                certificate,
                queries: oracle.stats(),
                qubits_sent: channel.qubits_sent(),
                attempts,
            };
            return Ok((run, channel));
        }
    }
}

/// Outcome of one Disjointness run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DisjointnessRun {
    /// 1 means "the sets intersect"; never 1 on disjoint inputs.
    pub output: bool,
    pub queries: u64,
    pub qubits_sent: u64,
}

/// Decides set intersection of `x, y ∈ {0,1}^k` through the certificate
/// protocol on an AND of `a` ORs of `b` leaves, with `k = a(b-1)`.
///
/// Each OR block gets the parties' `b-1` bits plus a dummy position where
/// both hold 1, so every block and the whole function evaluate to 1. Block
/// positions are shuffled by a public coin. A 1-certificate names one common
/// 1 per block; the output is 1 iff some named position is not a dummy.
pub fn disjointness_via_r<R: Rng + ?Sized>(
    x: &[bool],
    y: &[bool],
    shape: &TreeShape,
    rng: &mut R,
) -> Result<DisjointnessRun> {
    let (a, b) = match shape.branching() {
        &[a, b] if shape.root_gate() == Gate::And && b >= 2 => (a, b),
        _ => {
            return Err(Error::InvalidParameter(
                "need a two-level AND-of-ORs shape with blocks of at least 2".into(),
            ))
        }
    };
    let k = a * (b - 1);
    if x.len() != k || y.len() != k {
        return Err(Error::DimensionMismatch {
            expected: k,
            actual: if x.len() != k { x.len() } else { y.len() },
        });
    }
    let mut coin = TrialRng::seed_from_u64(rng.random());
    let n = shape.len();
    let (mut xp, mut yp) = (vec![false; n], vec![false; n]);
    let mut dummy = vec![false; n];
    for blk in 0..a {
        let mut slots: Vec<usize> = (0..b).collect();
        slots.shuffle(&mut coin);
        for (p, &slot) in slots.iter().enumerate() {
            let pos = blk * b + slot;
            if p + 1 == b {
                xp[pos] = true;
                yp[pos] = true;
                dummy[pos] = true;
            } else {
                xp[pos] = x[blk * (b - 1) + p];
                yp[pos] = y[blk * (b - 1) + p];
            }
        }
    }
    let instance = CertRelationInstance::new(xp, yp, shape.clone())?;
    let (run, _) = distributed_certificate(&instance, rng)?;
    let output = run
        .certificate
        .entries
        .iter()
        .any(|(&i, &v)| v && !dummy[i]);
    Ok(DisjointnessRun {
        output,
        queries: run.queries.total(),
        qubits_sent: run.qubits_sent,
    })
}

/// One CSV row of a communication experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CommRecord {
    #[serde(rename = "N")]
    pub n: usize,
    pub k: usize,
    pub instance_class: String,
    pub output: u8,
    pub qubits_sent: u64,
    pub queries: u64,
    pub seed: u64,
}
