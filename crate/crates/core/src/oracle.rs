//! Black-box input model.
//!
//! A [`BitOracle`] hides an input `x ∈ {0,1}^N`. Algorithms read it only
//! through [`BitOracle::query`] (an algorithm query) or
//! [`BitOracle::verify_query`] (a classical certificate-verification query),
//! so every reported query count is the number of accesses actually made.
//!
//! Quantum primitives in this crate are simulated at the distribution level;
//! they look at the hidden bits through crate-private accessors and charge
//! the queries the simulated circuit would make via `charge_quantum`.

use std::fmt;

use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The generator used for every seeded run.
pub type TrialRng = ChaCha8Rng;

/// Query counts split by purpose.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct QueryStats {
    pub quantum_queries: u64,
    pub classical_verification_queries: u64,
}

impl QueryStats {
    pub fn total(&self) -> u64 {
        self.quantum_queries + self.classical_verification_queries
    }
}

impl std::ops::Add for QueryStats {
    type Output = QueryStats;
    fn add(self, rhs: QueryStats) -> QueryStats {
        QueryStats {
            quantum_queries: self.quantum_queries + rhs.quantum_queries,
            classical_verification_queries: self.classical_verification_queries
                + rhs.classical_verification_queries,
        }
    }
}

impl std::ops::AddAssign for QueryStats {
    fn add_assign(&mut self, rhs: QueryStats) {
        *self = *self + rhs;
    }
}

/// Which kind of access a query was.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QueryKind {
    Quantum,
    Verification,
}

/// Observer notified of every charged query. Used to route accesses through
/// a communication channel.
pub trait QueryTap {
    fn on_query(&mut self, kind: QueryKind, count: u64);
}

/// A 64-bit seed. Identical seed and configuration reproduce a run exactly.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RngSeed(pub u64);

impl RngSeed {
    pub fn rng(self) -> TrialRng {
        ChaCha8Rng::seed_from_u64(self.0)
    }

    /// Seed for the `index`-th child run (trial, sub-algorithm, ...).
    pub fn child(self, index: u64) -> RngSeed {
        RngSeed(splitmix64(self.0 ^ splitmix64(index.wrapping_add(0x9e37_79b9))))
    }
}

impl fmt::Display for RngSeed {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Capability token for harness-only inspection of hidden inputs.
///
/// Algorithm code in this crate never constructs one.
#[derive(Debug)]
pub struct Harness(());

impl Harness {
    pub fn new() -> Self {
        Harness(())
    }
}

impl Default for Harness {
    fn default() -> Self {
        Self::new()
    }
}

/// An input `x ∈ {0,1}^N` behind a counting query interface.
pub struct BitOracle {
    bits: Vec<bool>,
    stats: QueryStats,
    tap: Option<Box<dyn QueryTap>>,
}

impl fmt::Debug for BitOracle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("BitOracle")
            .field("len", &self.bits.len())
            .field("stats", &self.stats)
            .finish()
    }
}

impl Clone for BitOracle {
    /// Clones the hidden input with a fresh counter and no tap.
    fn clone(&self) -> Self {
        BitOracle {
            bits: self.bits.clone(),
            stats: QueryStats::default(),
            tap: None,
        }
    }
}

impl BitOracle {
    pub fn new(bits: Vec<bool>) -> Result<Self> {
        if bits.is_empty() {
            return Err(Error::EmptyInput);
        }
        Ok(BitOracle {
            bits,
            stats: QueryStats::default(),
            tap: None,
        })
    }

    /// Parses a string of `0`/`1` characters, `x_0` first.
    pub fn parse(s: &str) -> Result<Self> {
        let bits = s
            .chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::Parse(format!("unexpected character {other:?}"))),
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(bits)
    }

    /// An input of length `n` with exactly `t` ones at uniformly random
    /// positions.
    pub fn planted<R: rand::Rng + ?Sized>(n: usize, t: usize, rng: &mut R) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyInput);
        }
        if t > n {
            return Err(Error::TooManySolutions { requested: t, len: n });
        }
        let mut bits = vec![false; n];
        for j in index::sample(rng, n, t) {
            bits[j] = true;
        }
        Self::new(bits)
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Reads `x_j`, charging one algorithm query.
    ///
    /// Panics if `j` is out of range; see [`BitOracle::try_query`].
    pub fn query(&mut self, j: usize) -> bool {
        match self.try_query(j) {
            Ok(b) => b,
            Err(e) => panic!("{e}"),
        }
    }

    pub fn try_query(&mut self, j: usize) -> Result<bool> {
        let bit = *self.bits.get(j).ok_or(Error::IndexOutOfRange {
            index: j,
            len: self.bits.len(),
        })?;
        self.charge(QueryKind::Quantum, 1);
        Ok(bit)
    }

    /// Reads `x_j` as a classical verification query.
    pub fn verify_query(&mut self, j: usize) -> bool {
        let bit = self.bits[j];
        self.charge(QueryKind::Verification, 1);
        bit
    }

    pub fn stats(&self) -> QueryStats {
        self.stats
    }

    pub fn query_count(&self) -> u64 {
        self.stats.total()
    }

    pub fn set_tap(&mut self, tap: Box<dyn QueryTap>) {
        self.tap = Some(tap);
    }

    pub fn take_tap(&mut self) -> Option<Box<dyn QueryTap>> {
        self.tap.take()
    }

    /// Number of ones. Harness-only; does not charge a query.
    pub fn hamming_weight(&self, _cap: &Harness) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    /// The hidden input. Harness-only.
    pub fn bits(&self, _cap: &Harness) -> &[bool] {
        &self.bits
    }

    /// Charges `count` queries made by a simulated quantum circuit.
    pub(crate) fn charge_quantum(&mut self, count: u64) {
        if count > 0 {
            self.charge(QueryKind::Quantum, count);
        }
    }

    fn charge(&mut self, kind: QueryKind, count: u64) {
        match kind {
            QueryKind::Quantum => self.stats.quantum_queries += count,
            QueryKind::Verification => self.stats.classical_verification_queries += count,
        }
        if let Some(tap) = self.tap.as_mut() {
            tap.on_query(kind, count);
        }
    }

    /// Simulation access: the whole hidden input.
    pub(crate) fn hidden(&self) -> &[bool] {
        &self.bits
    }

    /// Simulation access: indices in `range` whose bit equals `target`.
    pub(crate) fn marked_in(&self, range: std::ops::Range<usize>, target: bool) -> Vec<usize> {
        range.filter(|&j| self.bits[j] == target).collect()
    }

    pub(crate) fn count_in(&self, range: std::ops::Range<usize>, target: bool) -> usize {
        self.bits[range].iter().filter(|&&b| b == target).count()
    }
}

/// `x` as a bit string, `x_0` first.
pub fn bit_string(bits: &[bool]) -> String {
    bits.iter().map(|&b| if b { '1' } else { '0' }).collect()
}
