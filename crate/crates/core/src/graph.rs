//! Directed-graph properties: zero-error STAR detection, exact Majority and
//! bounded-error edge existence.

use std::collections::BTreeMap;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::amplitude::{cutoff_for_error, unknown_t_search, SCHEDULE_FACTOR};
use crate::andor::{Certificate, Gate, TreeShape, ZeroErrorEvaluator, ZeroErrorVerdict};
use crate::error::{Error, Result};
use crate::oracle::{BitOracle, QueryStats};

/// Edge bits of a directed graph on `n` vertices, one per ordered pair
/// `i != j`, stored vertex by vertex: `position(i, j) = i(n-1) + (j if j < i
/// else j-1)`.
#[derive(Debug)]
pub struct GraphOracle {
    n: usize,
    oracle: BitOracle,
}

impl GraphOracle {
    pub fn new(n: usize, oracle: BitOracle) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidParameter(format!("need n >= 2 vertices, got {n}")));
        }
        if oracle.len() != n * (n - 1) {
            return Err(Error::DimensionMismatch {
                expected: n * (n - 1),
                actual: oracle.len(),
            });
        }
        Ok(GraphOracle { n, oracle })
    }

    /// Builds the graph whose edge `(i, j)` is `edge(i, j)`.
    pub fn from_fn(n: usize, edge: impl Fn(usize, usize) -> bool) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidParameter(format!("need n >= 2 vertices, got {n}")));
        }
        let bits = (0..n * (n - 1))
            .map(|p| {
                let (i, j) = unmap(n, p);
                edge(i, j)
            })
            .collect();
        Self::new(n, BitOracle::new(bits)?)
    }

    pub fn complete(n: usize) -> Result<Self> {
        Self::from_fn(n, |_, _| true)
    }

    pub fn empty(n: usize) -> Result<Self> {
        Self::from_fn(n, |_, _| false)
    }

    pub fn vertices(&self) -> usize {
        self.n
    }

    /// Number of edge variables, `n(n-1)`.
    pub fn len(&self) -> usize {
        self.oracle.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn position(&self, i: usize, j: usize) -> usize {
        position(self.n, i, j)
    }

    pub fn oracle(&self) -> &BitOracle {
        &self.oracle
    }

    pub fn oracle_mut(&mut self) -> &mut BitOracle {
        &mut self.oracle
    }

    pub fn into_oracle(self) -> BitOracle {
        self.oracle
    }
}

pub fn position(n: usize, i: usize, j: usize) -> usize {
    assert!(i < n && j < n && i != j, "no edge slot ({i}, {j}) on {n} vertices");
    i * (n - 1) + if j < i { j } else { j - 1 }
}

pub fn unmap(n: usize, p: usize) -> (usize, usize) {
    assert!(p < n * (n - 1), "edge position {p} out of range");
    let i = p / (n - 1);
    let r = p % (n - 1);
    (i, if r < i { r } else { r + 1 })
}

/// OR over vertices of the AND of that vertex's outgoing edges.
pub fn star_shape(n: usize) -> Result<TreeShape> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!("need n >= 2 vertices, got {n}")));
    }
    TreeShape::new(vec![n, n - 1], Gate::Or)
}

pub fn star_evaluator(n: usize) -> Result<ZeroErrorEvaluator> {
    ZeroErrorEvaluator::new(star_shape(n)?)
}

/// Direct check: some vertex has edges to all others.
pub fn has_star(n: usize, bits: &[bool]) -> bool {
    (0..n).any(|i| bits[i * (n - 1)..(i + 1) * (n - 1)].iter().all(|&b| b))
}

/// Evidence for a STAR verdict in graph terms.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum StarCertificate {
    /// A vertex and its confirmed outgoing edges.
    Center { center: usize, edges: Vec<(usize, usize)> },
    /// One confirmed missing edge `(i, j)` for every vertex `i`.
    Missing { edges: Vec<(usize, usize)> },
}

impl StarCertificate {
    pub fn from_certificate(n: usize, cert: &Certificate) -> Result<Self> {
        let edges: Vec<(usize, usize)> = cert.indices().map(|p| unmap(n, p)).collect();
        if cert.claimed_value {
            let center = edges.first().map(|e| e.0).ok_or(Error::EmptyInput)?;
            Ok(StarCertificate::Center { center, edges })
        } else {
            Ok(StarCertificate::Missing { edges })
        }
    }

    /// Reads the listed edges and checks they prove the claim.
    pub fn verify(&self, graph: &mut GraphOracle) -> bool {
        let n = graph.vertices();
        let (edges, want, claim) = match self {
            StarCertificate::Center { edges, .. } => (edges, true, true),
            StarCertificate::Missing { edges } => (edges, false, false),
        };
        let mut entries = BTreeMap::new();
        for &(i, j) in edges {
            if i >= n || j >= n || i == j {
                return false;
            }
            entries.insert(position(n, i, j), want);
        }
        let cert = Certificate::new(entries, claim);
        let shape = star_shape(n).expect("n >= 2");
        crate::andor::verify_certificate(&shape, graph.oracle_mut(), &cert)
    }
}

/// Zero-error STAR detection through the two-level OR-of-ANDs evaluator.
pub fn star_zero_error<R: Rng + ?Sized>(
    evaluator: &ZeroErrorEvaluator,
    graph: &mut GraphOracle,
    rng: &mut R,
    cutoff: u64,
) -> Result<ZeroErrorVerdict> {
    if evaluator.shape() != &star_shape(graph.vertices())? {
        return Err(Error::InvalidParameter("evaluator shape does not match graph".into()));
    }
    evaluator.evaluate(graph.oracle_mut(), rng, cutoff)
}

/// Number of ones in the binary expansion of `n`.
pub fn e_of(n: usize) -> u32 {
    n.count_ones()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MajorityOutcome {
    /// Majority bit; exactly half ones reports 1.
    pub value: bool,
    pub tie: bool,
    pub comparisons: u64,
    pub queries: u64,
}

/// Exact Majority by a pairing tournament over blocks of equal bits.
///
/// Blocks have power-of-two sizes and distinct sizes after every insertion,
/// like a binary counter. Two blocks of equal size are compared through their
/// representatives (one query: the parity `x_i XOR x_j`); equal blocks merge,
/// unequal ones cancel. The largest surviving block outweighs all others
/// combined, so its representative carries the majority and is read with one
/// final query. If every block cancels, the input has exactly half ones.
pub fn majority_exact(oracle: &mut BitOracle) -> Result<MajorityOutcome> {
    let n = oracle.len();
    // blocks[k] = representative of the surviving block of size 2^k
    let mut blocks: Vec<Option<usize>> = Vec::new();
    let mut comparisons = 0u64;
    for j in 0..n {
        let mut carry = Some(j);
        let mut k = 0;
        while let Some(rep) = carry {
            if k == blocks.len() {
                blocks.push(None);
            }
            match blocks[k].take() {
                None => {
                    blocks[k] = Some(rep);
                    carry = None;
                }
                Some(other) => {
                    comparisons += 1;
                    oracle.charge_quantum(1);
                    let equal = oracle.hidden()[other] == oracle.hidden()[rep];
                    carry = equal.then_some(other);
                    k += 1;
                }
            }
        }
    }
    let before = oracle.query_count();
    let (value, tie) = match blocks.iter().rev().flatten().next() {
        Some(&rep) => (oracle.query(rep), false),
        None => (true, true),
    };
    Ok(MajorityOutcome {
        value,
        tie,
        comparisons,
        queries: comparisons + (oracle.query_count() - before),
    })
}

/// The graph property "more than half of all possible edges are present".
pub fn majority_property(graph: &mut GraphOracle) -> Result<MajorityOutcome> {
    let mut out = majority_exact(graph.oracle_mut())?;
    out.value &= !out.tie;
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeSearch {
    pub value: bool,
    pub edge: Option<(usize, usize)>,
    pub queries: QueryStats,
}

/// One-sided bounded-error test for "the graph has at least one edge".
pub fn edge_exists<R: Rng + ?Sized>(graph: &mut GraphOracle, rng: &mut R) -> Result<EdgeSearch> {
    let cutoff = cutoff_for_error(graph.len(), 1, SCHEDULE_FACTOR, 1.0 / 3.0)?;
    let out = unknown_t_search(graph.oracle_mut(), rng, SCHEDULE_FACTOR, cutoff)?;
    let edge = out.found().map(|p| unmap(graph.vertices(), p));
    Ok(EdgeSearch {
        value: edge.is_some(),
        edge,
        queries: out.queries,
    })
}

/// One CSV row of a graph-property experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphRecord {
    pub n: usize,
    #[serde(rename = "N")]
    pub big_n: usize,
    pub property: String,
    pub verdict: String,
    pub queries_quantum: u64,
    pub queries_classical: u64,
    pub seed: u64,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::andor::Verdict;
    use crate::oracle::RngSeed;

    #[test]
    fn edge_map_round_trips() {
        for n in 2..12 {
            let mut seen = vec![false; n * (n - 1)];
            for i in 0..n {
                for j in (0..n).filter(|&j| j != i) {
                    let p = position(n, i, j);
                    assert!(!seen[p]);
                    seen[p] = true;
                    assert_eq!(unmap(n, p), (i, j));
                }
            }
        }
        assert_eq!(position(3, 0, 1), 0);
        assert_eq!(position(3, 1, 0), 2);
        assert_eq!(position(3, 2, 1), 5);
    }

    #[test]
    fn e_examples() {
        assert_eq!(e_of(12), 2);
        assert_eq!(e_of(1), 1);
        assert_eq!(e_of(0), 0);
        for k in 0..20 {
            assert_eq!(e_of(1 << k), 1);
        }
    }

    #[test]
    fn majority_small_cases() {
        let mut o = BitOracle::parse("1").unwrap();
        let m = majority_exact(&mut o).unwrap();
        assert!(m.value && m.queries == 1 && o.query_count() == 1);
        let mut o = BitOracle::parse("1110").unwrap();
        let m = majority_exact(&mut o).unwrap();
        assert!(m.value && m.queries <= 4);
        let mut o = BitOracle::parse("1100").unwrap();
        let m = majority_exact(&mut o).unwrap();
        assert!(m.tie && m.value);
    }

    #[test]
    fn majority_exhaustive() {
        for n in 1..=12usize {
            let mut worst = 0;
            for x in 0..1u32 << n {
                let bits: Vec<bool> = (0..n).map(|j| x >> j & 1 == 1).collect();
                let ones = bits.iter().filter(|&&b| b).count();
                let mut o = BitOracle::new(bits).unwrap();
                let m = majority_exact(&mut o).unwrap();
                assert_eq!(m.tie, 2 * ones == n);
                if !m.tie {
                    assert_eq!(m.value, 2 * ones > n);
                }
                assert_eq!(m.queries, o.query_count());
                worst = worst.max(m.queries);
            }
            assert_eq!(worst, (n - e_of(n) as usize + 1) as u64, "n={n}");
        }
    }

    #[test]
    fn majority_property_maps_ties_to_zero() {
        // n = 2: two edge slots, one present
        let mut g = GraphOracle::from_fn(2, |i, _| i == 0).unwrap();
        assert!(!majority_property(&mut g).unwrap().value);
        let mut g = GraphOracle::complete(3).unwrap();
        assert!(majority_property(&mut g).unwrap().value);
    }

    #[test]
    fn star_on_extreme_graphs() {
        let n = 6;
        let ev = star_evaluator(n).unwrap();
        let mut rng = RngSeed(3).rng();
        let mut g = GraphOracle::complete(n).unwrap();
        let v = star_zero_error(&ev, &mut g, &mut rng, 1_000_000).unwrap();
        let Verdict::Value { value: true, certificate } = &v.verdict else {
            panic!("{v:?}")
        };
        assert_eq!(certificate.len(), n - 1);
        let sc = StarCertificate::from_certificate(n, certificate).unwrap();
        assert!(sc.verify(&mut g));

        let mut g = GraphOracle::empty(n).unwrap();
        let v = star_zero_error(&ev, &mut g, &mut rng, 1_000_000).unwrap();
        assert_eq!(v.value(), Some(false));
        assert_eq!(v.queries.classical_verification_queries, n as u64);
        let sc = StarCertificate::from_certificate(n, v.certificate().unwrap()).unwrap();
        let StarCertificate::Missing { edges } = &sc else { panic!() };
        let mut sources: Vec<usize> = edges.iter().map(|e| e.0).collect();
        sources.sort();
        assert_eq!(sources, (0..n).collect::<Vec<_>>());
    }

    #[test]
    fn edge_existence() {
        let mut rng = RngSeed(4).rng();
        let mut g = GraphOracle::empty(8).unwrap();
        for _ in 0..100 {
            assert!(!edge_exists(&mut g, &mut rng).unwrap().value);
        }
        let mut g = GraphOracle::complete(8).unwrap();
        let e = edge_exists(&mut g, &mut rng).unwrap();
        assert!(e.value && e.queries.total() == 1);
    }
}
