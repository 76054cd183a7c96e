//! Brute-force complexity measures of small Boolean functions.
//!
//! Inputs are indexed with `x_0` as the most significant bit, so index order
//! is the lexicographic order of the strings `x_0 x_1 … x_{N-1}`.

use std::fmt::Write as _;
use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Arity cap for degree and sensitivity.
pub const MAX_ARITY: usize = 22;
/// Arity cap for decision-tree depth (`3^14` restrictions).
pub const MAX_DT_ARITY: usize = 14;

/// Bit `j` of input number `index` (`x_0` most significant).
pub fn input_bits(index: usize, n: usize) -> Vec<bool> {
    (0..n).map(|j| (index >> (n - 1 - j)) & 1 == 1).collect()
}

/// Input number of a bit vector (`x_0` most significant).
pub fn input_index(bits: &[bool]) -> usize {
    bits.iter().fold(0, |acc, &b| (acc << 1) | usize::from(b))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TruthTable {
    pub n: usize,
    pub values: Vec<bool>,
}

impl TruthTable {
    pub fn new(n: usize, values: Vec<bool>) -> Result<Self> {
        if n > MAX_ARITY {
            return Err(Error::SizeCap {
                size: n,
                cap: MAX_ARITY,
            });
        }
        if values.len() != 1usize << n {
            return Err(Error::DimensionMismatch {
                expected: 1 << n,
                actual: values.len(),
            });
        }
        Ok(TruthTable { n, values })
    }

    pub fn from_fn(n: usize, f: impl Fn(&[bool]) -> bool) -> Result<Self> {
        if n > MAX_ARITY {
            return Err(Error::SizeCap {
                size: n,
                cap: MAX_ARITY,
            });
        }
        let values = (0..1usize << n).map(|x| f(&input_bits(x, n))).collect();
        Self::new(n, values)
    }

    pub fn or(n: usize) -> Result<Self> {
        Self::from_fn(n, |x| x.iter().any(|&b| b))
    }

    pub fn and(n: usize) -> Result<Self> {
        Self::from_fn(n, |x| x.iter().all(|&b| b))
    }

    pub fn constant(n: usize, value: bool) -> Result<Self> {
        Self::new(n, vec![value; 1 << n])
    }

    pub fn dictator(n: usize, j: usize) -> Result<Self> {
        Self::from_fn(n, |x| x[j])
    }

    /// `1` iff at least `k` inputs are set.
    pub fn threshold(n: usize, k: usize) -> Result<Self> {
        Self::from_fn(n, |x| x.iter().filter(|&&b| b).count() >= k)
    }

    pub fn value(&self, index: usize) -> bool {
        self.values[index]
    }

    /// Reads the text format: first line `N`, second line `2^N` characters
    /// of `0`/`1` in lexicographic input order.
    pub fn read<R: BufRead>(reader: R) -> Result<Self> {
        let mut lines = reader.lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::Parse("missing arity line".into()))??;
        let n: usize = header
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad arity {header:?}")))?;
        let body = lines
            .next()
            .ok_or_else(|| Error::Parse("missing value line".into()))??;
        let values = body
            .trim()
            .chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::Parse(format!("unexpected character {other:?}"))),
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(n, values)
    }

    pub fn write<W: Write>(&self, mut w: W) -> Result<()> {
        let mut body = String::with_capacity(self.values.len());
        for &v in &self.values {
            body.push(if v { '1' } else { '0' });
        }
        let mut out = String::new();
        let _ = writeln!(out, "{}", self.n);
        out.push_str(&body);
        out.push('\n');
        w.write_all(out.as_bytes())?;
        Ok(())
    }
}

/// Coefficients of the unique multilinear polynomial representing `f`,
/// indexed by monomial (same bit convention as inputs).
pub fn moebius_coefficients(f: &TruthTable) -> Vec<i64> {
    let mut c: Vec<i64> = f.values.iter().map(|&v| i64::from(v)).collect();
    for bit in 0..f.n {
        let step = 1usize << bit;
        for x in 0..c.len() {
            if x & step != 0 {
                c[x] -= c[x ^ step];
            }
        }
    }
    c
}

/// Degree of the multilinear representation.
pub fn degree(f: &TruthTable) -> Result<usize> {
    if f.n > MAX_ARITY {
        return Err(Error::SizeCap {
            size: f.n,
            cap: MAX_ARITY,
        });
    }
    Ok(moebius_coefficients(f)
        .iter()
        .enumerate()
        .filter(|(_, &c)| c != 0)
        .map(|(m, _)| m.count_ones() as usize)
        .max()
        .unwrap_or(0))
}

/// Maximum over inputs of the number of sensitive coordinates.
pub fn sensitivity(f: &TruthTable) -> Result<usize> {
    if f.n > MAX_ARITY {
        return Err(Error::SizeCap {
            size: f.n,
            cap: MAX_ARITY,
        });
    }
    Ok((0..f.values.len())
        .map(|x| {
            (0..f.n)
                .filter(|&i| f.values[x] != f.values[x ^ (1 << i)])
                .count()
        })
        .max()
        .unwrap_or(0))
}

/// Optimal deterministic decision-tree depth.
///
/// Restrictions are encoded in base 3 (digit 2 = free variable). Processing
/// codes in increasing order guarantees both settings of a free digit are
/// done before the restriction itself.
pub fn decision_tree_depth(f: &TruthTable) -> Result<usize> {
    let n = f.n;
    if n > MAX_DT_ARITY {
        return Err(Error::SizeCap {
            size: n,
            cap: MAX_DT_ARITY,
        });
    }
    let pow3: Vec<usize> = (0..=n).map(|i| 3usize.pow(i as u32)).collect();
    let states = pow3[n];
    // bit 0: some completion is 0, bit 1: some completion is 1
    let mut reach = vec![0u8; states];
    let mut depth = vec![0u8; states];
    for s in 0..states {
        let mut rest = s;
        let mut first_free = None;
        let mut index = 0usize;
        // ternary digit i corresponds to variable x_{n-1-i}
        for i in 0..n {
            let d = rest % 3;
            rest /= 3;
            match d {
                2 => {
                    if first_free.is_none() {
                        first_free = Some(i);
                    }
                }
                1 => index |= 1 << i,
                _ => {}
            }
        }
        match first_free {
            None => {
                reach[s] = if f.values[index] { 2 } else { 1 };
                depth[s] = 0;
            }
            Some(i0) => {
                reach[s] = reach[s - 2 * pow3[i0]] | reach[s - pow3[i0]];
                if reach[s] != 3 {
                    depth[s] = 0;
                    continue;
                }
                let mut best = u8::MAX;
                let mut rest = s;
                for &p in pow3.iter().take(n) {
                    if rest % 3 == 2 {
                        let worst = depth[s - 2 * p].max(depth[s - p]);
                        best = best.min(worst);
                    }
                    rest /= 3;
                }
                depth[s] = best + 1;
            }
        }
    }
    Ok(depth[states - 1] as usize)
}

/// True iff `f(x) ≤ f(x + e_i)` for every covering pair.
pub fn is_monotone(f: &TruthTable) -> bool {
    (0..f.values.len()).all(|x| {
        (0..f.n).all(|i| x & (1 << i) != 0 || !f.values[x] || f.values[x | (1 << i)])
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MonotoneReport {
    pub decision_tree_depth: usize,
    pub sensitivity: usize,
    pub degree: usize,
    /// `D(f) ≤ s(f)²`
    pub depth_within_sensitivity_squared: bool,
    /// `deg(f) ≥ s(f)`
    pub degree_at_least_sensitivity: bool,
}

pub fn check_monotone_relations(f: &TruthTable) -> Result<MonotoneReport> {
    if !is_monotone(f) {
        return Err(Error::NotMonotone);
    }
    let d = decision_tree_depth(f)?;
    let s = sensitivity(f)?;
    let deg = degree(f)?;
    Ok(MonotoneReport {
        decision_tree_depth: d,
        sensitivity: s,
        degree: deg,
        depth_within_sensitivity_squared: d <= s * s,
        degree_at_least_sensitivity: deg >= s,
    })
}

/// Truth table of a directed-graph property on `n` vertices, with edge
/// `(i, j)` at position `i·(n−1) + (j if j < i else j−1)`.
pub fn graph_property(n: usize, p: impl Fn(&dyn Fn(usize, usize) -> bool) -> bool) -> Result<TruthTable> {
    let m = n * (n - 1);
    TruthTable::from_fn(m, |x| {
        let edge = |i: usize, j: usize| x[i * (n - 1) + if j < i { j } else { j - 1 }];
        p(&edge)
    })
}
