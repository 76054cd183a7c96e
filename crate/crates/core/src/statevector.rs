//! Dense statevector simulation of small query circuits.
//!
//! Basis states are `|j, b, w⟩` with `j ∈ [0, N)` the query index, `b` the
//! answer/output qubit and `w` a workspace of `workspace_bits` qubits. The
//! amplitude of `|j, b, w⟩` lives at index `j·2^{1+W} + b·2^W + w`.
//!
//! The oracle maps `|j, b, w⟩ ↦ |j, b ⊕ x_j, w⟩`; a circuit accepts with the
//! probability of measuring `b = 1` at the end.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::amplitude::ExactPlan;
use crate::boolfn::input_bits;
use crate::error::{Error, Result};

/// Largest state the engine will allocate.
pub const MAX_AMPLITUDES: usize = 1 << 22;
/// Largest input length for full acceptance tables.
pub const MAX_TABLE_INPUTS: usize = 12;
/// Largest dimension of a dense unitary (12 qubits).
pub const MAX_DENSE_DIM: usize = 1 << 12;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };
const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };

/// A pure state over `|j, b, w⟩`.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    pub n: usize,
    pub workspace_bits: usize,
    pub amplitudes: Vec<Complex64>,
}

impl PureState {
    /// `|0, 0, 0⟩`.
    pub fn zero(n: usize, workspace_bits: usize) -> Result<Self> {
        let dim = dimension(n, workspace_bits)?;
        let mut amplitudes = vec![ZERO; dim];
        amplitudes[0] = ONE;
        Ok(PureState {
            n,
            workspace_bits,
            amplitudes,
        })
    }

    pub fn from_amplitudes(
        n: usize,
        workspace_bits: usize,
        amplitudes: Vec<Complex64>,
    ) -> Result<Self> {
        let dim = dimension(n, workspace_bits)?;
        if amplitudes.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                actual: amplitudes.len(),
            });
        }
        Ok(PureState {
            n,
            workspace_bits,
            amplitudes,
        })
    }

    pub fn dimension(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn index(&self, j: usize, b: usize, w: usize) -> usize {
        (j << (1 + self.workspace_bits)) | (b << self.workspace_bits) | w
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Probability that the output qubit `b` reads 1.
    pub fn acceptance(&self) -> f64 {
        let w = 1usize << self.workspace_bits;
        self.amplitudes
            .chunks(2 * w)
            .map(|block| block[w..].iter().map(|a| a.norm_sqr()).sum::<f64>())
            .sum::<f64>()
            .clamp(0.0, 1.0)
    }

    /// Probability of measuring each query index `j`.
    pub fn index_distribution(&self) -> Vec<f64> {
        let block = 2usize << self.workspace_bits;
        self.amplitudes
            .chunks(block)
            .map(|c| c.iter().map(|a| a.norm_sqr()).sum())
            .collect()
    }

    fn blocks_mut(&mut self) -> std::slice::ChunksMut<'_, Complex64> {
        let block = 2usize << self.workspace_bits;
        self.amplitudes.chunks_mut(block)
    }

    /// Applies `f` to every column of the `j` register (fixed `b`, `w`).
    fn for_each_j_column(&mut self, mut f: impl FnMut(&mut [Complex64])) {
        let stride = 2usize << self.workspace_bits;
        let mut column = vec![ZERO; self.n];
        for offset in 0..stride {
            for (j, c) in column.iter_mut().enumerate() {
                *c = self.amplitudes[j * stride + offset];
            }
            f(&mut column);
            for (j, c) in column.iter().enumerate() {
                self.amplitudes[j * stride + offset] = *c;
            }
        }
    }
}

fn dimension(n: usize, workspace_bits: usize) -> Result<usize> {
    if n == 0 {
        return Err(Error::EmptyInput);
    }
    let dim = n
        .checked_mul(2usize.checked_shl(workspace_bits as u32).unwrap_or(usize::MAX))
        .unwrap_or(usize::MAX);
    if dim > MAX_AMPLITUDES {
        return Err(Error::SizeCap {
            size: dim,
            cap: MAX_AMPLITUDES,
        });
    }
    Ok(dim)
}

/// A dense unitary on the whole state, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseUnitary {
    pub dim: usize,
    pub entries: Vec<Complex64>,
}

impl DenseUnitary {
    pub fn new(dim: usize, entries: Vec<Complex64>) -> Result<Self> {
        if dim > MAX_DENSE_DIM {
            return Err(Error::SizeCap {
                size: dim,
                cap: MAX_DENSE_DIM,
            });
        }
        if entries.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                actual: entries.len(),
            });
        }
        Ok(DenseUnitary { dim, entries })
    }

    pub fn identity(dim: usize) -> Result<Self> {
        let mut entries = vec![ZERO; dim * dim];
        for i in 0..dim {
            entries[i * dim + i] = ONE;
        }
        Self::new(dim, entries)
    }

    /// Haar-random unitary: Gram–Schmidt on a complex Gaussian matrix.
    pub fn random<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Result<Self> {
        let mut cols: Vec<Vec<Complex64>> = (0..dim)
            .map(|_| {
                (0..dim)
                    .map(|_| {
                        Complex64::new(StandardNormal.sample(rng), StandardNormal.sample(rng))
                    })
                    .collect()
            })
            .collect();
        for i in 0..dim {
            for k in 0..i {
                let (done, rest) = cols.split_at_mut(i);
                let proj: Complex64 = done[k]
                    .iter()
                    .zip(rest[0].iter())
                    .map(|(a, b)| a.conj() * b)
                    .sum();
                for (x, q) in rest[0].iter_mut().zip(done[k].iter()) {
                    *x -= proj * q;
                }
            }
            let norm = cols[i].iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
            cols[i].iter_mut().for_each(|a| *a /= norm);
        }
        let mut entries = vec![ZERO; dim * dim];
        for (c, col) in cols.iter().enumerate() {
            for (r, v) in col.iter().enumerate() {
                entries[r * dim + c] = *v;
            }
        }
        Self::new(dim, entries)
    }

    pub fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        self.entries
            .chunks(self.dim)
            .map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn matmul(&self, rhs: &DenseUnitary) -> DenseUnitary {
        let d = self.dim;
        let mut entries = vec![ZERO; d * d];
        for i in 0..d {
            for k in 0..d {
                let a = self.entries[i * d + k];
                if a == ZERO {
                    continue;
                }
                for j in 0..d {
                    entries[i * d + j] += a * rhs.entries[k * d + j];
                }
            }
        }
        DenseUnitary { dim: d, entries }
    }
}

/// A circuit element.
#[derive(Debug, Clone, PartialEq)]
pub enum Gate {
    /// Dense unitary on the whole state (query-free).
    Unitary(DenseUnitary),
    /// `|j, b, w⟩ ↦ |j, b ⊕ x_j, w⟩`. One query.
    Oracle,
    /// `|j, b, w⟩ ↦ e^{iφ·x_j} |j, b, w⟩`. One query.
    PhaseOracle(f64),
    /// `I − (1 − e^{iφ})|s⟩⟨s|` on the index register, `|s⟩` uniform.
    /// `φ = π` is the Grover reflection up to sign.
    Reflect(f64),
    /// Maps `|0⟩ ↔ |s⟩` on the index register (Householder reflection).
    PrepareUniform,
    /// `X` on the output qubit.
    FlipOutput,
}

impl Gate {
    pub fn is_query(&self) -> bool {
        matches!(self, Gate::Oracle | Gate::PhaseOracle(_))
    }
}

/// Applies the bit oracle to a state.
pub fn apply_oracle(state: &PureState, bits: &[bool]) -> Result<PureState> {
    let mut s = state.clone();
    oracle_in_place(&mut s, bits)?;
    Ok(s)
}

fn oracle_in_place(state: &mut PureState, bits: &[bool]) -> Result<()> {
    if bits.len() != state.n {
        return Err(Error::DimensionMismatch {
            expected: state.n,
            actual: bits.len(),
        });
    }
    let w = 1usize << state.workspace_bits;
    for (block, &x) in state.blocks_mut().zip(bits) {
        if x {
            let (lo, hi) = block.split_at_mut(w);
            lo.swap_with_slice(hi);
        }
    }
    Ok(())
}

fn apply_gate(state: &mut PureState, gate: &Gate, bits: &[bool]) -> Result<()> {
    match gate {
        Gate::Oracle => oracle_in_place(state, bits)?,
        Gate::PhaseOracle(phi) => {
            if bits.len() != state.n {
                return Err(Error::DimensionMismatch {
                    expected: state.n,
                    actual: bits.len(),
                });
            }
            let f = Complex64::from_polar(1.0, *phi);
            for (block, &x) in state.blocks_mut().zip(bits) {
                if x {
                    block.iter_mut().for_each(|a| *a *= f);
                }
            }
        }
        Gate::Reflect(phi) => {
            let n = state.n as f64;
            let u = ONE - Complex64::from_polar(1.0, *phi);
            state.for_each_j_column(|col| {
                let mean: Complex64 = col.iter().sum::<Complex64>() / n;
                let shift = u * mean;
                col.iter_mut().for_each(|a| *a -= shift);
            });
        }
        Gate::PrepareUniform => {
            let n = state.n;
            if n > 1 {
                let s = 1.0 / (n as f64).sqrt();
                // v = e0 - s·1, reflect x ↦ x - 2 v (v·x)/(v·v)
                let vv = 2.0 - 2.0 * s;
                state.for_each_j_column(|col| {
                    let dot = col[0] - col.iter().sum::<Complex64>() * s;
                    let c = dot * (2.0 / vv);
                    col[0] -= c;
                    col.iter_mut().for_each(|a| *a += c * s);
                });
            }
        }
        Gate::FlipOutput => {
            let w = 1usize << state.workspace_bits;
            for block in state.blocks_mut() {
                let (lo, hi) = block.split_at_mut(w);
                lo.swap_with_slice(hi);
            }
        }
        Gate::Unitary(u) => {
            if u.dim != state.dimension() {
                return Err(Error::DimensionMismatch {
                    expected: state.dimension(),
                    actual: u.dim,
                });
            }
            state.amplitudes = u.apply(&state.amplitudes);
        }
    }
    Ok(())
}

/// A query circuit `U_T O … O U_1 O U_0` over `|j, b, w⟩`.
#[derive(Debug, Clone, PartialEq)]
pub struct Circuit {
    pub n: usize,
    pub workspace_bits: usize,
    pub gates: Vec<Gate>,
}

impl Circuit {
    pub fn new(n: usize, workspace_bits: usize) -> Result<Self> {
        dimension(n, workspace_bits)?;
        Ok(Circuit {
            n,
            workspace_bits,
            gates: Vec::new(),
        })
    }

    pub fn push(&mut self, gate: Gate) -> &mut Self {
        self.gates.push(gate);
        self
    }

    pub fn dimension(&self) -> usize {
        self.n << (1 + self.workspace_bits)
    }

    /// Number of oracle applications.
    pub fn queries(&self) -> usize {
        self.gates.iter().filter(|g| g.is_query()).count()
    }

    /// Grover search with `k` iterations, ending with one oracle call that
    /// writes `x_j` of the measured index into the output qubit. Makes
    /// `k + 1` queries and accepts with the search's success probability.
    pub fn grover(n: usize, k: usize) -> Result<Self> {
        let mut c = Circuit::new(n, 0)?;
        c.push(Gate::PrepareUniform);
        for _ in 0..k {
            c.push(Gate::PhaseOracle(PI)).push(Gate::Reflect(PI));
        }
        c.push(Gate::Oracle);
        Ok(c)
    }

    /// The exact-search circuit for `t_known` solutions, with the same final
    /// read-out query as [`Circuit::grover`].
    pub fn exact_search(n: usize, t_known: usize) -> Result<Self> {
        let plan = ExactPlan::new(n, t_known)?;
        let mut c = Circuit::new(n, 0)?;
        c.push(Gate::PrepareUniform);
        for _ in 0..plan.ordinary {
            c.push(Gate::PhaseOracle(PI)).push(Gate::Reflect(PI));
        }
        if let Some((oracle_phase, refl_phase)) = plan.final_phases {
            c.push(Gate::PhaseOracle(oracle_phase))
                .push(Gate::Reflect(refl_phase));
        }
        c.push(Gate::Oracle);
        Ok(c)
    }

    /// `U_T O … U_1 O U_0` with Haar-random `U_i`.
    pub fn random<R: Rng + ?Sized>(
        n: usize,
        workspace_bits: usize,
        queries: usize,
        rng: &mut R,
    ) -> Result<Self> {
        let mut c = Circuit::new(n, workspace_bits)?;
        let dim = c.dimension();
        c.push(Gate::Unitary(DenseUnitary::random(dim, rng)?));
        for _ in 0..queries {
            c.push(Gate::Oracle);
            c.push(Gate::Unitary(DenseUnitary::random(dim, rng)?));
        }
        Ok(c)
    }

    /// The state `A|0⟩` for input `bits`.
    pub fn final_state(&self, bits: &[bool]) -> Result<PureState> {
        let mut s = PureState::zero(self.n, self.workspace_bits)?;
        for g in &self.gates {
            apply_gate(&mut s, g, bits)?;
        }
        Ok(s)
    }
}

/// Acceptance probability of `circuit` on input `bits`, with the number of
/// oracle applications made.
pub fn run_circuit(circuit: &Circuit, bits: &[bool]) -> Result<(f64, usize)> {
    let s = circuit.final_state(bits)?;
    Ok((s.acceptance(), circuit.queries()))
}

/// Acceptance probability for every input, indexed with `x_0` as the most
/// significant bit.
#[derive(Debug, Clone, PartialEq)]
pub struct AcceptanceTable {
    pub n: usize,
    pub values: Vec<f64>,
}

impl AcceptanceTable {
    pub fn new(n: usize, values: Vec<f64>) -> Result<Self> {
        if values.len() != 1usize << n {
            return Err(Error::DimensionMismatch {
                expected: 1 << n,
                actual: values.len(),
            });
        }
        Ok(AcceptanceTable { n, values })
    }
}

/// Runs `circuit` on all `2^N` inputs.
pub fn acceptance_table(circuit: &Circuit, n: usize) -> Result<AcceptanceTable> {
    if n > MAX_TABLE_INPUTS {
        return Err(Error::SizeCap {
            size: n,
            cap: MAX_TABLE_INPUTS,
        });
    }
    if n != circuit.n {
        return Err(Error::DimensionMismatch {
            expected: circuit.n,
            actual: n,
        });
    }
    let values = (0..1usize << n)
        .into_par_iter()
        .map(|x| run_circuit(circuit, &input_bits(x, n)).map(|r| r.0))
        .collect::<Result<Vec<_>>>()?;
    AcceptanceTable::new(n, values)
}
