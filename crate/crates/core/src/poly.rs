//! Polynomial-method toolkit: Chebyshev polynomials, bound evaluation,
//! symmetrization of acceptance tables and degree detection.

use std::f64::consts::PI;
use std::io::Write;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::statevector::AcceptanceTable;

/// Coefficient-form univariate polynomial, ascending degree.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UnivariatePoly {
    coefficients: Vec<f64>,
}

impl UnivariatePoly {
    /// Trailing zero coefficients are dropped.
    pub fn new(mut coefficients: Vec<f64>) -> Self {
        while coefficients.last() == Some(&0.0) {
            coefficients.pop();
        }
        UnivariatePoly { coefficients }
    }

    pub fn constant(c: f64) -> Self {
        Self::new(vec![c])
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    /// Degree; the zero polynomial reports 0.
    pub fn degree(&self) -> usize {
        self.coefficients.len().saturating_sub(1)
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.coefficients.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }

    /// `T_d` in coefficient form.
    pub fn chebyshev(d: usize) -> Self {
        let mut prev = vec![1.0];
        if d == 0 {
            return Self::new(prev);
        }
        let mut cur = vec![0.0, 1.0];
        for _ in 1..d {
            let mut next = vec![0.0; cur.len() + 1];
            for (i, &c) in cur.iter().enumerate() {
                next[i + 1] += 2.0 * c;
            }
            for (i, &c) in prev.iter().enumerate() {
                next[i] -= c;
            }
            prev = std::mem::replace(&mut cur, next);
        }
        Self::new(cur)
    }

    /// Interpolating polynomial through `(xs[i], ys[i])` (Newton form
    /// expanded to coefficients).
    pub fn interpolate(xs: &[f64], ys: &[f64]) -> Result<Self> {
        if xs.len() != ys.len() || xs.is_empty() {
            return Err(Error::DimensionMismatch {
                expected: xs.len(),
                actual: ys.len(),
            });
        }
        let n = xs.len();
        let mut dd = ys.to_vec();
        for level in 1..n {
            for i in (level..n).rev() {
                let denom = xs[i] - xs[i - level];
                if denom == 0.0 {
                    return Err(Error::InvalidParameter("repeated node".into()));
                }
                dd[i] = (dd[i] - dd[i - 1]) / denom;
            }
        }
        // Horner on Newton form: p = dd[n-1]; p = p·(x - xs[i]) + dd[i]
        let mut coeffs = vec![dd[n - 1]];
        for i in (0..n - 1).rev() {
            let mut next = vec![0.0; coeffs.len() + 1];
            for (k, &c) in coeffs.iter().enumerate() {
                next[k + 1] += c;
                next[k] -= c * xs[i];
            }
            next[0] += dd[i];
            coeffs = next;
        }
        Ok(Self::new(coeffs))
    }
}

/// `T_d(x)`: three-term recurrence on `[-1, 1]`, closed form outside.
pub fn chebyshev_eval(d: usize, x: f64) -> f64 {
    if x.abs() <= 1.0 {
        let (mut prev, mut cur) = (1.0, x);
        if d == 0 {
            return 1.0;
        }
        for _ in 1..d {
            let next = 2.0 * x * cur - prev;
            prev = cur;
            cur = next;
        }
        cur
    } else {
        let s = (x * x - 1.0).sqrt();
        0.5 * ((x + s).powi(d as i32) + (x - s).powi(d as i32))
    }
}

/// `ln T_d(x)` for `x ≥ 1`, stable for large `d`.
pub fn chebyshev_ln(d: usize, x: f64) -> f64 {
    debug_assert!(x >= 1.0);
    let s = (x * x - 1.0).max(0.0).sqrt();
    let big = (x + s).ln();
    let ratio = ((x - s) / (x + s)).powi(d as i32);
    d as f64 * big + (0.5 * (1.0 + ratio)).ln()
}

/// `T_d(1+μ)` against `exp(2d√(2μ+μ²))`, compared in log space.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PaturiCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub ln_lhs: f64,
    pub ln_rhs: f64,
    pub holds: bool,
}

pub fn paturi_check(d: usize, mu: f64) -> Result<PaturiCheck> {
    if !(mu >= 0.0) {
        return Err(Error::InvalidParameter(format!("mu must be >= 0, got {mu}")));
    }
    let ln_lhs = chebyshev_ln(d, 1.0 + mu);
    let ln_rhs = 2.0 * d as f64 * (2.0 * mu + mu * mu).sqrt();
    Ok(PaturiCheck {
        lhs: ln_lhs.exp(),
        rhs: ln_rhs.exp(),
        ln_lhs,
        ln_rhs,
        holds: ln_lhs <= ln_rhs + (1e-12f64).ln_1p(),
    })
}

/// Checks `|q(x)| ≤ |T_d(x)|` at every sample `x ≥ 1`, where `d = deg q` and
/// `q` is bounded by 1 on `[-1, 1]`.
pub fn extremal_check(q: &UnivariatePoly, xs: &[f64]) -> Result<bool> {
    let grid_max = (0..=4000)
        .map(|i| q.eval(-1.0 + i as f64 / 2000.0).abs())
        .fold(0.0_f64, f64::max);
    if grid_max > 1.0 + 1e-9 {
        return Err(Error::NotBounded(grid_max));
    }
    let d = q.degree();
    Ok(xs.iter().all(|&x| {
        debug_assert!(x >= 1.0);
        q.eval(x).abs() <= chebyshev_eval(d, x).abs() + 1e-9
    }))
}

/// Random degree-`d` polynomial bounded on `[-1,1]`: values uniform in
/// `[-1,1]` at the `d+1` extremal Chebyshev nodes, interpolated, then scaled
/// down if the interpolant overshoots 1 between nodes.
pub fn random_bounded_poly<R: Rng + ?Sized>(d: usize, rng: &mut R) -> UnivariatePoly {
    let nodes: Vec<f64> = (0..=d)
        .map(|i| if d == 0 { 1.0 } else { (PI * i as f64 / d as f64).cos() })
        .collect();
    let values: Vec<f64> = nodes.iter().map(|_| rng.random_range(-1.0..=1.0)).collect();
    let p = UnivariatePoly::interpolate(&nodes, &values).expect("distinct nodes");
    let grid_max = (0..=4000)
        .map(|i| p.eval(-1.0 + i as f64 / 2000.0).abs())
        .fold(0.0_f64, f64::max);
    if grid_max > 1.0 {
        UnivariatePoly::new(p.coefficients().iter().map(|c| c / grid_max).collect())
    } else {
        p
    }
}

/// Symmetrized acceptance values `Q(0..=N)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightProfile {
    pub n: usize,
    pub values: Vec<f64>,
}

/// Averages a table over inputs of equal Hamming weight.
pub fn symmetrize(table: &AcceptanceTable) -> Result<WeightProfile> {
    let n = table.n;
    if table.values.len() != 1usize << n {
        return Err(Error::DimensionMismatch {
            expected: 1 << n,
            actual: table.values.len(),
        });
    }
    let mut sum = vec![0.0; n + 1];
    let mut count = vec![0usize; n + 1];
    for (x, &v) in table.values.iter().enumerate() {
        let w = x.count_ones() as usize;
        sum[w] += v;
        count[w] += 1;
    }
    Ok(WeightProfile {
        n,
        values: sum.iter().zip(&count).map(|(s, &c)| s / c as f64).collect(),
    })
}

/// Relative tolerance for vanishing finite differences.
pub const DIFFERENCE_TOLERANCE: f64 = 1e-7;

/// Smallest `d` such that every forward difference of order `> d` vanishes
/// (relative to the largest `|Q(k)|`).
pub fn degree_via_differences(profile: &WeightProfile) -> usize {
    let scale = profile.values.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    if scale == 0.0 {
        return 0;
    }
    let tol = DIFFERENCE_TOLERANCE * scale;
    let mut diffs = vec![profile.values.clone()];
    while diffs.last().unwrap().len() > 1 {
        let prev = diffs.last().unwrap();
        let next: Vec<f64> = prev.windows(2).map(|w| w[1] - w[0]).collect();
        diffs.push(next);
    }
    // diffs[k] holds differences of order k
    let mut degree = 0;
    for (order, d) in diffs.iter().enumerate() {
        if d.iter().any(|v| v.abs() > tol) {
            degree = order;
        }
    }
    degree
}

/// Universal constants of the integer-point bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundParams {
    pub a: f64,
    pub b: f64,
}

impl BoundParams {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if !(a > 0.0 && b > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "bound constants must be positive, got a={a} b={b}"
            )));
        }
        Ok(BoundParams { a, b })
    }
}

impl Default for BoundParams {
    fn default() -> Self {
        BoundParams { a: 1.0, b: b_floor() }
    }
}

/// Lower bound on `b` implied by the `2.45√(N log(1/ε))` search: `1/(4·2.45²)`.
pub fn b_floor() -> f64 {
    1.0 / (4.0 * 2.45 * 2.45)
}

/// A lower bound on error probability, or a marker that the bound says
/// nothing for these parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum ErrorBound {
    Value(f64),
    Vacuous,
}

impl ErrorBound {
    pub fn value(self) -> Option<f64> {
        match self {
            ErrorBound::Value(v) => Some(v),
            ErrorBound::Vacuous => None,
        }
    }
}

fn check_nt(n: usize, t: usize) -> Result<()> {
    if t < 1 || t >= n {
        return Err(Error::InvalidParameter(format!(
            "need 1 <= t < N, got t={t} N={n}"
        )));
    }
    Ok(())
}

/// Error lower bound for a degree-`d` polynomial that is 0 at 0 and within
/// `ε` of 1 on `[t, N]`: `(1/a)·exp(−b d²/(N−t) − 4d√(tN/(N−t)²))`.
pub fn theorem_a5_bound(n: usize, t: usize, d: usize, params: BoundParams) -> Result<ErrorBound> {
    check_nt(n, t)?;
    if d > n - t {
        return Ok(ErrorBound::Vacuous);
    }
    let (nf, tf, df) = (n as f64, t as f64, d as f64);
    let gap = nf - tf;
    let exponent = -params.b * df * df / gap - 4.0 * df * (tf * nf / (gap * gap)).sqrt();
    Ok(ErrorBound::Value(((1.0 / params.a) * exponent.exp()).clamp(0.0, 1.0)))
}

/// Error lower bound for `T`-query search under the promise of at least `t`
/// solutions: `(1/a)·exp(−4bT²/(N−t) − 8T√(tN/(N−t)²))`.
pub fn theorem2_bound(n: usize, t: usize, queries: usize, params: BoundParams) -> Result<ErrorBound> {
    check_nt(n, t)?;
    if queries > n - t {
        return Ok(ErrorBound::Vacuous);
    }
    let (nf, tf, qf) = (n as f64, t as f64, queries as f64);
    let gap = nf - tf;
    let exponent =
        -4.0 * params.b * qf * qf / gap - 8.0 * qf * (tf * nf / (gap * gap)).sqrt();
    Ok(ErrorBound::Value(((1.0 / params.a) * exponent.exp()).clamp(0.0, 1.0)))
}

/// One row of a bound curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundRow {
    #[serde(rename = "N")]
    pub n: usize,
    pub t: usize,
    #[serde(rename = "T_or_d")]
    pub t_or_d: usize,
    pub bound_value: Option<f64>,
    pub a: f64,
    pub b: f64,
}

/// Evaluates the query bound for `T = 0..=max_queries`.
pub fn bound_curve(n: usize, t: usize, max_queries: usize, params: BoundParams) -> Result<Vec<BoundRow>> {
    (0..=max_queries)
        .map(|q| {
            Ok(BoundRow {
                n,
                t,
                t_or_d: q,
                bound_value: theorem2_bound(n, t, q, params)?.value(),
                a: params.a,
                b: params.b,
            })
        })
        .collect()
}

/// Writes rows as CSV with header `N,t,T_or_d,bound_value,a,b`.
pub fn write_bound_csv<W: Write>(rows: &[BoundRow], w: W) -> Result<()> {
    let mut wtr = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(w);
    for r in rows {
        wtr.serialize(r)?;
    }
    wtr.flush()?;
    Ok(())
}
