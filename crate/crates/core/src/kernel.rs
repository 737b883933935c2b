//! Finite distributions, row-stochastic kernels, propagation, stationary
//! distributions, and reversibility diagnostics.
//!
//! Everything follows the row-vector convention: a distribution is a row
//! vector `mu` and one step of the dynamics is `mu * P`. Column-stochastic
//! inputs are rejected by validation, never auto-transposed.

use serde::{Deserialize, Serialize};

use crate::config::ToleranceConfig;
use crate::error::{CoreError, Result};
use crate::matrix::Matrix;

/// Skip renormalization when a row sum is already this close to 1, so that
/// re-validating an accepted kernel is a no-op.
const RENORM_SKIP: f64 = 1e-13;

/// Probability distribution on a finite state set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Dist {
    weights: Vec<f64>,
}

impl Dist {
    /// Accepts weights that already sum to 1 within `1e-12`.
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(CoreError::InvalidDistribution { context: "empty weight vector".into() });
        }
        for (i, w) in weights.iter().enumerate() {
            if !w.is_finite() || *w < 0.0 {
                return Err(CoreError::InvalidDistribution {
                    context: format!("weight {w} at index {i}"),
                });
            }
        }
        let sum: f64 = weights.iter().sum();
        if (sum - 1.0).abs() > 1e-12 {
            return Err(CoreError::InvalidDistribution {
                context: format!("weights sum to {sum}, expected 1 within 1e-12"),
            });
        }
        Ok(Self { weights })
    }

    /// Normalizes nonnegative weights with positive total mass.
    pub fn normalized(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(CoreError::InvalidDistribution { context: "empty weight vector".into() });
        }
        for (i, w) in weights.iter().enumerate() {
            if !w.is_finite() || *w < 0.0 {
                return Err(CoreError::InvalidDistribution {
                    context: format!("weight {w} at index {i}"),
                });
            }
        }
        let sum: f64 = weights.iter().sum();
        if sum <= 0.0 {
            return Err(CoreError::InvalidDistribution { context: "total mass is zero".into() });
        }
        let weights = weights.into_iter().map(|w| w / sum).collect();
        Ok(Self { weights })
    }

    pub fn uniform(n: usize) -> Self {
        Self { weights: vec![1.0 / n as f64; n] }
    }

    pub fn point_mass(index: usize, n: usize) -> Self {
        let mut weights = vec![0.0; n];
        weights[index] = 1.0;
        Self { weights }
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn weight(&self, i: usize) -> f64 {
        self.weights[i]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.weights
    }

    pub fn l1_distance(&self, other: &Dist) -> f64 {
        self.weights
            .iter()
            .zip(other.weights.iter())
            .map(|(a, b)| (a - b).abs())
            .sum()
    }

    /// Total variation distance, `½ · L1`.
    pub fn tv_distance(&self, other: &Dist) -> f64 {
        0.5 * self.l1_distance(other)
    }
}

impl TryFrom<Vec<f64>> for Dist {
    type Error = CoreError;

    fn try_from(weights: Vec<f64>) -> Result<Self> {
        Dist::new(weights)
    }
}

impl From<Dist> for Vec<f64> {
    fn from(d: Dist) -> Self {
        d.weights
    }
}

/// Row-stochastic transition matrix on a finite state set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Kernel {
    mat: Matrix,
}

impl Kernel {
    pub fn dim(&self) -> usize {
        self.mat.rows()
    }

    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.mat.get(i, j)
    }

    pub fn row(&self, i: usize) -> &[f64] {
        self.mat.row(i)
    }

    pub fn matrix(&self) -> &Matrix {
        &self.mat
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.mat.to_rows()
    }

    pub fn identity(n: usize) -> Self {
        Self { mat: Matrix::identity(n) }
    }

    /// Wraps a matrix that is already row-stochastic, checking rows against
    /// the default tolerance.
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        Ok(validate_kernel(&rows, &ToleranceConfig::default())?.kernel)
    }

    /// Matrix product of two kernels (row convention: `self` acts first).
    pub fn compose(&self, then: &Kernel) -> Result<Kernel> {
        if self.dim() != then.dim() {
            return Err(CoreError::DimensionMismatch { expected: self.dim(), got: then.dim() });
        }
        Ok(Kernel { mat: self.mat.mul(&then.mat)? })
    }

    /// `P^t` by repeated multiplication in index order.
    pub fn power(&self, t: usize) -> Kernel {
        let mut acc = Matrix::identity(self.dim());
        for _ in 0..t {
            acc = acc.mul(&self.mat).expect("square dimensions agree");
        }
        Kernel { mat: acc }
    }

    pub(crate) fn from_matrix_unchecked(mat: Matrix) -> Self {
        Self { mat }
    }
}

/// Outcome of [`validate_kernel`]: the accepted kernel plus a record of any
/// entries clamped to structural zero and rows renormalized.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidatedKernel {
    pub kernel: Kernel,
    pub clamped: Vec<(usize, usize)>,
    pub renormalized_rows: Vec<usize>,
}

/// Checks a raw square matrix and returns a row-stochastic [`Kernel`].
///
/// Entries below `cfg.zero_tol` (including harmless negative rounding noise
/// above `-zero_tol`) are clamped to exact zero; rows must then sum to 1
/// within `cfg.row_sum_tol` and are renormalized to unit mass.
pub fn validate_kernel(raw: &[Vec<f64>], cfg: &ToleranceConfig) -> Result<ValidatedKernel> {
    cfg.validate()?;
    let n = raw.len();
    if n == 0 {
        return Err(CoreError::NonSquare { row: 0, len: 0, expected: 1 });
    }
    for (i, row) in raw.iter().enumerate() {
        if row.len() != n {
            return Err(CoreError::NonSquare { row: i, len: row.len(), expected: n });
        }
    }

    let mut rows: Vec<Vec<f64>> = raw.to_vec();
    let mut clamped = Vec::new();
    for (i, row) in rows.iter_mut().enumerate() {
        for (j, v) in row.iter_mut().enumerate() {
            if !v.is_finite() || *v < -cfg.zero_tol {
                return Err(CoreError::NegativeEntry { row: i, col: j, value: *v });
            }
            if *v < cfg.zero_tol && *v != 0.0 {
                *v = 0.0;
                clamped.push((i, j));
            }
        }
    }

    let mut renormalized_rows = Vec::new();
    for (i, row) in rows.iter_mut().enumerate() {
        let sum: f64 = row.iter().sum();
        if (sum - 1.0).abs() > cfg.row_sum_tol {
            return Err(CoreError::RowSumOutOfTolerance { row: i, sum, tol: cfg.row_sum_tol });
        }
        if (sum - 1.0).abs() > RENORM_SKIP {
            for v in row.iter_mut() {
                *v /= sum;
            }
            renormalized_rows.push(i);
        }
    }

    let mat = Matrix::from_rows(rows)?;
    Ok(ValidatedKernel { kernel: Kernel { mat }, clamped, renormalized_rows })
}

/// Evolves `mu` through `t` steps of `P`, one row-vector product per step.
pub fn propagate(mu: &Dist, p: &Kernel, t: usize) -> Result<Dist> {
    if mu.len() != p.dim() {
        return Err(CoreError::DimensionMismatch { expected: p.dim(), got: mu.len() });
    }
    let mut v = mu.as_slice().to_vec();
    for _ in 0..t {
        v = p.matrix().row_vec_mul(&v)?;
    }
    Ok(Dist { weights: v })
}

/// Stationary distribution plus solver diagnostics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StationaryResult {
    pub pi: Dist,
    pub iterations: usize,
    /// Set when convergence was reached by averaging a period-2 oscillation.
    pub oscillation_averaged: bool,
    pub residual_l1: f64,
}

fn residual_l1(v: &[f64], p: &Kernel) -> Result<(Vec<f64>, f64)> {
    let next = p.matrix().row_vec_mul(v)?;
    let res = v.iter().zip(next.iter()).map(|(a, b)| (a - b).abs()).sum();
    Ok((next, res))
}

/// Power iteration from the uniform distribution.
///
/// Requires strong connectivity of the directed support graph. Bipartite
/// (period-2) chains are handled by averaging consecutive iterates once an
/// oscillation is detected.
pub fn stationary(p: &Kernel, cfg: &ToleranceConfig) -> Result<StationaryResult> {
    cfg.validate()?;
    let n = p.dim();
    let components = strongly_connected_components(p, cfg.zero_tol);
    if components.len() != 1 {
        return Err(CoreError::NotIrreducible { components: components.len() });
    }

    let tol = cfg.stationarity_tol;
    let mut cur = vec![1.0 / n as f64; n];
    let mut last_residual = f64::INFINITY;
    for k in 0..cfg.max_power_iters {
        let (next, res) = residual_l1(&cur, p)?;
        last_residual = res;
        if res <= tol {
            return Ok(StationaryResult {
                pi: Dist::normalized(cur)?,
                iterations: k,
                oscillation_averaged: false,
                residual_l1: res,
            });
        }
        // Period-2 oscillation: the two-step map has settled while the
        // one-step map has not; the midpoint is then stationary.
        let next2 = p.matrix().row_vec_mul(&next)?;
        let two_step: f64 =
            cur.iter().zip(next2.iter()).map(|(a, b)| (a - b).abs()).sum();
        if two_step <= tol {
            let avg: Vec<f64> = cur.iter().zip(next.iter()).map(|(a, b)| 0.5 * (a + b)).collect();
            let (_, avg_res) = residual_l1(&avg, p)?;
            if avg_res <= tol {
                return Ok(StationaryResult {
                    pi: Dist::normalized(avg)?,
                    iterations: k,
                    oscillation_averaged: true,
                    residual_l1: avg_res,
                });
            }
        }
        cur = next;
    }
    Err(CoreError::NotConverged { max_iters: cfg.max_power_iters, residual: last_residual })
}

/// Detailed-balance check result.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DetailedBalance {
    pub reversible: bool,
    pub max_violation: f64,
}

/// Max over ordered pairs of `|pi_i P_ij - pi_j P_ji|`.
pub fn check_detailed_balance(p: &Kernel, pi: &Dist, tol: f64) -> Result<DetailedBalance> {
    let n = p.dim();
    if pi.len() != n {
        return Err(CoreError::DimensionMismatch { expected: n, got: pi.len() });
    }
    let mut max_violation = 0.0f64;
    for i in 0..n {
        for j in (i + 1)..n {
            let flux = pi.weight(i) * p.entry(i, j) - pi.weight(j) * p.entry(j, i);
            max_violation = max_violation.max(flux.abs());
        }
    }
    Ok(DetailedBalance { reversible: max_violation <= tol, max_violation })
}

/// Max absolute entry of `AB - BA`.
pub fn commutator_max_abs(a: &Kernel, b: &Kernel) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(CoreError::DimensionMismatch { expected: a.dim(), got: b.dim() });
    }
    let ab = a.matrix().mul(b.matrix())?;
    let ba = b.matrix().mul(a.matrix())?;
    Ok(ab.sub(&ba)?.max_abs_entry())
}

/// Strongly connected components of the directed support graph, in Tarjan
/// discovery order. Entries `> zero_tol` count as edges; self-loops are
/// irrelevant to connectivity.
pub fn strongly_connected_components(p: &Kernel, zero_tol: f64) -> Vec<Vec<usize>> {
    let n = p.dim();
    let adj: Vec<Vec<usize>> = (0..n)
        .map(|i| (0..n).filter(|&j| j != i && p.entry(i, j) > zero_tol).collect())
        .collect();

    // Iterative Tarjan.
    let mut index = vec![usize::MAX; n];
    let mut lowlink = vec![0usize; n];
    let mut on_stack = vec![false; n];
    let mut stack = Vec::new();
    let mut next_index = 0usize;
    let mut components: Vec<Vec<usize>> = Vec::new();
    let mut call_stack: Vec<(usize, usize)> = Vec::new();

    for start in 0..n {
        if index[start] != usize::MAX {
            continue;
        }
        call_stack.push((start, 0));
        index[start] = next_index;
        lowlink[start] = next_index;
        next_index += 1;
        stack.push(start);
        on_stack[start] = true;

        while let Some(&mut (v, ref mut child)) = call_stack.last_mut() {
            if *child < adj[v].len() {
                let w = adj[v][*child];
                *child += 1;
                if index[w] == usize::MAX {
                    index[w] = next_index;
                    lowlink[w] = next_index;
                    next_index += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    call_stack.push((w, 0));
                } else if on_stack[w] {
                    lowlink[v] = lowlink[v].min(index[w]);
                }
            } else {
                call_stack.pop();
                if let Some(&(parent, _)) = call_stack.last() {
                    lowlink[parent] = lowlink[parent].min(lowlink[v]);
                }
                if lowlink[v] == index[v] {
                    let mut comp = Vec::new();
                    while let Some(w) = stack.pop() {
                        on_stack[w] = false;
                        comp.push(w);
                        if w == v {
                            break;
                        }
                    }
                    comp.sort_unstable();
                    components.push(comp);
                }
            }
        }
    }
    components
}
