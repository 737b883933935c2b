use thiserror::Error;

/// Errors shared across all diagnostic modules.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum CoreError {
    #[error("matrix is not square: row {row} has length {len}, expected {expected}")]
    NonSquare { row: usize, len: usize, expected: usize },

    #[error("negative entry {value} at ({row}, {col})")]
    NegativeEntry { row: usize, col: usize, value: f64 },

    #[error("row {row} sums to {sum}, outside tolerance {tol} of 1")]
    RowSumOutOfTolerance { row: usize, sum: f64, tol: f64 },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("kernel is not irreducible: {components} strongly connected components")]
    NotIrreducible { components: usize },

    #[error("power iteration did not converge within {max_iters} iterations (residual {residual})")]
    NotConverged { max_iters: usize, residual: f64 },

    #[error("time scale tau must be at least 1")]
    TauZero,

    #[error("fine lens does not refine the coarse lens: states {a} and {b} share a fine block but not a coarse block")]
    NotARefinement { a: usize, b: usize },

    #[error("path enumeration would produce {paths} paths, over the cap {cap}")]
    ExplosionCap { paths: u128, cap: u128 },

    #[error("shape mismatch: {context}")]
    ShapeMismatch { context: String },

    #[error("reversibility-on-support violated: edge ({from}, {to}) has no reverse transition")]
    RevViolation { from: usize, to: usize },

    #[error("one-form has no value on edge ({from}, {to})")]
    EdgeMissing { from: usize, to: usize },

    #[error("row {row} would be left with no positive mass after edge deletion")]
    RowStarved { row: usize },

    #[error("kernel is not reversible with respect to the given distribution (violation {violation})")]
    NotReversible { violation: f64 },

    #[error("state {state} has zero stationary mass; full support required")]
    ZeroMassState { state: usize },

    #[error("enumeration over 2^{n} predicates exceeds the budget of 2^{budget}")]
    BudgetExceeded { n: usize, budget: usize },

    #[error("bad window [{start}, {end}] for horizon {horizon}")]
    BadWindow { start: usize, end: usize, horizon: usize },

    #[error("invalid distribution: {context}")]
    InvalidDistribution { context: String },

    #[error("invalid lens: {context}")]
    InvalidLens { context: String },

    #[error("invalid tolerance configuration: {context}")]
    InvalidConfig { context: String },
}

pub type Result<T> = std::result::Result<T, CoreError>;
