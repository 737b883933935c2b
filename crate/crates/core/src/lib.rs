//! Deterministic diagnostics for finite Markov dynamics under coarse
//! observation.
//!
//! The crate covers six instrument families over a shared kernel layer:
//!
//! - [`kernel`]: distributions, row-stochastic kernels, propagation,
//!   stationary solves, detailed balance, commutators.
//! - [`lens`]: block lenses, prototype lifts, the induced packaging endomap,
//!   and its idempotence/retention diagnostics.
//! - [`paths`]: finite-horizon path laws, KL divergence with explicit
//!   support conventions, path reversal asymmetry, and the coarse-graining
//!   audit that rules out false-positive arrows.
//! - [`protocol`]: autonomous phase-lifted protocol chains, the clock audit
//!   separating genuine drive from hidden schedules, stroboscopic products.
//! - [`cycles`]: support graphs, log-ratio edge forms, cycle bases,
//!   affinities, exactness/potential reconstruction, edge gating, spectral
//!   gaps.
//! - [`forcing`]: definability counting, Monte Carlo confirmation, and
//!   predicate-driven lens extension.
//! - [`capacity`]: discrete-time convolution bridges, throughput audits,
//!   latency floors, divergence verdicts, and route-mismatch gain control.
//!
//! All computations follow the row-vector convention (`mu * P`) and are
//! deterministic: identical inputs give bit-identical outputs.

pub mod capacity;
pub mod config;
pub mod cycles;
pub mod error;
pub mod forcing;
pub mod kernel;
pub mod lens;
pub mod matrix;
pub mod paths;
pub mod protocol;

pub use config::ToleranceConfig;
pub use error::{CoreError, Result};
pub use kernel::{Dist, Kernel};
pub use lens::{Lens, PrototypeSet};

/// Default cap on exhaustive path enumeration (`|Z|^(T+1)` table entries).
pub const DEFAULT_PATH_CAP: u128 = 10_000_000;
