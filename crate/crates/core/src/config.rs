use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};

/// Numeric tolerances shared by kernel validation, stationary solves, and
/// support-graph construction.
///
/// `zero_tol` is the structural-zero threshold: entries below it are treated
/// as exact zeros when building support graphs and when clamping during
/// kernel validation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ToleranceConfig {
    pub row_sum_tol: f64,
    pub stationarity_tol: f64,
    pub zero_tol: f64,
    pub max_power_iters: usize,
}

impl Default for ToleranceConfig {
    fn default() -> Self {
        Self {
            row_sum_tol: 1e-9,
            stationarity_tol: 1e-12,
            zero_tol: 1e-15,
            max_power_iters: 1_000_000,
        }
    }
}

impl ToleranceConfig {
    /// Accepts rows whose sums carry up to `row_sum_tol` of rounding slack.
    pub fn with_row_sum_tol(mut self, tol: f64) -> Self {
        self.row_sum_tol = tol;
        self
    }

    pub fn with_stationarity_tol(mut self, tol: f64) -> Self {
        self.stationarity_tol = tol;
        self
    }

    pub fn with_zero_tol(mut self, tol: f64) -> Self {
        self.zero_tol = tol;
        self
    }

    pub fn with_max_power_iters(mut self, iters: usize) -> Self {
        self.max_power_iters = iters;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !self.row_sum_tol.is_finite() || self.row_sum_tol <= 0.0 {
            return Err(CoreError::InvalidConfig {
                context: format!("row_sum_tol must be positive, got {}", self.row_sum_tol),
            });
        }
        if !self.stationarity_tol.is_finite() || self.stationarity_tol <= 0.0 {
            return Err(CoreError::InvalidConfig {
                context: format!("stationarity_tol must be positive, got {}", self.stationarity_tol),
            });
        }
        if !self.zero_tol.is_finite() || self.zero_tol <= 0.0 {
            return Err(CoreError::InvalidConfig {
                context: format!("zero_tol must be positive, got {}", self.zero_tol),
            });
        }
        if self.max_power_iters == 0 {
            return Err(CoreError::InvalidConfig {
                context: "max_power_iters must be at least 1".to_string(),
            });
        }
        Ok(())
    }
}
