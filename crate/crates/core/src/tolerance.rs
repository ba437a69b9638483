//! Numeric thresholds shared by the checker, the bisection and the gap solver.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ToleranceConfig {
    /// Eigenvalue band, relative to the largest entry of the power matrix.
    pub eig_tol: f64,
    /// Width of the final exponent bracket.
    pub bisect_tol: f64,
    /// Projected-gradient stationarity threshold, relative to the power matrix scale.
    pub qp_tol: f64,
    /// Exponents at or above this are reported as unbounded.
    pub p_max: f64,
    /// Iteration cap per bipartition cell.
    pub qp_max_iter: usize,
}

impl Default for ToleranceConfig {
    fn default() -> Self {
        Self {
            eig_tol: 1e-9,
            bisect_tol: 1e-6,
            qp_tol: 1e-10,
            p_max: 64.0,
            qp_max_iter: 100_000,
        }
    }
}

impl ToleranceConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("eig_tol", self.eig_tol),
            ("bisect_tol", self.bisect_tol),
            ("qp_tol", self.qp_tol),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::BadTolerance(format!(
                    "{name} must be positive, got {v}"
                )));
            }
        }
        if !(self.p_max.is_finite() && self.p_max > 1.0) {
            return Err(Error::BadTolerance(format!(
                "p_max must exceed 1, got {}",
                self.p_max
            )));
        }
        if self.qp_max_iter == 0 {
            return Err(Error::BadTolerance("qp_max_iter must be positive".into()));
        }
        Ok(())
    }
}
