//! Thresholds for every numerical decision the library makes.

use crate::error::{Result, WmpError};

/// Rank, invertibility and verification thresholds.
///
/// `rank_rtol` is the relative singular-value cutoff: singular values at or
/// below `rank_rtol * sigma_max` count as zero. When unset, the cutoff is
/// `max(rows, cols) * f64::EPSILON`, evaluated per matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ToleranceConfig {
    pub rank_rtol: Option<f64>,
    /// Largest condition number accepted as invertible.
    pub inv_cond_max: f64,
    pub verify_atol: f64,
    pub verify_rtol: f64,
}

impl Default for ToleranceConfig {
    fn default() -> Self {
        ToleranceConfig {
            rank_rtol: None,
            inv_cond_max: 1e12,
            verify_atol: 1e-9,
            verify_rtol: 1e-9,
        }
    }
}

impl ToleranceConfig {
    pub fn validate(&self) -> Result<()> {
        if let Some(r) = self.rank_rtol {
            if !(r > 0.0 && r < 1.0) {
                return Err(WmpError::InvalidArgument(format!(
                    "rank_rtol must lie in (0, 1), got {r}"
                )));
            }
        }
        for (name, v) in [
            ("inv_cond_max", self.inv_cond_max),
            ("verify_atol", self.verify_atol),
            ("verify_rtol", self.verify_rtol),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(WmpError::InvalidArgument(format!(
                    "{name} must be strictly positive and finite, got {v}"
                )));
            }
        }
        Ok(())
    }

    /// Relative cutoff used for a `rows x cols` matrix.
    pub fn rank_rtol_for(&self, rows: usize, cols: usize) -> f64 {
        self.rank_rtol
            .unwrap_or_else(|| rows.max(cols).max(1) as f64 * f64::EPSILON)
    }

    /// Absolute singular-value cutoff for a `rows x cols` matrix with largest
    /// singular value `sigma_max`.
    pub fn rank_cutoff(&self, rows: usize, cols: usize, sigma_max: f64) -> f64 {
        self.rank_rtol_for(rows, cols) * sigma_max
    }

    /// Threshold for a residual whose natural scale is `scale`.
    pub fn verify_threshold(&self, scale: f64) -> f64 {
        self.verify_atol + self.verify_rtol * scale
    }
}
