//! Parameter schedules for the limit experiments.

use crate::error::{Result, WmpError};

/// `t_k = 10^-k` for `k = 1..=10`.
pub fn default_t_schedule() -> Vec<f64> {
    (1..=10).map(|k| 10f64.powi(-k)).collect()
}

/// `lambda_k = 10^k` for `k = 0..=8`.
pub fn default_lambda_schedule() -> Vec<f64> {
    (0..=8).map(|k| 10f64.powi(k)).collect()
}

/// Geometric sequence from `start` to `end` inclusive with `count` points.
pub fn geometric(start: f64, end: f64, count: usize) -> Result<Vec<f64>> {
    if !(start > 0.0 && end > 0.0 && start.is_finite() && end.is_finite()) {
        return Err(WmpError::InvalidArgument(format!(
            "geometric endpoints must be positive and finite, got {start}:{end}"
        )));
    }
    if count < 2 {
        return Ok(vec![start]);
    }
    let (la, lb) = (start.log10(), end.log10());
    let step = (lb - la) / (count - 1) as f64;
    Ok((0..count)
        .map(|k| {
            if k == count - 1 {
                end
            } else {
                10f64.powf(la + step * k as f64)
            }
        })
        .collect())
}

/// Geometric sequence with one point per decade between the endpoints
/// (at least two points).
pub fn by_decades(start: f64, end: f64) -> Result<Vec<f64>> {
    if !(start > 0.0 && end > 0.0) {
        return Err(WmpError::InvalidArgument(format!(
            "schedule endpoints must be positive, got {start}:{end}"
        )));
    }
    let decades = (end / start).log10().abs().round() as usize;
    geometric(start, end, decades.max(1) + 1)
}

/// Checks that a `t` schedule is non-empty, positive and strictly decreasing.
pub fn validate_decreasing(schedule: &[f64]) -> Result<()> {
    validate(schedule, |a, b| b < a, "strictly decreasing")
}

/// Checks that a `lambda` schedule is non-empty, positive and strictly increasing.
pub fn validate_increasing(schedule: &[f64]) -> Result<()> {
    validate(schedule, |a, b| b > a, "strictly increasing")
}

fn validate(schedule: &[f64], ordered: impl Fn(f64, f64) -> bool, what: &str) -> Result<()> {
    if schedule.is_empty() {
        return Err(WmpError::InvalidArgument("schedule is empty".into()));
    }
    if let Some(bad) = schedule.iter().find(|&&t| !(t > 0.0 && t.is_finite())) {
        return Err(WmpError::InvalidArgument(format!(
            "schedule values must be positive and finite, got {bad}"
        )));
    }
    if schedule.windows(2).any(|w| !ordered(w[0], w[1])) {
        return Err(WmpError::InvalidArgument(format!("schedule must be {what}")));
    }
    Ok(())
}

/// True when `errors` never increases by more than `floor` between
/// consecutive entries; smaller changes are rounding noise.
pub fn nonincreasing_above_floor(errors: &[f64], floor: f64) -> bool {
    errors.windows(2).all(|w| w[1] <= w[0] + floor)
}
