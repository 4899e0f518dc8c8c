use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::FullRegression;
use crate::scalar::Real;

/// Optimal residuals below this make the relative gap meaningless.
const ZERO_RESIDUAL: f64 = 1e-12;

fn check_len(a: usize, b: usize) -> Result<()> {
    if a != b {
        return Err(Error::LengthMismatch { expected: b, actual: a });
    }
    Ok(())
}

/// `‖est - exact‖₂²`.
pub fn l2_sq_error<T: Real>(est: &[T], exact: &[T]) -> Result<T> {
    check_len(est.len(), exact.len())?;
    Ok(est.iter().zip(exact).fold(T::zero(), |acc, (&a, &b)| acc + (a - b) * (a - b)))
}

/// `‖est - exact‖₂² / ‖exact‖₂²`; errors on an all-zero `exact`.
pub fn normalized_l2_sq<T: Real>(est: &[T], exact: &[T]) -> Result<T> {
    let denom = exact.iter().fold(T::zero(), |acc, &v| acc + v * v);
    if denom == T::zero() {
        check_len(est.len(), exact.len())?;
        return Err(Error::InvalidInput("normalized error undefined for a zero exact vector".into()));
    }
    Ok(l2_sq_error(est, exact)? / denom)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ObjectiveGap<T: Real = f64> {
    pub value: T,
    /// The optimal residual was (numerically) zero, so `value` is the
    /// absolute gap `‖Aφ̂ - b‖₂` instead of a ratio.
    pub absolute: bool,
}

/// `(‖Aφ̂ - b‖₂ - ‖Aφ - b‖₂) / ‖Aφ - b‖₂` with `φ` the exact solution.
pub fn relative_objective_error<T: Real>(fr: &FullRegression<T>, est: &[T]) -> Result<ObjectiveGap<T>> {
    let phi = crate::exact::normal_equations_banzhaf(fr)?;
    let optimal = fr.residual_norm(&phi)?;
    let achieved = fr.residual_norm(est)?;
    if optimal < T::lit(ZERO_RESIDUAL) {
        return Ok(ObjectiveGap {
            value: achieved - optimal,
            absolute: true,
        });
    }
    Ok(ObjectiveGap {
        value: (achieved - optimal) / optimal,
        absolute: false,
    })
}

/// Nearest-rank percentile of an ascending slice: the element at 1-based
/// rank `ceil(p * N)` (clamped to `1..=N`).
pub fn percentile_nearest_rank(sorted: &[f64], p: f64) -> f64 {
    if sorted.is_empty() {
        return f64::NAN;
    }
    let rank = (p * sorted.len() as f64).ceil() as usize;
    sorted[rank.clamp(1, sorted.len()) - 1]
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Summary {
    pub median: f64,
    pub p25: f64,
    pub p75: f64,
}

impl Summary {
    pub fn of(values: &[f64]) -> Self {
        let mut sorted = values.to_vec();
        sorted.sort_by(f64::total_cmp);
        Self {
            median: percentile_nearest_rank(&sorted, 0.5),
            p25: percentile_nearest_rank(&sorted, 0.25),
            p75: percentile_nearest_rank(&sorted, 0.75),
        }
    }
}
