//! Sampling-quality diagnostics for subsampled regressions.

use serde::Serialize;

use super::{sym_eigen, sym_eigen_decomp, DenseMatrix};
use crate::error::{Error, Result};
use crate::estimators::{RegressionKind, SampledRegression};
use crate::scalar::Real;
use crate::shapley::reduced_full_gram;

/// Eigenvalues below `COND_CUTOFF * lambda_max` count as zero.
pub const COND_CUTOFF: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConditionNumber<T: Real = f64> {
    pub value: T,
    /// Set when the smallest eigenvalue is numerically non-positive.
    pub infinite: bool,
}

impl<T: Real> ConditionNumber<T> {
    fn from_extremes(lo: T, hi: T) -> Self {
        if hi <= T::zero() || lo <= T::lit(COND_CUTOFF) * hi {
            Self {
                value: T::infinity(),
                infinite: true,
            }
        } else {
            Self {
                value: hi / lo,
                infinite: false,
            }
        }
    }
}

/// Condition number of `K = G^{-1/2} Ã^T Ã G^{-1/2}`, where `G` is the Gram
/// matrix of the full (unsampled) design.
///
/// For Banzhaf regressions `G = 2^{n-2} I`, so `K` is a power-of-two multiple
/// of `Ã^T Ã` and full enumeration gives exactly `1`. For Shapley regressions
/// `G` is the kernel-weighted Gram restricted to the constraint-eliminated
/// coordinates.
pub fn condition_number_k<T: Real>(sr: &SampledRegression<T>) -> Result<ConditionNumber<T>> {
    if sr.design.rows() == 0 {
        return Err(Error::InvalidInput("empty sampled design".into()));
    }
    match sr.kind {
        RegressionKind::Banzhaf => {
            let mut k = sr.design.gram();
            k.scale(T::lit(2f64.powi(2 - sr.n as i32)));
            let ev = sym_eigen(&k)?;
            Ok(ConditionNumber::from_extremes(ev[0], ev[ev.len() - 1]))
        }
        RegressionKind::Shapley => {
            let reference = reduced_full_gram::<T>(sr.n)?;
            whitened_condition(&sr.design.gram(), &reference)
        }
    }
}

/// Condition number of `R^{-1/2} S R^{-1/2}` for symmetric `S` and
/// symmetric positive definite `R`.
pub fn whitened_condition<T: Real>(sample: &DenseMatrix<T>, reference: &DenseMatrix<T>) -> Result<ConditionNumber<T>> {
    let e = sym_eigen_decomp(reference)?;
    let c = reference.rows();
    let top = e.values[c - 1];
    if e.values[0] <= T::lit(COND_CUTOFF) * top {
        return Err(Error::InvalidInput("reference Gram matrix is singular".into()));
    }
    let inv_sqrt = DenseMatrix::from_fn(c, c, |r, col| {
        (0..c).fold(T::zero(), |acc, k| {
            acc + e.vectors[(r, k)] * e.vectors[(col, k)] / e.values[k].sqrt()
        })
    });
    let mut k = inv_sqrt.matmul(sample)?.matmul(&inv_sqrt)?;
    for i in 0..c {
        for j in 0..i {
            let avg = (k[(i, j)] + k[(j, i)]) / T::lit(2.0);
            k[(i, j)] = avg;
            k[(j, i)] = avg;
        }
    }
    let ev = sym_eigen(&k)?;
    Ok(ConditionNumber::from_extremes(ev[0], ev[c - 1]))
}

/// `||I - (4/m) Ã^T Ã||_2` for a uniformly sampled Banzhaf design: the
/// empirical distance of the sampled orthonormal basis from isometry.
pub fn spectral_error<T: Real>(sr: &SampledRegression<T>) -> Result<T> {
    if sr.kind != RegressionKind::Banzhaf {
        return Err(Error::InvalidInput("spectral error is defined for Banzhaf designs".into()));
    }
    let m = sr.design.rows();
    if m == 0 {
        return Err(Error::InvalidInput("empty sampled design".into()));
    }
    let mut e = sr.design.gram();
    e.scale(-T::lit(4.0) / T::from_count(m));
    for i in 0..e.rows() {
        e[(i, i)] += T::one();
    }
    let ev = sym_eigen(&e)?;
    Ok(ev[0].abs().max(ev[ev.len() - 1].abs()))
}
