//! Brute-force ground truth by enumerating all `2^n` coalitions.

use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::games::Game;
use crate::linalg::{least_squares_minnorm, norm2, DenseMatrix};
use crate::mask::SubsetMask;
use crate::scalar::Real;

pub const DEFAULT_ENUMERATION_LIMIT: usize = 20;

/// `γ` below this counts as `b ∈ span(A)`.
pub const SPAN_TOLERANCE: f64 = 1e-10;

const CHUNK: usize = 1 << 12;

/// Exact attribution vector with provenance.
#[derive(Debug, Clone, Serialize)]
pub struct Attribution<T: Real = f64> {
    pub values: Vec<T>,
    pub method: &'static str,
    pub evals: u64,
    pub wall_seconds: f64,
}

/// Values of every coalition in ascending mask order (exactly `2^n`
/// evaluations).
pub fn tabulate<T: Real, G: Game<T> + ?Sized>(game: &mut G, limit: usize) -> Result<Vec<T>> {
    let n = game.n_players();
    if n > limit {
        return Err(Error::EnumerationTooLarge { n, limit });
    }
    Ok(SubsetMask::all(n).map(|m| game.evaluate(m)).collect())
}

pub fn exact_banzhaf<T: Real, G: Game<T> + ?Sized>(game: &mut G) -> Result<Attribution<T>> {
    exact_banzhaf_with_limit(game, DEFAULT_ENUMERATION_LIMIT)
}

pub fn exact_banzhaf_with_limit<T: Real, G: Game<T> + ?Sized>(game: &mut G, limit: usize) -> Result<Attribution<T>> {
    let start = Instant::now();
    let n = game.n_players();
    let table = tabulate(game, limit)?;
    Ok(Attribution {
        values: banzhaf_from_table(n, &table),
        method: "exact-banzhaf",
        evals: table.len() as u64,
        wall_seconds: start.elapsed().as_secs_f64(),
    })
}

pub fn exact_shapley<T: Real, G: Game<T> + ?Sized>(game: &mut G) -> Result<Attribution<T>> {
    exact_shapley_with_limit(game, DEFAULT_ENUMERATION_LIMIT)
}

pub fn exact_shapley_with_limit<T: Real, G: Game<T> + ?Sized>(game: &mut G, limit: usize) -> Result<Attribution<T>> {
    let start = Instant::now();
    let n = game.n_players();
    let table = tabulate(game, limit)?;
    Ok(Attribution {
        values: shapley_from_table(n, &table),
        method: "exact-shapley",
        evals: table.len() as u64,
        wall_seconds: start.elapsed().as_secs_f64(),
    })
}

/// `φ_i = 2^{-(n-1)} Σ_{S ∌ i} [v(S ∪ {i}) - v(S)]` from a full value table.
pub fn banzhaf_from_table<T: Real>(n: usize, table: &[T]) -> Vec<T> {
    let sums = accumulate(n, table, |_, _| (T::one(), -T::one()));
    let scale = T::lit(2f64.powi(1 - n as i32));
    sums.into_iter().map(|s| s * scale).collect()
}

/// `φ_i = (1/n) Σ_{S ∌ i} C(n-1, |S|)^{-1} [v(S ∪ {i}) - v(S)]`.
pub fn shapley_from_table<T: Real>(n: usize, table: &[T]) -> Vec<T> {
    // weight of a coalition of size s as the "without i" side
    let w: Vec<T> = (0..n)
        .map(|s| T::one() / (T::from_count(n) * T::lit(binomial(n - 1, s))))
        .collect();
    accumulate(n, table, |size, _| {
        let plus = if size > 0 { w[size - 1] } else { T::zero() };
        let minus = if size < n { w[size] } else { T::zero() };
        (plus, -minus)
    })
}

/// `Σ_T coef(T, i) v(T)` where coef is `in_w` if `i ∈ T` else `out_w`,
/// computed in fixed-size chunks so the reduction order is deterministic.
fn accumulate<T: Real>(n: usize, table: &[T], weights: impl Fn(usize, usize) -> (T, T) + Sync) -> Vec<T> {
    let partials: Vec<Vec<T>> = table
        .par_chunks(CHUNK)
        .enumerate()
        .map(|(c, chunk)| {
            let mut acc = vec![T::zero(); n];
            for (off, &v) in chunk.iter().enumerate() {
                let bits = (c * CHUNK + off) as u64;
                let size = bits.count_ones() as usize;
                let (in_w, out_w) = weights(size, n);
                for (i, a) in acc.iter_mut().enumerate() {
                    *a += if bits >> i & 1 == 1 { in_w * v } else { out_w * v };
                }
            }
            acc
        })
        .collect();
    partials.into_iter().fold(vec![T::zero(); n], |mut total, p| {
        total.iter_mut().zip(p).for_each(|(t, x)| *t += x);
        total
    })
}

pub(crate) fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, j| acc * (n - j) as f64 / (j + 1) as f64)
}

/// The full regression problem: rows `z^T / 2` for `z ∈ {-1, 1}^n` in
/// ascending mask order (bit set maps to `+1`), and
/// `b_z = v(z) - (v([n]) - v(∅)) / 2`.
///
/// Every column of `A` sums to zero, so the constant shift leaves the
/// least-squares solution untouched. It places an additive game
/// `c + Σ_{i∈S} w_i` at residual exactly `c·1`, which makes `γ` vanish for
/// additive games without an intercept.
#[derive(Debug, Clone)]
pub struct FullRegression<T: Real = f64> {
    pub n: usize,
    pub design: DenseMatrix<T>,
    pub target: Vec<T>,
}

pub fn build_full_regression<T: Real, G: Game<T> + ?Sized>(game: &mut G) -> Result<FullRegression<T>> {
    build_full_regression_with_limit(game, DEFAULT_ENUMERATION_LIMIT)
}

pub fn build_full_regression_with_limit<T: Real, G: Game<T> + ?Sized>(game: &mut G, limit: usize) -> Result<FullRegression<T>> {
    let n = game.n_players();
    let target = tabulate(game, limit)?;
    Ok(FullRegression::from_table(n, target))
}

impl<T: Real> FullRegression<T> {
    pub fn from_table(n: usize, mut target: Vec<T>) -> Self {
        let half = T::lit(0.5);
        if let (Some(&first), Some(&last)) = (target.first(), target.last()) {
            let shift = (last - first) * half;
            target.iter_mut().for_each(|b| *b -= shift);
        }
        let design = DenseMatrix::from_fn(target.len(), n, |r, c| if r >> c & 1 == 1 { half } else { -half });
        Self { n, design, target }
    }

    /// `‖A x - b‖_2`.
    pub fn residual_norm(&self, x: &[T]) -> Result<T> {
        let ax = self.design.mul_vec(x)?;
        let r: Vec<T> = ax.iter().zip(&self.target).map(|(&a, &b)| a - b).collect();
        Ok(norm2(&r))
    }
}

/// Least-squares solution of the full regression.
pub fn regression_banzhaf<T: Real>(fr: &FullRegression<T>) -> Result<Vec<T>> {
    Ok(least_squares_minnorm(&fr.design, &fr.target)?.x)
}

/// Closed form `2^{-(n-2)} A^T b`, valid because `A^T A = 2^{n-2} I`.
pub fn normal_equations_banzhaf<T: Real>(fr: &FullRegression<T>) -> Result<Vec<T>> {
    let scale = T::lit(2f64.powi(2 - fr.n as i32));
    Ok(fr.design.tr_mul_vec(&fr.target)?.into_iter().map(|v| v * scale).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Gamma<T: Real = f64> {
    pub value: T,
    /// `‖Aφ‖ = 0`, so the ratio is undefined and reported as `+∞`.
    pub infinite: bool,
}

impl<T: Real> Gamma<T> {
    pub fn in_span(&self) -> bool {
        !self.infinite && self.value < T::lit(SPAN_TOLERANCE)
    }
}

/// `γ = ‖Aφ - b‖² / ‖Aφ‖²` at the exact Banzhaf vector `φ`.
pub fn gamma<T: Real>(fr: &FullRegression<T>) -> Result<Gamma<T>> {
    let phi = normal_equations_banzhaf(fr)?;
    let fit = fr.design.mul_vec(&phi)?;
    let fit_norm = norm2(&fit);
    if fit_norm == T::zero() {
        return Ok(Gamma {
            value: T::infinity(),
            infinite: true,
        });
    }
    let res = fr.residual_norm(&phi)?;
    let ratio = res / fit_norm;
    Ok(Gamma {
        value: ratio * ratio,
        infinite: false,
    })
}
