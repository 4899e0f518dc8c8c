//! Regression baselines for Shapley values: a Kernel SHAP variant (sizes
//! sampled by kernel weight) and a Leverage SHAP variant (sizes sampled by
//! leverage score), both solving the efficiency-constrained weighted least
//! squares problem.
//!
//! Both variants sample with replacement and pair every coalition with its
//! complement. The constraint `Σ x_i = v([n]) - v(∅)` is eliminated by
//! substituting `x_{n-1} = total - Σ_{i<n-1} x_i`.

use std::time::Instant;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::seq::index;

use crate::error::{Error, Result};
use crate::estimators::{EstimateReport, Estimator, RegressionKind, RunFlag, SampledRegression};
use crate::exact::{binomial, DEFAULT_ENUMERATION_LIMIT};
use crate::games::Game;
use crate::linalg::{least_squares_minnorm, DenseMatrix};
use crate::mask::SubsetMask;
use crate::rng::stream;
use crate::scalar::Real;

/// Shapley kernel `w(s) = (n-1) / (C(n,s) s (n-s))` for `1 <= s <= n-1`.
pub fn shapley_kernel_weight<T: Real>(n: usize, s: usize) -> Result<T> {
    if s == 0 || s >= n {
        return Err(Error::InvalidInput(format!("kernel weight undefined for s = {s}, n = {n}")));
    }
    Ok(T::lit((n - 1) as f64 / (binomial(n, s) * s as f64 * (n - s) as f64)))
}

/// Gram matrix `Σ_S w(|S|) z_S z_S^T` over all proper non-empty coalitions,
/// in closed form: diagonal `Σ_s C(n-1,s-1) w(s)`, off-diagonal
/// `Σ_s C(n-2,s-2) w(s)`.
pub fn kernel_gram<T: Real>(n: usize) -> Result<DenseMatrix<T>> {
    if n < 2 {
        return Err(Error::InvalidInput("Shapley regression needs n >= 2".into()));
    }
    let mut diag = 0.0;
    let mut off = 0.0;
    for s in 1..n {
        let w: f64 = shapley_kernel_weight(n, s)?;
        diag += binomial(n - 1, s - 1) * w;
        if s >= 2 {
            off += binomial(n - 2, s - 2) * w;
        }
    }
    Ok(DenseMatrix::from_fn(n, n, |r, c| T::lit(if r == c { diag } else { off })))
}

/// Gram of the full weighted design after eliminating the last coordinate:
/// `P^T G P` with columns of `P` equal to `e_i - e_{n-1}`.
pub fn reduced_full_gram<T: Real>(n: usize) -> Result<DenseMatrix<T>> {
    let g = kernel_gram::<T>(n)?;
    let last = n - 1;
    Ok(DenseMatrix::from_fn(last, last, |i, j| {
        g[(i, j)] - g[(i, last)] - g[(last, j)] + g[(last, last)]
    }))
}

/// Leverage score `ℓ(s)` of a weighted row of size `s` in the design with
/// the efficiency constraint eliminated, returned for `s = 1..n-1` (index
/// `s - 1`). The scores depend only on the column space of that design, so
/// they are symmetric under `s ↦ n - s` and sum (with multiplicity
/// `C(n,s)`) to `n - 1`.
pub fn shapley_leverage_scores<T: Real>(n: usize) -> Result<Vec<T>> {
    let g = reduced_full_gram::<T>(n)?;
    (1..n)
        .map(|s| {
            // first s players in, last player out: the reduced row is z[..n-1]
            let z: Vec<T> = (0..n - 1).map(|i| if i < s { T::one() } else { T::zero() }).collect();
            let y = least_squares_minnorm(&g, &z)?.x;
            let quad = z.iter().zip(&y).fold(T::zero(), |acc, (&a, &b)| acc + a * b);
            Ok(shapley_kernel_weight::<T>(n, s)? * quad)
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum SizeLaw {
    Kernel,
    Leverage,
}

/// Kernel SHAP variant: sizes drawn with probability `∝ 1/(s(n-s))`.
pub fn kernel_shap<T: Real, G: Game<T> + ?Sized>(
    game: &mut G,
    m: usize,
    seed: u64,
) -> Result<(EstimateReport<T>, SampledRegression<T>)> {
    sampled(game, m, seed, SizeLaw::Kernel)
}

/// Leverage SHAP variant: sizes drawn with probability `∝ C(n,s) ℓ(s)`.
pub fn leverage_shap<T: Real, G: Game<T> + ?Sized>(
    game: &mut G,
    m: usize,
    seed: u64,
) -> Result<(EstimateReport<T>, SampledRegression<T>)> {
    sampled(game, m, seed, SizeLaw::Leverage)
}

/// Both baselines in full-enumeration mode: every proper non-empty
/// coalition appears once with weight `w(|S|)`. Costs `2^n` evaluations.
pub fn shapley_regression_exhaustive<T: Real, G: Game<T> + ?Sized>(game: &mut G) -> Result<EstimateReport<T>> {
    let n = game.n_players();
    if n < 2 {
        return Err(Error::InvalidInput("Shapley regression needs n >= 2".into()));
    }
    if n > DEFAULT_ENUMERATION_LIMIT {
        return Err(Error::EnumerationTooLarge {
            n,
            limit: DEFAULT_ENUMERATION_LIMIT,
        });
    }
    let start = Instant::now();
    let before = game.eval_count();
    let weights: Vec<T> = (1..n).map(|s| shapley_kernel_weight::<T>(n, s).map(|w| w.sqrt())).collect::<Result<_>>()?;
    let rows: Vec<(SubsetMask, T)> = SubsetMask::all(n)
        .filter(|s| !s.is_empty() && s.len() < n)
        .map(|s| (s, weights[s.len() - 1]))
        .collect();
    let (report, _) = solve(game, rows, Estimator::KernelShap, (1usize << n) - 2, 0, false, start, before)?;
    Ok(report)
}

fn sampled<T: Real, G: Game<T> + ?Sized>(
    game: &mut G,
    m: usize,
    seed: u64,
    law: SizeLaw,
) -> Result<(EstimateReport<T>, SampledRegression<T>)> {
    let n = game.n_players();
    if n < 2 {
        return Err(Error::InvalidInput("Shapley regression needs n >= 2".into()));
    }
    if m < n + 2 {
        return Err(Error::BudgetBelowFeatureCount { m, n });
    }
    if m % 2 == 1 {
        return Err(Error::OddBudget(m));
    }
    let start = Instant::now();
    let before = game.eval_count();
    let estimator = match law {
        SizeLaw::Kernel => Estimator::KernelShap,
        SizeLaw::Leverage => Estimator::LeverageShap,
    };

    // per-size mass q(s), and per-coalition probability q(s) / C(n,s)
    let mass: Vec<f64> = match law {
        SizeLaw::Kernel => (1..n).map(|s| 1.0 / (s * (n - s)) as f64).collect(),
        SizeLaw::Leverage => shapley_leverage_scores::<f64>(n)?
            .into_iter()
            .enumerate()
            .map(|(k, l)| binomial(n, k + 1) * l)
            .collect(),
    };
    let total_mass: f64 = mass.iter().sum();
    let scale: Vec<T> = (1..n)
        .map(|s| {
            let p_subset = mass[s - 1] / total_mass / binomial(n, s);
            let w: f64 = shapley_kernel_weight(n, s)?;
            Ok(T::lit((w / p_subset).sqrt()))
        })
        .collect::<Result<_>>()?;

    let sizes = WeightedIndex::new(&mass).map_err(|e| Error::InvalidInput(e.to_string()))?;
    let mut rng = stream(seed, estimator.name());
    let mut rows = Vec::with_capacity(m);
    for _ in 0..m / 2 {
        let s = sizes.sample(&mut rng) + 1;
        let bits = index::sample(&mut rng, n, s).into_iter().fold(0u64, |acc, i| acc | 1 << i);
        let z = SubsetMask::from_bits_unchecked(bits, n);
        rows.push((z, scale[s - 1]));
        rows.push((z.complement(), scale[n - s - 1]));
    }
    solve(game, rows, estimator, m, seed, true, start, before)
}

#[allow(clippy::too_many_arguments)]
fn solve<T: Real, G: Game<T> + ?Sized>(
    game: &mut G,
    rows: Vec<(SubsetMask, T)>,
    estimator: Estimator,
    m: usize,
    seed: u64,
    paired: bool,
    start: Instant,
    before: u64,
) -> Result<(EstimateReport<T>, SampledRegression<T>)> {
    let n = game.n_players();
    let last = n - 1;
    let empty = game.evaluate(SubsetMask::empty(n));
    let full = game.evaluate(SubsetMask::full(n));
    let total = full - empty;

    let mut design = DenseMatrix::zeros(rows.len(), last);
    let mut target = Vec::with_capacity(rows.len());
    let mut masks = Vec::with_capacity(rows.len());
    for (r, &(s, weight)) in rows.iter().enumerate() {
        let v = game.evaluate(s) - empty;
        let z_last = if s.contains(last) { T::one() } else { T::zero() };
        for (i, a) in design.row_mut(r).iter_mut().enumerate() {
            let zi = if s.contains(i) { T::one() } else { T::zero() };
            *a = weight * (zi - z_last);
        }
        target.push(weight * (v - z_last * total));
        masks.push(s);
    }

    let sol = least_squares_minnorm(&design, &target)?;
    let mut flags = Vec::new();
    if !sol.is_full_rank() {
        flags.push(RunFlag::RankDeficient { rank: sol.rank, cols: last });
    }
    let mut values = sol.x;
    let head: T = values.iter().copied().sum();
    values.push(total - head);

    let report = EstimateReport {
        estimator,
        values,
        m,
        evals: game.eval_count() - before,
        seed,
        wall_seconds: start.elapsed().as_secs_f64(),
        flags,
    };
    let regression = SampledRegression {
        kind: RegressionKind::Shapley,
        n,
        design,
        target,
        masks,
        paired,
    };
    Ok((report, regression))
}
