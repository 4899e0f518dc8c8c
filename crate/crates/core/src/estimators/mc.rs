use std::time::Instant;

use super::{EstimateReport, Estimator};
use crate::error::{Error, Result};
use crate::games::Game;
use crate::mask::SubsetMask;
use crate::rng::stream;
use crate::scalar::Real;

/// Samples per player: `ceil(m/n)` for the first `m mod n` players,
/// `floor(m/n)` for the rest. Sums to exactly `m`.
pub fn mc_allocation(n: usize, m: usize) -> Vec<usize> {
    (0..n).map(|i| m / n + usize::from(i < m % n)).collect()
}

/// Monte Carlo Banzhaf: each player averages `v(S ∪ {i}) - v(S)` over its
/// own uniformly drawn coalitions `S ⊆ [n] \ {i}`.
pub fn mc_banzhaf<T: Real, G: Game<T> + ?Sized>(game: &mut G, m: usize, seed: u64) -> Result<EstimateReport<T>> {
    let n = game.n_players();
    if m < n {
        return Err(Error::BudgetBelowFeatureCount { m, n });
    }
    let start = Instant::now();
    let before = game.eval_count();
    let mut rng = stream(seed, Estimator::Mc.name());
    let values = mc_allocation(n, m)
        .into_iter()
        .enumerate()
        .map(|(i, k)| {
            let mut total = T::zero();
            for _ in 0..k {
                let s = SubsetMask::random(n, &mut rng).without(i);
                let with = game.evaluate(s.with(i));
                let without = game.evaluate(s);
                total += with - without;
            }
            total / T::from_count(k)
        })
        .collect();
    Ok(EstimateReport {
        estimator: Estimator::Mc,
        values,
        m,
        evals: game.eval_count() - before,
        seed,
        wall_seconds: start.elapsed().as_secs_f64(),
        flags: Vec::new(),
    })
}
