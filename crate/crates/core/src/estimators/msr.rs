use std::time::Instant;

use super::{EstimateReport, Estimator, RunFlag};
use crate::error::{Error, Result};
use crate::games::Game;
use crate::mask::SubsetMask;
use crate::rng::stream;
use crate::scalar::Real;

/// Maximum Sample Reuse: one pool of `m` uniform coalitions; each player's
/// estimate is the mean value over coalitions containing it minus the mean
/// over coalitions excluding it. A player with an empty side gets `0` and a
/// [`RunFlag::EmptySide`] flag.
pub fn msr_banzhaf<T: Real, G: Game<T> + ?Sized>(game: &mut G, m: usize, seed: u64) -> Result<EstimateReport<T>> {
    if m < 2 {
        return Err(Error::InvalidInput(format!("msr needs at least 2 samples, got {m}")));
    }
    let n = game.n_players();
    let start = Instant::now();
    let before = game.eval_count();
    let mut rng = stream(seed, Estimator::Msr.name());

    let mut sum_in = vec![T::zero(); n];
    let mut sum_out = vec![T::zero(); n];
    let mut cnt_in = vec![0usize; n];
    for _ in 0..m {
        let s = SubsetMask::random(n, &mut rng);
        let v = game.evaluate(s);
        for i in 0..n {
            if s.contains(i) {
                sum_in[i] += v;
                cnt_in[i] += 1;
            } else {
                sum_out[i] += v;
            }
        }
    }

    let mut flags = Vec::new();
    let values = (0..n)
        .map(|i| {
            let cnt_out = m - cnt_in[i];
            if cnt_in[i] == 0 || cnt_out == 0 {
                flags.push(RunFlag::EmptySide { player: i });
                T::zero()
            } else {
                sum_in[i] / T::from_count(cnt_in[i]) - sum_out[i] / T::from_count(cnt_out)
            }
        })
        .collect();
    Ok(EstimateReport {
        estimator: Estimator::Msr,
        values,
        m,
        evals: game.eval_count() - before,
        seed,
        wall_seconds: start.elapsed().as_secs_f64(),
        flags,
    })
}
