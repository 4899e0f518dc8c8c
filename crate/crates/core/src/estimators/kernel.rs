//! Kernel Banzhaf: least squares on uniformly (= leverage-score) sampled
//! rows of the `±1/2` design, with and without complement pairing.

use std::time::Instant;

use rand::seq::index;
use rand::Rng;

use super::{subset_count, EstimateReport, Estimator, RunFlag, SampledRegression};
use crate::error::{Error, Result};
use crate::games::Game;
use crate::linalg::least_squares_minnorm;
use crate::mask::{full_bits, SubsetMask};
use crate::rng::stream;
use crate::scalar::Real;

fn check_budget(n: usize, m: usize, paired: bool) -> Result<()> {
    if m <= n {
        return Err(Error::BudgetBelowFeatureCount { m, n });
    }
    if paired && m % 2 == 1 {
        return Err(Error::OddBudget(m));
    }
    if m as u128 > subset_count(n) {
        return Err(Error::BudgetAboveSubsets { m, n });
    }
    Ok(())
}

/// Kernel Banzhaf with paired sampling: `m / 2` coalitions drawn uniformly
/// with replacement, each followed by its complement.
pub fn kernel_banzhaf<T: Real, G: Game<T> + ?Sized>(
    game: &mut G,
    m: usize,
    seed: u64,
) -> Result<(EstimateReport<T>, SampledRegression<T>)> {
    let n = game.n_players();
    check_budget(n, m, true)?;
    let start = Instant::now();
    let mut rng = stream(seed, Estimator::KernelBanzhaf.name());
    let mut masks = Vec::with_capacity(m);
    for _ in 0..m / 2 {
        let z = SubsetMask::random(n, &mut rng);
        masks.push(z);
        masks.push(z.complement());
    }
    solve(game, Estimator::KernelBanzhaf, masks, true, m, seed, start)
}

/// Ablation without pairing: `m` i.i.d. uniform coalitions.
pub fn kernel_banzhaf_unpaired<T: Real, G: Game<T> + ?Sized>(
    game: &mut G,
    m: usize,
    seed: u64,
) -> Result<(EstimateReport<T>, SampledRegression<T>)> {
    let n = game.n_players();
    check_budget(n, m, false)?;
    let start = Instant::now();
    let mut rng = stream(seed, Estimator::KernelBanzhafUnpaired.name());
    let masks = (0..m).map(|_| SubsetMask::random(n, &mut rng)).collect();
    solve(game, Estimator::KernelBanzhafUnpaired, masks, false, m, seed, start)
}

/// Paired sampling without replacement across complement pairs. At
/// `m = 2^n` every coalition appears exactly once and the solve reproduces
/// the full regression.
pub fn kernel_banzhaf_swor<T: Real, G: Game<T> + ?Sized>(
    game: &mut G,
    m: usize,
    seed: u64,
) -> Result<(EstimateReport<T>, SampledRegression<T>)> {
    let n = game.n_players();
    check_budget(n, m, true)?;
    let start = Instant::now();
    let mut rng = stream(seed, Estimator::KernelBanzhafSwor.name());
    // pair representatives: coalitions without the highest-index player
    let pairs = 1usize << (n - 1);
    let mut masks = Vec::with_capacity(m);
    for rep in index::sample(&mut rng, pairs, m / 2) {
        let mut z = SubsetMask::from_bits_unchecked(rep as u64 & full_bits(n), n);
        if rng.random::<bool>() {
            z = z.complement();
        }
        masks.push(z);
        masks.push(z.complement());
    }
    solve(game, Estimator::KernelBanzhafSwor, masks, true, m, seed, start)
}

fn solve<T: Real, G: Game<T> + ?Sized>(
    game: &mut G,
    estimator: Estimator,
    masks: Vec<SubsetMask>,
    paired: bool,
    m: usize,
    seed: u64,
    start: Instant,
) -> Result<(EstimateReport<T>, SampledRegression<T>)> {
    let n = game.n_players();
    let before = game.eval_count();
    let target: Vec<T> = masks.iter().map(|&s| game.evaluate(s)).collect();
    let evals = game.eval_count() - before;
    let regression = SampledRegression::banzhaf(n, masks, target, paired);
    let sol = least_squares_minnorm(&regression.design, &regression.target)?;
    let mut flags = Vec::new();
    if !sol.is_full_rank() {
        flags.push(RunFlag::RankDeficient { rank: sol.rank, cols: n });
    }
    let report = EstimateReport {
        estimator,
        values: sol.x,
        m,
        evals,
        seed,
        wall_seconds: start.elapsed().as_secs_f64(),
        flags,
    };
    Ok((report, regression))
}
