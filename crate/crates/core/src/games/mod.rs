//! Set functions ("games") over bitmask coalitions.
//!
//! Every estimator and oracle in the crate consumes only the [`Game`] trait.

mod masked;
mod noisy;
mod table;

pub use masked::{MaskedPredictorGame, Predictor};
pub use noisy::{wrap_noise, NoisyGame};
pub use table::TableGame;

use crate::error::{Error, Result};
use crate::mask::{check_players, SubsetMask};
use crate::scalar::Real;

/// A set function `v: 2^[n] -> R` that counts its evaluations.
pub trait Game<T: Real = f64> {
    fn n_players(&self) -> usize;

    /// Evaluates `v(S)`. Increments [`Game::eval_count`] by exactly one.
    fn evaluate(&mut self, mask: SubsetMask) -> T;

    fn eval_count(&self) -> u64;

    /// Re-keys any internal randomness from `seed`. Deterministic games
    /// ignore this.
    fn reseed(&mut self, _seed: u64) {}
}

impl<T: Real, G: Game<T> + ?Sized> Game<T> for &mut G {
    fn n_players(&self) -> usize {
        (**self).n_players()
    }
    fn evaluate(&mut self, mask: SubsetMask) -> T {
        (**self).evaluate(mask)
    }
    fn eval_count(&self) -> u64 {
        (**self).eval_count()
    }
    fn reseed(&mut self, seed: u64) {
        (**self).reseed(seed)
    }
}

impl<T: Real, G: Game<T> + ?Sized> Game<T> for Box<G> {
    fn n_players(&self) -> usize {
        (**self).n_players()
    }
    fn evaluate(&mut self, mask: SubsetMask) -> T {
        (**self).evaluate(mask)
    }
    fn eval_count(&self) -> u64 {
        (**self).eval_count()
    }
    fn reseed(&mut self, seed: u64) {
        (**self).reseed(seed)
    }
}

/// Monotone evaluation counter embedded in each game.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct EvalCounter(u64);

impl EvalCounter {
    #[inline]
    pub fn tick(&mut self) {
        self.0 += 1;
    }

    #[inline]
    pub fn get(self) -> u64 {
        self.0
    }
}

/// `v(S) = intercept + sum of weights[i] over i in S`.
#[derive(Debug, Clone)]
pub struct LinearGame<T: Real = f64> {
    weights: Vec<T>,
    intercept: T,
    evals: EvalCounter,
}

impl<T: Real> LinearGame<T> {
    pub fn new(weights: Vec<T>, intercept: T) -> Result<Self> {
        check_players(weights.len())?;
        Ok(Self {
            weights,
            intercept,
            evals: EvalCounter::default(),
        })
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    pub fn intercept(&self) -> T {
        self.intercept
    }
}

impl<T: Real> Game<T> for LinearGame<T> {
    fn n_players(&self) -> usize {
        self.weights.len()
    }

    fn evaluate(&mut self, mask: SubsetMask) -> T {
        self.evals.tick();
        mask.players()
            .fold(self.intercept, |acc, i| acc + self.weights[i])
    }

    fn eval_count(&self) -> u64 {
        self.evals.get()
    }
}

/// Voting game: `v(S) = 1` if `|S| >= quota`, else `0`.
#[derive(Debug, Clone)]
pub struct ThresholdGame {
    n: usize,
    quota: usize,
    evals: EvalCounter,
}

impl ThresholdGame {
    pub fn new(n: usize, quota: usize) -> Result<Self> {
        check_players(n)?;
        if quota > n {
            return Err(Error::InvalidInput(format!(
                "quota {quota} exceeds player count {n}"
            )));
        }
        Ok(Self {
            n,
            quota,
            evals: EvalCounter::default(),
        })
    }

    pub fn quota(&self) -> usize {
        self.quota
    }
}

impl<T: Real> Game<T> for ThresholdGame {
    fn n_players(&self) -> usize {
        self.n
    }

    fn evaluate(&mut self, mask: SubsetMask) -> T {
        self.evals.tick();
        if mask.len() >= self.quota {
            T::one()
        } else {
            T::zero()
        }
    }

    fn eval_count(&self) -> u64 {
        self.evals.get()
    }
}
