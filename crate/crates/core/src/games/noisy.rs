use std::marker::PhantomData;

use rand_distr::{Distribution, StandardNormal};

use super::{EvalCounter, Game};
use crate::error::{Error, Result};
use crate::mask::SubsetMask;
use crate::rng::{derive_seed, stream, StreamRng};
use crate::scalar::Real;

/// Adds fresh `N(0, sigma^2)` noise to every evaluation of the inner game.
///
/// Noise is drawn per call, not per distinct coalition: evaluating the same
/// mask twice yields two independent draws.
#[derive(Debug, Clone)]
pub struct NoisyGame<G, T: Real = f64> {
    inner: G,
    sigma: T,
    rng: StreamRng,
    evals: EvalCounter,
    _scalar: PhantomData<T>,
}

/// Wraps `game` so that each evaluation observes `v(S) + x`, `x ~ N(0, sigma^2)`.
pub fn wrap_noise<G: Game<T>, T: Real>(game: G, sigma: T, seed: u64) -> Result<NoisyGame<G, T>> {
    if !sigma.is_finite() || sigma < T::zero() {
        return Err(Error::NegativeNoise(sigma.as_f64()));
    }
    Ok(NoisyGame {
        inner: game,
        sigma,
        rng: stream(seed, "noise"),
        evals: EvalCounter::default(),
        _scalar: PhantomData,
    })
}

impl<G, T: Real> NoisyGame<G, T> {
    pub fn sigma(&self) -> T {
        self.sigma
    }

    pub fn inner(&self) -> &G {
        &self.inner
    }
}

impl<G: Game<T>, T: Real> Game<T> for NoisyGame<G, T> {
    fn n_players(&self) -> usize {
        self.inner.n_players()
    }

    fn evaluate(&mut self, mask: SubsetMask) -> T {
        self.evals.tick();
        let clean = self.inner.evaluate(mask);
        if self.sigma == T::zero() {
            return clean;
        }
        let z: f64 = StandardNormal.sample(&mut self.rng);
        clean + self.sigma * T::lit(z)
    }

    fn eval_count(&self) -> u64 {
        self.evals.get()
    }

    fn reseed(&mut self, seed: u64) {
        self.rng = stream(seed, "noise");
        self.inner.reseed(derive_seed(seed, &[b"inner"]));
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::games::{LinearGame, ThresholdGame};

    #[test]
    fn zero_sigma_is_transparent() {
        let inner = LinearGame::new(vec![1.0, -2.0, 0.5], 0.25).unwrap();
        let mut clean = inner.clone();
        let mut noisy = wrap_noise(inner, 0.0, 3).unwrap();
        for s in SubsetMask::all(3) {
            assert_eq!(noisy.evaluate(s), clean.evaluate(s));
        }
    }

    #[test]
    fn negative_sigma_rejected() {
        let g = ThresholdGame::new(3, 1).unwrap();
        assert!(matches!(wrap_noise::<_, f64>(g.clone(), -1.0, 0), Err(Error::NegativeNoise(_))));
        assert!(wrap_noise::<_, f64>(g, f64::NAN, 0).is_err());
    }

    #[test]
    fn sample_mean_within_clt_band() {
        let g = ThresholdGame::new(4, 2).unwrap();
        let mut noisy = wrap_noise::<_, f64>(g, 1.0, 11).unwrap();
        let s = SubsetMask::from_players(&[0, 2], 4).unwrap();
        let calls = 10_000;
        let mean: f64 = (0..calls).map(|_| noisy.evaluate(s)).sum::<f64>() / calls as f64;
        assert!((mean - 1.0).abs() < 4.0 / (calls as f64).sqrt(), "mean {mean}");
        assert_eq!(noisy.eval_count(), calls as u64);
    }

    #[test]
    fn same_seed_same_stream() {
        let g = ThresholdGame::new(3, 1).unwrap();
        let mut a = wrap_noise::<_, f64>(g.clone(), 0.7, 5).unwrap();
        let mut b = wrap_noise::<_, f64>(g, 0.7, 5).unwrap();
        for s in SubsetMask::all(3).chain(SubsetMask::all(3)) {
            assert_eq!(a.evaluate(s).to_bits(), b.evaluate(s).to_bits());
        }
    }

    #[test]
    fn paired_differences_double_the_variance() {
        let g = LinearGame::new(vec![1.0, 2.0, 3.0], 0.0).unwrap();
        let sigma = 0.5;
        let mut noisy = wrap_noise(g, sigma, 99).unwrap();
        let s = SubsetMask::from_players(&[1], 3).unwrap();
        let reps = 4000;
        let diffs: Vec<f64> = (0..reps)
            .map(|_| noisy.evaluate(s.with(0)) - noisy.evaluate(s))
            .collect();
        let mean = diffs.iter().sum::<f64>() / reps as f64;
        let var = diffs.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / (reps - 1) as f64;
        let expected = 2.0 * sigma * sigma;
        assert!((var / expected - 1.0).abs() < 0.15, "var {var}");
    }
}
