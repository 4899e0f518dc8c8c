use std::fmt;
use std::sync::Arc;

use rand::seq::index;

use super::{EvalCounter, Game};
use crate::error::{Error, Result};
use crate::mask::{check_players, SubsetMask};
use crate::rng::stream;
use crate::scalar::Real;

/// An opaque model mapping one feature row to a prediction.
pub type Predictor<T> = Arc<dyn Fn(&[T]) -> T + Send + Sync>;

/// Marginal masking game: features outside `S` are replaced by values from
/// a fixed panel of baseline rows, and the model output is averaged over
/// the panel.
#[derive(Clone)]
pub struct MaskedPredictorGame<T: Real = f64> {
    predictor: Predictor<T>,
    explicand: Vec<T>,
    panel: Vec<Vec<T>>,
    scratch: Vec<T>,
    evals: EvalCounter,
}

impl<T: Real> fmt::Debug for MaskedPredictorGame<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MaskedPredictorGame")
            .field("explicand", &self.explicand)
            .field("panel_rows", &self.panel.len())
            .finish()
    }
}

impl<T: Real> MaskedPredictorGame<T> {
    pub const DEFAULT_BASELINES: usize = 50;

    /// Samples `k` distinct rows of `background` once, with the stream
    /// derived from `seed`. `background` must not contain the explicand row.
    pub fn new(
        predictor: Predictor<T>,
        explicand: Vec<T>,
        background: &[Vec<T>],
        k: usize,
        seed: u64,
    ) -> Result<Self> {
        check_players(explicand.len())?;
        if background.is_empty() {
            return Err(Error::NoBaselineData);
        }
        if k == 0 || k > background.len() {
            return Err(Error::InvalidInput(format!(
                "baseline count {k} must be in 1..={}",
                background.len()
            )));
        }
        for row in background {
            if row.len() != explicand.len() {
                return Err(Error::LengthMismatch {
                    expected: explicand.len(),
                    actual: row.len(),
                });
            }
        }
        let mut rng = stream(seed, "baselines");
        let mut picks = index::sample(&mut rng, background.len(), k).into_vec();
        picks.sort_unstable();
        let panel = picks.into_iter().map(|r| background[r].clone()).collect();
        Ok(Self {
            predictor,
            scratch: explicand.clone(),
            explicand,
            panel,
            evals: EvalCounter::default(),
        })
    }

    pub fn panel(&self) -> &[Vec<T>] {
        &self.panel
    }

    /// Mean prediction over the panel with features in `mask` taken from
    /// the explicand.
    pub fn masked_value(&mut self, mask: SubsetMask) -> T {
        let mut total = T::zero();
        for row in &self.panel {
            for (i, slot) in self.scratch.iter_mut().enumerate() {
                *slot = if mask.contains(i) { self.explicand[i] } else { row[i] };
            }
            total += (self.predictor)(&self.scratch);
        }
        total / T::from_count(self.panel.len())
    }
}

impl<T: Real> Game<T> for MaskedPredictorGame<T> {
    fn n_players(&self) -> usize {
        self.explicand.len()
    }

    fn evaluate(&mut self, mask: SubsetMask) -> T {
        self.evals.tick();
        self.masked_value(mask)
    }

    fn eval_count(&self) -> u64 {
        self.evals.get()
    }
}
