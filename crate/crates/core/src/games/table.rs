use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use super::{EvalCounter, Game};
use crate::error::{Error, Result};
use crate::mask::{check_players, SubsetMask};
use crate::scalar::Real;

/// Largest `n` a [`TableGame`] will materialize (`2^n` values).
pub const TABLE_LIMIT: usize = 24;

/// A game stored as an explicit table of `2^n` values in mask order.
#[derive(Debug, Clone)]
pub struct TableGame<T: Real = f64> {
    n: usize,
    values: Vec<T>,
    evals: EvalCounter,
}

impl<T: Real> TableGame<T> {
    pub fn new(n: usize, values: Vec<T>) -> Result<Self> {
        check_table(n)?;
        if values.len() != 1 << n {
            return Err(Error::LengthMismatch {
                expected: 1 << n,
                actual: values.len(),
            });
        }
        Ok(Self {
            n,
            values,
            evals: EvalCounter::default(),
        })
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(SubsetMask) -> T) -> Result<Self> {
        check_table(n)?;
        let values = SubsetMask::all(n).map(&mut f).collect();
        Self::new(n, values)
    }

    /// Tabulates another game (costs exactly `2^n` evaluations of it).
    pub fn tabulate<G: Game<T> + ?Sized>(game: &mut G) -> Result<Self> {
        let n = game.n_players();
        Self::from_fn(n, |m| game.evaluate(m))
    }

    /// Independent standard normal value for every coalition.
    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<Self> {
        Self::from_fn(n, |_| {
            let z: f64 = StandardNormal.sample(rng);
            T::lit(z)
        })
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    /// `alpha * self + beta * other`.
    pub fn combine(&self, alpha: T, other: &Self, beta: T) -> Result<Self> {
        if other.n != self.n {
            return Err(Error::LengthMismatch {
                expected: self.n,
                actual: other.n,
            });
        }
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(&a, &b)| alpha * a + beta * b)
            .collect();
        Self::new(self.n, values)
    }

    /// Relabels players: player `i` of `self` becomes player `perm[i]`.
    pub fn permute(&self, perm: &[usize]) -> Result<Self> {
        let n = self.n;
        let mut seen = vec![false; n];
        if perm.len() != n || perm.iter().any(|&p| p >= n || std::mem::replace(&mut seen[p], true)) {
            return Err(Error::InvalidInput("not a permutation".into()));
        }
        let mut values = vec![T::zero(); 1 << n];
        for m in SubsetMask::all(n) {
            let target = m.players().fold(0u64, |acc, i| acc | 1 << perm[i]);
            values[target as usize] = self.values[m.bits() as usize];
        }
        Self::new(n, values)
    }

    /// Reduced game on `n - 1` players in which players `i` and `j` act as
    /// a single player. Player `j` is removed, remaining players keep their
    /// relative order, and the merged player sits at `i`'s position in that
    /// order (see [`TableGame::merged_index`]).
    pub fn merge_players(&self, i: usize, j: usize) -> Result<Self> {
        let n = self.n;
        if i >= n || j >= n || i == j || n < 2 {
            return Err(Error::InvalidInput(format!("cannot merge players {i} and {j} of {n}")));
        }
        let kept: Vec<usize> = (0..n).filter(|&p| p != j).collect();
        Self::from_fn(n - 1, |reduced| {
            let mut bits = 0u64;
            for (r, &orig) in kept.iter().enumerate() {
                if reduced.contains(r) {
                    bits |= 1 << orig;
                    if orig == i {
                        bits |= 1 << j;
                    }
                }
            }
            self.values[bits as usize]
        })
    }

    /// Index of the merged player in the game returned by `merge_players(i, j)`.
    pub fn merged_index(i: usize, j: usize) -> usize {
        if j < i {
            i - 1
        } else {
            i
        }
    }
}

fn check_table(n: usize) -> Result<()> {
    check_players(n)?;
    if n > TABLE_LIMIT {
        return Err(Error::EnumerationTooLarge { n, limit: TABLE_LIMIT });
    }
    Ok(())
}

impl<T: Real> Game<T> for TableGame<T> {
    fn n_players(&self) -> usize {
        self.n
    }

    fn evaluate(&mut self, mask: SubsetMask) -> T {
        self.evals.tick();
        self.values[mask.bits() as usize]
    }

    fn eval_count(&self) -> u64 {
        self.evals.get()
    }
}
