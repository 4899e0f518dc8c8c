//! Coalitions encoded as bitmasks over at most 63 players.

use rand::Rng;

use crate::error::{Error, Result};

pub const MAX_PLAYERS: usize = 63;

/// A coalition `S ⊆ {0, .., n-1}`; bit `i` is set iff player `i` is in `S`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize)]
pub struct SubsetMask {
    bits: u64,
    n: u8,
}

impl SubsetMask {
    pub fn new(bits: u64, n: usize) -> Result<Self> {
        check_players(n)?;
        if bits >> n != 0 {
            return Err(Error::InvalidInput(format!(
                "mask {bits:#b} has bits outside {n} players"
            )));
        }
        Ok(Self { bits, n: n as u8 })
    }

    /// Caller guarantees `n <= 63` and `bits < 2^n`.
    #[inline]
    pub(crate) fn from_bits_unchecked(bits: u64, n: usize) -> Self {
        debug_assert!(n <= MAX_PLAYERS && bits >> n == 0);
        Self { bits, n: n as u8 }
    }

    pub fn empty(n: usize) -> Self {
        Self::from_bits_unchecked(0, n)
    }

    pub fn full(n: usize) -> Self {
        Self::from_bits_unchecked(full_bits(n), n)
    }

    pub fn from_players(players: &[usize], n: usize) -> Result<Self> {
        check_players(n)?;
        let mut bits = 0u64;
        for &p in players {
            if p >= n {
                return Err(Error::InvalidInput(format!("player {p} out of range for n = {n}")));
            }
            bits |= 1 << p;
        }
        Ok(Self::from_bits_unchecked(bits, n))
    }

    /// Uniform draw over all `2^n` coalitions.
    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        Self::from_bits_unchecked(rng.random::<u64>() & full_bits(n), n)
    }

    #[inline]
    pub fn bits(self) -> u64 {
        self.bits
    }

    #[inline]
    pub fn n_players(self) -> usize {
        self.n as usize
    }

    #[inline]
    pub fn contains(self, player: usize) -> bool {
        self.bits >> player & 1 == 1
    }

    #[inline]
    pub fn len(self) -> usize {
        self.bits.count_ones() as usize
    }

    #[inline]
    pub fn is_empty(self) -> bool {
        self.bits == 0
    }

    #[inline]
    pub fn complement(self) -> Self {
        Self::from_bits_unchecked(!self.bits & full_bits(self.n as usize), self.n as usize)
    }

    #[inline]
    pub fn with(self, player: usize) -> Self {
        Self::from_bits_unchecked(self.bits | 1 << player, self.n as usize)
    }

    #[inline]
    pub fn without(self, player: usize) -> Self {
        Self::from_bits_unchecked(self.bits & !(1 << player), self.n as usize)
    }

    pub fn players(self) -> impl Iterator<Item = usize> {
        let bits = self.bits;
        (0..self.n as usize).filter(move |&i| bits >> i & 1 == 1)
    }

    /// Every coalition over `n` players in ascending mask order.
    pub fn all(n: usize) -> impl Iterator<Item = SubsetMask> {
        (0..=full_bits(n)).map(move |b| SubsetMask::from_bits_unchecked(b, n))
    }
}

#[inline]
pub(crate) fn full_bits(n: usize) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

pub(crate) fn check_players(n: usize) -> Result<()> {
    if n == 0 || n > MAX_PLAYERS {
        return Err(Error::PlayerCount(n));
    }
    Ok(())
}
