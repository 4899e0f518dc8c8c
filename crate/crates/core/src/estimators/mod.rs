//! Sampling estimators for Banzhaf and Shapley values.
//!
//! All estimators consume only the [`Game`] interface and measure their
//! budget `m` in sampled coalitions. Runs are pure functions of the game
//! state, `m`, and `seed`.

mod kernel;
mod mc;
mod msr;

pub use kernel::{kernel_banzhaf, kernel_banzhaf_swor, kernel_banzhaf_unpaired};
pub use mc::{mc_allocation, mc_banzhaf};
pub use msr::msr_banzhaf;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::games::Game;
use crate::linalg::DenseMatrix;
use crate::mask::SubsetMask;
use crate::scalar::Real;
use crate::shapley::{kernel_shap, leverage_shap};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RegressionKind {
    Banzhaf,
    Shapley,
}

/// A subsampled regression problem `(Ã, b̃)` retained for diagnostics.
///
/// For Banzhaf designs the entries of `design` are `±1/2` and there is one
/// column per player. For Shapley designs the efficiency constraint has been
/// eliminated, leaving `n - 1` importance-weighted columns.
#[derive(Debug, Clone, Serialize)]
pub struct SampledRegression<T: Real = f64> {
    pub kind: RegressionKind,
    pub n: usize,
    pub design: DenseMatrix<T>,
    pub target: Vec<T>,
    pub masks: Vec<SubsetMask>,
    pub paired: bool,
}

impl<T: Real> SampledRegression<T> {
    /// Banzhaf design from masks: bit set maps to `+1/2`, clear to `-1/2`.
    pub fn banzhaf(n: usize, masks: Vec<SubsetMask>, target: Vec<T>, paired: bool) -> Self {
        let half = T::lit(0.5);
        let design = DenseMatrix::from_fn(masks.len(), n, |r, c| if masks[r].contains(c) { half } else { -half });
        Self {
            kind: RegressionKind::Banzhaf,
            n,
            design,
            target,
            masks,
            paired,
        }
    }

    /// CSV dump: one row per sample with the mask bits, design row and target.
    pub fn write_csv<W: std::io::Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec!["mask".to_string()];
        header.extend((0..self.design.cols()).map(|c| format!("a{c}")));
        header.push("b".into());
        w.write_record(&header)?;
        for (r, mask) in self.masks.iter().enumerate() {
            let mut rec = vec![mask.bits().to_string()];
            rec.extend(self.design.row(r).iter().map(|v| v.to_string()));
            rec.push(self.target[r].to_string());
            w.write_record(&rec)?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Conditions recorded during a run that a caller should know about.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "flag", rename_all = "kebab-case")]
pub enum RunFlag {
    /// The sampled least-squares system had rank below its column count;
    /// the minimum-norm solution was returned.
    RankDeficient { rank: usize, cols: usize },
    /// No sampled coalition contained (or excluded) this player.
    EmptySide { player: usize },
}

/// Output of one estimator run.
#[derive(Debug, Clone, Serialize)]
pub struct EstimateReport<T: Real = f64> {
    pub estimator: Estimator,
    pub values: Vec<T>,
    /// Budget in sampled coalitions.
    pub m: usize,
    /// Set-function evaluations actually spent.
    pub evals: u64,
    pub seed: u64,
    pub wall_seconds: f64,
    pub flags: Vec<RunFlag>,
}

impl<T: Real> EstimateReport<T> {
    pub fn is_rank_deficient(&self) -> bool {
        self.flags.iter().any(|f| matches!(f, RunFlag::RankDeficient { .. }))
    }
}

/// Which semivalue an estimator targets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Semivalue {
    Banzhaf,
    Shapley,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Estimator {
    KernelBanzhaf,
    KernelBanzhafUnpaired,
    KernelBanzhafSwor,
    Mc,
    Msr,
    KernelShap,
    LeverageShap,
}

impl Estimator {
    pub const ALL: [Estimator; 7] = [
        Estimator::KernelBanzhaf,
        Estimator::KernelBanzhafUnpaired,
        Estimator::KernelBanzhafSwor,
        Estimator::Mc,
        Estimator::Msr,
        Estimator::KernelShap,
        Estimator::LeverageShap,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Estimator::KernelBanzhaf => "kernel-banzhaf",
            Estimator::KernelBanzhafUnpaired => "kernel-banzhaf-unpaired",
            Estimator::KernelBanzhafSwor => "kernel-banzhaf-swor",
            Estimator::Mc => "mc",
            Estimator::Msr => "msr",
            Estimator::KernelShap => "kernel-shap",
            Estimator::LeverageShap => "leverage-shap",
        }
    }

    pub fn target(self) -> Semivalue {
        match self {
            Estimator::KernelShap | Estimator::LeverageShap => Semivalue::Shapley,
            _ => Semivalue::Banzhaf,
        }
    }

    /// Evaluations a run with budget `m` spends.
    pub fn expected_evals(self, m: usize) -> u64 {
        match self {
            Estimator::Mc => 2 * m as u64,
            Estimator::KernelShap | Estimator::LeverageShap => m as u64 + 2,
            _ => m as u64,
        }
    }

    /// True for estimators that solve a regression and can hand it back.
    pub fn is_regression(self) -> bool {
        !matches!(self, Estimator::Mc | Estimator::Msr)
    }

    pub fn run<T: Real, G: Game<T> + ?Sized>(self, game: &mut G, m: usize, seed: u64) -> Result<EstimateReport<T>> {
        self.run_with_regression(game, m, seed).map(|(r, _)| r)
    }

    pub fn run_with_regression<T: Real, G: Game<T> + ?Sized>(
        self,
        game: &mut G,
        m: usize,
        seed: u64,
    ) -> Result<(EstimateReport<T>, Option<SampledRegression<T>>)> {
        let with = |(r, s)| (r, Some(s));
        match self {
            Estimator::KernelBanzhaf => kernel_banzhaf(game, m, seed).map(with),
            Estimator::KernelBanzhafUnpaired => kernel_banzhaf_unpaired(game, m, seed).map(with),
            Estimator::KernelBanzhafSwor => kernel_banzhaf_swor(game, m, seed).map(with),
            Estimator::KernelShap => kernel_shap(game, m, seed).map(with),
            Estimator::LeverageShap => leverage_shap(game, m, seed).map(with),
            Estimator::Mc => mc_banzhaf(game, m, seed).map(|r| (r, None)),
            Estimator::Msr => msr_banzhaf(game, m, seed).map(|r| (r, None)),
        }
    }
}

impl fmt::Display for Estimator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Estimator {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Estimator::ALL
            .into_iter()
            .find(|e| e.name() == s)
            .ok_or_else(|| Error::InvalidInput(format!("unknown estimator '{s}'")))
    }
}

/// Number of coalitions over `n` players, without overflow.
pub(crate) fn subset_count(n: usize) -> u128 {
    1u128 << n
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for e in Estimator::ALL {
            assert_eq!(e.name().parse::<Estimator>().unwrap(), e);
        }
        assert!("kernel".parse::<Estimator>().is_err());
    }

    #[test]
    fn expected_eval_accounting() {
        assert_eq!(Estimator::Mc.expected_evals(10), 20);
        assert_eq!(Estimator::Msr.expected_evals(10), 10);
        assert_eq!(Estimator::LeverageShap.expected_evals(10), 12);
    }
}
