//! Command-line surface. Every subcommand's flags double as keys of the
//! optional `--config` JSON file (kebab-case, same value types); flags given
//! on the command line take precedence over the file.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use semivalue::bench::{DiagMetric, ErrorMetric, NoiseScale};
use semivalue::Estimator;

#[derive(Debug, Parser)]
#[command(name = "semivalue", version, about = "Banzhaf and Shapley attributions for set functions and tree models")]
pub struct Cli {
    /// Worker threads for the estimation pool [default: available parallelism]
    #[arg(long, global = true, value_name = "COUNT")]
    pub threads: Option<usize>,

    /// JSON file supplying values for any flag of the subcommand (flags win)
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fit a small gradient-boosted CART ensemble and write it as model JSON
    TrainTree(TrainArgs),
    /// Exact Banzhaf and Shapley values by enumerating all 2^n coalitions
    Exact(ExactArgs),
    /// Estimate attributions with one sampling estimator
    Attribute(AttributeArgs),
    /// Seeded experiment sweeps written as CSV
    #[command(subcommand)]
    Bench(BenchCommand),
    /// Sampling diagnostics of regression designs (CSV)
    Diag(DiagArgs),
}

#[derive(Debug, Subcommand)]
pub enum BenchCommand {
    /// Error percentiles across sample budgets
    SweepSamples(SweepArgs),
    /// Error percentiles across noise levels
    SweepNoise(SweepArgs),
    /// Condition number of the whitened sampled Gram matrix across budgets
    Condition(ConditionArgs),
    /// Per-feature exact versus estimated values
    Scatter(ScatterArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GameKind {
    /// v(S) = intercept + sum of weights in S
    Linear,
    /// v(S) = 1 when |S| >= quota
    Threshold,
    /// Tree ensemble with partial-feature traversal at one explicand
    Tree,
    /// Tree ensemble with absent features drawn from background rows
    Masked,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScaleArg {
    /// Sigma is the noise standard deviation
    Absolute,
    /// Sigma multiplies the standard deviation of v over all coalitions
    OutputStd,
}

impl From<ScaleArg> for NoiseScale {
    fn from(s: ScaleArg) -> Self {
        match s {
            ScaleArg::Absolute => NoiseScale::Absolute,
            ScaleArg::OutputStd => NoiseScale::OutputStd,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MetricArg {
    /// Squared l2 distance to the exact vector
    L2Sq,
    /// Squared l2 distance divided by the squared norm of the exact vector
    NormalizedL2Sq,
}

impl From<MetricArg> for ErrorMetric {
    fn from(m: MetricArg) -> Self {
        match m {
            MetricArg::L2Sq => ErrorMetric::L2Sq,
            MetricArg::NormalizedL2Sq => ErrorMetric::NormalizedL2Sq,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DiagArg {
    /// Condition number of K
    Cond,
    /// Operator-norm distance of (4/m) A^T A from the identity
    Spectral,
}

impl From<DiagArg> for DiagMetric {
    fn from(m: DiagArg) -> Self {
        match m {
            DiagArg::Cond => DiagMetric::Cond,
            DiagArg::Spectral => DiagMetric::Spectral,
        }
    }
}

/// Where the set function comes from.
#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct GameArgs {
    /// Game family [default: inferred from --weights or --model]
    #[arg(long, value_enum)]
    pub game: Option<GameKind>,

    /// Linear game weights, comma separated (one per player)
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, value_name = "W1,W2,...")]
    pub weights: Option<Vec<f64>>,

    /// Linear game intercept v(empty set) [default: 0]
    #[arg(long, allow_hyphen_values = true, value_name = "VALUE")]
    pub intercept: Option<f64>,

    /// Number of players for the threshold game
    #[arg(long, value_name = "PLAYERS")]
    pub n: Option<usize>,

    /// Threshold game quota, in players
    #[arg(long, value_name = "PLAYERS")]
    pub quota: Option<usize>,

    /// Tree ensemble model JSON
    #[arg(long, value_name = "PATH")]
    pub model: Option<PathBuf>,

    /// CSV dataset holding the explicand and background rows
    #[arg(long, value_name = "PATH")]
    pub data: Option<PathBuf>,

    /// Target column of --data to drop before use
    #[arg(long, value_name = "COLUMN")]
    pub target: Option<String>,

    /// Zero-based row of --data to explain [default: 0]
    #[arg(long, value_name = "ROW")]
    pub explicand_index: Option<usize>,

    /// Background rows averaged per masked evaluation [default: min(50, rows - 1)]
    #[arg(long, value_name = "ROWS")]
    pub baselines: Option<usize>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct OutputArgs {
    /// Write output here instead of stdout
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,

    /// Record wall-clock seconds (makes output vary between runs)
    #[arg(long)]
    #[serde(default)]
    pub timing: bool,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct TrainArgs {
    /// Training CSV with a header row
    #[arg(long, value_name = "PATH")]
    pub data: Option<PathBuf>,

    /// Column to predict
    #[arg(long, value_name = "COLUMN")]
    pub target: Option<String>,

    /// Maximum tree depth, in splits [default: 3]
    #[arg(long, value_name = "DEPTH")]
    pub max_depth: Option<usize>,

    /// Number of boosted trees [default: 30]
    #[arg(long, value_name = "COUNT")]
    pub n_trees: Option<usize>,

    /// Shrinkage applied to each tree's leaves, unitless [default: 0.3]
    #[arg(long, value_name = "RATE")]
    pub learning_rate: Option<f64>,

    /// Minimum training rows per leaf [default: 5]
    #[arg(long, value_name = "ROWS")]
    pub min_leaf: Option<usize>,

    #[command(flatten)]
    #[serde(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct ExactArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub game: GameArgs,

    /// Base seed (masked games sample their baseline panel from it) [default: $SEMIVALUE_SEED or 0]
    #[arg(long, value_name = "SEED")]
    pub seed: Option<u64>,

    #[command(flatten)]
    #[serde(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct AttributeArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub game: GameArgs,

    /// kernel-banzhaf, kernel-banzhaf-unpaired, kernel-banzhaf-swor, mc, msr, kernel-shap or leverage-shap
    #[arg(long, value_name = "NAME")]
    pub estimator: Option<Estimator>,

    /// Sample budget m, in coalitions
    #[arg(long, value_name = "M")]
    pub samples: Option<usize>,

    /// Base seed [default: $SEMIVALUE_SEED or 0]
    #[arg(long, value_name = "SEED")]
    pub seed: Option<u64>,

    /// Standard deviation of Gaussian noise added to every evaluation [default: 0]
    #[arg(long, value_name = "SIGMA")]
    pub noise_sigma: Option<f64>,

    /// Write the sampled regression (masks, design, target) as CSV
    #[arg(long, value_name = "PATH")]
    pub dump_regression: Option<PathBuf>,

    #[command(flatten)]
    #[serde(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct SweepArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub game: GameArgs,

    /// Estimators to compare, comma separated [default: kernel-banzhaf,mc,msr]
    #[arg(long, value_delimiter = ',', value_name = "NAMES")]
    pub estimators: Option<Vec<Estimator>>,

    /// Sample budgets, comma separated [default: 2n,4n,10n,20n,40n capped at 2^n for sweep-samples; 10n for sweep-noise]
    #[arg(long, value_delimiter = ',', value_name = "M1,M2,...")]
    pub samples_list: Option<Vec<usize>>,

    /// Noise levels, comma separated [default: 0 for sweep-samples; 0,0.5,1,2 for sweep-noise]
    #[arg(long, value_delimiter = ',', value_name = "S1,S2,...")]
    pub sigmas: Option<Vec<f64>>,

    /// How sigmas are interpreted [default: absolute]
    #[arg(long, value_enum)]
    pub noise_scale: Option<ScaleArg>,

    /// Error metric against the exact values [default: l2-sq]
    #[arg(long, value_enum)]
    pub metric: Option<MetricArg>,

    /// Independent runs per cell [default: 50]
    #[arg(long, value_name = "COUNT")]
    pub runs: Option<usize>,

    /// Base seed [default: $SEMIVALUE_SEED or 0]
    #[arg(long, value_name = "SEED")]
    pub seed: Option<u64>,

    #[command(flatten)]
    #[serde(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct ConditionArgs {
    /// Number of players
    #[arg(long, value_name = "PLAYERS")]
    pub n: Option<usize>,

    /// Regression estimators, comma separated [default: kernel-banzhaf,kernel-shap,leverage-shap]
    #[arg(long, value_delimiter = ',', value_name = "NAMES")]
    pub estimators: Option<Vec<Estimator>>,

    /// Sample budgets, comma separated [default: 5n,10n,20n]
    #[arg(long, value_delimiter = ',', value_name = "M1,M2,...")]
    pub samples_list: Option<Vec<usize>>,

    /// Independent runs per budget [default: 50]
    #[arg(long, value_name = "COUNT")]
    pub runs: Option<usize>,

    /// Base seed [default: $SEMIVALUE_SEED or 0]
    #[arg(long, value_name = "SEED")]
    pub seed: Option<u64>,

    #[command(flatten)]
    #[serde(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct DiagArgs {
    /// Diagnostic to compute [default: cond]
    #[arg(long, value_enum)]
    pub metric: Option<DiagArg>,

    /// Number of players
    #[arg(long, value_name = "PLAYERS")]
    pub n: Option<usize>,

    /// Regression estimators, comma separated [default: kernel-banzhaf]
    #[arg(long, value_delimiter = ',', value_name = "NAMES")]
    pub estimators: Option<Vec<Estimator>>,

    /// Sample budgets, comma separated [default: 4n,8n,16n,32n,64n]
    #[arg(long, value_delimiter = ',', value_name = "M1,M2,...")]
    pub samples_list: Option<Vec<usize>>,

    /// Independent runs per budget [default: 50]
    #[arg(long, value_name = "COUNT")]
    pub runs: Option<usize>,

    /// Base seed [default: $SEMIVALUE_SEED or 0]
    #[arg(long, value_name = "SEED")]
    pub seed: Option<u64>,

    #[command(flatten)]
    #[serde(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct ScatterArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub game: GameArgs,

    /// Estimator to compare against the exact values
    #[arg(long, value_name = "NAME")]
    pub estimator: Option<Estimator>,

    /// Sample budget m, in coalitions
    #[arg(long, value_name = "M")]
    pub samples: Option<usize>,

    /// Base seed [default: $SEMIVALUE_SEED or 0]
    #[arg(long, value_name = "SEED")]
    pub seed: Option<u64>,

    #[command(flatten)]
    #[serde(flatten)]
    pub output: OutputArgs,
}
