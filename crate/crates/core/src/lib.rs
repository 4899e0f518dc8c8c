//! Banzhaf and Shapley values for arbitrary set functions.
//!
//! The crate provides exact enumeration oracles, the Kernel Banzhaf
//! regression estimator (uniform = leverage-score paired sampling), Monte
//! Carlo and Maximum Sample Reuse baselines, two Shapley regression
//! baselines, a small tree-ensemble backend, and a seeded benchmark harness.
//!
//! Numeric code is generic over [`Real`] (`f32` or `f64`); the aliases at
//! the crate root fix the scalar to `f64`.

pub mod bench;
pub mod data;
pub mod error;
pub mod estimators;
pub mod exact;
pub mod games;
pub mod linalg;
pub mod mask;
pub mod rng;
pub mod scalar;
pub mod shapley;
pub mod tree;

pub use error::{Error, Result};
pub use estimators::{EstimateReport, Estimator, SampledRegression};
pub use games::Game;
pub use mask::SubsetMask;
pub use scalar::Real;

pub type Matrix = linalg::DenseMatrix<f64>;
pub type Report = estimators::EstimateReport<f64>;
pub type Regression = estimators::SampledRegression<f64>;
pub type Attribution = exact::Attribution<f64>;
pub type FullRegression = exact::FullRegression<f64>;
pub type Ensemble = tree::TreeEnsemble<f64>;
pub type TreeGame = tree::TreeGame<f64>;
pub type LinearGame = games::LinearGame<f64>;
pub type TableGame = games::TableGame<f64>;
pub type MaskedGame = games::MaskedPredictorGame<f64>;
pub type Dataset = data::Dataset<f64>;

pub type Matrix32 = linalg::DenseMatrix<f32>;
pub type Report32 = estimators::EstimateReport<f32>;
pub type Ensemble32 = tree::TreeEnsemble<f32>;
