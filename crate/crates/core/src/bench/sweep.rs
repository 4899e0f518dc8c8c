//! Sample-size, noise, and diagnostic sweeps aggregated as CSV.
//!
//! Every run derives its seed from `(base seed, estimator, m, sigma, run)`,
//! so any cell can be reproduced on its own and output order never depends
//! on thread scheduling.

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::metrics::{l2_sq_error, normalized_l2_sq, Summary};
use crate::error::{Error, Result};
use crate::estimators::{Estimator, Semivalue};
use crate::exact::{banzhaf_from_table, shapley_from_table, tabulate, DEFAULT_ENUMERATION_LIMIT};
use crate::games::{wrap_noise, Game, LinearGame};
use crate::linalg::{condition_number_k, norm2, spectral_error};
use crate::rng::derive_seed;
use crate::scalar::Real;

pub const SWEEP_SCHEMA: &str = "semivalue-sweep/1";
pub const DIAG_SCHEMA: &str = "semivalue-diag/1";
pub const SCATTER_SCHEMA: &str = "semivalue-scatter/1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NoiseScale {
    /// `sigma` is the noise standard deviation itself.
    Absolute,
    /// `sigma` multiplies the standard deviation of `v` over all coalitions.
    OutputStd,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ErrorMetric {
    L2Sq,
    NormalizedL2Sq,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub estimators: Vec<Estimator>,
    pub samples: Vec<usize>,
    pub sigmas: Vec<f64>,
    pub runs: usize,
    pub base_seed: u64,
    pub noise_scale: NoiseScale,
    pub metric: ErrorMetric,
    /// Record wall time per cell. Off by default so output is reproducible
    /// byte for byte.
    pub timing: bool,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            estimators: vec![Estimator::KernelBanzhaf, Estimator::Mc, Estimator::Msr],
            samples: vec![],
            sigmas: vec![0.0],
            runs: 50,
            base_seed: 0,
            noise_scale: NoiseScale::Absolute,
            metric: ErrorMetric::L2Sq,
            timing: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepCell {
    pub estimator: Estimator,
    pub m: usize,
    pub sigma: f64,
    pub median: f64,
    pub p25: f64,
    pub p75: f64,
    pub mean_evals: f64,
    pub mean_seconds: Option<f64>,
    pub error: Option<String>,
}

/// Noiseless ground truth for a game, computed from one enumeration.
#[derive(Debug, Clone)]
pub struct ExactTargets {
    pub banzhaf: Vec<f64>,
    pub shapley: Vec<f64>,
    /// Population standard deviation of `v` over all `2^n` coalitions.
    pub output_std: f64,
}

impl ExactTargets {
    pub fn compute<T: Real, G: Game<T> + Clone>(game: &G) -> Result<Self> {
        let mut g = game.clone();
        let n = g.n_players();
        let table: Vec<f64> = tabulate(&mut g, DEFAULT_ENUMERATION_LIMIT)?
            .into_iter()
            .map(Real::as_f64)
            .collect();
        let mean = table.iter().sum::<f64>() / table.len() as f64;
        let var = table.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / table.len() as f64;
        Ok(Self {
            banzhaf: banzhaf_from_table(n, &table),
            shapley: shapley_from_table(n, &table),
            output_std: var.sqrt(),
        })
    }

    pub fn for_estimator(&self, e: Estimator) -> &[f64] {
        match e.target() {
            Semivalue::Banzhaf => &self.banzhaf,
            Semivalue::Shapley => &self.shapley,
        }
    }
}

fn run_seed(base: u64, e: Estimator, m: usize, sigma: f64, run: usize) -> u64 {
    derive_seed(
        base,
        &[
            e.name().as_bytes(),
            &(m as u64).to_le_bytes(),
            &sigma.to_bits().to_le_bytes(),
            &(run as u64).to_le_bytes(),
        ],
    )
}

struct RunOutcome {
    metric: f64,
    evals: u64,
    seconds: f64,
}

/// Runs every `(estimator, m, sigma)` cell of `cfg` against `game`.
///
/// Errors are always measured against the noiseless exact values. A cell
/// whose estimator rejects its inputs becomes an error row; it does not
/// abort the sweep.
pub fn run_sweep<T, G>(game: &G, cfg: &SweepConfig) -> Result<Vec<SweepCell>>
where
    T: Real,
    G: Game<T> + Clone + Send + Sync,
{
    if cfg.runs == 0 {
        return Err(Error::InvalidInput("runs must be at least 1".into()));
    }
    let exact = ExactTargets::compute(game)?;
    let mut cells = Vec::new();
    for &estimator in &cfg.estimators {
        for &m in &cfg.samples {
            for &sigma in &cfg.sigmas {
                cells.push(run_cell(game, cfg, &exact, estimator, m, sigma));
            }
        }
    }
    Ok(cells)
}

fn run_cell<T, G>(game: &G, cfg: &SweepConfig, exact: &ExactTargets, estimator: Estimator, m: usize, sigma: f64) -> SweepCell
where
    T: Real,
    G: Game<T> + Clone + Send + Sync,
{
    let abs_sigma = match cfg.noise_scale {
        NoiseScale::Absolute => sigma,
        NoiseScale::OutputStd => sigma * exact.output_std,
    };
    let target = exact.for_estimator(estimator);
    let outcomes: Result<Vec<RunOutcome>> = (0..cfg.runs)
        .into_par_iter()
        .map(|run| {
            let seed = run_seed(cfg.base_seed, estimator, m, sigma, run);
            let mut g = game.clone();
            g.reseed(derive_seed(seed, &[b"game"]));
            let mut noisy = wrap_noise(g, T::lit(abs_sigma), derive_seed(seed, &[b"noise"]))?;
            let before = noisy.eval_count();
            let report = estimator.run(&mut noisy, m, seed)?;
            let spent = noisy.eval_count() - before;
            if spent != report.evals || spent != estimator.expected_evals(m) {
                return Err(Error::InvalidInput(format!(
                    "evaluation accounting mismatch: observed {spent}, reported {}, expected {}",
                    report.evals,
                    estimator.expected_evals(m)
                )));
            }
            let est: Vec<f64> = report.values.iter().map(|v| v.as_f64()).collect();
            let metric = match cfg.metric {
                ErrorMetric::L2Sq => l2_sq_error(&est, target)?,
                ErrorMetric::NormalizedL2Sq => normalized_l2_sq(&est, target)?,
            };
            Ok(RunOutcome {
                metric,
                evals: spent,
                seconds: report.wall_seconds,
            })
        })
        .collect();

    match outcomes {
        Ok(runs) => {
            let metrics: Vec<f64> = runs.iter().map(|r| r.metric).collect();
            let s = Summary::of(&metrics);
            let k = runs.len() as f64;
            SweepCell {
                estimator,
                m,
                sigma,
                median: s.median,
                p25: s.p25,
                p75: s.p75,
                mean_evals: runs.iter().map(|r| r.evals as f64).sum::<f64>() / k,
                mean_seconds: cfg.timing.then(|| runs.iter().map(|r| r.seconds).sum::<f64>() / k),
                error: None,
            }
        }
        Err(e) => SweepCell {
            estimator,
            m,
            sigma,
            median: f64::NAN,
            p25: f64::NAN,
            p75: f64::NAN,
            mean_evals: f64::NAN,
            mean_seconds: None,
            error: Some(e.to_string()),
        },
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DiagMetric {
    /// Condition number of the whitened sampled Gram matrix `K`.
    Cond,
    /// `‖I - (4/m) Ã^T Ã‖₂`, Banzhaf designs only.
    Spectral,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiagCell {
    pub estimator: Estimator,
    pub m: usize,
    pub median: f64,
    pub p25: f64,
    pub p75: f64,
    /// Runs whose condition number was flagged infinite.
    pub infinite: usize,
    pub error: Option<String>,
}

/// Sampling diagnostics for regression estimators over `n` players. The
/// sampled design does not depend on game values, so a zero game is used.
pub fn run_diag(
    n: usize,
    estimators: &[Estimator],
    samples: &[usize],
    runs: usize,
    base_seed: u64,
    metric: DiagMetric,
) -> Result<Vec<DiagCell>> {
    if runs == 0 {
        return Err(Error::InvalidInput("runs must be at least 1".into()));
    }
    let zero = LinearGame::<f64>::new(vec![0.0; n], 0.0)?;
    let mut cells = Vec::new();
    for &estimator in estimators {
        for &m in samples {
            let outcome: Result<Vec<(f64, bool)>> = (0..runs)
                .into_par_iter()
                .map(|run| {
                    if !estimator.is_regression() {
                        return Err(Error::InvalidInput(format!("{estimator} has no regression design")));
                    }
                    let seed = run_seed(base_seed, estimator, m, 0.0, run);
                    let (_, sr) = estimator.run_with_regression(&mut zero.clone(), m, seed)?;
                    let sr = sr.expect("regression estimators return their design");
                    match metric {
                        DiagMetric::Cond => {
                            let c = condition_number_k(&sr)?;
                            Ok((c.value, c.infinite))
                        }
                        DiagMetric::Spectral => Ok((spectral_error(&sr)?, false)),
                    }
                })
                .collect();
            cells.push(match outcome {
                Ok(vals) => {
                    let s = Summary::of(&vals.iter().map(|v| v.0).collect::<Vec<_>>());
                    DiagCell {
                        estimator,
                        m,
                        median: s.median,
                        p25: s.p25,
                        p75: s.p75,
                        infinite: vals.iter().filter(|v| v.1).count(),
                        error: None,
                    }
                }
                Err(e) => DiagCell {
                    estimator,
                    m,
                    median: f64::NAN,
                    p25: f64::NAN,
                    p75: f64::NAN,
                    infinite: 0,
                    error: Some(e.to_string()),
                },
            });
        }
    }
    Ok(cells)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScatterRow {
    pub feature: usize,
    pub exact: f64,
    pub estimate: f64,
    pub exact_normalized: f64,
    pub estimate_normalized: f64,
}

/// Per-feature exact versus estimated values, raw and divided by `‖φ‖₂`.
pub fn scatter_export<T, G>(game: &G, estimator: Estimator, m: usize, seed: u64) -> Result<Vec<ScatterRow>>
where
    T: Real,
    G: Game<T> + Clone,
{
    let exact = ExactTargets::compute(game)?;
    let target = exact.for_estimator(estimator);
    let report = estimator.run(&mut game.clone(), m, seed)?;
    let norm = norm2(target);
    Ok(target
        .iter()
        .zip(&report.values)
        .enumerate()
        .map(|(feature, (&exact, est))| {
            let estimate = est.as_f64();
            ScatterRow {
                feature,
                exact,
                estimate,
                exact_normalized: exact / norm,
                estimate_normalized: estimate / norm,
            }
        })
        .collect())
}

fn preamble<W: Write>(out: &mut W, schema: &str, meta: &[String]) -> Result<()> {
    writeln!(out, "# schema: {schema}")?;
    for line in meta {
        writeln!(out, "# {line}")?;
    }
    Ok(())
}

fn opt(v: Option<f64>) -> String {
    v.map_or_else(|| "NA".to_string(), |x| x.to_string())
}

pub fn write_sweep_csv<W: Write>(mut out: W, meta: &[String], cells: &[SweepCell]) -> Result<()> {
    preamble(&mut out, SWEEP_SCHEMA, meta)?;
    writeln!(out, "estimator,m,sigma,median,p25,p75,mean_evals,mean_seconds,error")?;
    for c in cells {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            c.estimator,
            c.m,
            c.sigma,
            c.median,
            c.p25,
            c.p75,
            c.mean_evals,
            opt(c.mean_seconds),
            csv_text(c.error.as_deref()),
        )?;
    }
    Ok(())
}

pub fn write_diag_csv<W: Write>(mut out: W, meta: &[String], cells: &[DiagCell]) -> Result<()> {
    preamble(&mut out, DIAG_SCHEMA, meta)?;
    writeln!(out, "estimator,m,median,p25,p75,infinite,error")?;
    for c in cells {
        writeln!(
            out,
            "{},{},{},{},{},{},{}",
            c.estimator,
            c.m,
            c.median,
            c.p25,
            c.p75,
            c.infinite,
            csv_text(c.error.as_deref())
        )?;
    }
    Ok(())
}

pub fn write_scatter_csv<W: Write>(mut out: W, meta: &[String], rows: &[ScatterRow]) -> Result<()> {
    preamble(&mut out, SCATTER_SCHEMA, meta)?;
    writeln!(out, "feature,exact,estimate,exact_normalized,estimate_normalized")?;
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{}",
            r.feature, r.exact, r.estimate, r.exact_normalized, r.estimate_normalized
        )?;
    }
    Ok(())
}

fn csv_text(s: Option<&str>) -> String {
    match s {
        None => String::new(),
        Some(t) => format!("\"{}\"", t.replace('"', "\"\"")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::games::{LinearGame, TableGame, ThresholdGame};
    use crate::rng::stream;

    fn cfg(estimators: Vec<Estimator>, samples: Vec<usize>, runs: usize) -> SweepConfig {
        SweepConfig {
            estimators,
            samples,
            runs,
            ..SweepConfig::default()
        }
    }

    #[test]
    fn linear_game_has_zero_error() {
        let g = LinearGame::new(vec![1.0, -0.5, 2.0, 0.25, 0.0, -3.0], 1.0).unwrap();
        let cells = run_sweep(&g, &cfg(vec![Estimator::KernelBanzhaf], vec![32], 3)).unwrap();
        assert!(cells[0].median <= 1e-18, "{:?}", cells[0]);
        assert_eq!(cells[0].mean_evals, 32.0);
        assert!(cells[0].mean_seconds.is_none());
    }

    #[test]
    fn sweep_is_deterministic_and_ordered() {
        let g = TableGame::<f64>::random(6, &mut stream(1, "g")).unwrap();
        let mut c = cfg(vec![Estimator::Msr, Estimator::KernelBanzhaf, Estimator::Mc], vec![12, 24], 5);
        c.sigmas = vec![0.0, 0.5];
        let a = run_sweep(&g, &c).unwrap();
        let b = run_sweep(&g, &c).unwrap();
        let mut buf_a = Vec::new();
        let mut buf_b = Vec::new();
        write_sweep_csv(&mut buf_a, &[], &a).unwrap();
        write_sweep_csv(&mut buf_b, &[], &b).unwrap();
        assert_eq!(buf_a, buf_b);
        assert_eq!(a.len(), 12);
        assert_eq!((a[0].estimator, a[0].m, a[0].sigma), (Estimator::Msr, 12, 0.0));
        assert_eq!((a[1].estimator, a[1].m, a[1].sigma), (Estimator::Msr, 12, 0.5));
        for cell in &a {
            assert!(cell.p25 <= cell.median && cell.median <= cell.p75);
            assert_eq!(cell.mean_evals, cell.estimator.expected_evals(cell.m) as f64);
        }
    }

    #[test]
    fn precondition_violation_becomes_error_row() {
        let g = ThresholdGame::new(8, 4).unwrap();
        let cells = run_sweep::<f64, _>(&g, &cfg(vec![Estimator::Mc, Estimator::Msr], vec![5], 2)).unwrap();
        assert!(cells[0].error.as_deref().unwrap().contains("budget below feature count"));
        assert!(cells[1].error.is_none());
        let mut buf = Vec::new();
        write_sweep_csv(&mut buf, &["note".into()], &cells).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("# schema: semivalue-sweep/1\n# note\n"));
    }

    #[test]
    fn scatter_consistent_with_l2() {
        let g = ThresholdGame::new(8, 4).unwrap();
        let rows = scatter_export::<f64, _>(&g, Estimator::Msr, 16, 3).unwrap();
        let est: Vec<f64> = rows.iter().map(|r| r.estimate).collect();
        let exact: Vec<f64> = rows.iter().map(|r| r.exact).collect();
        let report = Estimator::Msr.run::<f64, _>(&mut g.clone(), 16, 3).unwrap();
        assert_eq!(est, report.values);
        let from_rows: f64 = rows.iter().map(|r| (r.estimate - r.exact).powi(2)).sum();
        assert_eq!(from_rows, l2_sq_error(&est, &exact).unwrap());
    }

    #[test]
    fn scatter_on_exact_estimator_is_diagonal() {
        let g = LinearGame::new(vec![1.0, 2.0, 3.0, -1.0], 0.5).unwrap();
        for r in scatter_export(&g, Estimator::KernelBanzhaf, 10, 0).unwrap() {
            assert!((r.exact - r.estimate).abs() < 1e-10);
            assert!((r.exact_normalized - r.estimate_normalized).abs() < 1e-10);
        }
    }

    #[test]
    fn diag_rejects_non_regression_estimators() {
        let cells = run_diag(6, &[Estimator::Mc, Estimator::KernelBanzhaf], &[16], 3, 0, DiagMetric::Cond).unwrap();
        assert!(cells[0].error.is_some());
        assert!(cells[1].error.is_none() && cells[1].median >= 1.0);
    }
}
