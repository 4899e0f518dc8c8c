use std::path::Path;
use std::time::Instant;

use serde_json::{json, Map, Value};

use semivalue::bench::{
    run_diag, run_sweep, scatter_export, write_diag_csv, write_scatter_csv, write_sweep_csv, DiagMetric, SweepConfig,
};
use semivalue::data::Dataset;
use semivalue::exact::{banzhaf_from_table, gamma, shapley_from_table, tabulate, FullRegression, DEFAULT_ENUMERATION_LIMIT};
use semivalue::games::{wrap_noise, Game};
use semivalue::rng::derive_seed;
use semivalue::tree::{ensemble_to_json, train_cart, CartParams};
use semivalue::Estimator;

use crate::args::{
    AttributeArgs, ConditionArgs, DiagArg, DiagArgs, ExactArgs, MetricArg, ScaleArg, ScatterArgs, SweepArgs, TrainArgs,
};
use crate::config::resolve_seed;
use crate::failure::{CliResult, Failure};
use crate::game;
use crate::output::{emit, emit_json, Provenance};

fn required<T: Clone>(v: &Option<T>, flag: &str) -> CliResult<T> {
    v.clone().ok_or_else(|| Failure::usage(format!("missing required flag {flag}")))
}

fn seconds(timing: bool, start: Instant) -> Option<f64> {
    timing.then(|| start.elapsed().as_secs_f64())
}

fn with_provenance(p: &Provenance, body: Value) -> Value {
    let mut obj = match p.json() {
        Value::Object(m) => m,
        _ => Map::new(),
    };
    if let Value::Object(b) = body {
        obj.extend(b);
    }
    Value::Object(obj)
}

fn check_budgets(samples: &[usize], runs: usize) -> CliResult<()> {
    if samples.is_empty() {
        return Err(Failure::usage("empty sample budget list"));
    }
    if runs == 0 {
        return Err(Failure::usage("--runs must be at least 1"));
    }
    Ok(())
}

pub fn train_tree(mut a: TrainArgs) -> CliResult<()> {
    let data_path = required(&a.data, "--data")?;
    let target = required(&a.target, "--target")?;
    let defaults = CartParams::default();
    let params = CartParams {
        max_depth: *a.max_depth.get_or_insert(defaults.max_depth),
        n_trees: *a.n_trees.get_or_insert(defaults.n_trees),
        learning_rate: *a.learning_rate.get_or_insert(defaults.learning_rate),
        min_leaf: *a.min_leaf.get_or_insert(defaults.min_leaf),
    };
    let data: Dataset = Dataset::load_csv(&data_path, Some(&target)).map_err(|e| Failure::at(&data_path, e))?;
    let y = data.target.as_deref().expect("target column was requested");
    let ensemble = train_cart(&data.rows, y, params)?;
    let prov = Provenance::new("train-tree", None, &a)?;
    let mut model: Value = serde_json::from_str(&ensemble_to_json(&ensemble)?).map_err(|e| Failure::Io(e.to_string()))?;
    if let Value::Object(m) = &mut model {
        m.insert("meta".into(), prov.json());
    }
    emit_json(a.output.out.as_deref(), &model)
}

pub fn exact(mut a: ExactArgs) -> CliResult<()> {
    let seed = resolve_seed(a.seed)?;
    a.seed = Some(seed);
    let mut g = game::build(&mut a.game, seed)?;
    let n = g.n_players();
    let start = Instant::now();
    let table = tabulate(&mut g, DEFAULT_ENUMERATION_LIMIT)?;
    let banzhaf = banzhaf_from_table(n, &table);
    let shapley = shapley_from_table(n, &table);
    let gm = gamma(&FullRegression::from_table(n, table))?;
    let elapsed = seconds(a.output.timing, start);
    let prov = Provenance::new("exact", Some(seed), &a)?;
    let body = json!({
        "values": banzhaf,
        "shapley": shapley,
        "gamma": if gm.infinite { Value::Null } else { json!(gm.value) },
        "gamma_infinite": gm.infinite,
        "in_span": gm.in_span(),
        "evals": g.eval_count(),
        "seconds": elapsed,
    });
    emit_json(a.output.out.as_deref(), &with_provenance(&prov, body))
}

pub fn attribute(mut a: AttributeArgs) -> CliResult<()> {
    let estimator = required(&a.estimator, "--estimator")?;
    let m = required(&a.samples, "--samples")?;
    if a.dump_regression.is_some() && !estimator.is_regression() {
        return Err(Failure::usage(format!("--dump-regression: {estimator} has no regression design")));
    }
    let seed = resolve_seed(a.seed)?;
    a.seed = Some(seed);
    let sigma = *a.noise_sigma.get_or_insert(0.0);
    let base = game::build(&mut a.game, seed)?;
    let mut g = wrap_noise(base, sigma, derive_seed(seed, &[b"noise"]))?;
    let start = Instant::now();
    let before = g.eval_count();
    let (report, regression) = estimator.run_with_regression(&mut g, m, seed)?;
    let elapsed = seconds(a.output.timing, start);
    let observed = g.eval_count() - before;
    if let (Some(path), Some(sr)) = (&a.dump_regression, &regression) {
        let mut buf = Vec::new();
        sr.write_csv(&mut buf)?;
        emit(Some(path), &buf)?;
    }
    let prov = Provenance::new("attribute", Some(seed), &a)?;
    let body = json!({
        "estimator": estimator,
        "target": estimator.target(),
        "values": report.values,
        "m": report.m,
        "evals": observed,
        "flags": report.flags,
        "seconds": elapsed,
    });
    emit_json(a.output.out.as_deref(), &with_provenance(&prov, body))
}

#[derive(Clone, Copy, PartialEq, Eq)]
pub enum SweepKind {
    Samples,
    Noise,
}

pub fn sweep(mut a: SweepArgs, kind: SweepKind) -> CliResult<()> {
    let seed = resolve_seed(a.seed)?;
    a.seed = Some(seed);
    let g = game::build(&mut a.game, seed)?;
    let n = g.n_players();
    let estimators = a
        .estimators
        .get_or_insert_with(|| vec![Estimator::KernelBanzhaf, Estimator::Mc, Estimator::Msr])
        .clone();
    let samples = a
        .samples_list
        .get_or_insert_with(|| match kind {
            SweepKind::Samples => [2, 4, 10, 20, 40]
                .into_iter()
                .map(|k| k * n)
                .filter(|&m| n >= 64 || (m as u128) <= 1u128 << n)
                .collect(),
            SweepKind::Noise => vec![10 * n],
        })
        .clone();
    let sigmas = a
        .sigmas
        .get_or_insert_with(|| match kind {
            SweepKind::Samples => vec![0.0],
            SweepKind::Noise => vec![0.0, 0.5, 1.0, 2.0],
        })
        .clone();
    if sigmas.iter().any(|s| s.is_nan() || *s < 0.0) {
        return Err(Failure::usage("--sigmas must be non-negative"));
    }
    let runs = *a.runs.get_or_insert(50);
    check_budgets(&samples, runs)?;
    let cfg = SweepConfig {
        estimators,
        samples,
        sigmas,
        runs,
        base_seed: seed,
        noise_scale: (*a.noise_scale.get_or_insert(ScaleArg::Absolute)).into(),
        metric: (*a.metric.get_or_insert(MetricArg::L2Sq)).into(),
        timing: a.output.timing,
    };
    let cells = run_sweep(&g, &cfg)?;
    let command = match kind {
        SweepKind::Samples => "bench sweep-samples",
        SweepKind::Noise => "bench sweep-noise",
    };
    let prov = Provenance::new(command, Some(seed), &a)?;
    let mut buf = Vec::new();
    write_sweep_csv(&mut buf, &prov.csv_lines(), &cells)?;
    emit(a.output.out.as_deref(), &buf)
}

struct DiagPlan {
    metric: DiagMetric,
    n: usize,
    estimators: Vec<Estimator>,
    samples: Vec<usize>,
    runs: usize,
    seed: u64,
}

fn diagnostics(
    command: &'static str,
    plan: DiagPlan,
    config: &impl serde::Serialize,
    out: Option<&Path>,
) -> CliResult<()> {
    let DiagPlan { metric, n, estimators, samples, runs, seed } = plan;
    check_budgets(&samples, runs)?;
    let cells = run_diag(n, &estimators, &samples, runs, seed, metric)?;
    let prov = Provenance::new(command, Some(seed), config)?;
    let mut buf = Vec::new();
    write_diag_csv(&mut buf, &prov.csv_lines(), &cells)?;
    emit(out, &buf)
}

pub fn condition(mut a: ConditionArgs) -> CliResult<()> {
    let n = required(&a.n, "--n")?;
    let seed = resolve_seed(a.seed)?;
    a.seed = Some(seed);
    let estimators = a
        .estimators
        .get_or_insert_with(|| vec![Estimator::KernelBanzhaf, Estimator::KernelShap, Estimator::LeverageShap])
        .clone();
    let samples = a.samples_list.get_or_insert_with(|| vec![5 * n, 10 * n, 20 * n]).clone();
    let runs = *a.runs.get_or_insert(50);
    diagnostics(
        "bench condition",
        DiagPlan {
            metric: DiagMetric::Cond,
            n,
            estimators,
            samples,
            runs,
            seed,
        },
        &a,
        a.output.out.as_deref(),
    )
}

pub fn diag(mut a: DiagArgs) -> CliResult<()> {
    let n = required(&a.n, "--n")?;
    let seed = resolve_seed(a.seed)?;
    a.seed = Some(seed);
    let metric = *a.metric.get_or_insert(DiagArg::Cond);
    let estimators = a.estimators.get_or_insert_with(|| vec![Estimator::KernelBanzhaf]).clone();
    let samples = a
        .samples_list
        .get_or_insert_with(|| [4, 8, 16, 32, 64].into_iter().map(|k| k * n).collect())
        .clone();
    let runs = *a.runs.get_or_insert(50);
    diagnostics(
        "diag",
        DiagPlan {
            metric: metric.into(),
            n,
            estimators,
            samples,
            runs,
            seed,
        },
        &a,
        a.output.out.as_deref(),
    )
}

pub fn scatter(mut a: ScatterArgs) -> CliResult<()> {
    let estimator = required(&a.estimator, "--estimator")?;
    let m = required(&a.samples, "--samples")?;
    let seed = resolve_seed(a.seed)?;
    a.seed = Some(seed);
    let g = game::build(&mut a.game, seed)?;
    let rows = scatter_export(&g, estimator, m, seed)?;
    let prov = Provenance::new("bench scatter", Some(seed), &a)?;
    let mut buf = Vec::new();
    write_scatter_csv(&mut buf, &prov.csv_lines(), &rows)?;
    emit(a.output.out.as_deref(), &buf)
}
