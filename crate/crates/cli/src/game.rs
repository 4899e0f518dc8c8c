//! Building the requested set function from game flags.

use std::sync::Arc;

use semivalue::data::Dataset;
use semivalue::games::{Game, LinearGame, MaskedPredictorGame, Predictor, ThresholdGame};
use semivalue::rng::derive_seed;
use semivalue::tree::{load_ensemble_json, TreeEnsemble, TreeGame};
use semivalue::SubsetMask;

use crate::args::{GameArgs, GameKind};
use crate::failure::{CliResult, Failure};

/// Any game the CLI can build.
#[derive(Debug, Clone)]
pub enum AnyGame {
    Linear(LinearGame),
    Threshold(ThresholdGame),
    Tree(TreeGame),
    Masked(MaskedPredictorGame),
}

impl Game<f64> for AnyGame {
    fn n_players(&self) -> usize {
        match self {
            AnyGame::Linear(g) => g.n_players(),
            AnyGame::Threshold(g) => Game::<f64>::n_players(g),
            AnyGame::Tree(g) => g.n_players(),
            AnyGame::Masked(g) => g.n_players(),
        }
    }

    fn evaluate(&mut self, mask: SubsetMask) -> f64 {
        match self {
            AnyGame::Linear(g) => g.evaluate(mask),
            AnyGame::Threshold(g) => g.evaluate(mask),
            AnyGame::Tree(g) => g.evaluate(mask),
            AnyGame::Masked(g) => g.evaluate(mask),
        }
    }

    fn eval_count(&self) -> u64 {
        match self {
            AnyGame::Linear(g) => g.eval_count(),
            AnyGame::Threshold(g) => Game::<f64>::eval_count(g),
            AnyGame::Tree(g) => g.eval_count(),
            AnyGame::Masked(g) => g.eval_count(),
        }
    }

    fn reseed(&mut self, seed: u64) {
        match self {
            AnyGame::Linear(g) => g.reseed(seed),
            AnyGame::Threshold(g) => Game::<f64>::reseed(g, seed),
            AnyGame::Tree(g) => g.reseed(seed),
            AnyGame::Masked(g) => g.reseed(seed),
        }
    }
}

fn infer_kind(a: &GameArgs) -> CliResult<GameKind> {
    if let Some(k) = a.game {
        return Ok(k);
    }
    match (a.weights.is_some(), a.model.is_some(), a.quota.is_some()) {
        (true, false, false) => Ok(GameKind::Linear),
        (false, true, false) => Ok(GameKind::Tree),
        (false, false, true) => Ok(GameKind::Threshold),
        (false, false, false) => Err(Failure::usage("no game given: pass --game, --weights, --model or --quota")),
        _ => Err(Failure::usage("ambiguous game: pass --game explicitly")),
    }
}

fn name(kind: GameKind) -> &'static str {
    match kind {
        GameKind::Linear => "linear",
        GameKind::Threshold => "threshold",
        GameKind::Tree => "tree",
        GameKind::Masked => "masked",
    }
}

fn reject_foreign_flags(kind: GameKind, a: &GameArgs) -> CliResult<()> {
    let present = [
        ("--weights", a.weights.is_some(), &[GameKind::Linear][..]),
        ("--intercept", a.intercept.is_some(), &[GameKind::Linear]),
        ("--n", a.n.is_some(), &[GameKind::Linear, GameKind::Threshold, GameKind::Tree, GameKind::Masked]),
        ("--quota", a.quota.is_some(), &[GameKind::Threshold]),
        ("--model", a.model.is_some(), &[GameKind::Tree, GameKind::Masked]),
        ("--data", a.data.is_some(), &[GameKind::Tree, GameKind::Masked]),
        ("--target", a.target.is_some(), &[GameKind::Tree, GameKind::Masked]),
        ("--explicand-index", a.explicand_index.is_some(), &[GameKind::Tree, GameKind::Masked]),
        ("--baselines", a.baselines.is_some(), &[GameKind::Masked]),
    ];
    for (flag, given, allowed) in present {
        if given && !allowed.contains(&kind) {
            return Err(Failure::usage(format!("{flag} conflicts with --game {}", name(kind))));
        }
    }
    Ok(())
}

fn require<T: Clone>(v: &Option<T>, flag: &str, kind: GameKind) -> CliResult<T> {
    v.clone()
        .ok_or_else(|| Failure::usage(format!("--game {} requires {flag}", name(kind))))
}

/// Fills `a.game` and any defaulted game flags, then builds the game.
/// `seed` drives the baseline panel of masked games.
pub fn build(a: &mut GameArgs, seed: u64) -> CliResult<AnyGame> {
    let kind = infer_kind(a)?;
    a.game = Some(kind);
    reject_foreign_flags(kind, a)?;
    let game = match kind {
        GameKind::Linear => {
            let w = require(&a.weights, "--weights", kind)?;
            let intercept = *a.intercept.get_or_insert(0.0);
            AnyGame::Linear(LinearGame::new(w, intercept)?)
        }
        GameKind::Threshold => {
            let n = require(&a.n, "--n", kind)?;
            let quota = require(&a.quota, "--quota", kind)?;
            AnyGame::Threshold(ThresholdGame::new(n, quota)?)
        }
        GameKind::Tree | GameKind::Masked => {
            let model_path = require(&a.model, "--model", kind)?;
            let data_path = require(&a.data, "--data", kind)?;
            let ensemble: TreeEnsemble = load_ensemble_json(&model_path).map_err(|e| Failure::at(&model_path, e))?;
            let data: Dataset = Dataset::load_csv(&data_path, a.target.as_deref()).map_err(|e| Failure::at(&data_path, e))?;
            if data.n_features() != ensemble.n_features {
                return Err(Failure::Precondition(format!(
                    "model expects {} features but {} has {}",
                    ensemble.n_features,
                    data_path.display(),
                    data.n_features()
                )));
            }
            let index = *a.explicand_index.get_or_insert(0);
            let explicand = data.row(index)?.to_vec();
            let ensemble = Arc::new(ensemble);
            if kind == GameKind::Tree {
                AnyGame::Tree(TreeGame::new(ensemble, explicand)?)
            } else {
                let background = data.background_excluding(index);
                let k = *a
                    .baselines
                    .get_or_insert(MaskedPredictorGame::<f64>::DEFAULT_BASELINES.min(background.len()));
                let model = Arc::clone(&ensemble);
                let predictor: Predictor<f64> =
                    Arc::new(move |x: &[f64]| model.predict(x).expect("background rows match the model width"));
                AnyGame::Masked(MaskedPredictorGame::new(
                    predictor,
                    explicand,
                    &background,
                    k,
                    derive_seed(seed, &[b"baselines"]),
                )?)
            }
        }
    };
    if let Some(n) = a.n {
        let actual = game.n_players();
        if n != actual {
            return Err(Failure::usage(format!("--n {n} disagrees with the game's {actual} players")));
        }
    }
    Ok(game)
}
