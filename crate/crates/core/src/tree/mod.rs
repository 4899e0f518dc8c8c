//! Additive regression-tree ensembles and the tree set function.
//!
//! A feature outside the coalition is marginalized at each split on it by
//! averaging both children, weighted by the fraction of training rows that
//! went each way. No feature values are substituted.

mod json;
mod train;

pub use json::{ensemble_from_json, ensemble_to_json, load_ensemble_json, save_ensemble_json};
pub use train::{train_cart, CartParams};

use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::games::{EvalCounter, Game};
use crate::mask::SubsetMask;
use crate::scalar::Real;

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum TreeNode<T: Real = f64> {
    /// Rows with `x[feature] < threshold` go left; ties go right.
    Split {
        feature: usize,
        threshold: T,
        left: usize,
        right: usize,
        left_fraction: T,
    },
    Leaf { value: T },
}

/// A single tree; node 0 is the root.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Tree<T: Real = f64> {
    pub nodes: Vec<TreeNode<T>>,
}

impl<T: Real> Tree<T> {
    pub fn leaf(value: T) -> Self {
        Self {
            nodes: vec![TreeNode::Leaf { value }],
        }
    }

    fn predict(&self, x: &[T]) -> T {
        let mut id = 0;
        loop {
            match self.nodes[id] {
                TreeNode::Leaf { value } => return value,
                TreeNode::Split {
                    feature,
                    threshold,
                    left,
                    right,
                    ..
                } => id = if x[feature] < threshold { left } else { right },
            }
        }
    }

    fn predict_partial(&self, id: usize, x: &[T], mask: SubsetMask) -> T {
        match self.nodes[id] {
            TreeNode::Leaf { value } => value,
            TreeNode::Split {
                feature,
                threshold,
                left,
                right,
                left_fraction,
            } => {
                if mask.contains(feature) {
                    let next = if x[feature] < threshold { left } else { right };
                    self.predict_partial(next, x, mask)
                } else {
                    left_fraction * self.predict_partial(left, x, mask)
                        + (T::one() - left_fraction) * self.predict_partial(right, x, mask)
                }
            }
        }
    }

    fn leaf_range(&self) -> (T, T) {
        self.nodes.iter().fold((T::infinity(), T::neg_infinity()), |(lo, hi), n| match n {
            TreeNode::Leaf { value } => (lo.min(*value), hi.max(*value)),
            TreeNode::Split { .. } => (lo, hi),
        })
    }

    /// Checks child indices, fractions, feature indices, and that every node
    /// is reached exactly once from the root.
    fn validate(&self, n_features: usize, path: &str) -> Result<()> {
        if self.nodes.is_empty() {
            return Err(Error::schema(path, "tree has no nodes"));
        }
        let mut seen = vec![false; self.nodes.len()];
        let mut stack = vec![0usize];
        while let Some(id) = stack.pop() {
            let here = format!("{path}.nodes[{id}]");
            if std::mem::replace(&mut seen[id], true) {
                return Err(Error::schema(here, "node reached twice (cycle or shared child)"));
            }
            match &self.nodes[id] {
                TreeNode::Leaf { value } => {
                    if !value.is_finite() {
                        return Err(Error::schema(here, "leaf value must be finite"));
                    }
                }
                TreeNode::Split {
                    feature,
                    threshold,
                    left,
                    right,
                    left_fraction,
                } => {
                    if *feature >= n_features {
                        return Err(Error::schema(here, format!("feature {feature} >= n_features {n_features}")));
                    }
                    if threshold.is_nan() {
                        return Err(Error::schema(here, "threshold is NaN"));
                    }
                    if !(*left_fraction > T::zero() && *left_fraction < T::one()) {
                        return Err(Error::schema(here, format!("left_fraction {left_fraction} must be in (0,1)")));
                    }
                    for child in [*left, *right] {
                        if child >= self.nodes.len() {
                            return Err(Error::schema(here, format!("child {child} out of range")));
                        }
                        stack.push(child);
                    }
                }
            }
        }
        if let Some(orphan) = seen.iter().position(|s| !s) {
            return Err(Error::schema(format!("{path}.nodes[{orphan}]"), "node unreachable from root"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TreeEnsemble<T: Real = f64> {
    pub n_features: usize,
    pub base_score: T,
    pub trees: Vec<Tree<T>>,
}

impl<T: Real> TreeEnsemble<T> {
    pub fn new(n_features: usize, base_score: T, trees: Vec<Tree<T>>) -> Result<Self> {
        if !base_score.is_finite() {
            return Err(Error::schema("base_score", "must be finite"));
        }
        for (t, tree) in trees.iter().enumerate() {
            tree.validate(n_features, &format!("trees[{t}]"))?;
        }
        Ok(Self {
            n_features,
            base_score,
            trees,
        })
    }

    fn check_row(&self, x: &[T]) -> Result<()> {
        if x.len() != self.n_features {
            return Err(Error::LengthMismatch {
                expected: self.n_features,
                actual: x.len(),
            });
        }
        if let Some(i) = x.iter().position(|v| v.is_nan()) {
            return Err(Error::NanFeature(i));
        }
        Ok(())
    }

    pub fn predict(&self, x: &[T]) -> Result<T> {
        self.check_row(x)?;
        Ok(self.predict_unchecked(x))
    }

    pub(crate) fn predict_unchecked(&self, x: &[T]) -> T {
        self.trees.iter().fold(self.base_score, |acc, t| acc + t.predict(x))
    }

    /// Prediction using only the features in `mask`.
    pub fn predict_partial(&self, x: &[T], mask: SubsetMask) -> Result<T> {
        self.check_row(x)?;
        if mask.n_players() != self.n_features {
            return Err(Error::LengthMismatch {
                expected: self.n_features,
                actual: mask.n_players(),
            });
        }
        Ok(self.predict_partial_unchecked(x, mask))
    }

    fn predict_partial_unchecked(&self, x: &[T], mask: SubsetMask) -> T {
        self.trees
            .iter()
            .fold(self.base_score, |acc, t| acc + t.predict_partial(0, x, mask))
    }

    /// Bounds `[base + Σ min leaf, base + Σ max leaf]` on any prediction.
    pub fn output_bounds(&self) -> (T, T) {
        self.trees.iter().fold((self.base_score, self.base_score), |(lo, hi), t| {
            let (a, b) = t.leaf_range();
            (lo + a, hi + b)
        })
    }
}

/// `v(S) = predict_partial(ensemble, explicand, S)`.
#[derive(Debug, Clone)]
pub struct TreeGame<T: Real = f64> {
    ensemble: Arc<TreeEnsemble<T>>,
    explicand: Vec<T>,
    evals: EvalCounter,
}

impl<T: Real> TreeGame<T> {
    pub fn new(ensemble: Arc<TreeEnsemble<T>>, explicand: Vec<T>) -> Result<Self> {
        ensemble.check_row(&explicand)?;
        crate::mask::check_players(explicand.len())?;
        Ok(Self {
            ensemble,
            explicand,
            evals: EvalCounter::default(),
        })
    }

    pub fn ensemble(&self) -> &TreeEnsemble<T> {
        &self.ensemble
    }

    pub fn explicand(&self) -> &[T] {
        &self.explicand
    }
}

impl<T: Real> Game<T> for TreeGame<T> {
    fn n_players(&self) -> usize {
        self.explicand.len()
    }

    fn evaluate(&mut self, mask: SubsetMask) -> T {
        self.evals.tick();
        self.ensemble.predict_partial_unchecked(&self.explicand, mask)
    }

    fn eval_count(&self) -> u64 {
        self.evals.get()
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::rng::stream;
    use rand::Rng;

    pub(crate) fn stump(left_fraction: f64) -> Tree<f64> {
        Tree {
            nodes: vec![
                TreeNode::Split {
                    feature: 0,
                    threshold: 1.0,
                    left: 1,
                    right: 2,
                    left_fraction,
                },
                TreeNode::Leaf { value: 2.0 },
                TreeNode::Leaf { value: 3.0 },
            ],
        }
    }

    /// Random complete tree of the given depth over `n_features`.
    pub(crate) fn random_tree<R: Rng>(depth: usize, n_features: usize, rng: &mut R) -> Tree<f64> {
        let mut nodes = Vec::new();
        fn grow<R: Rng>(nodes: &mut Vec<TreeNode<f64>>, depth: usize, nf: usize, rng: &mut R) -> usize {
            let id = nodes.len();
            nodes.push(TreeNode::Leaf { value: rng.random_range(-2.0..2.0) });
            if depth > 0 {
                let left = grow(nodes, depth - 1, nf, rng);
                let right = grow(nodes, depth - 1, nf, rng);
                nodes[id] = TreeNode::Split {
                    feature: rng.random_range(0..nf),
                    threshold: rng.random_range(-1.0..1.0),
                    left,
                    right,
                    left_fraction: rng.random_range(0.05..0.95),
                };
            }
            id
        }
        grow(&mut nodes, depth, n_features, rng);
        Tree { nodes }
    }

    /// Oracle: Σ over leaves of value × product of branch weights.
    fn path_sum(tree: &Tree<f64>, x: &[f64], mask: SubsetMask) -> f64 {
        let mut total = 0.0;
        let mut stack = vec![(0usize, 1.0f64)];
        while let Some((id, w)) = stack.pop() {
            match tree.nodes[id] {
                TreeNode::Leaf { value } => total += value * w,
                TreeNode::Split {
                    feature,
                    threshold,
                    left,
                    right,
                    left_fraction,
                } => {
                    let (wl, wr) = if mask.contains(feature) {
                        if x[feature] < threshold { (1.0, 0.0) } else { (0.0, 1.0) }
                    } else {
                        (left_fraction, 1.0 - left_fraction)
                    };
                    stack.push((left, w * wl));
                    stack.push((right, w * wr));
                }
            }
        }
        total
    }

    #[test]
    fn predict_examples() {
        let empty = TreeEnsemble::new(1, 0.5, vec![]).unwrap();
        assert_eq!(empty.predict(&[3.0]).unwrap(), 0.5);
        let e = TreeEnsemble::new(1, 0.5, vec![stump(0.25)]).unwrap();
        assert_eq!(e.predict(&[0.0]).unwrap(), 2.5);
        assert_eq!(e.predict(&[1.0]).unwrap(), 3.5);
        assert!(matches!(e.predict(&[f64::NAN]), Err(Error::NanFeature(0))));
        assert!(e.predict(&[0.0, 1.0]).is_err());
    }

    #[test]
    fn partial_prediction_of_stump() {
        let e = TreeEnsemble::new(1, 0.5, vec![stump(0.25)]).unwrap();
        let v = e.predict_partial(&[0.0], SubsetMask::empty(1)).unwrap();
        assert!((v - (0.5 + 2.75)).abs() < 1e-15);
        assert_eq!(e.predict_partial(&[0.0], SubsetMask::full(1)).unwrap(), 2.5);
    }

    #[test]
    fn two_level_tree_root_feature_missing() {
        // root splits on f0, children split on f1
        let t = Tree {
            nodes: vec![
                TreeNode::Split { feature: 0, threshold: 0.0, left: 1, right: 2, left_fraction: 0.4 },
                TreeNode::Split { feature: 1, threshold: 0.0, left: 3, right: 4, left_fraction: 0.5 },
                TreeNode::Split { feature: 1, threshold: 5.0, left: 5, right: 6, left_fraction: 0.9 },
                TreeNode::Leaf { value: 1.0 },
                TreeNode::Leaf { value: 2.0 },
                TreeNode::Leaf { value: 10.0 },
                TreeNode::Leaf { value: 20.0 },
            ],
        };
        let e = TreeEnsemble::new(2, 0.0, vec![t]).unwrap();
        let x = [3.0f64, 1.0];
        let s = SubsetMask::from_players(&[1], 2).unwrap();
        // f1 = 1: left subtree -> 2.0, right subtree -> 10.0
        let expected = 0.4 * 2.0 + 0.6 * 10.0;
        assert!((e.predict_partial(&x, s).unwrap() - expected).abs() < 1e-12);
    }

    #[test]
    fn matches_path_sum_oracle_up_to_depth_six() {
        let mut rng = stream(17, "trees");
        for depth in 0..=6 {
            let tree = random_tree(depth, 5, &mut rng);
            let e = TreeEnsemble::new(5, 0.0, vec![tree.clone()]).unwrap();
            let x: Vec<f64> = (0..5).map(|_| rng.random_range(-1.5..1.5)).collect();
            for s in SubsetMask::all(5) {
                let got = e.predict_partial(&x, s).unwrap();
                assert!((got - path_sum(&tree, &x, s)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn full_mask_is_predict_and_empty_mask_ignores_x() {
        let mut rng = stream(18, "trees");
        let trees = (0..5).map(|_| random_tree(3, 4, &mut rng)).collect();
        let e = TreeEnsemble::new(4, 0.1, trees).unwrap();
        let (lo, hi) = e.output_bounds();
        let x1 = [0.2, -0.3, 0.9, 0.0];
        let x2 = [-1.0, 1.0, -0.5, 0.7];
        assert_eq!(e.predict_partial(&x1, SubsetMask::full(4)).unwrap(), e.predict(&x1).unwrap());
        assert_eq!(
            e.predict_partial(&x1, SubsetMask::empty(4)).unwrap(),
            e.predict_partial(&x2, SubsetMask::empty(4)).unwrap()
        );
        for s in SubsetMask::all(4) {
            let v = e.predict_partial(&x2, s).unwrap();
            assert!(v >= lo - 1e-12 && v <= hi + 1e-12);
        }
    }

    #[test]
    fn validation_errors() {
        let bad_fraction = stump(0.0);
        let err = TreeEnsemble::new(1, 0.0, vec![bad_fraction]).unwrap_err();
        assert!(err.to_string().contains("trees[0].nodes[0]"));
        let cyclic = Tree {
            nodes: vec![TreeNode::Split { feature: 0, threshold: 0.0, left: 0, right: 0, left_fraction: 0.5 }],
        };
        assert!(TreeEnsemble::new(1, 0.0, vec![cyclic]).is_err());
        assert!(TreeEnsemble::new(0, 0.0, vec![stump(0.5)]).is_err());
    }

    #[test]
    fn tree_game_endpoints() {
        let e = Arc::new(TreeEnsemble::new(1, 0.5, vec![stump(0.25)]).unwrap());
        let mut g = TreeGame::new(e, vec![0.0]).unwrap();
        assert_eq!(g.evaluate(SubsetMask::full(1)), 2.5);
        assert!((g.evaluate(SubsetMask::empty(1)) - 3.25).abs() < 1e-15);
        assert_eq!(g.eval_count(), 2);
    }
}
