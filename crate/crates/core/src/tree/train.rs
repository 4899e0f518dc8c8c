//! Tiny gradient-boosted CART trainer (squared loss, constant learning rate).

use serde::{Deserialize, Serialize};

use super::{Tree, TreeEnsemble, TreeNode};
use crate::error::{Error, Result};
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CartParams {
    pub max_depth: usize,
    pub n_trees: usize,
    pub learning_rate: f64,
    pub min_leaf: usize,
}

impl Default for CartParams {
    fn default() -> Self {
        Self {
            max_depth: 3,
            n_trees: 30,
            learning_rate: 0.3,
            min_leaf: 5,
        }
    }
}

pub fn train_cart<T: Real>(rows: &[Vec<T>], targets: &[T], params: CartParams) -> Result<TreeEnsemble<T>> {
    if rows.len() < 2 {
        return Err(Error::InvalidInput("training needs at least 2 rows".into()));
    }
    if rows.len() != targets.len() {
        return Err(Error::LengthMismatch {
            expected: rows.len(),
            actual: targets.len(),
        });
    }
    let n_features = rows[0].len();
    if rows.iter().any(|r| r.len() != n_features) {
        return Err(Error::InvalidInput("ragged training rows".into()));
    }
    if rows.iter().flatten().chain(targets).any(|v| !v.is_finite()) {
        return Err(Error::InvalidInput("training data must be finite".into()));
    }
    if params.min_leaf == 0 || params.learning_rate.is_nan() || params.learning_rate <= 0.0 {
        return Err(Error::InvalidInput("min_leaf must be >= 1 and learning_rate > 0".into()));
    }

    let base = targets.iter().copied().sum::<T>() / T::from_count(targets.len());
    let mut pred = vec![base; targets.len()];
    let lr = T::lit(params.learning_rate);
    let mut trees = Vec::with_capacity(params.n_trees);
    for _ in 0..params.n_trees {
        let residual: Vec<T> = targets.iter().zip(&pred).map(|(&y, &p)| y - p).collect();
        let mut builder = Builder {
            rows,
            residual: &residual,
            params,
            lr,
            nodes: Vec::new(),
        };
        let all: Vec<usize> = (0..rows.len()).collect();
        builder.grow(all, 0);
        let tree = Tree { nodes: builder.nodes };
        for (p, r) in pred.iter_mut().zip(rows) {
            *p += tree.predict(r);
        }
        trees.push(tree);
    }
    TreeEnsemble::new(n_features, base, trees)
}

struct Builder<'a, T: Real> {
    rows: &'a [Vec<T>],
    residual: &'a [T],
    params: CartParams,
    lr: T,
    nodes: Vec<TreeNode<T>>,
}

struct Split<T> {
    feature: usize,
    threshold: T,
    gain: T,
}

impl<T: Real> Builder<'_, T> {
    fn grow(&mut self, idx: Vec<usize>, depth: usize) -> usize {
        let id = self.nodes.len();
        let mean = idx.iter().map(|&i| self.residual[i]).sum::<T>() / T::from_count(idx.len());
        self.nodes.push(TreeNode::Leaf { value: self.lr * mean });
        if depth >= self.params.max_depth || idx.len() < 2 * self.params.min_leaf {
            return id;
        }
        let Some(split) = self.best_split(&idx) else {
            return id;
        };
        let (left, right): (Vec<usize>, Vec<usize>) = idx
            .iter()
            .partition(|&&i| self.rows[i][split.feature] < split.threshold);
        // every row on one side means the split carries no cover information
        if left.is_empty() || right.is_empty() {
            return id;
        }
        let left_fraction = T::from_count(left.len()) / T::from_count(idx.len());
        let l = self.grow(left, depth + 1);
        let r = self.grow(right, depth + 1);
        self.nodes[id] = TreeNode::Split {
            feature: split.feature,
            threshold: split.threshold,
            left: l,
            right: r,
            left_fraction,
        };
        id
    }

    fn best_split(&self, idx: &[usize]) -> Option<Split<T>> {
        let n = idx.len();
        let total: T = idx.iter().map(|&i| self.residual[i]).sum();
        let parent = total * total / T::from_count(n);
        let min_leaf = self.params.min_leaf;
        let mut best: Option<Split<T>> = None;
        let mut order = idx.to_vec();
        for f in 0..self.rows[0].len() {
            order.sort_by(|&a, &b| {
                self.rows[a][f]
                    .partial_cmp(&self.rows[b][f])
                    .expect("finite features")
                    .then(a.cmp(&b))
            });
            let mut left_sum = T::zero();
            for k in 1..n {
                left_sum += self.residual[order[k - 1]];
                let lo = self.rows[order[k - 1]][f];
                let hi = self.rows[order[k]][f];
                if k < min_leaf || n - k < min_leaf || lo.partial_cmp(&hi) != Some(std::cmp::Ordering::Less) {
                    continue;
                }
                let right_sum = total - left_sum;
                let gain = left_sum * left_sum / T::from_count(k)
                    + right_sum * right_sum / T::from_count(n - k)
                    - parent;
                if best.as_ref().is_none_or(|b| gain > b.gain) {
                    let mut threshold = lo + (hi - lo) / T::lit(2.0);
                    if threshold <= lo {
                        threshold = hi;
                    }
                    best = Some(Split { feature: f, threshold, gain });
                }
            }
        }
        let floor = T::epsilon() * T::lit(1e3) * parent.abs().max(T::epsilon());
        best.filter(|b| b.gain > floor)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_targets_give_constant_model() {
        let rows: Vec<Vec<f64>> = (0..20).map(|i| vec![i as f64, (i % 3) as f64]).collect();
        let e = train_cart(&rows, &[4.0; 20], CartParams::default()).unwrap();
        for r in &rows {
            assert!((e.predict(r).unwrap() - 4.0).abs() < 1e-12);
        }
        assert!(e.trees.iter().all(|t| t.nodes.len() == 1));
    }

    #[test]
    fn zero_trees_predicts_mean() {
        let rows = vec![vec![0.0], vec![1.0], vec![2.0]];
        let params = CartParams { n_trees: 0, ..CartParams::default() };
        let e = train_cart(&rows, &[1.0, 2.0, 6.0], params).unwrap();
        assert_eq!(e.base_score, 3.0);
        assert_eq!(e.predict(&[10.0]).unwrap(), 3.0);
    }

    #[test]
    fn step_data_reduces_mse() {
        let rows: Vec<Vec<f64>> = (0..40).map(|i| vec![i as f64]).collect();
        let y: Vec<f64> = (0..40).map(|i| if i < 20 { 0.0 } else { 5.0 }).collect();
        let params = CartParams { max_depth: 1, n_trees: 1, learning_rate: 1.0, min_leaf: 1 };
        let e = train_cart(&rows, &y, params).unwrap();
        let mean = y.iter().sum::<f64>() / 40.0;
        let var = y.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / 40.0;
        let mse = rows.iter().zip(&y).map(|(r, t)| (e.predict(r).unwrap() - t).powi(2)).sum::<f64>() / 40.0;
        assert!(mse < var);
        assert!(mse < 1e-20);
        match e.trees[0].nodes[0] {
            TreeNode::Split { threshold, left_fraction, .. } => {
                assert_eq!(threshold, 19.5);
                assert_eq!(left_fraction, 0.5);
            }
            _ => panic!("expected a split"),
        }
    }

    #[test]
    fn rejects_bad_input() {
        assert!(train_cart(&[vec![1.0]], &[1.0], CartParams::default()).is_err());
        assert!(train_cart(&[vec![1.0], vec![2.0]], &[1.0, f64::NAN], CartParams::default()).is_err());
    }
}
