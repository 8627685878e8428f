//! Bagged CART trees with per-node feature subsampling.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::tree::{self, DecisionTree, TreeOptions};
use crate::rng;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RandomForest {
    pub trees: Vec<DecisionTree>,
}

impl RandomForest {
    /// Mean of the per-tree leaf fractions.
    pub fn score(&self, x: &[f64]) -> f64 {
        if self.trees.is_empty() {
            return 0.0;
        }
        self.trees.iter().map(|t| t.score(x)).sum::<f64>() / self.trees.len() as f64
    }
}

pub struct ForestOptions {
    pub n_estimators: usize,
    pub bootstrap: bool,
    pub tree: TreeOptions,
    pub seed: u64,
}

/// Tree `i` draws its bootstrap sample and feature subsets from its own
/// stream seeded with `derive_seed(seed, [i])`.
pub fn train(rows: &[Vec<f64>], labels: &[bool], opts: &ForestOptions) -> RandomForest {
    let n = rows.len();
    let trees = (0..opts.n_estimators)
        .map(|i| {
            let mut r = rng::seeded(rng::derive_seed(opts.seed, &[i as u64]));
            let samples: Vec<usize> = if opts.bootstrap {
                (0..n).map(|_| r.random_range(0..n)).collect()
            } else {
                (0..n).collect()
            };
            tree::grow(rows, labels, &samples, &opts.tree, &mut r)
        })
        .collect();
    RandomForest { trees }
}
