//! Random forest: bootstrap-resampled CART trees with per-split feature
//! sampling (sqrt of the dimension), majority vote at prediction.

use alloc::vec::Vec;

use rand::Rng;

use crate::domain::{ClassId, Dataset};
use crate::rng::RngHandle;

use super::tree::DecisionTree;

#[derive(Debug, Clone, PartialEq)]
pub struct RandomForest {
    pub(crate) num_classes: usize,
    pub(crate) dim: usize,
    pub(crate) trees: Vec<DecisionTree>,
}

impl RandomForest {
    pub fn fit(data: &Dataset, n_trees: usize, max_depth: usize, rng: &mut RngHandle) -> Self {
        let mtry = isqrt_ceil(data.dim());
        let trees = (0..n_trees)
            .map(|_| {
                let bootstrap: Vec<usize> =
                    (0..data.len()).map(|_| rng.random_range(0..data.len())).collect();
                DecisionTree::fit(data, &bootstrap, max_depth, Some(mtry), rng)
            })
            .collect();
        Self {
            num_classes: data.num_classes(),
            dim: data.dim(),
            trees,
        }
    }

    pub fn predict(&self, x: &[f64]) -> ClassId {
        let mut votes = alloc::vec![0usize; self.num_classes];
        for tree in &self.trees {
            votes[tree.predict(x).index()] += 1;
        }
        let mut best = 0;
        for (class, &count) in votes.iter().enumerate().skip(1) {
            if count > votes[best] {
                best = class;
            }
        }
        ClassId(best)
    }
}

fn isqrt_ceil(n: usize) -> usize {
    let mut root = 1;
    while root * root < n {
        root += 1;
    }
    root
}
