//! Second-order gradient boosting on the logistic (softmax) loss.
//!
//! Each round fits one depth-capped regression tree per class to the
//! per-example gradient/hessian pairs g = p − y, h = p(1 − p); leaf values
//! take the Newton step −G/(H + λ) and are shrunk by the learning rate.

use alloc::boxed::Box;
use alloc::vec;
use alloc::vec::Vec;

use crate::domain::{ClassId, Dataset};

use super::argmax_scores;

const LAMBDA_REG: f64 = 1.0;
const MIN_GAIN: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub enum RegNode {
    Leaf {
        value: f64,
    },
    Split {
        feature: usize,
        threshold: f64,
        left: Box<RegNode>,
        right: Box<RegNode>,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegTree {
    pub(crate) root: RegNode,
}

impl RegTree {
    fn predict(&self, x: &[f64]) -> f64 {
        let mut node = &self.root;
        loop {
            match node {
                RegNode::Leaf { value } => return *value,
                RegNode::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => {
                    node = if x[*feature] <= *threshold { left } else { right };
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GbdtModel {
    pub(crate) num_classes: usize,
    pub(crate) dim: usize,
    pub(crate) learning_rate: f64,
    /// rounds[r][k] is round r's tree for class k.
    pub(crate) rounds: Vec<Vec<RegTree>>,
    /// Mean training cross-entropy after each round. Diagnostic only; not
    /// part of the canonical serialization.
    pub train_loss: Vec<f64>,
}

impl GbdtModel {
    pub fn fit(data: &Dataset, n_rounds: usize, max_depth: usize, learning_rate: f64) -> Self {
        let n = data.len();
        let u = data.num_classes();
        let mut scores = vec![0.0f64; n * u];
        let mut rounds = Vec::with_capacity(n_rounds);
        let mut train_loss = Vec::with_capacity(n_rounds);
        let all: Vec<usize> = (0..n).collect();

        for _ in 0..n_rounds {
            let mut round_trees = Vec::with_capacity(u);
            let probs = softmax_rows(&scores, n, u);
            for class in 0..u {
                let mut grad = vec![0.0f64; n];
                let mut hess = vec![0.0f64; n];
                for i in 0..n {
                    let p = probs[i * u + class];
                    let y = f64::from(data.label(i).unwrap().index() == class);
                    grad[i] = p - y;
                    hess[i] = p * (1.0 - p);
                }
                let tree = grow_reg_tree(data, &all, &grad, &hess, max_depth);
                for i in 0..n {
                    scores[i * u + class] += learning_rate * tree.predict(data.features(i));
                }
                round_trees.push(tree);
            }
            rounds.push(round_trees);
            train_loss.push(mean_cross_entropy(&scores, data));
        }

        Self {
            num_classes: u,
            dim: data.dim(),
            learning_rate,
            rounds,
            train_loss,
        }
    }

    pub fn scores(&self, x: &[f64]) -> Vec<f64> {
        let mut scores = vec![0.0f64; self.num_classes];
        for round in &self.rounds {
            for (class, tree) in round.iter().enumerate() {
                scores[class] += self.learning_rate * tree.predict(x);
            }
        }
        scores
    }

    pub fn predict(&self, x: &[f64]) -> ClassId {
        ClassId(argmax_scores(&self.scores(x)))
    }
}

fn softmax_rows(scores: &[f64], n: usize, u: usize) -> Vec<f64> {
    let mut probs = vec![0.0f64; n * u];
    for i in 0..n {
        let row = &scores[i * u..(i + 1) * u];
        let max = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let mut denom = 0.0;
        for k in 0..u {
            let e = libm::exp(row[k] - max);
            probs[i * u + k] = e;
            denom += e;
        }
        for k in 0..u {
            probs[i * u + k] /= denom;
        }
    }
    probs
}

fn mean_cross_entropy(scores: &[f64], data: &Dataset) -> f64 {
    let n = data.len();
    let u = data.num_classes();
    let probs = softmax_rows(scores, n, u);
    let mut total = 0.0;
    for i in 0..n {
        let p = probs[i * u + data.label(i).unwrap().index()].max(1e-15);
        total -= libm::log(p);
    }
    total / n as f64
}

fn grow_reg_tree(
    data: &Dataset,
    indices: &[usize],
    grad: &[f64],
    hess: &[f64],
    max_depth: usize,
) -> RegTree {
    let mut indices = indices.to_vec();
    let root = grow_node(data, &mut indices, grad, hess, max_depth, 0);
    RegTree { root }
}

fn grow_node(
    data: &Dataset,
    indices: &mut [usize],
    grad: &[f64],
    hess: &[f64],
    max_depth: usize,
    depth: usize,
) -> RegNode {
    let g_total: f64 = indices.iter().map(|&i| grad[i]).sum();
    let h_total: f64 = indices.iter().map(|&i| hess[i]).sum();
    let leaf = RegNode::Leaf {
        value: -g_total / (h_total + LAMBDA_REG),
    };
    if depth >= max_depth || indices.len() < 2 {
        return leaf;
    }

    let parent_score = g_total * g_total / (h_total + LAMBDA_REG);
    let mut best: Option<(usize, f64, f64)> = None; // (feature, threshold, gain)
    let mut sorted: Vec<(f64, f64, f64)> = Vec::with_capacity(indices.len());
    for feature in 0..data.dim() {
        sorted.clear();
        sorted.extend(
            indices
                .iter()
                .map(|&i| (data.features(i)[feature], grad[i], hess[i])),
        );
        sorted.sort_unstable_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        let mut g_left = 0.0;
        let mut h_left = 0.0;
        for i in 1..sorted.len() {
            g_left += sorted[i - 1].1;
            h_left += sorted[i - 1].2;
            if sorted[i].0 <= sorted[i - 1].0 {
                continue;
            }
            let g_right = g_total - g_left;
            let h_right = h_total - h_left;
            let gain = g_left * g_left / (h_left + LAMBDA_REG)
                + g_right * g_right / (h_right + LAMBDA_REG)
                - parent_score;
            if gain > MIN_GAIN && best.as_ref().map_or(true, |b| gain > b.2) {
                best = Some((feature, (sorted[i - 1].0 + sorted[i].0) / 2.0, gain));
            }
        }
    }

    let (feature, threshold, _) = match best {
        Some(b) => b,
        None => return leaf,
    };
    let mut left_idx: Vec<usize> = Vec::new();
    let mut right_idx: Vec<usize> = Vec::new();
    for &i in indices.iter() {
        if data.features(i)[feature] <= threshold {
            left_idx.push(i);
        } else {
            right_idx.push(i);
        }
    }
    RegNode::Split {
        feature,
        threshold,
        left: Box::new(grow_node(data, &mut left_idx, grad, hess, max_depth, depth + 1)),
        right: Box::new(grow_node(data, &mut right_idx, grad, hess, max_depth, depth + 1)),
    }
}
