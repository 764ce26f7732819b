//! Multinomial logistic regression trained by full-batch gradient descent.
//! Weights start at zero, so an untrained model predicts class 0 by the
//! smallest-id tie-break.

use alloc::vec;
use alloc::vec::Vec;

use crate::domain::{ClassId, Dataset};

use super::argmax_scores;

#[derive(Debug, Clone, PartialEq)]
pub struct LinearModel {
    pub(crate) num_classes: usize,
    pub(crate) dim: usize,
    /// Row-major u × (dim + 1); the trailing column is the bias.
    pub(crate) weights: Vec<f64>,
}

impl LinearModel {
    pub fn zeros(num_classes: usize, dim: usize) -> Self {
        Self {
            num_classes,
            dim,
            weights: vec![0.0; num_classes * (dim + 1)],
        }
    }

    pub fn fit(data: &Dataset, learning_rate: f64, epochs: usize) -> Self {
        let mut model = Self::zeros(data.num_classes(), data.dim());
        let n = data.len();
        let u = model.num_classes;
        let cols = model.dim + 1;
        let mut grad = vec![0.0f64; u * cols];
        for _ in 0..epochs {
            grad.iter_mut().for_each(|g| *g = 0.0);
            for i in 0..n {
                let x = data.features(i);
                let probs = model.probabilities(x);
                let label = data.label(i).unwrap().index();
                for k in 0..u {
                    let delta = probs[k] - f64::from(k == label);
                    let row = &mut grad[k * cols..(k + 1) * cols];
                    for (j, &xj) in x.iter().enumerate() {
                        row[j] += delta * xj;
                    }
                    row[cols - 1] += delta;
                }
            }
            let scale = learning_rate / n as f64;
            for (w, g) in model.weights.iter_mut().zip(grad.iter()) {
                *w -= scale * g;
            }
        }
        model
    }

    pub fn scores(&self, x: &[f64]) -> Vec<f64> {
        let cols = self.dim + 1;
        (0..self.num_classes)
            .map(|k| {
                let row = &self.weights[k * cols..(k + 1) * cols];
                let mut score = row[cols - 1];
                for (j, &xj) in x.iter().enumerate() {
                    score += row[j] * xj;
                }
                score
            })
            .collect()
    }

    fn probabilities(&self, x: &[f64]) -> Vec<f64> {
        let mut scores = self.scores(x);
        let max = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let mut denom = 0.0;
        for s in scores.iter_mut() {
            *s = libm::exp(*s - max);
            denom += *s;
        }
        scores.iter_mut().for_each(|s| *s /= denom);
        scores
    }

    pub fn predict(&self, x: &[f64]) -> ClassId {
        ClassId(argmax_scores(&self.scores(x)))
    }
}
