//! Fully connected network: ReLU hidden layers, softmax output, trained
//! with Adam on mini-batches of the cross-entropy loss plus L2 weight
//! decay. Parameters are exposed as one flat vector so the analytic
//! gradient can be checked against finite differences.

use alloc::vec;
use alloc::vec::Vec;

use crate::domain::{ClassId, Dataset};
use crate::rng::RngHandle;

use super::argmax_scores;

const ADAM_BETA1: f64 = 0.9;
const ADAM_BETA2: f64 = 0.999;
const ADAM_EPS: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct MlpModel {
    pub(crate) num_classes: usize,
    pub(crate) dim: usize,
    /// [dim, hidden..., num_classes]
    pub(crate) layer_dims: Vec<usize>,
    /// Per layer: out × in weights (row-major).
    pub(crate) weights: Vec<Vec<f64>>,
    pub(crate) biases: Vec<Vec<f64>>,
}

impl MlpModel {
    /// He-normal initialization.
    pub fn init(dim: usize, hidden: &[usize], num_classes: usize, rng: &mut RngHandle) -> Self {
        let mut layer_dims = vec![dim];
        layer_dims.extend_from_slice(hidden);
        layer_dims.push(num_classes);
        let mut weights = Vec::new();
        let mut biases = Vec::new();
        for pair in layer_dims.windows(2) {
            let (fan_in, fan_out) = (pair[0], pair[1]);
            let std = libm::sqrt(2.0 / fan_in as f64);
            weights.push(
                (0..fan_in * fan_out)
                    .map(|_| std * standard_normal(rng))
                    .collect(),
            );
            biases.push(vec![0.0; fan_out]);
        }
        Self {
            num_classes,
            dim,
            layer_dims,
            weights,
            biases,
        }
    }

    #[allow(clippy::too_many_arguments)]
    pub fn fit(
        data: &Dataset,
        hidden: &[usize],
        learning_rate: f64,
        epochs: usize,
        batch_size: usize,
        l2: f64,
        rng: &mut RngHandle,
    ) -> Self {
        let mut model = Self::init(data.dim(), hidden, data.num_classes(), rng);
        let n_params = model.params().len();
        let mut m = vec![0.0f64; n_params];
        let mut v = vec![0.0f64; n_params];
        let mut step = 0u32;
        let mut order: Vec<usize> = (0..data.len()).collect();
        let batch_size = batch_size.max(1);

        for _ in 0..epochs {
            rng.shuffle(&mut order);
            for batch in order.chunks(batch_size) {
                let (_, grad) = model.loss_and_gradient(data, batch, l2);
                step += 1;
                let mut params = model.params();
                let bias1 = 1.0 - libm::pow(ADAM_BETA1, f64::from(step));
                let bias2 = 1.0 - libm::pow(ADAM_BETA2, f64::from(step));
                for i in 0..n_params {
                    m[i] = ADAM_BETA1 * m[i] + (1.0 - ADAM_BETA1) * grad[i];
                    v[i] = ADAM_BETA2 * v[i] + (1.0 - ADAM_BETA2) * grad[i] * grad[i];
                    let m_hat = m[i] / bias1;
                    let v_hat = v[i] / bias2;
                    params[i] -= learning_rate * m_hat / (libm::sqrt(v_hat) + ADAM_EPS);
                }
                model.set_params(&params);
            }
        }
        model
    }

    pub fn logits(&self, x: &[f64]) -> Vec<f64> {
        let mut activation = x.to_vec();
        let last = self.weights.len() - 1;
        for (layer, (w, b)) in self.weights.iter().zip(self.biases.iter()).enumerate() {
            let fan_in = self.layer_dims[layer];
            let fan_out = self.layer_dims[layer + 1];
            let mut next = vec![0.0f64; fan_out];
            for (o, out) in next.iter_mut().enumerate() {
                let row = &w[o * fan_in..(o + 1) * fan_in];
                let mut sum = b[o];
                for (j, &a) in activation.iter().enumerate() {
                    sum += row[j] * a;
                }
                *out = if layer < last { sum.max(0.0) } else { sum };
            }
            activation = next;
        }
        activation
    }

    pub fn predict(&self, x: &[f64]) -> ClassId {
        ClassId(argmax_scores(&self.logits(x)))
    }

    /// All weights then all biases, layer by layer, as one flat vector.
    pub fn params(&self) -> Vec<f64> {
        let mut flat = Vec::new();
        for (w, b) in self.weights.iter().zip(self.biases.iter()) {
            flat.extend_from_slice(w);
            flat.extend_from_slice(b);
        }
        flat
    }

    pub fn set_params(&mut self, flat: &[f64]) {
        let mut offset = 0;
        for (w, b) in self.weights.iter_mut().zip(self.biases.iter_mut()) {
            let w_len = w.len();
            w.copy_from_slice(&flat[offset..offset + w_len]);
            offset += w_len;
            let b_len = b.len();
            b.copy_from_slice(&flat[offset..offset + b_len]);
            offset += b_len;
        }
        debug_assert_eq!(offset, flat.len());
    }

    /// Mean cross-entropy over the batch plus (l2/2)·Σw² over the weights
    /// (biases are not penalized).
    pub fn loss(&self, data: &Dataset, batch: &[usize], l2: f64) -> f64 {
        let mut total = 0.0;
        for &i in batch {
            let logits = self.logits(data.features(i));
            let label = data.label(i).unwrap().index();
            total += cross_entropy(&logits, label);
        }
        let weight_sq: f64 = self
            .weights
            .iter()
            .flat_map(|w| w.iter())
            .map(|&w| w * w)
            .sum();
        total / batch.len() as f64 + 0.5 * l2 * weight_sq
    }

    /// Backpropagated gradient of `loss` in the same flat layout as
    /// `params`.
    pub fn loss_and_gradient(&self, data: &Dataset, batch: &[usize], l2: f64) -> (f64, Vec<f64>) {
        let layers = self.weights.len();
        let mut grad_w: Vec<Vec<f64>> = self.weights.iter().map(|w| vec![0.0; w.len()]).collect();
        let mut grad_b: Vec<Vec<f64>> = self.biases.iter().map(|b| vec![0.0; b.len()]).collect();
        let mut total_loss = 0.0;
        let scale = 1.0 / batch.len() as f64;

        for &i in batch {
            // forward, caching post-activation values per layer
            let mut activations: Vec<Vec<f64>> = Vec::with_capacity(layers + 1);
            activations.push(data.features(i).to_vec());
            for layer in 0..layers {
                let fan_in = self.layer_dims[layer];
                let fan_out = self.layer_dims[layer + 1];
                let mut next = vec![0.0f64; fan_out];
                for (o, out) in next.iter_mut().enumerate() {
                    let row = &self.weights[layer][o * fan_in..(o + 1) * fan_in];
                    let mut sum = self.biases[layer][o];
                    for (j, &a) in activations[layer].iter().enumerate() {
                        sum += row[j] * a;
                    }
                    *out = if layer < layers - 1 { sum.max(0.0) } else { sum };
                }
                activations.push(next);
            }

            let label = data.label(i).unwrap().index();
            let logits = &activations[layers];
            total_loss += cross_entropy(logits, label);

            // delta at the output: softmax - one_hot
            let mut delta = softmax(logits);
            delta[label] -= 1.0;

            for layer in (0..layers).rev() {
                let fan_in = self.layer_dims[layer];
                let input = &activations[layer];
                for (o, &d) in delta.iter().enumerate() {
                    let row = &mut grad_w[layer][o * fan_in..(o + 1) * fan_in];
                    for (j, &a) in input.iter().enumerate() {
                        row[j] += scale * d * a;
                    }
                    grad_b[layer][o] += scale * d;
                }
                if layer == 0 {
                    break;
                }
                let mut prev_delta = vec![0.0f64; fan_in];
                for (o, &d) in delta.iter().enumerate() {
                    let row = &self.weights[layer][o * fan_in..(o + 1) * fan_in];
                    for (j, slot) in prev_delta.iter_mut().enumerate() {
                        *slot += d * row[j];
                    }
                }
                // ReLU mask: the cached activation is already rectified
                for (slot, &a) in prev_delta.iter_mut().zip(input.iter()) {
                    if a <= 0.0 {
                        *slot = 0.0;
                    }
                }
                delta = prev_delta;
            }
        }

        let mut weight_sq = 0.0;
        for (gw, w) in grad_w.iter_mut().zip(self.weights.iter()) {
            for (g, &wv) in gw.iter_mut().zip(w.iter()) {
                *g += l2 * wv;
                weight_sq += wv * wv;
            }
        }

        let mut flat = Vec::new();
        for (gw, gb) in grad_w.iter().zip(grad_b.iter()) {
            flat.extend_from_slice(gw);
            flat.extend_from_slice(gb);
        }
        (
            total_loss * scale + 0.5 * l2 * weight_sq,
            flat,
        )
    }
}

fn softmax(logits: &[f64]) -> Vec<f64> {
    let max = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut probs: Vec<f64> = logits.iter().map(|&z| libm::exp(z - max)).collect();
    let denom: f64 = probs.iter().sum();
    probs.iter_mut().for_each(|p| *p /= denom);
    probs
}

fn cross_entropy(logits: &[f64], label: usize) -> f64 {
    let probs = softmax(logits);
    -libm::log(probs[label].max(1e-300))
}

/// Box-Muller transform.
fn standard_normal(rng: &mut RngHandle) -> f64 {
    let mut u1 = rng.uniform();
    while u1 == 0.0 {
        u1 = rng.uniform();
    }
    let u2 = rng.uniform();
    libm::sqrt(-2.0 * libm::log(u1)) * libm::cos(2.0 * core::f64::consts::PI * u2)
}
