//! CART classification tree: Gini impurity, exhaustive threshold search
//! over sorted feature values, depth-capped. Used directly and as the base
//! learner of the random forest (which adds per-split feature sampling).

use alloc::boxed::Box;
use alloc::vec;
use alloc::vec::Vec;

use crate::domain::{ClassId, Dataset};
use crate::rng::RngHandle;

#[derive(Debug, Clone, PartialEq)]
pub enum Node {
    Leaf {
        class: ClassId,
    },
    Split {
        feature: usize,
        threshold: f64,
        left: Box<Node>,
        right: Box<Node>,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecisionTree {
    pub(crate) num_classes: usize,
    pub(crate) dim: usize,
    pub(crate) root: Node,
}

impl DecisionTree {
    /// Grow a tree on `indices` of `data`. `feature_sample` limits each
    /// split's candidate features to a random subset of that size (random
    /// forest mode); `None` searches every feature and draws nothing from
    /// the rng.
    pub fn fit(
        data: &Dataset,
        indices: &[usize],
        max_depth: usize,
        feature_sample: Option<usize>,
        rng: &mut RngHandle,
    ) -> Self {
        let grower = Grower {
            data,
            max_depth,
            feature_sample,
        };
        let mut indices = indices.to_vec();
        let root = grower.grow(&mut indices, 0, rng);
        Self {
            num_classes: data.num_classes(),
            dim: data.dim(),
            root,
        }
    }

    pub fn predict(&self, x: &[f64]) -> ClassId {
        let mut node = &self.root;
        loop {
            match node {
                Node::Leaf { class } => return *class,
                Node::Split {
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

struct Grower<'a> {
    data: &'a Dataset,
    max_depth: usize,
    feature_sample: Option<usize>,
}

struct BestSplit {
    feature: usize,
    threshold: f64,
    weighted_gini: f64,
}

impl Grower<'_> {
    fn grow(&self, indices: &mut [usize], depth: usize, rng: &mut RngHandle) -> Node {
        let counts = self.class_counts(indices);
        let majority = majority_class(&counts);
        let pure = counts.iter().filter(|&&c| c > 0).count() <= 1;
        if pure || depth >= self.max_depth || indices.len() < 2 {
            return Node::Leaf { class: majority };
        }
        let split = match self.best_split(indices, &counts, rng) {
            Some(split) => split,
            None => return Node::Leaf { class: majority },
        };
        let mid = partition_in_place(self.data, indices, split.feature, split.threshold);
        if mid == 0 || mid == indices.len() {
            return Node::Leaf { class: majority };
        }
        let (left_idx, right_idx) = indices.split_at_mut(mid);
        let left = self.grow(left_idx, depth + 1, rng);
        let right = self.grow(right_idx, depth + 1, rng);
        Node::Split {
            feature: split.feature,
            threshold: split.threshold,
            left: Box::new(left),
            right: Box::new(right),
        }
    }

    fn class_counts(&self, indices: &[usize]) -> Vec<usize> {
        let mut counts = vec![0usize; self.data.num_classes()];
        for &i in indices {
            counts[self.data.label(i).expect("labeled training data").index()] += 1;
        }
        counts
    }

    // Any impure node with a usable threshold is split, even at zero Gini
    // gain (an XOR pattern gains nothing on the first cut); ties keep the
    // first feature/threshold in scan order.
    fn best_split(
        &self,
        indices: &[usize],
        counts: &[usize],
        rng: &mut RngHandle,
    ) -> Option<BestSplit> {
        let total = indices.len() as f64;
        let mut best: Option<BestSplit> = None;

        let features: Vec<usize> = match self.feature_sample {
            Some(m) if m < self.data.dim() => {
                rand::seq::index::sample(rng, self.data.dim(), m).into_vec()
            }
            _ => (0..self.data.dim()).collect(),
        };

        let mut sorted: Vec<(f64, usize)> = Vec::with_capacity(indices.len());
        for &feature in &features {
            sorted.clear();
            sorted.extend(
                indices
                    .iter()
                    .map(|&i| (self.data.features(i)[feature], self.data.label(i).unwrap().index())),
            );
            sorted.sort_unstable_by(|a, b| a.0.partial_cmp(&b.0).unwrap());

            let mut left_counts = vec![0usize; counts.len()];
            let mut left_sq = 0.0f64; // sum of squared left counts
            let right_sq_full: f64 = counts.iter().map(|&c| (c * c) as f64).sum();
            let mut right_sq = right_sq_full;
            let mut right_counts: Vec<usize> = counts.to_vec();

            for i in 1..sorted.len() {
                let label = sorted[i - 1].1;
                left_sq += (2 * left_counts[label] + 1) as f64;
                left_counts[label] += 1;
                right_sq -= (2 * right_counts[label] - 1) as f64;
                right_counts[label] -= 1;

                if sorted[i].0 <= sorted[i - 1].0 {
                    continue;
                }
                let nl = i as f64;
                let nr = total - nl;
                // weighted gini = nl/n (1 - left_sq/nl^2) + nr/n (1 - right_sq/nr^2)
                let weighted = (nl - left_sq / nl + nr - right_sq / nr) / total;
                if best.as_ref().map_or(true, |b| weighted < b.weighted_gini) {
                    best = Some(BestSplit {
                        feature,
                        threshold: (sorted[i - 1].0 + sorted[i].0) / 2.0,
                        weighted_gini: weighted,
                    });
                }
            }
        }
        best
    }
}

/// Largest count wins; ties break toward the smallest class id.
fn majority_class(counts: &[usize]) -> ClassId {
    let mut best = 0;
    for (class, &count) in counts.iter().enumerate().skip(1) {
        if count > counts[best] {
            best = class;
        }
    }
    ClassId(best)
}

/// Stable two-way partition by `x[feature] <= threshold`; returns the size
/// of the left side.
fn partition_in_place(data: &Dataset, indices: &mut [usize], feature: usize, threshold: f64) -> usize {
    let mut reordered: Vec<usize> = Vec::with_capacity(indices.len());
    reordered.extend(
        indices
            .iter()
            .copied()
            .filter(|&i| data.features(i)[feature] <= threshold),
    );
    let mid = reordered.len();
    reordered.extend(
        indices
            .iter()
            .copied()
            .filter(|&i| data.features(i)[feature] > threshold),
    );
    indices.copy_from_slice(&reordered);
    mid
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::Example;

    fn labeled(points: &[(&[f64], usize)]) -> Dataset {
        let num_classes = points.iter().map(|p| p.1).max().unwrap() + 1;
        let dim = points[0].0.len();
        let examples = points
            .iter()
            .map(|(f, l)| Example::labeled(f.to_vec(), *l))
            .collect();
        Dataset::new(num_classes, dim, examples).unwrap()
    }

    #[test]
    fn memorizes_threshold_rule() {
        let data = labeled(&[
            (&[-2.0], 0),
            (&[-1.0], 0),
            (&[-0.5], 0),
            (&[0.5], 1),
            (&[1.0], 1),
            (&[2.0], 1),
        ]);
        let indices: Vec<usize> = (0..data.len()).collect();
        let tree = DecisionTree::fit(&data, &indices, 6, None, &mut RngHandle::new(0));
        assert_eq!(tree.predict(&[-1.0]), ClassId(0));
        assert_eq!(tree.predict(&[3.0]), ClassId(1));
    }

    #[test]
    fn single_class_is_constant() {
        let data = labeled(&[(&[0.0, 1.0], 1), (&[1.0, 0.0], 1)]);
        let indices: Vec<usize> = (0..data.len()).collect();
        let tree = DecisionTree::fit(&data, &indices, 6, None, &mut RngHandle::new(0));
        assert_eq!(tree.predict(&[5.0, -7.0]), ClassId(1));
    }

    #[test]
    fn depth_six_separates_random_xor() {
        let mut rng = RngHandle::new(42);
        let examples: Vec<Example> = (0..200)
            .map(|_| {
                let x = rng.uniform() * 2.0 - 1.0;
                let y = rng.uniform() * 2.0 - 1.0;
                let label = usize::from((x > 0.0) != (y > 0.0));
                Example::labeled(alloc::vec![x, y], label)
            })
            .collect();
        let data = Dataset::new(2, 2, examples).unwrap();
        let indices: Vec<usize> = (0..data.len()).collect();
        let tree = DecisionTree::fit(&data, &indices, 6, None, &mut RngHandle::new(0));
        let correct = (0..data.len())
            .filter(|&i| tree.predict(data.features(i)) == data.label(i).unwrap())
            .count();
        assert!(correct as f64 / data.len() as f64 >= 0.95);
    }
}
