//! Core data types shared by every other module.
//!
//! All types here are immutable after construction and safe to share across
//! concurrent workers.

use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::error::Error;

/// A class label: a dense integer in `[0, u)` where `u` is the task's class
/// count.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ClassId(pub usize);

impl ClassId {
    pub fn index(self) -> usize {
        self.0
    }
}

/// One labeled or unlabeled feature vector. Public (auxiliary) examples have
/// `label = None`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Example {
    pub features: Vec<f64>,
    pub label: Option<ClassId>,
}

impl Example {
    pub fn labeled(features: Vec<f64>, label: usize) -> Self {
        Self {
            features,
            label: Some(ClassId(label)),
        }
    }

    pub fn unlabeled(features: Vec<f64>) -> Self {
        Self {
            features,
            label: None,
        }
    }
}

/// An ordered list of examples with a fixed feature dimension and class count.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    examples: Vec<Example>,
    num_classes: usize,
    dim: usize,
}

impl Dataset {
    /// Validates that every example has `dim` finite features and any label
    /// is `< num_classes`.
    pub fn new(num_classes: usize, dim: usize, examples: Vec<Example>) -> Result<Self, Error> {
        if num_classes == 0 {
            return Err(Error::InvalidParameter("num_classes must be >= 1".into()));
        }
        for (index, example) in examples.iter().enumerate() {
            if example.features.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: example.features.len(),
                });
            }
            if example.features.iter().any(|v| !v.is_finite()) {
                return Err(Error::NonFiniteFeature { index });
            }
            if let Some(label) = example.label {
                if label.index() >= num_classes {
                    return Err(Error::LabelOutOfRange {
                        label: label.index(),
                        num_classes,
                    });
                }
            }
        }
        Ok(Self {
            examples,
            num_classes,
            dim,
        })
    }

    pub fn len(&self) -> usize {
        self.examples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.examples.is_empty()
    }

    pub fn num_classes(&self) -> usize {
        self.num_classes
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn examples(&self) -> &[Example] {
        &self.examples
    }

    pub fn features(&self, index: usize) -> &[f64] {
        &self.examples[index].features
    }

    pub fn label(&self, index: usize) -> Option<ClassId> {
        self.examples[index].label
    }

    /// Materialize the examples at `indices` as a new dataset (same classes
    /// and dimension).
    pub fn subset(&self, indices: &[usize]) -> Dataset {
        Dataset {
            examples: indices.iter().map(|&i| self.examples[i].clone()).collect(),
            num_classes: self.num_classes,
            dim: self.dim,
        }
    }

    /// Same examples with labels removed.
    pub fn without_labels(&self) -> Dataset {
        Dataset {
            examples: self
                .examples
                .iter()
                .map(|e| Example::unlabeled(e.features.clone()))
                .collect(),
            num_classes: self.num_classes,
            dim: self.dim,
        }
    }

    /// Per-class example counts over the labeled examples.
    pub fn class_histogram(&self) -> Vec<usize> {
        let mut counts = vec![0usize; self.num_classes];
        for example in &self.examples {
            if let Some(label) = example.label {
                counts[label.index()] += 1;
            }
        }
        counts
    }
}

/// Per-class vote counts for one query example. Counts are real-valued
/// because Laplace noise may be added; pre-noise counts are nonnegative
/// integers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VoteHistogram {
    counts: Vec<f64>,
}

impl VoteHistogram {
    pub fn zeros(num_classes: usize) -> Self {
        Self {
            counts: vec![0.0; num_classes],
        }
    }

    /// Rejects counts whose length differs from `num_classes`.
    pub fn from_counts(num_classes: usize, counts: Vec<f64>) -> Result<Self, Error> {
        if counts.len() != num_classes {
            return Err(Error::HistogramLength {
                expected: num_classes,
                got: counts.len(),
            });
        }
        Ok(Self { counts })
    }

    pub fn num_classes(&self) -> usize {
        self.counts.len()
    }

    pub fn counts(&self) -> &[f64] {
        &self.counts
    }

    pub fn add_vote(&mut self, class: ClassId) {
        self.counts[class.index()] += 1.0;
    }

    pub fn add_votes(&mut self, class: ClassId, votes: f64) {
        self.counts[class.index()] += votes;
    }

    pub fn total(&self) -> f64 {
        self.counts.iter().sum()
    }

    /// Index of the largest count; ties break toward the smallest class id.
    pub fn argmax(&self) -> ClassId {
        let mut best = 0;
        for (i, &count) in self.counts.iter().enumerate().skip(1) {
            if count > self.counts[best] {
                best = i;
            }
        }
        ClassId(best)
    }

    /// Largest count minus second-largest count (0 when all classes tie).
    pub fn top_two_gap(&self) -> f64 {
        debug_assert!(self.counts.len() >= 2);
        let (mut top, mut second) = (f64::NEG_INFINITY, f64::NEG_INFINITY);
        for &count in &self.counts {
            if count > top {
                second = top;
                top = count;
            } else if count > second {
                second = count;
            }
        }
        top - second
    }

    pub fn is_integer_valued(&self) -> bool {
        self.counts
            .iter()
            .all(|&c| c >= 0.0 && c == libm::floor(c))
    }
}

/// Privacy level of a run: no noise, server-side noise only (the final
/// model is differentially private), or party-side noise only (the student
/// models are differentially private).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PrivacyLevel {
    L0,
    L1,
    L2,
}
