//! From-scratch trainable classifiers: decision tree, random forest,
//! gradient-boosted trees, logistic regression, and an MLP. Any kind can
//! serve as teacher, student, or final model; class-score ties always break
//! toward the smallest class id, and training is deterministic given the
//! seed.

mod codec;
mod forest;
mod gbdt;
mod linear;
mod mlp;
mod tree;

use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::domain::{ClassId, Dataset};
use crate::error::Error;
use crate::rng::RngHandle;

pub use forest::RandomForest;
pub use gbdt::GbdtModel;
pub use linear::LinearModel;
pub use mlp::MlpModel;
pub use tree::DecisionTree;

/// Model kind plus hyperparameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ModelSpec {
    DecisionTree {
        max_depth: usize,
    },
    RandomForest {
        n_trees: usize,
        max_depth: usize,
    },
    Gbdt {
        n_rounds: usize,
        max_depth: usize,
        learning_rate: f64,
    },
    LogisticRegression {
        learning_rate: f64,
        epochs: usize,
    },
    Mlp {
        hidden: Vec<usize>,
        learning_rate: f64,
        epochs: usize,
        batch_size: usize,
        l2: f64,
    },
}

impl ModelSpec {
    pub fn validate(&self) -> Result<(), Error> {
        let bad = |msg: &str| Err(Error::InvalidParameter(msg.into()));
        match self {
            ModelSpec::DecisionTree { max_depth } => {
                if *max_depth == 0 {
                    return bad("tree depth must be >= 1");
                }
            }
            ModelSpec::RandomForest { n_trees, max_depth } => {
                if *n_trees == 0 || *max_depth == 0 {
                    return bad("forest needs n_trees >= 1 and max_depth >= 1");
                }
            }
            ModelSpec::Gbdt {
                n_rounds,
                max_depth,
                learning_rate,
            } => {
                if *n_rounds == 0 || *max_depth == 0 || !(*learning_rate > 0.0) {
                    return bad("gbdt needs positive rounds, depth, and learning rate");
                }
            }
            ModelSpec::LogisticRegression {
                learning_rate,
                epochs,
            } => {
                if !(*learning_rate > 0.0) || *epochs == 0 {
                    return bad("logistic regression needs positive learning rate and epochs");
                }
            }
            ModelSpec::Mlp {
                hidden,
                learning_rate,
                epochs,
                batch_size,
                l2,
            } => {
                if hidden.is_empty() || hidden.iter().any(|&h| h == 0) {
                    return bad("mlp needs at least one nonempty hidden layer");
                }
                if !(*learning_rate > 0.0) || *epochs == 0 || *batch_size == 0 || *l2 < 0.0 {
                    return bad("mlp needs positive learning rate, epochs, and batch size");
                }
            }
        }
        Ok(())
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            ModelSpec::DecisionTree { .. } => "decision_tree",
            ModelSpec::RandomForest { .. } => "random_forest",
            ModelSpec::Gbdt { .. } => "gbdt",
            ModelSpec::LogisticRegression { .. } => "logistic_regression",
            ModelSpec::Mlp { .. } => "mlp",
        }
    }
}

/// A trained model. Immutable after fit; prediction is deterministic.
#[derive(Debug, Clone, PartialEq)]
pub enum Classifier {
    DecisionTree(DecisionTree),
    RandomForest(RandomForest),
    Gbdt(GbdtModel),
    LogisticRegression(LinearModel),
    Mlp(MlpModel),
}

/// Train a classifier of the requested kind. Every example must be labeled.
pub fn fit(spec: &ModelSpec, train: &Dataset, rng: &mut RngHandle) -> Result<Classifier, Error> {
    spec.validate()?;
    if train.is_empty() {
        return Err(Error::EmptyTrainingSet);
    }
    if let Some(index) = (0..train.len()).find(|&i| train.label(i).is_none()) {
        return Err(Error::UnlabeledExample { index });
    }
    let model = match spec {
        ModelSpec::DecisionTree { max_depth } => {
            let all: Vec<usize> = (0..train.len()).collect();
            Classifier::DecisionTree(DecisionTree::fit(train, &all, *max_depth, None, rng))
        }
        ModelSpec::RandomForest { n_trees, max_depth } => {
            Classifier::RandomForest(RandomForest::fit(train, *n_trees, *max_depth, rng))
        }
        ModelSpec::Gbdt {
            n_rounds,
            max_depth,
            learning_rate,
        } => Classifier::Gbdt(GbdtModel::fit(train, *n_rounds, *max_depth, *learning_rate)),
        ModelSpec::LogisticRegression {
            learning_rate,
            epochs,
        } => Classifier::LogisticRegression(LinearModel::fit(train, *learning_rate, *epochs)),
        ModelSpec::Mlp {
            hidden,
            learning_rate,
            epochs,
            batch_size,
            l2,
        } => Classifier::Mlp(MlpModel::fit(
            train,
            hidden,
            *learning_rate,
            *epochs,
            *batch_size,
            *l2,
            rng,
        )),
    };
    Ok(model)
}

impl Classifier {
    pub fn num_classes(&self) -> usize {
        match self {
            Classifier::DecisionTree(m) => m.num_classes,
            Classifier::RandomForest(m) => m.num_classes,
            Classifier::Gbdt(m) => m.num_classes,
            Classifier::LogisticRegression(m) => m.num_classes,
            Classifier::Mlp(m) => m.num_classes,
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Classifier::DecisionTree(m) => m.dim,
            Classifier::RandomForest(m) => m.dim,
            Classifier::Gbdt(m) => m.dim,
            Classifier::LogisticRegression(m) => m.dim,
            Classifier::Mlp(m) => m.dim,
        }
    }

    pub fn predict(&self, x: &[f64]) -> Result<ClassId, Error> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: x.len(),
            });
        }
        let class = match self {
            Classifier::DecisionTree(m) => m.predict(x),
            Classifier::RandomForest(m) => m.predict(x),
            Classifier::Gbdt(m) => m.predict(x),
            Classifier::LogisticRegression(m) => m.predict(x),
            Classifier::Mlp(m) => m.predict(x),
        };
        debug_assert!(class.index() < self.num_classes());
        Ok(class)
    }

    /// Canonical binary serialization (see `codec` for the layout).
    pub fn to_bytes(&self) -> Vec<u8> {
        codec::encode(self)
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, Error> {
        codec::decode(bytes)
    }

    /// Byte count of the canonical serialization; the unit of communication
    /// accounting.
    pub fn serialized_size(&self) -> usize {
        self.to_bytes().len()
    }
}

/// Index of the largest score; ties break toward the smallest class id.
pub(crate) fn argmax_scores(scores: &[f64]) -> usize {
    let mut best = 0;
    for (i, &score) in scores.iter().enumerate().skip(1) {
        if score > scores[best] {
            best = i;
        }
    }
    best
}
