//! Canonical binary serialization of trained classifiers.
//!
//! Layout (all integers little-endian):
//!
//! ```text
//! magic "FKTC" | version u16 | kind u8 | payload
//! ```
//!
//! Payloads:
//! - decision_tree (0):  u32 classes, u32 dim, tree
//! - random_forest (1):  u32 classes, u32 dim, u32 n_trees, trees
//! - gbdt          (2):  u32 classes, u32 dim, f64 learning_rate,
//!                       u32 n_rounds, n_rounds × classes reg-trees
//! - logistic      (3):  u32 classes, u32 dim, classes×(dim+1) f64 weights
//! - mlp           (4):  u32 classes, u32 dim, u8 n_layers, u32 layer dims,
//!                       per layer weights then biases as f64
//!
//! Classification trees serialize preorder: tag u8 (0 leaf / 1 split);
//! leaves carry a u32 class, splits a u32 feature, f64 threshold, then the
//! left and right subtrees. Regression trees are identical except leaves
//! carry an f64 value. The byte stream is a pure function of the learned
//! state, so equal models serialize identically.

use alloc::boxed::Box;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::domain::ClassId;
use crate::error::Error;

use super::forest::RandomForest;
use super::gbdt::{GbdtModel, RegNode, RegTree};
use super::linear::LinearModel;
use super::mlp::MlpModel;
use super::tree::{DecisionTree, Node};
use super::Classifier;

const MAGIC: &[u8; 4] = b"FKTC";
const VERSION: u16 = 1;

const KIND_TREE: u8 = 0;
const KIND_FOREST: u8 = 1;
const KIND_GBDT: u8 = 2;
const KIND_LOGISTIC: u8 = 3;
const KIND_MLP: u8 = 4;

pub fn encode(model: &Classifier) -> Vec<u8> {
    let mut out = Vec::new();
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    match model {
        Classifier::DecisionTree(tree) => {
            out.push(KIND_TREE);
            put_u32(&mut out, tree.num_classes as u32);
            put_u32(&mut out, tree.dim as u32);
            put_node(&mut out, &tree.root);
        }
        Classifier::RandomForest(forest) => {
            out.push(KIND_FOREST);
            put_u32(&mut out, forest.num_classes as u32);
            put_u32(&mut out, forest.dim as u32);
            put_u32(&mut out, forest.trees.len() as u32);
            for tree in &forest.trees {
                put_node(&mut out, &tree.root);
            }
        }
        Classifier::Gbdt(gbdt) => {
            out.push(KIND_GBDT);
            put_u32(&mut out, gbdt.num_classes as u32);
            put_u32(&mut out, gbdt.dim as u32);
            put_f64(&mut out, gbdt.learning_rate);
            put_u32(&mut out, gbdt.rounds.len() as u32);
            for round in &gbdt.rounds {
                for tree in round {
                    put_reg_node(&mut out, &tree.root);
                }
            }
        }
        Classifier::LogisticRegression(linear) => {
            out.push(KIND_LOGISTIC);
            put_u32(&mut out, linear.num_classes as u32);
            put_u32(&mut out, linear.dim as u32);
            for &w in &linear.weights {
                put_f64(&mut out, w);
            }
        }
        Classifier::Mlp(mlp) => {
            out.push(KIND_MLP);
            put_u32(&mut out, mlp.num_classes as u32);
            put_u32(&mut out, mlp.dim as u32);
            out.push(mlp.layer_dims.len() as u8);
            for &d in &mlp.layer_dims {
                put_u32(&mut out, d as u32);
            }
            for (w, b) in mlp.weights.iter().zip(mlp.biases.iter()) {
                for &v in w.iter().chain(b.iter()) {
                    put_f64(&mut out, v);
                }
            }
        }
    }
    out
}

pub fn decode(bytes: &[u8]) -> Result<Classifier, Error> {
    let mut r = Reader { bytes, pos: 0 };
    let magic = r.take(4)?;
    if magic != MAGIC {
        return Err(codec_err("bad magic"));
    }
    let version = r.u16()?;
    if version != VERSION {
        return Err(codec_err(format!("unsupported version {version}")));
    }
    let kind = r.u8()?;
    let model = match kind {
        KIND_TREE => {
            let num_classes = r.u32()? as usize;
            let dim = r.u32()? as usize;
            let root = read_node(&mut r, num_classes)?;
            Classifier::DecisionTree(DecisionTree {
                num_classes,
                dim,
                root,
            })
        }
        KIND_FOREST => {
            let num_classes = r.u32()? as usize;
            let dim = r.u32()? as usize;
            let n_trees = r.u32()? as usize;
            let trees = (0..n_trees)
                .map(|_| {
                    Ok(DecisionTree {
                        num_classes,
                        dim,
                        root: read_node(&mut r, num_classes)?,
                    })
                })
                .collect::<Result<Vec<_>, Error>>()?;
            Classifier::RandomForest(RandomForest {
                num_classes,
                dim,
                trees,
            })
        }
        KIND_GBDT => {
            let num_classes = r.u32()? as usize;
            let dim = r.u32()? as usize;
            let learning_rate = r.f64()?;
            let n_rounds = r.u32()? as usize;
            let mut rounds = Vec::with_capacity(n_rounds);
            for _ in 0..n_rounds {
                let mut round = Vec::with_capacity(num_classes);
                for _ in 0..num_classes {
                    round.push(RegTree {
                        root: read_reg_node(&mut r)?,
                    });
                }
                rounds.push(round);
            }
            Classifier::Gbdt(GbdtModel {
                num_classes,
                dim,
                learning_rate,
                rounds,
                train_loss: Vec::new(),
            })
        }
        KIND_LOGISTIC => {
            let num_classes = r.u32()? as usize;
            let dim = r.u32()? as usize;
            let weights = (0..num_classes * (dim + 1))
                .map(|_| r.f64())
                .collect::<Result<Vec<_>, _>>()?;
            Classifier::LogisticRegression(LinearModel {
                num_classes,
                dim,
                weights,
            })
        }
        KIND_MLP => {
            let num_classes = r.u32()? as usize;
            let dim = r.u32()? as usize;
            let n_layers = r.u8()? as usize;
            let layer_dims = (0..n_layers)
                .map(|_| r.u32().map(|d| d as usize))
                .collect::<Result<Vec<_>, _>>()?;
            if n_layers < 2 {
                return Err(codec_err("mlp needs at least input and output dims"));
            }
            let mut weights = Vec::new();
            let mut biases = Vec::new();
            for pair in layer_dims.windows(2) {
                let w = (0..pair[0] * pair[1])
                    .map(|_| r.f64())
                    .collect::<Result<Vec<_>, _>>()?;
                let b = (0..pair[1]).map(|_| r.f64()).collect::<Result<Vec<_>, _>>()?;
                weights.push(w);
                biases.push(b);
            }
            Classifier::Mlp(MlpModel {
                num_classes,
                dim,
                layer_dims,
                weights,
                biases,
            })
        }
        other => return Err(codec_err(format!("unknown model kind {other}"))),
    };
    if r.pos != bytes.len() {
        return Err(codec_err("trailing bytes"));
    }
    Ok(model)
}

fn put_u32(out: &mut Vec<u8>, v: u32) {
    out.extend_from_slice(&v.to_le_bytes());
}

fn put_f64(out: &mut Vec<u8>, v: f64) {
    out.extend_from_slice(&v.to_le_bytes());
}

fn put_node(out: &mut Vec<u8>, node: &Node) {
    match node {
        Node::Leaf { class } => {
            out.push(0);
            put_u32(out, class.index() as u32);
        }
        Node::Split {
            feature,
            threshold,
            left,
            right,
        } => {
            out.push(1);
            put_u32(out, *feature as u32);
            put_f64(out, *threshold);
            put_node(out, left);
            put_node(out, right);
        }
    }
}

fn put_reg_node(out: &mut Vec<u8>, node: &RegNode) {
    match node {
        RegNode::Leaf { value } => {
            out.push(0);
            put_f64(out, *value);
        }
        RegNode::Split {
            feature,
            threshold,
            left,
            right,
        } => {
            out.push(1);
            put_u32(out, *feature as u32);
            put_f64(out, *threshold);
            put_reg_node(out, left);
            put_reg_node(out, right);
        }
    }
}

fn read_node(r: &mut Reader<'_>, num_classes: usize) -> Result<Node, Error> {
    match r.u8()? {
        0 => {
            let class = r.u32()? as usize;
            if class >= num_classes {
                return Err(codec_err("leaf class out of range"));
            }
            Ok(Node::Leaf {
                class: ClassId(class),
            })
        }
        1 => {
            let feature = r.u32()? as usize;
            let threshold = r.f64()?;
            let left = read_node(r, num_classes)?;
            let right = read_node(r, num_classes)?;
            Ok(Node::Split {
                feature,
                threshold,
                left: Box::new(left),
                right: Box::new(right),
            })
        }
        tag => Err(codec_err(format!("bad tree node tag {tag}"))),
    }
}

fn read_reg_node(r: &mut Reader<'_>) -> Result<RegNode, Error> {
    match r.u8()? {
        0 => Ok(RegNode::Leaf { value: r.f64()? }),
        1 => {
            let feature = r.u32()? as usize;
            let threshold = r.f64()?;
            let left = read_reg_node(r)?;
            let right = read_reg_node(r)?;
            Ok(RegNode::Split {
                feature,
                threshold,
                left: Box::new(left),
                right: Box::new(right),
            })
        }
        tag => Err(codec_err(format!("bad reg node tag {tag}"))),
    }
}

fn codec_err(msg: impl Into<String>) -> Error {
    Error::ModelCodec(msg.into())
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl Reader<'_> {
    fn take(&mut self, n: usize) -> Result<&[u8], Error> {
        if self.pos + n > self.bytes.len() {
            return Err(codec_err("truncated model bytes"));
        }
        let slice = &self.bytes[self.pos..self.pos + n];
        self.pos += n;
        Ok(slice)
    }

    fn u8(&mut self) -> Result<u8, Error> {
        Ok(self.take(1)?[0])
    }

    fn u16(&mut self) -> Result<u16, Error> {
        Ok(u16::from_le_bytes(self.take(2)?.try_into().unwrap()))
    }

    fn u32(&mut self) -> Result<u32, Error> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn f64(&mut self) -> Result<f64, Error> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
}
