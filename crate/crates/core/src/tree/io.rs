//! JSON node-array model documents.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{Ensemble, Node, TreeModel};
use crate::error::{Error, Result};

pub const FORMAT_VERSION: u32 = 1;

/// Serialized ensemble: parallel per-node arrays for each tree.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelDocument {
    pub format_version: u32,
    pub n_features: usize,
    pub base_value: f64,
    pub trees: Vec<TreeDocument>,
}

/// One tree. `left`, `right` and `feature` are -1 at leaves; `value` is only
/// read at leaves.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TreeDocument {
    pub left: Vec<i64>,
    pub right: Vec<i64>,
    pub feature: Vec<i64>,
    pub threshold: Vec<f64>,
    pub cover: Vec<f64>,
    pub value: Vec<f64>,
}

impl TreeDocument {
    fn into_tree(self, tree_index: usize, n_features: usize) -> Result<TreeModel> {
        let n = self.left.len();
        let lengths = [
            self.right.len(),
            self.feature.len(),
            self.threshold.len(),
            self.cover.len(),
            self.value.len(),
        ];
        if lengths.iter().any(|&len| len != n) {
            return Err(Error::Schema(format!(
                "tree {tree_index}: node arrays have different lengths"
            )));
        }
        let mut nodes = Vec::with_capacity(n);
        for id in 0..n {
            let (left, right, feature) = (self.left[id], self.right[id], self.feature[id]);
            let node = match (left, right, feature) {
                (-1, -1, -1) => Node::Leaf {
                    cover: self.cover[id],
                    value: self.value[id],
                },
                (l, r, f) if l >= 0 && r >= 0 && f >= 0 => {
                    if f as usize >= n_features {
                        return Err(Error::FeatureOutOfRange {
                            tree: tree_index,
                            node: id,
                            feature: f,
                            n_features,
                        });
                    }
                    Node::Split {
                        feature: f as usize,
                        threshold: self.threshold[id],
                        cover: self.cover[id],
                        left: l as usize,
                        right: r as usize,
                    }
                }
                _ => {
                    return Err(Error::Structure {
                        tree: tree_index,
                        node: id,
                        detail: format!(
                            "inconsistent leaf/split markers (left {left}, right {right}, feature {feature})"
                        ),
                    })
                }
            };
            nodes.push(node);
        }
        TreeModel::new(nodes, tree_index)
    }

    fn from_tree(tree: &TreeModel) -> Self {
        let n = tree.n_nodes();
        let mut doc = TreeDocument {
            left: Vec::with_capacity(n),
            right: Vec::with_capacity(n),
            feature: Vec::with_capacity(n),
            threshold: Vec::with_capacity(n),
            cover: Vec::with_capacity(n),
            value: Vec::with_capacity(n),
        };
        for node in tree.nodes() {
            match *node {
                Node::Leaf { cover, value } => {
                    doc.left.push(-1);
                    doc.right.push(-1);
                    doc.feature.push(-1);
                    doc.threshold.push(0.0);
                    doc.cover.push(cover);
                    doc.value.push(value);
                }
                Node::Split {
                    feature,
                    threshold,
                    cover,
                    left,
                    right,
                } => {
                    doc.left.push(left as i64);
                    doc.right.push(right as i64);
                    doc.feature.push(feature as i64);
                    doc.threshold.push(threshold);
                    doc.cover.push(cover);
                    doc.value.push(0.0);
                }
            }
        }
        doc
    }
}

impl ModelDocument {
    pub fn into_ensemble(self) -> Result<Ensemble> {
        if self.format_version != FORMAT_VERSION {
            return Err(Error::Schema(format!(
                "unsupported format_version {} (expected {FORMAT_VERSION})",
                self.format_version
            )));
        }
        if self.n_features == 0 {
            return Err(Error::Schema("n_features must be positive".into()));
        }
        let n_features = self.n_features;
        let trees = self
            .trees
            .into_iter()
            .enumerate()
            .map(|(t, doc)| doc.into_tree(t, n_features))
            .collect::<Result<Vec<_>>>()?;
        Ensemble::new(n_features, self.base_value, trees)
    }
}

impl Ensemble {
    /// Parses and validates a model document.
    pub fn from_json(text: &str) -> Result<Self> {
        let doc: ModelDocument =
            serde_json::from_str(text).map_err(|e| Error::Schema(e.to_string()))?;
        doc.into_ensemble()
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Ensemble::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn to_document(&self) -> ModelDocument {
        ModelDocument {
            format_version: FORMAT_VERSION,
            n_features: self.n_features(),
            base_value: self.base_value(),
            trees: self.trees().iter().map(TreeDocument::from_tree).collect(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_document()).expect("model documents always serialize")
    }
}
