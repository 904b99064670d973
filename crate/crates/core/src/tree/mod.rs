//! Tree and ensemble data model.
//!
//! Trees are stored as flat node arrays rooted at index 0. Every split routes
//! `x[feature] <= threshold` to the left child. Construction validates the
//! structure once, so every routine downstream can assume a proper binary
//! tree with strictly shrinking covers.

mod annotate;
mod io;
mod multilinear;

pub use annotate::EdgeAnnotation;
pub use io::{ModelDocument, TreeDocument, FORMAT_VERSION};

use crate::error::{Error, Result};

/// Marker for "no node" in parent and ancestor tables.
pub const NONE: usize = usize::MAX;

#[derive(Clone, Debug, PartialEq)]
pub enum Node {
    Leaf {
        cover: f64,
        value: f64,
    },
    Split {
        feature: usize,
        threshold: f64,
        cover: f64,
        left: usize,
        right: usize,
    },
}

impl Node {
    pub fn cover(&self) -> f64 {
        match *self {
            Node::Leaf { cover, .. } | Node::Split { cover, .. } => cover,
        }
    }

    pub fn is_leaf(&self) -> bool {
        matches!(self, Node::Leaf { .. })
    }
}

/// A validated binary decision tree.
#[derive(Clone, Debug)]
pub struct TreeModel {
    nodes: Vec<Node>,
    parent: Vec<usize>,
    node_depth: Vec<usize>,
    preorder: Vec<usize>,
    /// Head of the nearest strict ancestor edge sharing the incoming edge's label.
    same_label_up: Vec<usize>,
    depth: usize,
    n_leaves: usize,
}

impl TreeModel {
    /// Validates `nodes` as a tree rooted at 0. `tree_index` only labels errors.
    pub fn new(nodes: Vec<Node>, tree_index: usize) -> Result<Self> {
        let n = nodes.len();
        if n == 0 {
            return Err(Error::Schema(format!("tree {tree_index} has no nodes")));
        }
        let structure = |node: usize, detail: String| Error::Structure {
            tree: tree_index,
            node,
            detail,
        };

        for (id, node) in nodes.iter().enumerate() {
            let cover = node.cover();
            if !cover.is_finite() || cover <= 0.0 {
                return Err(Error::CoverMonotonicity {
                    tree: tree_index,
                    node: id,
                    detail: format!("cover {cover} is not a positive finite number"),
                });
            }
            match *node {
                Node::Leaf { value, .. } if !value.is_finite() => {
                    return Err(structure(id, format!("leaf value {value} is not finite")));
                }
                Node::Split { threshold, .. } if !threshold.is_finite() => {
                    return Err(structure(id, format!("threshold {threshold} is not finite")));
                }
                _ => {}
            }
        }

        let mut parent = vec![NONE; n];
        let mut node_depth = vec![0; n];
        let mut seen = vec![false; n];
        let mut preorder = Vec::with_capacity(n);
        let mut stack = vec![0usize];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            preorder.push(v);
            if let Node::Split {
                cover, left, right, ..
            } = nodes[v]
            {
                if left == right {
                    return Err(structure(v, "both children are the same node".into()));
                }
                // Push right first so the left subtree is visited first.
                for child in [right, left] {
                    if child >= n {
                        return Err(structure(v, format!("child id {child} out of range")));
                    }
                    if seen[child] {
                        return Err(structure(
                            child,
                            "node reached twice (cycle or multiple parents)".into(),
                        ));
                    }
                    let child_cover = nodes[child].cover();
                    if child_cover >= cover {
                        return Err(Error::CoverMonotonicity {
                            tree: tree_index,
                            node: child,
                            detail: format!(
                                "child cover {child_cover} is not below parent cover {cover}"
                            ),
                        });
                    }
                    seen[child] = true;
                    parent[child] = v;
                    node_depth[child] = node_depth[v] + 1;
                    stack.push(child);
                }
            }
        }
        if let Some(orphan) = seen.iter().position(|s| !s) {
            return Err(structure(orphan, "orphan node not reachable from the root".into()));
        }

        let n_leaves = nodes.iter().filter(|node| node.is_leaf()).count();
        let depth = node_depth.iter().copied().max().unwrap_or(0);
        let same_label_up = same_label_ancestors(&nodes, &parent);
        Ok(TreeModel {
            nodes,
            parent,
            node_depth,
            preorder,
            same_label_up,
            depth,
            n_leaves,
        })
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn node(&self, v: usize) -> &Node {
        &self.nodes[v]
    }

    pub fn n_nodes(&self) -> usize {
        self.nodes.len()
    }

    /// Longest root-to-leaf path, counted in edges. A lone leaf has depth 0.
    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn n_leaves(&self) -> usize {
        self.n_leaves
    }

    pub fn root_cover(&self) -> f64 {
        self.nodes[0].cover()
    }

    /// Parent of `v`, or [`NONE`] for the root.
    pub fn parent(&self, v: usize) -> usize {
        self.parent[v]
    }

    pub fn node_depth(&self, v: usize) -> usize {
        self.node_depth[v]
    }

    /// Nodes in depth-first preorder (left before right).
    pub fn preorder(&self) -> &[usize] {
        &self.preorder
    }

    /// Feature tested by the parent of `v`, i.e. the label of the edge into `v`.
    pub fn edge_label(&self, v: usize) -> usize {
        match self.nodes[self.parent[v]] {
            Node::Split { feature, .. } => feature,
            Node::Leaf { .. } => unreachable!("parents are always splits"),
        }
    }

    /// Head of the nearest ancestor edge with the same label as the edge into `v`.
    pub fn same_label_up(&self, v: usize) -> Option<usize> {
        match self.same_label_up[v] {
            NONE => None,
            h => Some(h),
        }
    }

    pub fn children(&self, v: usize) -> Option<(usize, usize)> {
        match self.nodes[v] {
            Node::Split { left, right, .. } => Some((left, right)),
            Node::Leaf { .. } => None,
        }
    }

    fn max_feature(&self) -> Option<usize> {
        self.nodes
            .iter()
            .filter_map(|node| match *node {
                Node::Split { feature, .. } => Some(feature),
                Node::Leaf { .. } => None,
            })
            .max()
    }

    /// Full routing of `x` to a leaf value.
    pub fn predict(&self, x: &[f64]) -> f64 {
        let mut v = 0;
        loop {
            match self.nodes[v] {
                Node::Leaf { value, .. } => return value,
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                    ..
                } => v = if x[feature] <= threshold { left } else { right },
            }
        }
    }

    /// `f_x(S)`: follow `x` on features in `S`, cover-weighted average elsewhere.
    pub fn eval_conditional_by(&self, x: &[f64], in_set: impl Fn(usize) -> bool) -> f64 {
        let mut total = 0.0;
        let mut stack = vec![(0usize, 1.0f64)];
        while let Some((v, weight)) = stack.pop() {
            match self.nodes[v] {
                Node::Leaf { value, .. } => total += weight * value,
                Node::Split {
                    feature,
                    threshold,
                    cover,
                    left,
                    right,
                } => {
                    if in_set(feature) {
                        let next = if x[feature] <= threshold { left } else { right };
                        stack.push((next, weight));
                    } else {
                        stack.push((right, weight * self.nodes[right].cover() / cover));
                        stack.push((left, weight * self.nodes[left].cover() / cover));
                    }
                }
            }
        }
        total
    }
}

/// For every node, the head of the closest strict ancestor edge carrying the
/// same feature label as its own incoming edge.
fn same_label_ancestors(nodes: &[Node], parent: &[usize]) -> Vec<usize> {
    let n_labels = nodes
        .iter()
        .filter_map(|node| match *node {
            Node::Split { feature, .. } => Some(feature + 1),
            Node::Leaf { .. } => None,
        })
        .max()
        .unwrap_or(0);
    let mut up = vec![NONE; nodes.len()];
    let mut last_head = vec![NONE; n_labels];

    enum Step {
        Enter(usize),
        Leave { label: usize, saved: usize },
    }
    let mut stack = vec![Step::Enter(0)];
    while let Some(step) = stack.pop() {
        match step {
            Step::Enter(v) => {
                if v != 0 {
                    let label = match nodes[parent[v]] {
                        Node::Split { feature, .. } => feature,
                        Node::Leaf { .. } => unreachable!(),
                    };
                    up[v] = last_head[label];
                    stack.push(Step::Leave {
                        label,
                        saved: last_head[label],
                    });
                    last_head[label] = v;
                }
                if let Node::Split { left, right, .. } = nodes[v] {
                    stack.push(Step::Enter(right));
                    stack.push(Step::Enter(left));
                }
            }
            Step::Leave { label, saved } => last_head[label] = saved,
        }
    }
    up
}

/// A tree ensemble whose output is `base_value` plus the sum of its trees.
#[derive(Clone, Debug)]
pub struct Ensemble {
    n_features: usize,
    base_value: f64,
    trees: Vec<TreeModel>,
}

impl Ensemble {
    pub fn new(n_features: usize, base_value: f64, trees: Vec<TreeModel>) -> Result<Self> {
        if n_features == 0 {
            return Err(Error::Schema("n_features must be positive".into()));
        }
        if !base_value.is_finite() {
            return Err(Error::NonFinite("base_value".into()));
        }
        for (t, tree) in trees.iter().enumerate() {
            if let Some(max) = tree.max_feature() {
                if max >= n_features {
                    let node = tree
                        .nodes
                        .iter()
                        .position(|node| matches!(*node, Node::Split { feature, .. } if feature == max))
                        .unwrap_or(0);
                    return Err(Error::FeatureOutOfRange {
                        tree: t,
                        node,
                        feature: max as i64,
                        n_features,
                    });
                }
            }
        }
        Ok(Ensemble {
            n_features,
            base_value,
            trees,
        })
    }

    /// Wraps a single tree with base value 0.
    pub fn single(n_features: usize, tree: TreeModel) -> Result<Self> {
        Ensemble::new(n_features, 0.0, vec![tree])
    }

    pub fn n_features(&self) -> usize {
        self.n_features
    }

    pub fn base_value(&self) -> f64 {
        self.base_value
    }

    pub fn trees(&self) -> &[TreeModel] {
        &self.trees
    }

    /// Largest member depth.
    pub fn max_depth(&self) -> usize {
        self.trees.iter().map(TreeModel::depth).max().unwrap_or(0)
    }

    pub fn n_leaves(&self) -> usize {
        self.trees.iter().map(TreeModel::n_leaves).sum()
    }

    /// Features that no split in any tree tests. Their attributions are always 0.
    pub fn unused_features(&self) -> Vec<usize> {
        let mut used = vec![false; self.n_features];
        for tree in &self.trees {
            for node in &tree.nodes {
                if let Node::Split { feature, .. } = *node {
                    used[feature] = true;
                }
            }
        }
        (0..self.n_features).filter(|&i| !used[i]).collect()
    }

    /// Checks that `x` has one finite value per feature.
    pub fn check_instance(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.n_features {
            return Err(Error::InstanceLength {
                expected: self.n_features,
                got: x.len(),
            });
        }
        if let Some(i) = x.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(format!("instance value at feature {i}")));
        }
        Ok(())
    }

    pub(crate) fn check_point(&self, z: &[f64], name: &str) -> Result<()> {
        if z.len() != self.n_features {
            return Err(Error::OutOfBounds(format!(
                "{name} has length {} but the model has {} features",
                z.len(),
                self.n_features
            )));
        }
        if let Some(i) = z.iter().position(|v| !(0.0..=1.0).contains(v)) {
            return Err(Error::OutOfBounds(format!(
                "{name}[{i}] = {} is outside [0, 1]",
                z[i]
            )));
        }
        Ok(())
    }

    pub fn predict(&self, x: &[f64]) -> Result<f64> {
        self.check_instance(x)?;
        Ok(self.base_value + self.trees.iter().map(|t| t.predict(x)).sum::<f64>())
    }

    /// `f_x(S)` for the feature list `subset`.
    pub fn eval_conditional(&self, x: &[f64], subset: &[usize]) -> Result<f64> {
        self.check_instance(x)?;
        let mut member = vec![false; self.n_features];
        for &i in subset {
            if i >= self.n_features {
                return Err(Error::OutOfBounds(format!(
                    "feature {i} in subset exceeds n_features {}",
                    self.n_features
                )));
            }
            member[i] = true;
        }
        Ok(self.eval_conditional_by(x, |i| member[i]))
    }

    /// `f_x(S)` with membership given by a predicate. Inputs are not validated.
    pub fn eval_conditional_by(&self, x: &[f64], in_set: impl Fn(usize) -> bool) -> f64 {
        self.base_value
            + self
                .trees
                .iter()
                .map(|t| t.eval_conditional_by(x, &in_set))
                .sum::<f64>()
    }

    /// Multilinear extension `f̄_x(z)`.
    pub fn eval_multilinear(&self, x: &[f64], z: &[f64]) -> Result<f64> {
        self.check_instance(x)?;
        self.check_point(z, "z")?;
        Ok(self.base_value
            + self
                .trees
                .iter()
                .map(|t| multilinear::eval_tree(&EdgeAnnotation::new(t, x), z))
                .sum::<f64>())
    }
}
