use super::{Node, TreeModel};

/// Per-instance edge factors of one tree.
///
/// The edge into node `v` gets `gamma(v)`: zero when `x` fails any split on
/// the path to `v` that tests the same feature, otherwise the product of
/// `parent_cover / child_cover` over those same-feature edges. Labels and
/// same-label ancestors depend on the tree only and are forwarded from it.
#[derive(Clone, Debug)]
pub struct EdgeAnnotation<'a> {
    tree: &'a TreeModel,
    gamma: Vec<f64>,
}

impl<'a> EdgeAnnotation<'a> {
    /// One preorder pass; `x` must already be validated against the model.
    pub fn new(tree: &'a TreeModel, x: &[f64]) -> Self {
        let mut gamma = vec![0.0; tree.n_nodes()];
        for &v in &tree.preorder()[1..] {
            let u = tree.parent(v);
            let Node::Split {
                feature,
                threshold,
                cover,
                left,
                ..
            } = *tree.node(u)
            else {
                unreachable!("parents are always splits")
            };
            let goes_left = x[feature] <= threshold;
            if goes_left == (v == left) {
                let inherited = tree.same_label_up(v).map_or(1.0, |h| gamma[h]);
                gamma[v] = inherited * (cover / tree.node(v).cover());
            }
        }
        EdgeAnnotation { tree, gamma }
    }

    pub fn tree(&self) -> &'a TreeModel {
        self.tree
    }

    /// Factor of the edge into `v` (`v` must not be the root).
    pub fn gamma(&self, v: usize) -> f64 {
        self.gamma[v]
    }

    pub fn label(&self, v: usize) -> usize {
        self.tree.edge_label(v)
    }

    pub fn up(&self, v: usize) -> Option<usize> {
        self.tree.same_label_up(v)
    }
}
