//! Shared depth-first driver for the attribution traversals.
//!
//! All polynomial-style algorithms in this crate have the same skeleton: a
//! value is carried from the root towards the leaves, updated on every edge
//! with that edge's factor (after removing the factor of the nearest
//! same-label ancestor edge), scaled at the leaf by `value * cover /
//! root_cover`, and summed back up. On the way up each node keeps an
//! accumulator holding the sum over the leaves whose deepest edge of the
//! incoming label is that node's edge; the per-edge read-out of that
//! accumulator is added to the score of the edge's feature.
//!
//! Only the active root path is kept in memory, one frame per depth level.

use crate::tree::{EdgeAnnotation, Node};

/// Edge data handed to [`PathAlgebra::descend`].
#[derive(Clone, Copy, Debug)]
pub(crate) struct Edge {
    pub gamma: f64,
    pub up_gamma: Option<f64>,
}

pub(crate) trait PathAlgebra {
    type Value: Clone;

    /// Value carried into the root.
    fn root(&self) -> Self::Value;
    /// Additive identity, used to reset accumulators.
    fn zero(&self) -> Self::Value;
    /// Overwrites `value` with zero, reusing its storage.
    fn reset(&self, value: &mut Self::Value);
    fn descend(&self, parent: &Self::Value, edge: Edge, out: &mut Self::Value);
    fn scale_leaf(&self, value: &mut Self::Value, weight: f64);
    fn add_assign(&self, acc: &mut Self::Value, x: &Self::Value);
    fn sub_assign(&self, acc: &mut Self::Value, x: &Self::Value);
    /// Score contribution of an accumulator, before the `gamma - 1` factor.
    fn readout(&self, acc: &Self::Value, gamma: f64) -> f64;
}

struct Frame<V> {
    node: usize,
    s: V,
    child_sum: V,
    acc: V,
    next_child: u8,
}

/// Runs one tree through `alg` and adds its per-feature scores into `phi`.
pub(crate) fn run<A: PathAlgebra>(alg: &A, ann: &EdgeAnnotation<'_>, phi: &mut [f64]) {
    let tree = ann.tree();
    let root_cover = tree.root_cover();
    let mut frames: Vec<Frame<A::Value>> = Vec::with_capacity(tree.depth() + 1);
    frames.push(Frame {
        node: 0,
        s: alg.root(),
        child_sum: alg.zero(),
        acc: alg.zero(),
        next_child: 0,
    });
    // Frames above `len` are kept alive for reuse of their buffers.
    let mut len = 1usize;

    loop {
        let d = len - 1;
        if let Some((left, right)) = tree.children(frames[d].node) {
            if frames[d].next_child < 2 {
                let child = if frames[d].next_child == 0 { left } else { right };
                frames[d].next_child += 1;
                let edge = Edge {
                    gamma: ann.gamma(child),
                    up_gamma: ann.up(child).map(|h| ann.gamma(h)),
                };
                if frames.len() == len {
                    frames.push(Frame {
                        node: child,
                        s: alg.zero(),
                        child_sum: alg.zero(),
                        acc: alg.zero(),
                        next_child: 0,
                    });
                } else {
                    let f = &mut frames[len];
                    f.node = child;
                    alg.reset(&mut f.child_sum);
                    alg.reset(&mut f.acc);
                    f.next_child = 0;
                }
                let (lower, upper) = frames.split_at_mut(len);
                alg.descend(&lower[d].s, edge, &mut upper[0].s);
                len += 1;
                continue;
            }
        }

        let v = frames[d].node;
        if d == 0 {
            break;
        }
        let (lower, upper) = frames.split_at_mut(d);
        let done = &mut upper[0];
        if let Node::Leaf { cover, value } = *tree.node(v) {
            alg.scale_leaf(&mut done.s, value * cover / root_cover);
            std::mem::swap(&mut done.s, &mut done.child_sum);
        }
        let ret = &done.child_sum;
        if let Some(h) = ann.up(v) {
            alg.sub_assign(&mut lower[tree.node_depth(h)].acc, ret);
        }
        alg.add_assign(&mut done.acc, ret);
        let gamma = ann.gamma(v);
        phi[ann.label(v)] += (gamma - 1.0) * alg.readout(&done.acc, gamma);
        alg.add_assign(&mut lower[d - 1].child_sum, ret);
        len -= 1;
    }
}
