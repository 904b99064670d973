//! Gradient of the multilinear extension in O(L) time per tree.

use crate::error::Result;
use crate::tree::{EdgeAnnotation, Ensemble, Node};

/// `∇f̄_x(z)` together with the point it was taken at.
#[derive(Clone, Debug, PartialEq)]
pub struct GradientVector {
    pub g: Vec<f64>,
    pub z: Vec<f64>,
}

/// Gradient of `f̄_x` at `z`, summed over the ensemble members.
pub fn tree_gradient(model: &Ensemble, x: &[f64], z: &[f64]) -> Result<GradientVector> {
    model.check_instance(x)?;
    model.check_point(z, "z")?;
    let mut g = vec![0.0; model.n_features()];
    for tree in model.trees() {
        accumulate_gradient(&EdgeAnnotation::new(tree, x), z, &mut g);
    }
    Ok(GradientVector { g, z: z.to_vec() })
}

/// Banzhaf value: the gradient at the centre of the cube.
pub fn banzhaf(model: &Ensemble, x: &[f64]) -> Result<GradientVector> {
    weighted_banzhaf(model, x, 0.5)
}

/// Weighted Banzhaf value: the gradient at `nu * 1`.
pub fn weighted_banzhaf(model: &Ensemble, x: &[f64], nu: f64) -> Result<GradientVector> {
    tree_gradient(model, x, &vec![nu; model.n_features()])
}

#[derive(Clone, Copy, PartialEq)]
enum Mode {
    Normal,
    /// First edge on the path whose factor vanishes; its subtree is summed
    /// with the factors of `label` removed and charged to that feature only.
    ZeroHead(usize),
    /// Inside a vanished subtree: factors of `label` are skipped.
    Zeroed(usize),
}

struct Frame {
    node: usize,
    s: f64,
    child_sum: f64,
    h: f64,
    next_child: u8,
    mode: Mode,
}

#[inline]
fn factor(zi: f64, gamma: f64) -> f64 {
    1.0 - zi + zi * gamma
}

/// Adds the gradient of one tree at `z` into `g`.
pub(crate) fn accumulate_gradient(ann: &EdgeAnnotation<'_>, z: &[f64], g: &mut [f64]) {
    let tree = ann.tree();
    let root_cover = tree.root_cover();
    let mut frames: Vec<Frame> = Vec::with_capacity(tree.depth() + 1);
    frames.push(Frame {
        node: 0,
        s: 1.0,
        child_sum: 0.0,
        h: 0.0,
        next_child: 0,
        mode: Mode::Normal,
    });

    loop {
        let top = frames.last_mut().expect("root frame outlives the loop");
        if let Some((left, right)) = tree.children(top.node) {
            if top.next_child < 2 {
                let child = if top.next_child == 0 { left } else { right };
                top.next_child += 1;
                let label = ann.label(child);
                let zi = z[label];
                let f = factor(zi, ann.gamma(child));
                let undo = |s: f64| ann.up(child).map_or(s, |h| s / factor(zi, ann.gamma(h)));
                let (s, mode) = match top.mode {
                    Mode::Normal if f == 0.0 => (undo(top.s), Mode::ZeroHead(label)),
                    Mode::Normal => (undo(top.s) * f, Mode::Normal),
                    Mode::ZeroHead(l) | Mode::Zeroed(l) if l == label => (top.s, Mode::Zeroed(l)),
                    // A second vanishing feature kills the whole subtree.
                    Mode::ZeroHead(_) | Mode::Zeroed(_) if f == 0.0 => continue,
                    Mode::ZeroHead(l) | Mode::Zeroed(l) => (undo(top.s) * f, Mode::Zeroed(l)),
                };
                frames.push(Frame {
                    node: child,
                    s,
                    child_sum: 0.0,
                    h: 0.0,
                    next_child: 0,
                    mode,
                });
                continue;
            }
        }

        let done = frames.pop().expect("non-empty stack");
        let v = done.node;
        let ret = match *tree.node(v) {
            Node::Leaf { cover, value } => value * cover / root_cover * done.s,
            Node::Split { .. } => done.child_sum,
        };
        let Some(parent) = frames.last_mut() else {
            break;
        };
        match done.mode {
            Mode::Normal => {
                parent.child_sum += ret;
                if let Some(h) = ann.up(v) {
                    frames[tree.node_depth(h)].h -= ret;
                }
                let label = ann.label(v);
                let gamma = ann.gamma(v);
                g[label] += (gamma - 1.0) * (done.h + ret) / factor(z[label], gamma);
            }
            Mode::ZeroHead(label) => g[label] -= ret,
            Mode::Zeroed(_) => parent.child_sum += ret,
        }
    }
}
