//! Trees built to satisfy the ranker's axioms by construction.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use xtree_core::{Ensemble, Node, Optimizer, RankerConfig, TreeModel};

pub fn configs() -> Vec<RankerConfig> {
    let mut out = Vec::new();
    for optimizer in [Optimizer::GradientAscent, Optimizer::ADAM] {
        for iterations in [1, 10, 100] {
            out.push(RankerConfig {
                optimizer,
                iterations,
                learning_rate: 5.0,
            });
        }
    }
    out
}

/// Nodes of a random tree over `features`, shifted by `offset` in the node
/// array. The same seed always gives the same structure and thresholds.
pub fn subtree(seed: u64, features: &[usize], depth: usize, cover: f64, offset: usize) -> Vec<Node> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut nodes = Vec::new();
    fn grow(
        nodes: &mut Vec<Node>,
        rng: &mut ChaCha8Rng,
        features: &[usize],
        depth: usize,
        cover: f64,
        offset: usize,
    ) -> usize {
        let here = nodes.len();
        if depth == 0 {
            nodes.push(Node::Leaf { cover, value: rng.gen() });
            return here + offset;
        }
        nodes.push(Node::Leaf { cover: 0.0, value: 0.0 });
        let feature = features[rng.gen_range(0..features.len())];
        let threshold = rng.gen();
        let share = rng.gen_range(0.2..0.8);
        let left = grow(nodes, rng, features, depth - 1, cover * share, offset);
        let right = grow(nodes, rng, features, depth - 1, cover * (1.0 - share), offset);
        nodes[here] = Node::Split { feature, threshold, cover, left, right };
        here + offset
    }
    grow(&mut nodes, &mut rng, features, depth, cover, offset);
    nodes
}

/// Root split on feature 0 sending `x` left, over two copies of one subtree
/// on features `1..n`. Left leaf values get `bump(value)`.
pub fn split_over_copies(seed: u64, n: usize, bump: impl Fn(usize, f64) -> f64) -> Ensemble {
    let others: Vec<usize> = (1..n).collect();
    let left = subtree(seed, &others, 3, 50.0, 1);
    let size = left.len();
    let right = subtree(seed, &others, 3, 50.0, 1 + size);
    let mut nodes = vec![Node::Split { feature: 0, threshold: 0.5, cover: 100.0, left: 1, right: 1 + size }];
    for (k, node) in left.into_iter().enumerate() {
        nodes.push(match node {
            Node::Leaf { cover, value } => Node::Leaf { cover, value: bump(k, value) },
            split => split,
        });
    }
    nodes.extend(right);
    Ensemble::single(n, TreeModel::new(nodes, 0).unwrap()).unwrap()
}

pub fn instance(seed: u64, n: usize) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xabc);
    let mut x: Vec<f64> = (0..n).map(|_| rng.gen()).collect();
    x[0] = 0.2;
    x
}

pub fn mirrored(a: f64, b: f64, d: f64) -> Ensemble {
    let nodes = vec![
        Node::Split { feature: 0, threshold: 0.5, cover: 100.0, left: 1, right: 2 },
        Node::Split { feature: 1, threshold: 0.5, cover: 50.0, left: 3, right: 4 },
        Node::Split { feature: 1, threshold: 0.5, cover: 50.0, left: 5, right: 6 },
        Node::Leaf { cover: 25.0, value: a },
        Node::Leaf { cover: 25.0, value: b },
        Node::Leaf { cover: 25.0, value: b },
        Node::Leaf { cover: 25.0, value: d },
    ];
    let other = vec![
        Node::Split { feature: 2, threshold: 0.5, cover: 10.0, left: 1, right: 2 },
        Node::Leaf { cover: 4.0, value: 0.9 },
        Node::Leaf { cover: 6.0, value: 0.1 },
    ];
    let trees = vec![TreeModel::new(nodes, 0).unwrap(), TreeModel::new(other, 1).unwrap()];
    Ensemble::new(3, 0.0, trees).unwrap()
}
