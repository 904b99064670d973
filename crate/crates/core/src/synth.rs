//! Seeded synthetic trees and instances.
//!
//! Covers are drawn as integers so every split is strict, then converted to
//! `f64`. Thresholds are placed relative to the instance, which decides up
//! front which edges the instance follows.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tree::{Ensemble, Node, TreeModel};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Shape {
    /// One long path; every spine node has a leaf as its other child.
    Chain,
    /// Full binary tree with random split features.
    RandomBalanced,
}

impl fmt::Display for Shape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Shape::Chain => "chain",
            Shape::RandomBalanced => "random-balanced",
        })
    }
}

impl FromStr for Shape {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "chain" => Ok(Shape::Chain),
            "random-balanced" | "balanced" => Ok(Shape::RandomBalanced),
            _ => Err(Error::InvalidParams(format!("unknown shape '{s}'"))),
        }
    }
}

/// Deepest full binary tree the generator builds.
pub const MAX_BALANCED_DEPTH: usize = 20;

/// Extra bits of root cover in [`SynthSpec::new`].
pub const COVER_SLACK: u32 = 24;

/// Chance that the instance stays on the spine at each chain split.
const FOLLOW_SPINE: f64 = 0.95;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SynthSpec {
    pub n_features: usize,
    pub depth: usize,
    pub shape: Shape,
    pub cover_root: u128,
    pub seed: u64,
    pub n_trees: usize,
}

impl SynthSpec {
    /// A single tree whose root cover leaves `2^COVER_SLACK` room above the
    /// strict-split minimum, so the cover floor rarely binds.
    pub fn new(n_features: usize, depth: usize, shape: Shape, seed: u64) -> Self {
        let cover_root = 1u128
            .checked_shl(depth as u32 + COVER_SLACK)
            .unwrap_or(u128::MAX);
        SynthSpec {
            n_features,
            depth,
            shape,
            cover_root,
            seed,
            n_trees: 1,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.n_features == 0 || self.depth == 0 || self.n_trees == 0 {
            return Err(Error::InvalidParams(
                "n_features, depth and n_trees must be at least 1".into(),
            ));
        }
        if self.depth >= 127 || self.cover_root < 1u128 << self.depth {
            return Err(Error::Unrealizable(format!(
                "cover {} cannot be split strictly down to depth {}",
                self.cover_root, self.depth
            )));
        }
        if self.shape == Shape::RandomBalanced && self.depth > MAX_BALANCED_DEPTH {
            return Err(Error::InvalidParams(format!(
                "balanced depth {} exceeds {MAX_BALANCED_DEPTH}",
                self.depth
            )));
        }
        Ok(())
    }
}

/// Builds the ensemble and an instance in `[0, 1]^N`.
pub fn generate(spec: &SynthSpec) -> Result<(Ensemble, Vec<f64>)> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let x: Vec<f64> = (0..spec.n_features).map(|_| rng.gen()).collect();
    let trees = (0..spec.n_trees)
        .map(|t| {
            let nodes = match spec.shape {
                Shape::Chain => chain(spec, &x, &mut rng),
                Shape::RandomBalanced => balanced(spec, &x, &mut rng),
            };
            TreeModel::new(nodes, t)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((Ensemble::new(spec.n_features, 0.0, trees)?, x))
}

/// Threshold sending `x` to the left child when `left` is true.
fn threshold_for(x: f64, left: bool, rng: &mut ChaCha8Rng) -> f64 {
    let gap = rng.gen_range(0.01..0.5);
    if left {
        x + gap
    } else {
        x - gap
    }
}

/// Integer in `[lo, hi]` near `fraction · c`.
fn split_cover(
    c: u128,
    lo: u128,
    hi: u128,
    fraction: std::ops::Range<f64>,
    rng: &mut ChaCha8Rng,
) -> u128 {
    ((c as f64 * rng.gen_range(fraction)) as u128).clamp(lo, hi)
}

fn chain(spec: &SynthSpec, x: &[f64], rng: &mut ChaCha8Rng) -> Vec<Node> {
    let mut features: Vec<usize> = (0..spec.n_features).collect();
    features.shuffle(rng);
    let mut nodes = Vec::with_capacity(2 * spec.depth + 1);
    let mut cover = spec.cover_root;
    for d in 0..spec.depth {
        let feature = features[d % spec.n_features];
        let spine_left = rng.gen_bool(0.5);
        let follow = rng.gen_bool(FOLLOW_SPINE);
        let threshold = threshold_for(x[feature], spine_left == follow, rng);
        // The spine child needs room for 2^(levels below it) strict splits.
        let spine_cover = split_cover(cover, 1 << (spec.depth - d - 1), cover - 1, 0.5..0.95, rng);
        let here = nodes.len();
        let (left, right) = if spine_left {
            (here + 2, here + 1)
        } else {
            (here + 1, here + 2)
        };
        nodes.push(Node::Split {
            feature,
            threshold,
            cover: cover as f64,
            left,
            right,
        });
        nodes.push(Node::Leaf {
            cover: (cover - spine_cover) as f64,
            value: rng.gen(),
        });
        cover = spine_cover;
    }
    nodes.push(Node::Leaf {
        cover: cover as f64,
        value: rng.gen(),
    });
    nodes
}

fn balanced(spec: &SynthSpec, x: &[f64], rng: &mut ChaCha8Rng) -> Vec<Node> {
    let mut nodes = Vec::with_capacity((1 << (spec.depth + 1)) - 1);
    grow(&mut nodes, spec.cover_root, spec.depth, spec.n_features, x, rng);
    nodes
}

fn grow(
    nodes: &mut Vec<Node>,
    cover: u128,
    levels: usize,
    n_features: usize,
    x: &[f64],
    rng: &mut ChaCha8Rng,
) -> usize {
    let here = nodes.len();
    if levels == 0 {
        nodes.push(Node::Leaf {
            cover: cover as f64,
            value: rng.gen(),
        });
        return here;
    }
    let feature = rng.gen_range(0..n_features);
    let threshold = threshold_for(x[feature], rng.gen_bool(0.5), rng);
    let min_child = 1u128 << (levels - 1);
    let left_cover = split_cover(cover, min_child, cover - min_child, 0.2..0.8, rng);
    nodes.push(Node::Leaf {
        cover: 0.0,
        value: 0.0,
    });
    let left = grow(nodes, left_cover, levels - 1, n_features, x, rng);
    let right = grow(nodes, cover - left_cover, levels - 1, n_features, x, rng);
    nodes[here] = Node::Split {
        feature,
        threshold,
        cover: cover as f64,
        left,
        right,
    };
    here
}

/// Chain with `n_leaves` leaves and real-valued covers, for timing runs whose
/// depth is far beyond what integer covers allow. The instance follows the
/// spine all the way down.
pub fn long_chain(n_features: usize, n_leaves: usize, seed: u64) -> Result<(Ensemble, Vec<f64>)> {
    if n_features == 0 || n_leaves < 2 {
        return Err(Error::InvalidParams(
            "need at least one feature and two leaves".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let x: Vec<f64> = (0..n_features).map(|_| rng.gen()).collect();
    let depth = n_leaves - 1;
    let mut nodes = Vec::with_capacity(2 * depth + 1);
    let mut cover = 1.0f64;
    for d in 0..depth {
        let feature = d % n_features;
        let spine_left = rng.gen_bool(0.5);
        let threshold = threshold_for(x[feature], spine_left, &mut rng);
        let spine_cover = cover * rng.gen_range(0.9990..0.9998);
        let here = nodes.len();
        let (left, right) = if spine_left {
            (here + 2, here + 1)
        } else {
            (here + 1, here + 2)
        };
        nodes.push(Node::Split {
            feature,
            threshold,
            cover,
            left,
            right,
        });
        nodes.push(Node::Leaf {
            cover: cover - spine_cover,
            value: rng.gen(),
        });
        cover = spine_cover;
    }
    nodes.push(Node::Leaf {
        cover,
        value: rng.gen(),
    });
    Ok((Ensemble::single(n_features, TreeModel::new(nodes, 0)?)?, x))
}
