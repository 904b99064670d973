#![allow(dead_code)]

pub mod axioms;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use xtree_core::synth::{generate, Shape, SynthSpec};
use xtree_core::Ensemble;

/// A random single-tree model with `N <= max_n` and depth `<= max_depth`.
pub fn random_case(seed: u64, max_n: usize, max_depth: usize) -> (Ensemble, Vec<f64>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(1..=max_n);
    let depth = rng.gen_range(1..=max_depth);
    let shape = if rng.gen_bool(0.5) {
        Shape::Chain
    } else {
        Shape::RandomBalanced
    };
    let spec = SynthSpec::new(n, depth, shape, seed);
    generate(&spec).unwrap()
}

/// A small ensemble of balanced trees.
pub fn random_ensemble(seed: u64, n: usize, depth: usize, n_trees: usize) -> (Ensemble, Vec<f64>) {
    let spec = SynthSpec {
        n_trees,
        ..SynthSpec::new(n, depth, Shape::RandomBalanced, seed)
    };
    generate(&spec).unwrap()
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// `max |a - b| / max(1, max |b|)`.
pub fn max_rel_diff(a: &[f64], b: &[f64]) -> f64 {
    let scale = b.iter().map(|v| v.abs()).fold(1.0, f64::max);
    max_abs_diff(a, b) / scale
}

pub const I: usize = 0;
pub const J: usize = 1;
pub const K: usize = 2;

/// The three-feature example tree: root splits on `i` (cover 25), then `j`
/// (22), then `k` (20); leaves 0.1/3, 0.3/2, 0.8/10, 0.7/10.
pub fn notation_tree() -> (Ensemble, Vec<f64>) {
    let text = include_str!("../fixtures/notation_tree.json");
    (Ensemble::from_json(text).unwrap(), vec![0.2, 0.8, 0.3])
}

/// Shapley weights for `n` players in size order.
pub fn shapley_weights(n: usize) -> Vec<f64> {
    xtree_core::values::shapley_omega(n)
}
