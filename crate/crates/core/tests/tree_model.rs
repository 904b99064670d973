mod common;

use common::*;
use xtree_core::tree::{EdgeAnnotation, ModelDocument};
use xtree_core::{Ensemble, Error, Node, TreeModel};

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

#[test]
fn fixture_prediction_follows_x() {
    let (m, x) = notation_tree();
    assert_eq!(m.predict(&x).unwrap(), 0.8);
    assert_eq!(m.max_depth(), 3);
    assert_eq!(m.n_leaves(), 4);
}

#[test]
fn fixture_conditional_values() {
    let (m, x) = notation_tree();
    let f = |s: &[usize]| m.eval_conditional(&x, s).unwrap();
    assert!(close(f(&[]), 0.636, 1e-15));
    assert!(close(f(&[I]), 15.6 / 22.0, 1e-15));
    assert!(close(f(&[J]), 0.672, 1e-15));
    assert!(close(f(&[K]), 0.676, 1e-15));
    assert!(close(f(&[I, J]), 0.75, 1e-15));
    assert!(close(f(&[I, K]), 16.6 / 22.0, 1e-15));
    assert!(close(f(&[J, K]), 0.716, 1e-15));
    assert!(close(f(&[I, J, K]), 0.8, 1e-15));
    assert!(matches!(m.eval_conditional(&x, &[3]), Err(Error::OutOfBounds(_))));
}

#[test]
fn fixture_edge_factors() {
    let (m, x) = notation_tree();
    let ann = EdgeAnnotation::new(&m.trees()[0], &x);
    let expected = [(1, 25.0 / 22.0), (2, 0.0), (3, 0.0), (4, 22.0 / 20.0), (5, 2.0), (6, 0.0)];
    for (v, gamma) in expected {
        assert!(close(ann.gamma(v), gamma, 1e-15), "edge into {v}");
    }
}

#[test]
fn repeated_label_factor_multiplies_up_the_path() {
    // Root and its left child both split on feature 0; x follows both.
    let nodes = vec![
        Node::Split { feature: 0, threshold: 0.5, cover: 100.0, left: 1, right: 2 },
        Node::Split { feature: 0, threshold: 0.4, cover: 60.0, left: 3, right: 4 },
        Node::Leaf { cover: 40.0, value: 1.0 },
        Node::Leaf { cover: 15.0, value: 2.0 },
        Node::Leaf { cover: 45.0, value: 3.0 },
    ];
    let tree = TreeModel::new(nodes, 0).unwrap();
    assert_eq!(tree.same_label_up(3), Some(1));
    assert_eq!(tree.same_label_up(1), None);
    let ann = EdgeAnnotation::new(&tree, &[0.1]);
    assert!(close(ann.gamma(3), 100.0 / 60.0 * 60.0 / 15.0, 1e-12));
    assert_eq!(ann.gamma(4), 0.0);
}

#[test]
fn multilinear_matches_table_at_vertices() {
    for seed in 0..40 {
        let (m, x) = random_case(seed, 8, 6);
        let n = m.n_features();
        for mask in 0..1usize << n {
            let z: Vec<f64> = (0..n).map(|i| ((mask >> i) & 1) as f64).collect();
            let direct = m.eval_conditional_by(&x, |i| mask & (1 << i) != 0);
            assert!(close(m.eval_multilinear(&x, &z).unwrap(), direct, 1e-12));
        }
    }
}

#[test]
fn multilinear_matches_definition_inside_the_cube() {
    let (m, x) = notation_tree();
    let z = [0.3, 0.6, 0.9];
    let mut expected = 0.0;
    for mask in 0..8usize {
        let weight: f64 = (0..3)
            .map(|i| if mask & (1 << i) != 0 { z[i] } else { 1.0 - z[i] })
            .product();
        expected += weight * m.eval_conditional_by(&x, |i| mask & (1 << i) != 0);
    }
    assert!(close(m.eval_multilinear(&x, &z).unwrap(), expected, 1e-14));
    assert!(m.eval_multilinear(&x, &[0.3, 1.2, 0.0]).is_err());
}

#[test]
fn single_leaf_tree_is_constant() {
    let tree = TreeModel::new(vec![Node::Leaf { cover: 5.0, value: 0.25 }], 0).unwrap();
    let m = Ensemble::single(2, tree).unwrap();
    assert_eq!(m.max_depth(), 0);
    assert_eq!(m.predict(&[3.0, -1.0]).unwrap(), 0.25);
    assert_eq!(m.eval_conditional(&[3.0, -1.0], &[]).unwrap(), 0.25);
    assert_eq!(m.unused_features(), vec![0, 1]);
}

#[test]
fn ensemble_is_sum_of_trees_plus_base() {
    let (m, x) = notation_tree();
    let tree = m.trees()[0].clone();
    let pair = Ensemble::new(3, 1.0, vec![tree.clone(), tree]).unwrap();
    assert!(close(pair.predict(&x).unwrap(), 1.0 + 2.0 * 0.8, 1e-15));
    let single = m.eval_conditional(&x, &[K]).unwrap();
    assert!(close(pair.eval_conditional(&x, &[K]).unwrap(), 1.0 + 2.0 * single, 1e-15));
}

#[test]
fn json_round_trip_is_lossless() {
    let (m, x) = notation_tree();
    let again = Ensemble::from_json(&m.to_json()).unwrap();
    assert_eq!(again.to_json(), m.to_json());
    assert_eq!(again.eval_conditional(&x, &[J]).unwrap(), m.eval_conditional(&x, &[J]).unwrap());
}

fn doc_with(edit: impl FnOnce(&mut ModelDocument)) -> String {
    let (m, _) = notation_tree();
    let mut doc = m.to_document();
    edit(&mut doc);
    serde_json::to_string(&doc).unwrap()
}

#[test]
fn child_cover_must_shrink() {
    let text = doc_with(|d| d.trees[0].cover[3] = 22.0);
    assert!(matches!(Ensemble::from_json(&text), Err(Error::CoverMonotonicity { .. })));
}

#[test]
fn markers_must_agree() {
    let text = doc_with(|d| d.trees[0].feature[2] = 0);
    assert!(matches!(Ensemble::from_json(&text), Err(Error::Structure { .. })));
}

#[test]
fn feature_must_be_in_range() {
    let text = doc_with(|d| d.trees[0].feature[0] = 3);
    assert!(matches!(Ensemble::from_json(&text), Err(Error::FeatureOutOfRange { .. })));
}

#[test]
fn node_reached_twice_is_rejected() {
    let text = doc_with(|d| d.trees[0].right[1] = 3);
    assert!(Ensemble::from_json(&text).is_err());
}

#[test]
fn unknown_fields_and_versions_are_rejected() {
    let text = doc_with(|d| d.format_version = 2);
    assert!(matches!(Ensemble::from_json(&text), Err(Error::Schema(_))));
    let text = doc_with(|_| {}).replacen('{', "{\"extra\": 1, ", 1);
    assert!(Ensemble::from_json(&text).is_err());
}

#[test]
fn instance_is_validated() {
    let (m, _) = notation_tree();
    assert!(matches!(m.predict(&[0.1, 0.2]), Err(Error::InstanceLength { .. })));
    assert!(matches!(m.predict(&[0.1, f64::NAN, 0.2]), Err(Error::NonFinite(_))));
}
