use xtree_core::synth::{generate, long_chain, Shape, SynthSpec};
use xtree_core::tree::EdgeAnnotation;
use xtree_core::{Ensemble, Error};

#[test]
fn same_seed_same_bytes() {
    for shape in [Shape::Chain, Shape::RandomBalanced] {
        let spec = SynthSpec::new(6, 7, shape, 99);
        let (a, xa) = generate(&spec).unwrap();
        let (b, xb) = generate(&spec).unwrap();
        assert_eq!(a.to_json(), b.to_json());
        assert_eq!(xa, xb);
        let (c, _) = generate(&SynthSpec { seed: 100, ..spec }).unwrap();
        assert_ne!(a.to_json(), c.to_json());
    }
}

#[test]
fn generated_models_reload() {
    for seed in 0..20 {
        for shape in [Shape::Chain, Shape::RandomBalanced] {
            let spec = SynthSpec { n_trees: 3, ..SynthSpec::new(5, 6, shape, seed) };
            let (m, x) = generate(&spec).unwrap();
            let again = Ensemble::from_json(&m.to_json()).unwrap();
            assert_eq!(again.predict(&x).unwrap(), m.predict(&x).unwrap());
            assert_eq!(m.trees().len(), 3);
        }
    }
}

#[test]
fn chain_cycles_every_feature() {
    let (m, _) = generate(&SynthSpec::new(11, 60, Shape::Chain, 2025)).unwrap();
    let tree = &m.trees()[0];
    assert_eq!(tree.depth(), 60);
    assert_eq!(tree.n_leaves(), 61);
    assert!(m.unused_features().is_empty());
    let repeated = (0..tree.n_nodes()).filter(|&v| tree.same_label_up(v).is_some()).count();
    assert!(repeated > 40);
}

#[test]
fn both_factor_regimes_appear() {
    let mut both = 0;
    let total = 200;
    for seed in 0..total {
        let shape = if seed % 2 == 0 { Shape::Chain } else { Shape::RandomBalanced };
        let (m, x) = generate(&SynthSpec::new(4 + (seed as usize % 6), 5, shape, seed)).unwrap();
        let tree = &m.trees()[0];
        let ann = EdgeAnnotation::new(tree, &x);
        let gammas: Vec<f64> = (1..tree.n_nodes()).map(|v| ann.gamma(v)).collect();
        assert!(gammas.iter().all(|&g| g == 0.0 || g > 1.0));
        if gammas.contains(&0.0) && gammas.iter().any(|&g| g > 1.0) {
            both += 1;
        }
    }
    assert!(both * 10 >= total * 9);
}

#[test]
fn cover_must_allow_strict_splits() {
    let spec = SynthSpec { cover_root: 1 << 9, ..SynthSpec::new(3, 10, Shape::Chain, 0) };
    assert!(matches!(generate(&spec), Err(Error::Unrealizable(_))));
    let spec = SynthSpec { cover_root: 1 << 10, ..spec };
    assert!(generate(&spec).is_ok());
    assert!(generate(&SynthSpec::new(0, 3, Shape::Chain, 0)).is_err());
    assert!(generate(&SynthSpec::new(3, 25, Shape::RandomBalanced, 0)).is_err());
}

#[test]
fn long_chain_is_valid() {
    let (m, x) = long_chain(10, 5000, 3).unwrap();
    assert_eq!(m.n_leaves(), 5000);
    assert!(m.predict(&x).unwrap().is_finite());
    assert!(long_chain(10, 1, 3).is_err());
}
