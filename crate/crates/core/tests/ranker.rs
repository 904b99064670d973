mod common;

use common::axioms::*;
use common::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use xtree_core::oracle::build_table;
use xtree_core::ranker::{
    ranking_objective, select_learning_rate, symmetric_gradient, LEARNING_RATE_CANDIDATES,
};
use xtree_core::{
    banzhaf, induce_ranking, rank, Ensemble, Error, Optimizer, RankerConfig,
};





#[test]
fn one_iteration_is_banzhaf() {
    for seed in 0..30 {
        let (m, x) = random_case(seed, 10, 6);
        let b = banzhaf(&m, &x).unwrap().g;
        for optimizer in [Optimizer::GradientAscent, Optimizer::ADAM] {
            let cfg = RankerConfig { optimizer, iterations: 1, learning_rate: 5.0 };
            let out = rank(&m, &x, &cfg, false).unwrap();
            assert!(max_abs_diff(&out.zeta, &b) < 1e-12);
        }
    }
}

#[test]
fn dummy_with_offset() {
    let c = 0.125;
    for seed in 0..5 {
        let m = split_over_copies(seed, 4, |_, v| v + 2.0 * c);
        let x = instance(seed, 4);
        let table = build_table(&m, &x).unwrap();
        let (lo, hi) = table.marginal_bounds(0);
        assert!((lo - c).abs() < 1e-12 && (hi - c).abs() < 1e-12);
        for cfg in configs() {
            let out = rank(&m, &x, &cfg, false).unwrap();
            assert!((out.zeta[0] - c).abs() < 1e-10, "{cfg:?}: {}", out.zeta[0]);
        }
    }
}

#[test]
fn unused_feature_scores_zero() {
    let (m, x) = notation_tree();
    let wide = Ensemble::new(4, 0.0, m.trees().to_vec()).unwrap();
    let x4 = [x, vec![0.9]].concat();
    for cfg in configs() {
        assert_eq!(rank(&wide, &x4, &cfg, false).unwrap().zeta[3], 0.0);
    }
}


#[test]
fn equal_treatment_of_symmetric_pair() {
    for (a, b, d) in [(1.0, 0.2, 0.5), (0.0, 1.0, 0.3), (0.7, 0.7, 0.1)] {
        let m = mirrored(a, b, d);
        let x = [0.3, 0.3, 0.8];
        let table = build_table(&m, &x).unwrap();
        for s in [0usize, 0b100] {
            let gain_i = table.get(s | 1) - table.get(s);
            let gain_j = table.get(s | 2) - table.get(s);
            assert!((gain_i - gain_j).abs() < 1e-15);
        }
        for cfg in configs() {
            let out = rank(&m, &x, &cfg, false).unwrap();
            assert!((out.zeta[0] - out.zeta[1]).abs() < 1e-10, "{cfg:?}");
        }
    }
}

#[test]
fn sign_monotonicity() {
    for seed in 0..5 {
        let up = split_over_copies(seed, 4, |k, v| v + 0.01 * (k % 3) as f64);
        let down = split_over_copies(seed, 4, |k, v| v - 0.01 * (k % 3) as f64);
        let x = instance(seed, 4);
        let (lo, _) = build_table(&up, &x).unwrap().marginal_bounds(0);
        assert!(lo >= 0.0);
        let (_, hi) = build_table(&down, &x).unwrap().marginal_bounds(0);
        assert!(hi <= 0.0);
        for cfg in configs() {
            assert!(rank(&up, &x, &cfg, false).unwrap().zeta[0] >= 0.0);
            assert!(rank(&down, &x, &cfg, false).unwrap().zeta[0] <= 0.0);
        }
    }
}

#[test]
fn monotonicity_on_random_trees() {
    for seed in 0..30 {
        let (m, x) = random_case(seed, 8, 6);
        let table = build_table(&m, &x).unwrap();
        let cfg = RankerConfig::default();
        let zeta = rank(&m, &x, &cfg, false).unwrap().zeta;
        for (i, z) in zeta.iter().enumerate() {
            let (lo, hi) = table.marginal_bounds(i);
            if lo >= 0.0 {
                assert!(*z >= 0.0);
            }
            if hi <= 0.0 {
                assert!(*z <= 0.0);
            }
        }
    }
}

#[test]
fn scores_lie_between_extreme_marginals() {
    for seed in 0..50 {
        let (m, x) = random_case(seed, 10, 7);
        let table = build_table(&m, &x).unwrap();
        for optimizer in [Optimizer::GradientAscent, Optimizer::ADAM] {
            let cfg = RankerConfig { optimizer, ..RankerConfig::default() };
            let out = rank(&m, &x, &cfg, false).unwrap();
            for (i, z) in out.zeta.iter().enumerate() {
                let (lo, hi) = table.marginal_bounds(i);
                assert!(*z >= lo - 1e-12 && *z <= hi + 1e-12, "seed {seed} feature {i}");
            }
            assert!(out.final_z.iter().all(|v| (0.0..=1.0).contains(v)));
        }
    }
}

#[test]
fn symmetric_gradient_properties() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for seed in 0..10 {
        let (m, x) = random_case(seed, 10, 6);
        let n = m.n_features();
        let half = symmetric_gradient(&m, &x, &vec![0.5; n]).unwrap().g;
        assert_eq!(half, banzhaf(&m, &x).unwrap().g);
        let z: Vec<f64> = (0..n).map(|_| rng.gen_range(0.05..0.95)).collect();
        let flipped: Vec<f64> = z.iter().map(|v| 1.0 - v).collect();
        let g = symmetric_gradient(&m, &x, &z).unwrap().g;
        let g_flip = symmetric_gradient(&m, &x, &flipped).unwrap().g;
        assert!(max_abs_diff(&g, &g_flip) < 1e-14);
        let h = 1e-5;
        for i in 0..n {
            let mut a = z.clone();
            let mut b = z.clone();
            a[i] += h;
            b[i] -= h;
            let fd = (ranking_objective(&m, &x, &a).unwrap()
                - ranking_objective(&m, &x, &b).unwrap())
                / (2.0 * h);
            assert!((fd - g[i]).abs() < 1e-6);
        }
    }
}

#[test]
fn trace_has_start_point_and_every_step() {
    let (m, x) = random_case(3, 8, 5);
    let cfg = RankerConfig { iterations: 7, ..RankerConfig::default() };
    let out = rank(&m, &x, &cfg, true).unwrap();
    let trace = out.trace.unwrap();
    assert_eq!(trace.len(), 8);
    assert!(trace[0].abs() < 1e-15);
    assert!(rank(&m, &x, &cfg, false).unwrap().trace.is_none());
}

#[test]
fn selected_rate_gives_non_decreasing_trace() {
    for seed in 0..10 {
        let (m, x) = random_case(seed, 10, 6);
        let lr = select_learning_rate(&m, &x, Optimizer::GradientAscent, 100, &LEARNING_RATE_CANDIDATES)
            .unwrap();
        assert!(LEARNING_RATE_CANDIDATES.contains(&lr));
        let cfg = RankerConfig { learning_rate: lr, ..RankerConfig::default() };
        let trace = rank(&m, &x, &cfg, true).unwrap().trace.unwrap();
        assert!(trace.windows(2).all(|w| w[1] >= w[0] - 1e-9));
    }
}

#[test]
fn ranking_is_scale_invariant() {
    let scores = [0.3, -0.1, 0.7, 0.3, 0.0];
    let pi = induce_ranking(&scores).unwrap();
    assert_eq!(pi, vec![2, 0, 3, 4, 1]);
    let scaled: Vec<f64> = scores.iter().map(|s| s * 17.5).collect();
    assert_eq!(induce_ranking(&scaled).unwrap(), pi);
}

#[test]
fn invalid_configs_are_rejected() {
    let (m, x) = notation_tree();
    let zero = RankerConfig { iterations: 0, ..RankerConfig::default() };
    assert!(matches!(rank(&m, &x, &zero, false), Err(Error::InvalidParams(_))));
    let neg = RankerConfig { learning_rate: -1.0, ..RankerConfig::default() };
    assert!(rank(&m, &x, &neg, false).is_err());
    let bad_adam = RankerConfig {
        optimizer: Optimizer::Adam { beta1: 1.0, beta2: 0.999, epsilon: 1e-8 },
        ..RankerConfig::default()
    };
    assert!(rank(&m, &x, &bad_adam, false).is_err());
}
