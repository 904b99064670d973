//! Beta Shapley values with integral parameters from a handful of gradients.
//!
//! Along the diagonal `t·1`, every gradient component is a polynomial in `t`
//! of degree below `min(D, N)`. A semi-value is the integral of that
//! polynomial against the Beta density, so a Gauss–Legendre rule with
//! `ceil(M / 2)` nodes, `M = min(D, N) + α + β − 2`, is exact.

use crate::attribution::AttributionResult;
use crate::error::Result;
use crate::quadrature::{cached_rule, QuadratureRule};
use crate::traverse::{self, Edge, PathAlgebra};
use crate::tree::{EdgeAnnotation, Ensemble};
use crate::treegrad::accumulate_gradient;
use crate::values::BetaParams;

/// Quadrature rule sized for `model` and `params`.
pub fn rule_for(model: &Ensemble, params: BetaParams) -> Result<std::sync::Arc<QuadratureRule>> {
    let params = BetaParams::new(params.alpha, params.beta)?;
    let m = model.max_depth().min(model.n_features()) + params.alpha as usize + params.beta as usize
        - 2;
    cached_rule(m.div_ceil(2).max(1))
}

/// Beta Shapley value. The scalar variant calls the gradient routine once per
/// quadrature node; the vectorized one carries all nodes through a single
/// traversal per tree.
pub fn beta_shapley(
    model: &Ensemble,
    x: &[f64],
    params: BetaParams,
    vectorized: bool,
) -> Result<AttributionResult> {
    model.check_instance(x)?;
    let rule = rule_for(model, params)?;
    let n = model.n_features();
    let weights: Vec<f64> = rule
        .nodes
        .iter()
        .zip(&rule.weights)
        .map(|(&t, &w)| w * params.density(t))
        .collect();
    let mut phi = vec![0.0; n];
    if vectorized {
        let alg = Vectorized {
            nodes: &rule.nodes,
            weights: &weights,
        };
        for tree in model.trees() {
            traverse::run(&alg, &EdgeAnnotation::new(tree, x), &mut phi);
        }
    } else {
        let mut g = vec![0.0; n];
        for (&t, &w) in rule.nodes.iter().zip(&weights) {
            let z = vec![t; n];
            g.fill(0.0);
            for tree in model.trees() {
                accumulate_gradient(&EdgeAnnotation::new(tree, x), &z, &mut g);
            }
            for (p, gi) in phi.iter_mut().zip(&g) {
                *p += w * gi;
            }
        }
    }
    AttributionResult::new(model, phi)
}

/// Shapley value, `Beta(1, 1)`.
pub fn shapley(model: &Ensemble, x: &[f64]) -> Result<AttributionResult> {
    beta_shapley(model, x, BetaParams::SHAPLEY, true)
}

/// The gradient traversal evaluated at every quadrature node at once. Entry
/// `l` of a value belongs to node `t_l`; the root value holds the density
/// weights so the read-out is a plain sum.
struct Vectorized<'a> {
    nodes: &'a [f64],
    weights: &'a [f64],
}

impl PathAlgebra for Vectorized<'_> {
    type Value = Vec<f64>;

    fn root(&self) -> Vec<f64> {
        self.weights.to_vec()
    }

    fn zero(&self) -> Vec<f64> {
        vec![0.0; self.nodes.len()]
    }

    fn reset(&self, value: &mut Vec<f64>) {
        value.fill(0.0);
    }

    fn descend(&self, parent: &Vec<f64>, edge: Edge, out: &mut Vec<f64>) {
        for ((o, &p), &t) in out.iter_mut().zip(parent).zip(self.nodes) {
            let f = 1.0 - t + t * edge.gamma;
            *o = match edge.up_gamma {
                Some(up) => p / (1.0 - t + t * up) * f,
                None => p * f,
            };
        }
    }

    fn scale_leaf(&self, value: &mut Vec<f64>, weight: f64) {
        value.iter_mut().for_each(|v| *v *= weight);
    }

    fn add_assign(&self, acc: &mut Vec<f64>, x: &Vec<f64>) {
        acc.iter_mut().zip(x).for_each(|(a, b)| *a += b);
    }

    fn sub_assign(&self, acc: &mut Vec<f64>, x: &Vec<f64>) {
        acc.iter_mut().zip(x).for_each(|(a, b)| *a -= b);
    }

    fn readout(&self, acc: &Vec<f64>, gamma: f64) -> f64 {
        acc.iter()
            .zip(self.nodes)
            .map(|(&h, &t)| h / (1.0 - t + t * gamma))
            .sum()
    }
}
