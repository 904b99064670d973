use crate::attribution::AttributionResult;
use crate::error::Result;
use crate::traverse::{self, Edge, PathAlgebra};
use crate::tree::{EdgeAnnotation, Ensemble};

// Coefficients in t of ∏ (1 + (γ_i - 1) t); the Shapley read-out is the
// integral over [0, 1], i.e. Σ_k c_k / (k + 1).

fn boxplus_in_place(c: &mut [f64], a: f64) {
    for k in (1..c.len()).rev() {
        c[k] += a * c[k - 1];
    }
}

fn boxminus_into(src: &[f64], a: f64, out: &mut [f64]) {
    let mut prev = 0.0;
    for (o, &s) in out.iter_mut().zip(src) {
        *o = s - a * prev;
        prev = *o;
    }
}

/// Multiplies the coefficient vector by `1 + a t` (top coefficient dropped).
pub fn boxplus(d: &[f64], a: f64) -> Vec<f64> {
    let mut c = d.to_vec();
    boxplus_in_place(&mut c, a);
    c
}

/// Inverse of [`boxplus`] by forward substitution.
pub fn boxminus(c: &[f64], a: f64) -> Vec<f64> {
    let mut d = vec![0.0; c.len()];
    boxminus_into(c, a, &mut d);
    d
}

/// Shapley value by the ⊞/⊟ recursion.
pub fn linear_treeshap_v1(model: &Ensemble, x: &[f64]) -> Result<AttributionResult> {
    model.check_instance(x)?;
    let n = model.n_features();
    let mut phi = vec![0.0; n];
    for tree in model.trees() {
        let m = tree.depth().min(n);
        if m == 0 {
            continue;
        }
        traverse::run(&Shifted { m }, &EdgeAnnotation::new(tree, x), &mut phi);
    }
    AttributionResult::new(model, phi)
}

struct Shifted {
    m: usize,
}

impl PathAlgebra for Shifted {
    type Value = Vec<f64>;

    fn root(&self) -> Vec<f64> {
        let mut c = vec![0.0; self.m + 1];
        c[0] = 1.0;
        c
    }

    fn zero(&self) -> Vec<f64> {
        vec![0.0; self.m + 1]
    }

    fn reset(&self, value: &mut Vec<f64>) {
        value.fill(0.0);
    }

    fn descend(&self, parent: &Vec<f64>, edge: Edge, out: &mut Vec<f64>) {
        match edge.up_gamma {
            Some(up) => boxminus_into(parent, up - 1.0, out),
            None => out.copy_from_slice(parent),
        }
        boxplus_in_place(out, edge.gamma - 1.0);
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
        let a = gamma - 1.0;
        let mut prev = 0.0;
        let mut total = 0.0;
        for (k, &c) in acc.iter().enumerate() {
            prev = c - a * prev;
            total += prev / (k + 1) as f64;
        }
        total
    }
}
