use crate::attribution::AttributionResult;
use crate::error::Result;
use crate::traverse::{self, Edge, PathAlgebra};
use crate::tree::{EdgeAnnotation, Ensemble};

// A vector of length M+1 represents a polynomial P of degree at most M
// through entry k = c_k · k! (M-k)! / (M+1)!, so that the entries sum to the
// Shapley read-out of P. ⊕γ multiplies a degree-(M-1) polynomial by (1+γy);
// ⊖γ divides it back out by forward substitution.

fn oplus_in_place(v: &mut [f64], gamma: f64) {
    let scale = v.len() as f64;
    let m = v.len() - 1;
    for k in (0..=m).rev() {
        let carry = if k > 0 { gamma * k as f64 / scale * v[k - 1] } else { 0.0 };
        v[k] = (m - k) as f64 / scale * v[k] + carry;
    }
}

fn ominus_into(src: &[f64], gamma: f64, out: &mut [f64]) {
    let scale = src.len() as f64;
    let m = src.len() - 1;
    for k in 0..m {
        let carry = if k > 0 { gamma * k as f64 / scale * out[k - 1] } else { 0.0 };
        out[k] = (src[k] - carry) * scale / (m - k) as f64;
    }
    out[m] = 0.0;
}

/// `ξ ⊕ γ` on a vector of length `M + 1` whose last entry is unused.
pub fn oplus(xi: &[f64], gamma: f64) -> Vec<f64> {
    let mut v = xi.to_vec();
    oplus_in_place(&mut v, gamma);
    v
}

/// `φ ⊖ γ`, the inverse of [`oplus`]; the last entry of the result is 0.
pub fn ominus(phi: &[f64], gamma: f64) -> Vec<f64> {
    let mut out = vec![0.0; phi.len()];
    ominus_into(phi, gamma, &mut out);
    out
}

/// Shapley value by the ⊕/⊖ recursion.
pub fn treeshap_k(model: &Ensemble, x: &[f64]) -> Result<AttributionResult> {
    model.check_instance(x)?;
    let n = model.n_features();
    let mut phi = vec![0.0; n];
    for tree in model.trees() {
        let m = tree.depth().min(n);
        if m == 0 {
            continue;
        }
        traverse::run(&Weighted { m }, &EdgeAnnotation::new(tree, x), &mut phi);
    }
    AttributionResult::new(model, phi)
}

struct Weighted {
    m: usize,
}

impl PathAlgebra for Weighted {
    type Value = Vec<f64>;

    fn root(&self) -> Vec<f64> {
        vec![1.0 / (self.m + 1) as f64; self.m + 1]
    }

    fn zero(&self) -> Vec<f64> {
        vec![0.0; self.m + 1]
    }

    fn reset(&self, value: &mut Vec<f64>) {
        value.fill(0.0);
    }

    fn descend(&self, parent: &Vec<f64>, edge: Edge, out: &mut Vec<f64>) {
        ominus_into(parent, edge.up_gamma.unwrap_or(1.0), out);
        oplus_in_place(out, edge.gamma);
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
        let scale = acc.len() as f64;
        let mut prev = 0.0;
        let mut total = 0.0;
        for k in 0..self.m {
            let carry = if k > 0 { gamma * k as f64 / scale * prev } else { 0.0 };
            prev = (acc[k] - carry) * scale / (self.m - k) as f64;
            total += prev;
        }
        total
    }
}
