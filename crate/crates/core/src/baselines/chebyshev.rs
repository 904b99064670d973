use num_complex::Complex64;

use crate::error::{Error, Result};

/// Chebyshev points of the second kind on `[-1, 1]`, increasing:
/// `-cos(πk / (d-1))`. A single node sits at 0.
pub fn chebyshev_nodes(d: usize) -> Vec<f64> {
    match d {
        0 => Vec::new(),
        1 => vec![0.0],
        _ => (0..d)
            .map(|k| -(std::f64::consts::PI * k as f64 / (d - 1) as f64).cos())
            .collect(),
    }
}

/// Real Vandermonde matrix of a node set and its dense inverse.
#[derive(Clone, Debug)]
pub struct ChebyshevBasis {
    nodes: Vec<f64>,
    inverse: Vec<Vec<f64>>,
}

impl ChebyshevBasis {
    pub fn new(size: usize) -> Result<Self> {
        ChebyshevBasis::from_nodes(chebyshev_nodes(size))
    }

    pub fn from_nodes(nodes: Vec<f64>) -> Result<Self> {
        let v = real_vandermonde(&nodes);
        let inverse = invert(&v).ok_or_else(|| Error::SingularBasis {
            size: nodes.len(),
            condition: super::condition_estimate(super::ConditionOperator::ChebyshevV, nodes.len())
                .unwrap_or(f64::INFINITY),
        })?;
        Ok(ChebyshevBasis { nodes, inverse })
    }

    pub fn size(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn vandermonde(&self) -> Vec<Vec<f64>> {
        real_vandermonde(&self.nodes)
    }

    pub fn inverse(&self) -> &[Vec<f64>] {
        &self.inverse
    }

    /// `(V⁻¹)ᵀ q`, so that `⟨p, q⟩ = Σ_k p(x_k) w_k`.
    pub fn decode_weights(&self, q: &[f64]) -> Vec<f64> {
        (0..self.size())
            .map(|k| q.iter().zip(&self.inverse).map(|(qj, row)| qj * row[k]).sum())
            .collect()
    }

    pub(crate) fn complex_nodes(&self) -> Vec<Complex64> {
        self.nodes.iter().map(|&x| Complex64::new(x, 0.0)).collect()
    }
}

pub(crate) fn real_vandermonde(nodes: &[f64]) -> Vec<Vec<f64>> {
    let d = nodes.len();
    nodes
        .iter()
        .map(|&x| {
            let mut row = Vec::with_capacity(d);
            let mut power = 1.0;
            for _ in 0..d {
                row.push(power);
                power *= x;
            }
            row
        })
        .collect()
}

/// Gauss–Jordan elimination with partial pivoting. `None` when a pivot vanishes.
pub(crate) fn invert(a: &[Vec<f64>]) -> Option<Vec<Vec<f64>>> {
    let n = a.len();
    let mut m: Vec<Vec<f64>> = a
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { 1.0 } else { 0.0 }));
            r
        })
        .collect();
    for col in 0..n {
        let pivot = (col..n).max_by(|&i, &j| m[i][col].abs().total_cmp(&m[j][col].abs()))?;
        if m[pivot][col] == 0.0 || !m[pivot][col].is_finite() {
            return None;
        }
        m.swap(col, pivot);
        let p = m[col][col];
        m[col].iter_mut().for_each(|v| *v /= p);
        let pivot_row = m[col].clone();
        for (i, row) in m.iter_mut().enumerate() {
            if i != col && row[col] != 0.0 {
                let f = row[col];
                row.iter_mut().zip(&pivot_row).for_each(|(v, p)| *v -= f * p);
            }
        }
    }
    Some(m.into_iter().map(|row| row[n..].to_vec()).collect())
}
