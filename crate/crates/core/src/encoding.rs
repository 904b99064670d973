//! Polynomials stored as their values at a fixed set of nodes.
//!
//! The traversal only ever multiplies or divides by binomials `1 + γy` and
//! reads out inner products `⟨p, q⟩` with a fixed coefficient vector `q`.
//! Both are cheap on evaluations: the binomial factors act pointwise and the
//! inner product becomes a dot product with decode weights `(V⁻¹)ᵀ q`, where
//! `V` is the Vandermonde matrix of the nodes.

use std::cell::Cell;

use num_complex::Complex64;

use crate::traverse::{Edge, PathAlgebra};

/// Roots of unity `χ_k = exp(2πik / M)`, `k = 0..M`. Their Vandermonde
/// matrix is symmetric with inverse `conj(V) / M`.
#[derive(Clone, Debug)]
pub struct UnityBasis {
    nodes: Vec<Complex64>,
}

impl UnityBasis {
    pub fn new(size: usize) -> Self {
        let nodes = (0..size)
            .map(|k| Complex64::from_polar(1.0, std::f64::consts::TAU * k as f64 / size as f64))
            .collect();
        UnityBasis { nodes }
    }

    pub fn size(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[Complex64] {
        &self.nodes
    }

    /// `V[i][j] = χ_i^j`.
    pub fn vandermonde(&self) -> Vec<Vec<Complex64>> {
        vandermonde(&self.nodes)
    }

    /// `V⁻¹ = conj(V) / M`.
    pub fn inverse(&self) -> Vec<Vec<Complex64>> {
        let m = self.size() as f64;
        self.vandermonde()
            .into_iter()
            .map(|row| row.into_iter().map(|v| v.conj() / m).collect())
            .collect()
    }

    /// Values of the polynomial with coefficients `coeffs` at the nodes.
    pub fn encode(&self, coeffs: &[f64]) -> Vec<Complex64> {
        self.nodes.iter().map(|&x| horner(coeffs, x)).collect()
    }

    /// Weights `w` with `⟨p, q⟩ = Σ_k (Vp)_k w_k` for `deg p < M`.
    pub fn decode_weights(&self, q: &[f64]) -> Vec<Complex64> {
        let m = self.size() as f64;
        self.nodes
            .iter()
            .map(|&x| {
                let xc = x.conj();
                let mut power = Complex64::new(1.0, 0.0);
                let mut acc = Complex64::new(0.0, 0.0);
                for &qj in q {
                    acc += power * qj;
                    power *= xc;
                }
                acc / m
            })
            .collect()
    }
}

pub(crate) fn vandermonde(nodes: &[Complex64]) -> Vec<Vec<Complex64>> {
    let m = nodes.len();
    nodes
        .iter()
        .map(|&x| {
            let mut row = Vec::with_capacity(m);
            let mut power = Complex64::new(1.0, 0.0);
            for _ in 0..m {
                row.push(power);
                power *= x;
            }
            row
        })
        .collect()
}

pub(crate) fn horner(coeffs: &[f64], x: Complex64) -> Complex64 {
    coeffs
        .iter()
        .rev()
        .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * x + c)
}

/// How the read-out treats polynomial degree.
#[derive(Clone, Debug)]
pub(crate) enum DegreeMode {
    /// Every leaf is padded to degree `M` by `(1+y)` factors; one weight vector.
    Fixed(Vec<Complex64>),
    /// Degrees vary; entry `d` decodes quotients of degree `d - 1` from the
    /// first `d` nodes.
    Variable(Vec<Vec<Complex64>>),
}

/// Encoded polynomial with its tracked degree.
#[derive(Clone, Debug)]
pub(crate) struct Encoded {
    pub evals: Vec<Complex64>,
    pub degree: usize,
}

pub(crate) struct EncodedAlgebra {
    nodes: Vec<Complex64>,
    /// `pow1p[j][k] = (1 + nodes[k])^j` for `j = 0..=M`.
    pow1p: Vec<Vec<Complex64>>,
    mode: DegreeMode,
    imag: Cell<f64>,
}

impl EncodedAlgebra {
    pub fn new(nodes: Vec<Complex64>, mode: DegreeMode) -> Self {
        let m = nodes.len();
        let mut pow1p = vec![vec![Complex64::new(1.0, 0.0); m]; m + 1];
        for j in 1..=m {
            for k in 0..m {
                pow1p[j][k] = pow1p[j - 1][k] * (1.0 + nodes[k]);
            }
        }
        EncodedAlgebra {
            nodes,
            pow1p,
            mode,
            imag: Cell::new(0.0),
        }
    }

    /// Largest imaginary part dropped by [`PathAlgebra::readout`] so far.
    pub fn imag_residual(&self) -> f64 {
        self.imag.get()
    }

    fn raise(&self, value: &mut Encoded, degree: usize) {
        if degree > value.degree {
            let pad = &self.pow1p[degree - value.degree];
            value.evals.iter_mut().zip(pad).for_each(|(e, p)| *e *= p);
            value.degree = degree;
        }
    }

    fn combine(&self, acc: &mut Encoded, x: &Encoded, sign: f64) {
        self.raise(acc, x.degree);
        let pad = &self.pow1p[acc.degree - x.degree];
        for ((a, &b), &p) in acc.evals.iter_mut().zip(&x.evals).zip(pad) {
            *a += b * p * sign;
        }
    }
}

impl PathAlgebra for EncodedAlgebra {
    type Value = Encoded;

    fn root(&self) -> Encoded {
        Encoded {
            evals: vec![Complex64::new(1.0, 0.0); self.nodes.len()],
            degree: 0,
        }
    }

    fn zero(&self) -> Encoded {
        Encoded {
            evals: vec![Complex64::new(0.0, 0.0); self.nodes.len()],
            degree: 0,
        }
    }

    fn reset(&self, value: &mut Encoded) {
        value.evals.fill(Complex64::new(0.0, 0.0));
        value.degree = 0;
    }

    fn descend(&self, parent: &Encoded, edge: Edge, out: &mut Encoded) {
        for ((o, &p), &x) in out.evals.iter_mut().zip(&parent.evals).zip(&self.nodes) {
            let f = 1.0 + edge.gamma * x;
            *o = match edge.up_gamma {
                Some(up) => p / (1.0 + up * x) * f,
                None => p * f,
            };
        }
        out.degree = parent.degree + usize::from(edge.up_gamma.is_none());
    }

    fn scale_leaf(&self, value: &mut Encoded, weight: f64) {
        value.evals.iter_mut().for_each(|e| *e *= weight);
        if let DegreeMode::Fixed(_) = self.mode {
            self.raise(value, self.nodes.len());
        }
    }

    fn add_assign(&self, acc: &mut Encoded, x: &Encoded) {
        self.combine(acc, x, 1.0);
    }

    fn sub_assign(&self, acc: &mut Encoded, x: &Encoded) {
        self.combine(acc, x, -1.0);
    }

    fn readout(&self, acc: &Encoded, gamma: f64) -> f64 {
        let weights = match &self.mode {
            DegreeMode::Fixed(w) => w.as_slice(),
            DegreeMode::Variable(_) if acc.degree == 0 => return 0.0,
            DegreeMode::Variable(by_degree) => by_degree[acc.degree].as_slice(),
        };
        let mut total = Complex64::new(0.0, 0.0);
        for ((&e, &x), &w) in acc.evals.iter().zip(&self.nodes).zip(weights) {
            total += e / (1.0 + gamma * x) * w;
        }
        let imag = (total.im * (gamma - 1.0)).abs();
        if imag > self.imag.get() {
            self.imag.set(imag);
        }
        total.re
    }
}
