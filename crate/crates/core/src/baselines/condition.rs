use num_complex::Complex64;

use super::chebyshev::{chebyshev_nodes, invert, real_vandermonde};
use crate::encoding::UnityBasis;
use crate::error::{Error, Result};

const MAX_ITERATIONS: usize = 10_000;
const TOLERANCE: f64 = 1e-3;

/// Matrices whose conditioning drives the baselines' accuracy. `size` is the
/// path degree `M` the operator is used with.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ConditionOperator {
    /// Vandermonde matrix at `M` Chebyshev points of the second kind.
    ChebyshevV,
    /// Vandermonde matrix at the `M` roots of unity.
    UnityV,
    /// The `M × M` bidiagonal system inverted by TreeShap-K's division step.
    OplusSolve(f64),
    /// The `(M+1) × (M+1)` bidiagonal system inverted by V1's division step.
    BoxplusSolve(f64),
}

type Op = Box<dyn Fn(&[Complex64]) -> Vec<Complex64>>;

/// 2-norm condition number by power iteration on `AᴴA` and on `(AᴴA)⁻¹`.
pub fn condition_estimate(op: ConditionOperator, size: usize) -> Result<f64> {
    if size == 0 {
        return Err(Error::InvalidParams("operator size must be positive".into()));
    }
    let dim = match op {
        ConditionOperator::BoxplusSolve(_) => size + 1,
        _ => size,
    };
    let (forward, backward) = operators(op, size)?;
    let largest = power_iteration(&forward, dim)?;
    let inverse_largest = power_iteration(&backward, dim)?;
    Ok((largest * inverse_largest).sqrt())
}

/// Returns `x ↦ AᴴA x` and `x ↦ A⁻¹A⁻ᴴ x`.
fn operators(op: ConditionOperator, size: usize) -> Result<(Op, Op)> {
    match op {
        ConditionOperator::ChebyshevV => {
            let v = real_vandermonde(&chebyshev_nodes(size));
            let inv = invert(&v).ok_or(Error::SingularBasis {
                size,
                condition: f64::INFINITY,
            })?;
            Ok(dense_pair(v, inv))
        }
        ConditionOperator::UnityV => {
            let basis = UnityBasis::new(size);
            let v = basis.vandermonde();
            let inv = basis.inverse();
            Ok((
                Box::new(move |x: &[Complex64]| mul_h(&v, &mul(&v, x))) as Op,
                Box::new(move |x: &[Complex64]| mul(&inv, &mul_h(&inv, x))) as Op,
            ))
        }
        ConditionOperator::OplusSolve(gamma) => {
            let scale = (size + 1) as f64;
            let diag: Vec<f64> = (0..size).map(|i| (size - i) as f64 / scale).collect();
            let sub: Vec<f64> = (0..size).map(|i| gamma * i as f64 / scale).collect();
            Ok(bidiagonal_pair(diag, sub))
        }
        ConditionOperator::BoxplusSolve(gamma) => {
            let diag = vec![1.0; size + 1];
            let sub = vec![gamma - 1.0; size + 1];
            Ok(bidiagonal_pair(diag, sub))
        }
    }
}

fn to_complex(a: &[Vec<f64>]) -> Vec<Vec<Complex64>> {
    a.iter()
        .map(|row| row.iter().map(|&v| Complex64::new(v, 0.0)).collect())
        .collect()
}

fn dense_pair(a: Vec<Vec<f64>>, inv: Vec<Vec<f64>>) -> (Op, Op) {
    let a = to_complex(&a);
    let inv = to_complex(&inv);
    (
        Box::new(move |x| mul_h(&a, &mul(&a, x))),
        Box::new(move |x| mul(&inv, &mul_h(&inv, x))),
    )
}

/// Lower bidiagonal `A` with `A[i][i] = diag[i]`, `A[i][i-1] = sub[i]`.
fn bidiagonal_pair(diag: Vec<f64>, sub: Vec<f64>) -> (Op, Op) {
    let n = diag.len();
    let (d1, s1) = (diag.clone(), sub.clone());
    let apply = move |x: &[Complex64]| -> Vec<Complex64> {
        (0..n)
            .map(|i| d1[i] * x[i] + if i > 0 { s1[i] * x[i - 1] } else { 0.0.into() })
            .collect()
    };
    let (d2, s2) = (diag.clone(), sub.clone());
    let apply_t = move |x: &[Complex64]| -> Vec<Complex64> {
        (0..n)
            .map(|i| d2[i] * x[i] + if i + 1 < n { s2[i + 1] * x[i + 1] } else { 0.0.into() })
            .collect()
    };
    let (d3, s3) = (diag.clone(), sub.clone());
    let solve = move |b: &[Complex64]| -> Vec<Complex64> {
        let mut x = vec![Complex64::new(0.0, 0.0); n];
        for i in 0..n {
            let carry = if i > 0 { s3[i] * x[i - 1] } else { 0.0.into() };
            x[i] = (b[i] - carry) / d3[i];
        }
        x
    };
    let solve_t = move |b: &[Complex64]| -> Vec<Complex64> {
        let mut x = vec![Complex64::new(0.0, 0.0); n];
        for i in (0..n).rev() {
            let carry = if i + 1 < n { sub[i + 1] * x[i + 1] } else { 0.0.into() };
            x[i] = (b[i] - carry) / diag[i];
        }
        x
    };
    (
        Box::new(move |x| apply_t(&apply(x))),
        Box::new(move |x| solve(&solve_t(x))),
    )
}

fn mul(a: &[Vec<Complex64>], x: &[Complex64]) -> Vec<Complex64> {
    a.iter()
        .map(|row| row.iter().zip(x).map(|(r, v)| r * v).sum())
        .collect()
}

fn mul_h(a: &[Vec<Complex64>], x: &[Complex64]) -> Vec<Complex64> {
    let n = a.first().map_or(0, Vec::len);
    (0..n)
        .map(|j| a.iter().zip(x).map(|(row, v)| row[j].conj() * v).sum())
        .collect()
}

fn norm(x: &[Complex64]) -> f64 {
    x.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
}

/// Dominant eigenvalue of a Hermitian positive semi-definite operator.
fn power_iteration(op: &Op, n: usize) -> Result<f64> {
    let mut x: Vec<Complex64> = (0..n)
        .map(|k| Complex64::new(1.0 + 0.5 * ((k * 7 + 3) % 11) as f64 / 11.0, 0.0))
        .collect();
    let start = norm(&x);
    x.iter_mut().for_each(|v| *v /= start);
    let mut estimate = 0.0;
    for _ in 0..MAX_ITERATIONS {
        let y = op(&x);
        let next = norm(&y);
        if !next.is_finite() {
            return Ok(f64::INFINITY);
        }
        if next == 0.0 {
            return Ok(0.0);
        }
        if (next - estimate).abs() <= TOLERANCE * next {
            return Ok(next);
        }
        estimate = next;
        x = y.into_iter().map(|v| v / next).collect();
    }
    Err(Error::NoConvergence(format!(
        "power iteration after {MAX_ITERATIONS} iterations"
    )))
}
