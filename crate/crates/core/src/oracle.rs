//! Brute-force ground truth by enumerating all `2^N` coalitions.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::tree::{Ensemble, Node};
use crate::values::{validate_omega, BetaParams, Measure};

/// Largest feature count the oracle accepts.
pub const ORACLE_CAP: usize = 24;

/// Largest feature count for the exact rational path.
pub const RATIONAL_CAP: usize = 10;

/// `f_x(S)` for every coalition; bit `i` of the index marks feature `i`.
#[derive(Clone, Debug, PartialEq)]
pub struct SetValueTable {
    n: usize,
    values: Vec<f64>,
}

impl SetValueTable {
    /// Wraps precomputed values; `values.len()` must be a power of two.
    pub fn from_values(values: Vec<f64>) -> Result<Self> {
        if !values.len().is_power_of_two() {
            return Err(Error::InvalidParams(format!(
                "table length {} is not a power of two",
                values.len()
            )));
        }
        let n = values.len().trailing_zeros() as usize;
        if n > ORACLE_CAP {
            return Err(Error::OracleCap { n, cap: ORACLE_CAP });
        }
        Ok(SetValueTable { n, values })
    }

    pub fn n_features(&self) -> usize {
        self.n
    }

    pub fn get(&self, mask: usize) -> f64 {
        self.values[mask]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Smallest and largest `f(S ∪ i) − f(S)` over `S ∌ i`.
    pub fn marginal_bounds(&self, i: usize) -> (f64, f64) {
        let bit = 1 << i;
        (0..self.values.len())
            .filter(|s| s & bit == 0)
            .map(|s| self.values[s | bit] - self.values[s])
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), d| {
                (lo.min(d), hi.max(d))
            })
    }
}

fn check_cap(n: usize, cap: usize) -> Result<()> {
    if n > cap {
        return Err(Error::OracleCap { n, cap });
    }
    Ok(())
}

/// Evaluates every coalition, visiting them in Gray-code order.
pub fn build_table(model: &Ensemble, x: &[f64]) -> Result<SetValueTable> {
    let n = model.n_features();
    check_cap(n, ORACLE_CAP)?;
    model.check_instance(x)?;
    let mut values = vec![0.0; 1 << n];
    for i in 0..values.len() {
        let mask = i ^ (i >> 1);
        values[mask] = model.eval_conditional_by(x, |f| mask & (1 << f) != 0);
    }
    Ok(SetValueTable { n, values })
}

/// `φ_i = Σ_{S ∌ i} ω_{|S|} (f(S ∪ i) − f(S))`.
pub fn exact_probabilistic_value(table: &SetValueTable, omega: &[f64]) -> Result<Vec<f64>> {
    if omega.len() != table.n {
        return Err(Error::InvalidOmega(format!(
            "{} weights for {} features",
            omega.len(),
            table.n
        )));
    }
    validate_omega(omega)?;
    Ok((0..table.n)
        .map(|i| {
            let bit = 1 << i;
            (0..table.values.len())
                .filter(|s| s & bit == 0)
                .map(|s| {
                    omega[s.count_ones() as usize] * (table.values[s | bit] - table.values[s])
                })
                .sum()
        })
        .collect())
}

/// `∂f̄/∂z_i = Σ_{S ∌ i} Π_{j∈S} z_j Π_{j∉S∪i} (1 − z_j) (f(S ∪ i) − f(S))`.
pub fn exact_gradient(table: &SetValueTable, z: &[f64]) -> Result<Vec<f64>> {
    if z.len() != table.n || z.iter().any(|v| !(0.0..=1.0).contains(v)) {
        return Err(Error::OutOfBounds("z must lie in [0, 1]^N".into()));
    }
    Ok((0..table.n)
        .map(|i| {
            let bit = 1 << i;
            (0..table.values.len())
                .filter(|s| s & bit == 0)
                .map(|s| {
                    let weight: f64 = (0..table.n)
                        .filter(|&j| j != i)
                        .map(|j| if s & (1 << j) != 0 { z[j] } else { 1.0 - z[j] })
                        .product();
                    weight * (table.values[s | bit] - table.values[s])
                })
                .sum()
        })
        .collect())
}

/// Semi-value weights for `n` features, computed exactly in rationals.
pub fn semivalue_omega(measure: &Measure, n: usize) -> Result<Vec<f64>> {
    Ok(rational_omega(measure, n)?
        .iter()
        .map(|w| w.to_f64().unwrap_or(f64::NAN))
        .collect())
}

fn factorial(k: u64) -> BigInt {
    (1..=k).fold(BigInt::one(), |acc, i| acc * BigInt::from(i))
}

/// `ω_k = ∫ t^k (1 − t)^(n−1−k) dμ(t)` as exact rationals.
fn rational_omega(measure: &Measure, n: usize) -> Result<Vec<BigRational>> {
    measure.validate()?;
    if n == 0 {
        return Err(Error::InvalidParams("need at least one feature".into()));
    }
    let l = (n - 1) as u64;
    Ok(match *measure {
        Measure::Dirac(nu) => {
            let nu = BigRational::from_float(nu).expect("validated finite");
            let rest = BigRational::one() - &nu;
            (0..=l)
                .map(|k| pow(&nu, k) * pow(&rest, l - k))
                .collect()
        }
        Measure::Beta(BetaParams { alpha, beta }) => {
            let (a, b) = (u64::from(alpha), u64::from(beta));
            // B(k+β, l−k+α) / B(β, α) with B(p, q) = (p−1)!(q−1)!/(p+q−1)!.
            let norm = BigRational::new(factorial(a + b - 1), factorial(a - 1) * factorial(b - 1));
            (0..=l)
                .map(|k| {
                    let beta_fn = BigRational::new(
                        factorial(k + b - 1) * factorial(l - k + a - 1),
                        factorial(l + a + b - 1),
                    );
                    beta_fn * &norm
                })
                .collect()
        }
    })
}

fn pow(base: &BigRational, exp: u64) -> BigRational {
    (0..exp).fold(BigRational::one(), |acc, _| acc * base)
}

/// Semi-value of the table for a Dirac or Beta measure.
pub fn exact_semivalue(table: &SetValueTable, measure: &Measure) -> Result<Vec<f64>> {
    exact_probabilistic_value(table, &semivalue_omega(measure, table.n)?)
}

/// Semi-value computed entirely in rational arithmetic: covers, leaf values
/// and thresholds are taken as the exact binary fractions they store, so the
/// only rounding is the final conversion of each score.
pub fn exact_semivalue_rational(
    model: &Ensemble,
    x: &[f64],
    measure: &Measure,
) -> Result<Vec<f64>> {
    let n = model.n_features();
    check_cap(n, RATIONAL_CAP)?;
    model.check_instance(x)?;
    let omega = rational_omega(measure, n)?;
    let table: Vec<BigRational> = (0..1usize << n)
        .map(|mask| rational_conditional(model, x, mask))
        .collect();
    Ok((0..n)
        .map(|i| {
            let bit = 1 << i;
            let mut total = BigRational::zero();
            for s in (0..table.len()).filter(|s| s & bit == 0) {
                total += &omega[s.count_ones() as usize] * (&table[s | bit] - &table[s]);
            }
            total.to_f64().unwrap_or(f64::NAN)
        })
        .collect())
}

fn exact(v: f64) -> BigRational {
    BigRational::from_float(v).expect("validated finite")
}

fn rational_conditional(model: &Ensemble, x: &[f64], mask: usize) -> BigRational {
    let mut total = exact(model.base_value());
    for tree in model.trees() {
        let mut stack = vec![(0usize, BigRational::one())];
        while let Some((v, weight)) = stack.pop() {
            match *tree.node(v) {
                Node::Leaf { value, .. } => total += weight * exact(value),
                Node::Split {
                    feature,
                    threshold,
                    cover,
                    left,
                    right,
                } => {
                    if mask & (1 << feature) != 0 {
                        let next = if x[feature] <= threshold { left } else { right };
                        stack.push((next, weight));
                    } else {
                        let c = exact(cover);
                        let wl = &weight * exact(tree.node(left).cover()) / &c;
                        let wr = weight * exact(tree.node(right).cover()) / c;
                        stack.push((left, wl));
                        stack.push((right, wr));
                    }
                }
            }
        }
    }
    total
}
