//! Value specifications: which probabilistic value to compute, and the
//! weight vectors and closed forms shared by the algorithms.

use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};

/// Integral Beta parameters; `(1, 1)` is the Shapley value. The weight
/// density on coalition-inclusion probability `t` is proportional to
/// `t^(beta-1) (1-t)^(alpha-1)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BetaParams {
    pub alpha: u32,
    pub beta: u32,
}

impl BetaParams {
    pub const SHAPLEY: BetaParams = BetaParams { alpha: 1, beta: 1 };

    pub fn new(alpha: u32, beta: u32) -> Result<Self> {
        if alpha == 0 || beta == 0 {
            return Err(Error::InvalidParams(format!(
                "Beta parameters must be positive integers, got ({alpha}, {beta})"
            )));
        }
        Ok(BetaParams { alpha, beta })
    }

    /// Density of the weight measure at `t`.
    pub fn density(&self, t: f64) -> f64 {
        t.powi(self.beta as i32 - 1) * (1.0 - t).powi(self.alpha as i32 - 1)
            / beta_function(self.alpha, self.beta)
    }
}

/// A measure on `[0, 1]` defining a semi-value.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Measure {
    /// Point mass at `nu`; weighted Banzhaf (`nu = 0.5` is Banzhaf).
    Dirac(f64),
    Beta(BetaParams),
}

impl Measure {
    pub const BANZHAF: Measure = Measure::Dirac(0.5);
    pub const SHAPLEY: Measure = Measure::Beta(BetaParams::SHAPLEY);

    pub fn validate(&self) -> Result<()> {
        match *self {
            Measure::Dirac(nu) if !(0.0..=1.0).contains(&nu) => Err(Error::InvalidParams(
                format!("Dirac location {nu} is outside [0, 1]"),
            )),
            Measure::Beta(p) => BetaParams::new(p.alpha, p.beta).map(|_| ()),
            Measure::Dirac(_) => Ok(()),
        }
    }

    /// `∫ t^k (1-t)^(l-k) dμ(t)` for `k = 0..=l`.
    pub fn moments(&self, l: usize) -> Result<Vec<f64>> {
        self.validate()?;
        Ok(match *self {
            Measure::Dirac(nu) => (0..=l)
                .map(|k| nu.powi(k as i32) * (1.0 - nu).powi((l - k) as i32))
                .collect(),
            Measure::Beta(BetaParams { alpha, beta }) => {
                let norm = ln_beta(f64::from(beta), f64::from(alpha));
                (0..=l)
                    .map(|k| {
                        let a = (k as f64) + f64::from(beta);
                        let b = ((l - k) as f64) + f64::from(alpha);
                        (ln_beta(a, b) - norm).exp()
                    })
                    .collect()
            }
        })
    }
}

/// Either explicit per-size weights or a semi-value measure.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum ProbabilisticSpec {
    /// `omega[k]` weighs coalitions of size `k` (0-based), length N.
    Omega(Vec<f64>),
    SemiValue(Measure),
}

impl ProbabilisticSpec {
    pub fn shapley() -> Self {
        ProbabilisticSpec::SemiValue(Measure::SHAPLEY)
    }

    pub fn banzhaf() -> Self {
        ProbabilisticSpec::SemiValue(Measure::BANZHAF)
    }
}

/// Largest N accepted on the explicit-weight path.
pub const MAX_OMEGA_FEATURES: usize = 1024;

/// `B(α, β)` for positive integers: exact factorials while they fit, log-Gamma beyond.
pub fn beta_function(alpha: u32, beta: u32) -> f64 {
    if alpha + beta - 1 <= 20 {
        let fact = |n: u32| (1..=u64::from(n)).product::<u64>() as f64;
        fact(alpha - 1) * fact(beta - 1) / fact(alpha + beta - 1)
    } else {
        ln_beta(f64::from(alpha), f64::from(beta)).exp()
    }
}

fn ln_beta(a: f64, b: f64) -> f64 {
    ln_gamma(a) + ln_gamma(b) - ln_gamma(a + b)
}

/// `C(n, k)` as a float.
pub fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut c = 1.0;
    for j in 0..k {
        c = c * (n - j) as f64 / (j + 1) as f64;
    }
    // Snap away the rounding of the running quotient while integers are exact.
    if c < 9.0e15 {
        c.round()
    } else {
        c
    }
}

/// Pairwise (cascade) summation.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    const BLOCK: usize = 16;
    if values.len() <= BLOCK {
        return values.iter().sum();
    }
    let (a, b) = values.split_at(values.len() / 2);
    pairwise_sum(a) + pairwise_sum(b)
}

/// Checks `omega >= 0` and `Σ C(N-1, k) omega[k] = 1` within 1e-10.
pub fn validate_omega(omega: &[f64]) -> Result<()> {
    let n = omega.len();
    if n == 0 {
        return Err(Error::InvalidOmega("weight vector is empty".into()));
    }
    if n > MAX_OMEGA_FEATURES {
        return Err(Error::InvalidOmega(format!(
            "{n} weights exceed the limit of {MAX_OMEGA_FEATURES}"
        )));
    }
    if let Some(k) = omega.iter().position(|w| !w.is_finite() || *w < 0.0) {
        return Err(Error::InvalidOmega(format!(
            "weight {k} is {} (must be finite and nonnegative)",
            omega[k]
        )));
    }
    let terms: Vec<f64> = omega
        .iter()
        .enumerate()
        .map(|(k, w)| binomial(n - 1, k) * w)
        .collect();
    let total = pairwise_sum(&terms);
    if (total - 1.0).abs() > 1e-10 {
        return Err(Error::InvalidOmega(format!(
            "weights are not normalized: Σ C(N-1, k) ω_k = {total}"
        )));
    }
    Ok(())
}

/// Per-size weights of a semi-value on `n` features.
pub fn omega_from_measure(measure: &Measure, n: usize) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(Error::InvalidParams("need at least one feature".into()));
    }
    measure.moments(n - 1)
}

/// Shapley weights `k! (n-1-k)! / n!` for `k = 0..n`.
pub fn shapley_omega(n: usize) -> Vec<f64> {
    (0..n)
        .map(|k| 1.0 / (n as f64 * binomial(n - 1, k)))
        .collect()
}

/// Inner-product weights of degree `m - 1` for the explicit weight vector on
/// `n = omega.len()` features, after absorbing the `n - m` features that never
/// appear on one root-to-leaf path. Index `k` multiplies `y^k`.
pub fn q_from_omega(omega: &[f64], m: usize) -> Result<Vec<f64>> {
    validate_omega(omega)?;
    let n = omega.len();
    let m = m.min(n);
    if m == 0 {
        return Ok(Vec::new());
    }
    let spare = n - m;
    let binoms: Vec<f64> = (0..=spare).map(|j| binomial(spare, j)).collect();
    Ok((0..m)
        .map(|k| {
            let terms: Vec<f64> = binoms
                .iter()
                .enumerate()
                .map(|(j, c)| c * omega[k + j])
                .collect();
            pairwise_sum(&terms)
        })
        .collect())
}

/// Inner-product weights of degree `l` for a semi-value measure.
pub fn q_from_semivalue(measure: &Measure, l: usize) -> Result<Vec<f64>> {
    measure.moments(l)
}

/// Inner-product weights of degree `m - 1` for any spec.
pub fn q_for_spec(spec: &ProbabilisticSpec, n: usize, m: usize) -> Result<Vec<f64>> {
    match spec {
        ProbabilisticSpec::Omega(omega) => {
            if omega.len() != n {
                return Err(Error::InvalidOmega(format!(
                    "{} weights given for {n} features",
                    omega.len()
                )));
            }
            q_from_omega(omega, m)
        }
        ProbabilisticSpec::SemiValue(measure) => {
            if m == 0 {
                measure.validate()?;
                return Ok(Vec::new());
            }
            q_from_semivalue(measure, m.min(n) - 1)
        }
    }
}
