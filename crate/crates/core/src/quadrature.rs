//! Gauss–Legendre rules on `[0, 1]`.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

use crate::error::{Error, Result};

const MAX_NEWTON_STEPS: usize = 100;

/// Nodes in `(0, 1)`, increasing, with positive weights summing to one.
#[derive(Clone, Debug, PartialEq)]
pub struct QuadratureRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl QuadratureRule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&t, &w)| w * f(t))
            .sum()
    }
}

/// `P_n(x)` and `P_n'(x)` by the three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let n = n as f64;
    (p1, n * (x * p1 - p0) / (x * x - 1.0))
}

/// The `n`-point rule, computed by Newton iteration on the roots of `P_n`.
pub fn gauss_legendre(n: usize) -> Result<QuadratureRule> {
    if n == 0 {
        return Err(Error::InvalidParams("quadrature needs at least one node".into()));
    }
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    // Roots are symmetric about 0; solve for the positive half.
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        if n == 1 {
            x = 0.0;
        }
        let mut converged = n == 1;
        let mut dp = 0.0;
        for _ in 0..MAX_NEWTON_STEPS {
            let (p, d) = legendre(n, x);
            dp = d;
            if converged {
                break;
            }
            let step = p / d;
            x -= step;
            if step.abs() <= 1e-15 {
                converged = true;
            }
        }
        if !converged {
            return Err(Error::NoConvergence(format!(
                "Legendre root {i} of P_{n} after {MAX_NEWTON_STEPS} Newton steps"
            )));
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        // Map [-1, 1] -> [0, 1]; the half-width 1/2 scales the weights.
        nodes[i] = (1.0 - x) / 2.0;
        nodes[n - 1 - i] = (1.0 + x) / 2.0;
        weights[i] = w / 2.0;
        weights[n - 1 - i] = w / 2.0;
    }
    Ok(QuadratureRule { nodes, weights })
}

/// Shared rules keyed by node count.
pub fn cached_rule(n: usize) -> Result<Arc<QuadratureRule>> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<QuadratureRule>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(rule) = cache.lock().expect("quadrature cache poisoned").get(&n) {
        return Ok(Arc::clone(rule));
    }
    let rule = Arc::new(gauss_legendre(n)?);
    cache
        .lock()
        .expect("quadrature cache poisoned")
        .insert(n, Arc::clone(&rule));
    Ok(rule)
}
