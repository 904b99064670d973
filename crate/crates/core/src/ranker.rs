//! Feature scores from projected ascent on `½(f̄_x(z) − f̄_x(1 − z))`.
//!
//! The scores are the running mean of the symmetrized gradients visited by
//! the optimizer. With one iteration they equal the Banzhaf value.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tree::{EdgeAnnotation, Ensemble};
use crate::treegrad::{accumulate_gradient, GradientVector};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Optimizer {
    GradientAscent,
    Adam { beta1: f64, beta2: f64, epsilon: f64 },
}

impl Optimizer {
    pub const ADAM: Optimizer = Optimizer::Adam {
        beta1: 0.9,
        beta2: 0.999,
        epsilon: 1e-8,
    };
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RankerConfig {
    pub optimizer: Optimizer,
    pub iterations: usize,
    pub learning_rate: f64,
}

impl Default for RankerConfig {
    fn default() -> Self {
        RankerConfig {
            optimizer: Optimizer::GradientAscent,
            iterations: 100,
            learning_rate: 5.0,
        }
    }
}

impl RankerConfig {
    pub fn validate(&self) -> Result<()> {
        if self.iterations == 0 {
            return Err(Error::InvalidParams("iterations must be at least 1".into()));
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::InvalidParams(format!(
                "learning rate must be positive, got {}",
                self.learning_rate
            )));
        }
        if let Optimizer::Adam {
            beta1,
            beta2,
            epsilon,
        } = self.optimizer
        {
            if !(0.0..1.0).contains(&beta1) || !(0.0..1.0).contains(&beta2) || epsilon < 0.0 {
                return Err(Error::InvalidParams(format!(
                    "ADAM needs 0 <= beta1, beta2 < 1 and epsilon >= 0, got ({beta1}, {beta2}, {epsilon})"
                )));
            }
        }
        Ok(())
    }
}

/// Optimizer state after `t` iterations.
#[derive(Clone, Debug, PartialEq)]
pub struct RankerState {
    pub z: Vec<f64>,
    pub zeta: Vec<f64>,
    pub t: usize,
    pub m: Vec<f64>,
    pub v: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RankOutcome {
    pub zeta: Vec<f64>,
    pub final_z: Vec<f64>,
    /// Objective at the start point and after each iteration, when requested.
    pub trace: Option<Vec<f64>>,
}

/// Gradient evaluator with the per-tree edge factors computed once.
struct Objective<'a> {
    model: &'a Ensemble,
    x: &'a [f64],
    annotations: Vec<EdgeAnnotation<'a>>,
}

impl<'a> Objective<'a> {
    fn new(model: &'a Ensemble, x: &'a [f64]) -> Result<Self> {
        model.check_instance(x)?;
        let annotations = model
            .trees()
            .iter()
            .map(|t| EdgeAnnotation::new(t, x))
            .collect();
        Ok(Objective {
            model,
            x,
            annotations,
        })
    }

    fn symmetric_gradient(&self, z: &[f64]) -> Vec<f64> {
        let n = z.len();
        let flipped: Vec<f64> = z.iter().map(|v| 1.0 - v).collect();
        let mut a = vec![0.0; n];
        let mut b = vec![0.0; n];
        for ann in &self.annotations {
            accumulate_gradient(ann, z, &mut a);
            accumulate_gradient(ann, &flipped, &mut b);
        }
        a.iter().zip(&b).map(|(p, q)| 0.5 * (p + q)).collect()
    }

    fn value(&self, z: &[f64]) -> Result<f64> {
        let flipped: Vec<f64> = z.iter().map(|v| 1.0 - v).collect();
        Ok(0.5
            * (self.model.eval_multilinear(self.x, z)?
                - self.model.eval_multilinear(self.x, &flipped)?))
    }
}

/// `½(∇f̄_x(z) + ∇f̄_x(1 − z))`, the gradient of the ranking objective.
pub fn symmetric_gradient(model: &Ensemble, x: &[f64], z: &[f64]) -> Result<GradientVector> {
    model.check_point(z, "z")?;
    let g = Objective::new(model, x)?.symmetric_gradient(z);
    Ok(GradientVector { g, z: z.to_vec() })
}

/// `½(f̄_x(z) − f̄_x(1 − z))`.
pub fn ranking_objective(model: &Ensemble, x: &[f64], z: &[f64]) -> Result<f64> {
    Objective::new(model, x)?.value(z)
}

impl RankerState {
    pub fn new(n: usize) -> Self {
        RankerState {
            z: vec![0.5; n],
            zeta: vec![0.0; n],
            t: 0,
            m: vec![0.0; n],
            v: vec![0.0; n],
        }
    }

    /// One iteration with gradient `g`.
    pub fn step(&mut self, g: &[f64], cfg: &RankerConfig) {
        self.t += 1;
        let t = self.t as f64;
        for (zeta, gi) in self.zeta.iter_mut().zip(g) {
            *zeta = (t - 1.0) / t * *zeta + gi / t;
        }
        match cfg.optimizer {
            Optimizer::GradientAscent => {
                for (z, gi) in self.z.iter_mut().zip(g) {
                    *z += cfg.learning_rate * gi;
                }
            }
            Optimizer::Adam {
                beta1,
                beta2,
                epsilon,
            } => {
                let bias1 = 1.0 - beta1.powi(self.t as i32);
                let bias2 = 1.0 - beta2.powi(self.t as i32);
                for i in 0..g.len() {
                    self.m[i] = beta1 * self.m[i] + (1.0 - beta1) * g[i];
                    self.v[i] = beta2 * self.v[i] + (1.0 - beta2) * g[i] * g[i];
                    let m_hat = self.m[i] / bias1;
                    let v_hat = self.v[i] / bias2;
                    self.z[i] += cfg.learning_rate * m_hat / (v_hat + epsilon).sqrt();
                }
            }
        }
        for z in &mut self.z {
            *z = z.clamp(0.0, 1.0);
        }
    }
}

/// Runs the ranker for `cfg.iterations` steps from `z = 0.5·1`.
pub fn rank(
    model: &Ensemble,
    x: &[f64],
    cfg: &RankerConfig,
    with_trace: bool,
) -> Result<RankOutcome> {
    cfg.validate()?;
    let objective = Objective::new(model, x)?;
    let mut state = RankerState::new(model.n_features());
    let mut trace = if with_trace {
        Some(vec![objective.value(&state.z)?])
    } else {
        None
    };
    for _ in 0..cfg.iterations {
        let g = objective.symmetric_gradient(&state.z);
        if let Some(i) = g.iter().position(|v| v.is_nan()) {
            return Err(Error::NanScore(i));
        }
        state.step(&g, cfg);
        if let Some(trace) = trace.as_mut() {
            trace.push(objective.value(&state.z)?);
        }
    }
    Ok(RankOutcome {
        zeta: state.zeta,
        final_z: state.z,
        trace,
    })
}

/// Candidate step sizes for [`select_learning_rate`].
pub const LEARNING_RATE_CANDIDATES: [f64; 5] = [0.1, 0.5, 1.0, 5.0, 10.0];

/// Largest candidate whose traced objective never drops by more than `1e-9`.
/// Falls back to the smallest candidate when none qualifies.
pub fn select_learning_rate(
    model: &Ensemble,
    x: &[f64],
    optimizer: Optimizer,
    iterations: usize,
    candidates: &[f64],
) -> Result<f64> {
    let mut best = None;
    for &lr in candidates {
        let cfg = RankerConfig {
            optimizer,
            iterations,
            learning_rate: lr,
        };
        let trace = rank(model, x, &cfg, true)?.trace.unwrap_or_default();
        if trace.windows(2).all(|w| w[1] >= w[0] - 1e-9) && best.is_none_or(|b| lr > b) {
            best = Some(lr);
        }
    }
    best.or_else(|| candidates.iter().copied().reduce(f64::min))
        .ok_or(Error::EmptyCandidates)
}

/// Features ordered by decreasing score; ties keep ascending index order.
pub fn induce_ranking(scores: &[f64]) -> Result<Vec<usize>> {
    if let Some(i) = scores.iter().position(|s| s.is_nan()) {
        return Err(Error::NanScore(i));
    }
    let mut order: Vec<usize> = (0..scores.len()).collect();
    // Stable sort, so equal scores (including ±0) keep index order.
    order.sort_by(|&a, &b| scores[b].partial_cmp(&scores[a]).expect("NaN rejected above"));
    Ok(order)
}
