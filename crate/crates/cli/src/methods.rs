//! Parsing of `--method`, `--methods` and `--algo(s)` values.

use std::path::PathBuf;

use xtree_core::baselines::{BasisSize, LinearTreeShapMode};
use xtree_core::{BetaParams, Optimizer};

use crate::error::{usage, CliResult};

#[derive(Clone, Debug, PartialEq)]
pub enum Method {
    Banzhaf,
    WeightedBanzhaf(f64),
    Beta(BetaParams),
    /// Explicit per-size weights read from a JSON array.
    Omega(PathBuf),
    /// `None` learning rate means pick one per instance.
    Ranker {
        optimizer: Optimizer,
        iterations: usize,
        learning_rate: Option<f64>,
    },
}

fn number<T: std::str::FromStr>(s: &str, what: &str, whole: &str) -> CliResult<T> {
    s.parse()
        .map_err(|_| usage(format!("bad {what} '{s}' in '{whole}'")))
}

pub fn parse_method(s: &str) -> CliResult<Method> {
    let parts: Vec<&str> = s.split(':').collect();
    match parts.as_slice() {
        ["banzhaf"] => Ok(Method::Banzhaf),
        ["shapley"] => Ok(Method::Beta(BetaParams::SHAPLEY)),
        ["wbanzhaf", nu] => {
            let nu: f64 = number(nu, "location", s)?;
            if !(0.0..=1.0).contains(&nu) {
                return Err(usage(format!("weighted Banzhaf location {nu} is outside [0, 1]")));
            }
            Ok(Method::WeightedBanzhaf(nu))
        }
        ["beta", a, b] => {
            let p = BetaParams::new(number(a, "alpha", s)?, number(b, "beta", s)?)
                .map_err(|e| usage(e.to_string()))?;
            Ok(Method::Beta(p))
        }
        ["omega", path] if !path.is_empty() => Ok(Method::Omega(PathBuf::from(path))),
        ["ranker", opt, t, lr] => {
            let optimizer = match *opt {
                "ga" => Optimizer::GradientAscent,
                "adam" => Optimizer::ADAM,
                _ => return Err(usage(format!("unknown optimizer '{opt}' in '{s}'"))),
            };
            let iterations: usize = number(t, "iteration count", s)?;
            if iterations == 0 {
                return Err(usage(format!("iteration count must be positive in '{s}'")));
            }
            let learning_rate = match *lr {
                "auto" => None,
                v => Some(number::<f64>(v, "learning rate", s)?),
            };
            if learning_rate.is_some_and(|lr| !(lr > 0.0 && lr.is_finite())) {
                return Err(usage(format!("learning rate must be positive in '{s}'")));
            }
            Ok(Method::Ranker { optimizer, iterations, learning_rate })
        }
        _ => Err(usage(format!(
            "unknown method '{s}' (expected banzhaf, wbanzhaf:ν, shapley, beta:α:β, omega:FILE or ranker:ga|adam:T:ε)"
        ))),
    }
}

/// Shapley algorithms from the earlier literature.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Baseline {
    LinearTreeShap(LinearTreeShapMode, BasisSize),
    TreeShapK,
    V1,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Algo {
    Grad,
    /// Per-feature gradient loop rather than the vectorized one.
    GradScalar,
    Prob,
    Baseline(Baseline),
    Oracle,
}

pub fn parse_algo(s: &str) -> CliResult<Algo> {
    let parts: Vec<&str> = s.split(':').collect();
    let basis = |b: &str| match b {
        "capped" => Ok(BasisSize::Capped),
        "depth" => Ok(BasisSize::TreeDepth),
        _ => Err(usage(format!("unknown basis size '{b}' in '{s}' (expected capped or depth)"))),
    };
    let mode = |m: &str| m.parse::<LinearTreeShapMode>().map_err(|e| usage(e.to_string()));
    Ok(match parts.as_slice() {
        ["grad"] => Algo::Grad,
        ["grad-scalar"] => Algo::GradScalar,
        ["prob"] => Algo::Prob,
        ["oracle"] => Algo::Oracle,
        ["treeshap-k"] => Baseline::TreeShapK.into(),
        ["v1"] => Baseline::V1.into(),
        ["linear-treeshap"] => Baseline::LinearTreeShap(LinearTreeShapMode::Fixed, BasisSize::Capped).into(),
        ["linear-treeshap", m] => Baseline::LinearTreeShap(mode(m)?, BasisSize::Capped).into(),
        ["linear-treeshap", m, b] => Baseline::LinearTreeShap(mode(m)?, basis(b)?).into(),
        _ => {
            return Err(usage(format!(
                "unknown algorithm '{s}' (expected grad, grad-scalar, prob, oracle, \
                 linear-treeshap[:fixed|mitigated|wellcond[:capped|depth]], treeshap-k or v1)"
            )))
        }
    })
}

impl From<Baseline> for Algo {
    fn from(b: Baseline) -> Self {
        Algo::Baseline(b)
    }
}

/// Comma-separated list, blanks dropped.
pub fn split_list(s: &str) -> Vec<&str> {
    s.split(',').map(str::trim).filter(|p| !p.is_empty()).collect()
}

/// `start:end:step` (inclusive) or a comma list.
pub fn parse_range(s: &str) -> CliResult<Vec<usize>> {
    let bad = || usage(format!("bad range '{s}' (expected start:end:step or a comma list)"));
    let parts: Vec<&str> = s.split(':').collect();
    let out: Vec<usize> = if parts.len() == 3 {
        let [a, b, step] = [parts[0], parts[1], parts[2]].map(|p| p.trim().parse::<usize>());
        let (a, b, step) = (a.map_err(|_| bad())?, b.map_err(|_| bad())?, step.map_err(|_| bad())?);
        if step == 0 || a > b {
            return Err(bad());
        }
        (a..=b).step_by(step).collect()
    } else {
        split_list(s)
            .into_iter()
            .map(|p| p.parse::<usize>().map_err(|_| bad()))
            .collect::<CliResult<_>>()?
    };
    if out.is_empty() {
        return Err(bad());
    }
    Ok(out)
}
