//! Insertion and deletion curves for feature rankings.
//!
//! For a ranking `π`, the insertion curve evaluates `f_x` on the top-`k`
//! features and the deletion curve on the bottom-`k` features, for
//! `k = 1..=N`. Good rankings have a high insertion mean and a low deletion
//! mean.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::beta_shap::beta_shapley;
use crate::error::{Error, Result};
use crate::oracle::SetValueTable;
use crate::ranker::induce_ranking;
use crate::tree::Ensemble;
use crate::treegrad::banzhaf;
use crate::values::BetaParams;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RankingCurves {
    /// `insertion[k-1] = f_x(top k features)`.
    pub insertion: Vec<f64>,
    /// `deletion[k-1] = f_x(bottom k features)`.
    pub deletion: Vec<f64>,
    pub ins_metric: f64,
    pub del_metric: f64,
    /// Coalition size `k` maximizing the insertion curve (first on ties).
    pub argmax_insertion_k: usize,
    /// Coalition size `k` minimizing the deletion curve (first on ties).
    pub argmin_deletion_k: usize,
}

impl RankingCurves {
    pub fn from_points(insertion: Vec<f64>, deletion: Vec<f64>) -> Self {
        let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
        let best = |v: &[f64], better: fn(f64, f64) -> bool| {
            let mut k = 0;
            for (i, &val) in v.iter().enumerate() {
                if better(val, v[k]) {
                    k = i;
                }
            }
            k + 1
        };
        RankingCurves {
            ins_metric: mean(&insertion),
            del_metric: mean(&deletion),
            argmax_insertion_k: best(&insertion, |a, b| a > b),
            argmin_deletion_k: best(&deletion, |a, b| a < b),
            insertion,
            deletion,
        }
    }

    pub fn joint(&self) -> f64 {
        joint_metric(self)
    }
}

/// `Ins − Del`.
pub fn joint_metric(c: &RankingCurves) -> f64 {
    c.ins_metric - c.del_metric
}

fn check_permutation(pi: &[usize], n: usize) -> Result<()> {
    if pi.len() != n {
        return Err(Error::InvalidPermutation(format!(
            "length {} for {n} features",
            pi.len()
        )));
    }
    let mut seen = vec![false; n];
    for &i in pi {
        if i >= n || seen[i] {
            return Err(Error::InvalidPermutation(format!(
                "entry {i} is out of range or repeated"
            )));
        }
        seen[i] = true;
    }
    Ok(())
}

fn curves_with(n: usize, pi: &[usize], eval: impl Fn(&[bool]) -> f64) -> RankingCurves {
    let mut member = vec![false; n];
    let insertion = pi
        .iter()
        .map(|&i| {
            member[i] = true;
            eval(&member)
        })
        .collect();
    member.fill(false);
    let deletion = pi
        .iter()
        .rev()
        .map(|&i| {
            member[i] = true;
            eval(&member)
        })
        .collect();
    RankingCurves::from_points(insertion, deletion)
}

/// Curves by exact conditional evaluation.
pub fn curves(model: &Ensemble, x: &[f64], pi: &[usize]) -> Result<RankingCurves> {
    model.check_instance(x)?;
    check_permutation(pi, model.n_features())?;
    Ok(curves_with(model.n_features(), pi, |member| {
        model.eval_conditional_by(x, |i| member[i])
    }))
}

/// Curves by lookup in a precomputed table.
pub fn curves_from_table(table: &SetValueTable, pi: &[usize]) -> Result<RankingCurves> {
    check_permutation(pi, table.n_features())?;
    Ok(curves_with(table.n_features(), pi, |member| {
        let mask = member
            .iter()
            .enumerate()
            .filter(|(_, &m)| m)
            .fold(0usize, |acc, (i, _)| acc | (1 << i));
        table.get(mask)
    }))
}

/// Pointwise mean of curves over instances.
pub fn mean_curves(all: &[RankingCurves]) -> Result<RankingCurves> {
    let first = all.first().ok_or(Error::EmptyCandidates)?;
    let n = first.insertion.len();
    let count = all.len() as f64;
    let avg = |pick: fn(&RankingCurves) -> &Vec<f64>| -> Vec<f64> {
        (0..n)
            .map(|k| all.iter().map(|c| pick(c)[k]).sum::<f64>() / count)
            .collect()
    };
    Ok(RankingCurves::from_points(
        avg(|c| &c.insertion),
        avg(|c| &c.deletion),
    ))
}

/// Attribution methods the selection step chooses among.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Candidate {
    Beta(BetaParams),
    Banzhaf,
}

impl fmt::Display for Candidate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Candidate::Beta(p) => write!(f, "beta:{}:{}", p.alpha, p.beta),
            Candidate::Banzhaf => write!(f, "banzhaf"),
        }
    }
}

impl FromStr for Candidate {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidParams(format!("unknown candidate '{s}'"));
        match s {
            "banzhaf" => Ok(Candidate::Banzhaf),
            "shapley" => Ok(Candidate::Beta(BetaParams::SHAPLEY)),
            _ => {
                let rest = s.strip_prefix("beta:").ok_or_else(bad)?;
                let (a, b) = rest.split_once(':').ok_or_else(bad)?;
                let a = a.parse().map_err(|_| bad())?;
                let b = b.parse().map_err(|_| bad())?;
                Ok(Candidate::Beta(BetaParams::new(a, b)?))
            }
        }
    }
}

/// Beta(16,1) … Beta(1,16) followed by Banzhaf.
pub fn default_candidates() -> Vec<Candidate> {
    [(16, 1), (8, 1), (4, 1), (2, 1), (1, 1), (1, 2), (1, 4), (1, 8), (1, 16)]
        .into_iter()
        .map(|(alpha, beta)| Candidate::Beta(BetaParams { alpha, beta }))
        .chain(std::iter::once(Candidate::Banzhaf))
        .collect()
}

/// Scores of one candidate on one instance.
pub fn candidate_scores(model: &Ensemble, x: &[f64], candidate: Candidate) -> Result<Vec<f64>> {
    Ok(match candidate {
        Candidate::Beta(p) => beta_shapley(model, x, p, true)?.scores,
        Candidate::Banzhaf => banzhaf(model, x)?.g,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Criterion {
    /// Highest insertion mean.
    Insertion,
    /// Lowest deletion mean.
    Deletion,
    /// Highest `Ins − Del`.
    Joint,
}

impl Criterion {
    pub fn value(&self, c: &RankingCurves) -> f64 {
        match self {
            Criterion::Insertion => c.ins_metric,
            Criterion::Deletion => c.del_metric,
            Criterion::Joint => joint_metric(c),
        }
    }

    fn better(&self, a: f64, b: f64) -> bool {
        match self {
            Criterion::Deletion => a < b,
            _ => a > b,
        }
    }
}

/// Index of the best curves under `criterion`; ties go to the earliest.
pub fn select_best(curves: &[RankingCurves], criterion: Criterion) -> Result<usize> {
    if curves.is_empty() {
        return Err(Error::EmptyCandidates);
    }
    let mut best = 0;
    for (i, c) in curves.iter().enumerate().skip(1) {
        if criterion.better(criterion.value(c), criterion.value(&curves[best])) {
            best = i;
        }
    }
    Ok(best)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Selection {
    pub winner: Candidate,
    pub winner_index: usize,
    /// Criterion value of every candidate, in list order.
    pub values: Vec<f64>,
}

/// Picks the candidate whose induced ranking scores best under `criterion`.
pub fn select_beta_candidate(
    model: &Ensemble,
    x: &[f64],
    candidates: &[Candidate],
    criterion: Criterion,
) -> Result<Selection> {
    if candidates.is_empty() {
        return Err(Error::EmptyCandidates);
    }
    let all = candidates
        .iter()
        .map(|&c| {
            let pi = induce_ranking(&candidate_scores(model, x, c)?)?;
            curves(model, x, &pi)
        })
        .collect::<Result<Vec<_>>>()?;
    let winner_index = select_best(&all, criterion)?;
    Ok(Selection {
        winner: candidates[winner_index],
        winner_index,
        values: all.iter().map(|c| criterion.value(c)).collect(),
    })
}
