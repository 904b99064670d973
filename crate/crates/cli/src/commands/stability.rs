use rayon::prelude::*;
use xtree_core::baselines::{condition_estimate, BasisSize, ConditionOperator, LinearTreeShapMode};
use xtree_core::oracle::{build_table, exact_semivalue};
use xtree_core::synth::{generate, Shape, SynthSpec};
use xtree_core::tree::EdgeAnnotation;
use xtree_core::{BetaParams, Ensemble, Measure};

use super::explain::{attribute, Value};
use crate::error::{usage, CliError, CliResult};
use crate::io::{csv_document, emit, num, RunManifest};
use crate::methods::{parse_algo, parse_range, split_list, Algo, Baseline};
use crate::StabilityArgs;

/// Max-abs error of one algorithm against the oracle; NaN scores count as a
/// NaN error rather than aborting the sweep.
fn error_of(model: &Ensemble, x: &[f64], algo: Algo, exact: &[f64]) -> CliResult<f64> {
    match attribute(model, x, algo, &Value::Beta(BetaParams::SHAPLEY), true) {
        Ok(r) => Ok(r
            .scores
            .iter()
            .zip(exact)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, |m, d| if d.is_nan() || m.is_nan() { f64::NAN } else { m.max(d) })),
        Err(CliError::Numerical(_)) => Ok(f64::NAN),
        Err(e) => Err(e),
    }
}

/// Interpolation size the algorithm uses on a tree of depth `d`.
fn basis_size(algo: Algo, d: usize, n: usize) -> usize {
    match algo {
        Algo::Baseline(Baseline::LinearTreeShap(_, BasisSize::TreeDepth)) => d,
        _ => d.min(n),
    }
}

/// Condition estimate of the matrix the algorithm inverts, if any.
fn condition(algo: Algo, size: usize, max_gamma: f64) -> Option<f64> {
    let op = match algo {
        Algo::Grad | Algo::GradScalar | Algo::Oracle => return None,
        Algo::Prob => ConditionOperator::UnityV,
        Algo::Baseline(Baseline::LinearTreeShap(LinearTreeShapMode::WellConditioned, _)) => {
            ConditionOperator::UnityV
        }
        Algo::Baseline(Baseline::LinearTreeShap(..)) => ConditionOperator::ChebyshevV,
        Algo::Baseline(Baseline::TreeShapK) => ConditionOperator::OplusSolve(max_gamma),
        Algo::Baseline(Baseline::V1) => ConditionOperator::BoxplusSolve(max_gamma),
    };
    condition_estimate(op, size).ok()
}

fn largest_gamma(model: &Ensemble, x: &[f64]) -> f64 {
    model
        .trees()
        .iter()
        .flat_map(|t| {
            let ann = EdgeAnnotation::new(t, x);
            (1..t.n_nodes()).map(move |v| ann.gamma(v))
        })
        .fold(0.0, f64::max)
}

struct Trial {
    errors: Vec<f64>,
    max_gamma: f64,
}

pub fn run(args: &StabilityArgs) -> CliResult<()> {
    let depths = parse_range(&args.depths)?;
    let shape: Shape = args.shape.parse().map_err(|e: xtree_core::Error| usage(e.to_string()))?;
    let names = split_list(&args.algos);
    if names.is_empty() {
        return Err(usage("--algos is empty"));
    }
    let algos = names.iter().map(|s| parse_algo(s)).collect::<CliResult<Vec<_>>>()?;
    if algos.contains(&Algo::Oracle) {
        return Err(usage("the oracle is the reference, not a swept algorithm"));
    }
    if args.repeats == 0 {
        return Err(usage("--repeats must be positive"));
    }
    let mut manifest = RunManifest::new("stability", args, Some(args.seed));
    let jobs: Vec<(usize, u64)> = depths
        .iter()
        .flat_map(|&d| (0..args.repeats).map(move |r| (d, r)))
        .collect();
    let trials = manifest.time("sweep", || {
        jobs.par_iter()
            .map(|&(d, r)| {
                let spec = SynthSpec::new(args.features, d, shape, args.seed.wrapping_add(r));
                let (model, x) = generate(&spec)?;
                let exact = exact_semivalue(&build_table(&model, &x)?, &Measure::SHAPLEY)?;
                let errors = algos
                    .iter()
                    .map(|&a| error_of(&model, &x, a, &exact))
                    .collect::<CliResult<_>>()?;
                Ok(Trial { errors, max_gamma: largest_gamma(&model, &x) })
            })
            .collect::<CliResult<Vec<_>>>()
    })?;
    let mut rows = Vec::new();
    manifest.time("conditions", || {
        for (di, &d) in depths.iter().enumerate() {
            let group = &trials[di * args.repeats as usize..(di + 1) * args.repeats as usize];
            let max_gamma = group.iter().map(|t| t.max_gamma).fold(0.0, f64::max);
            for (k, (&algo, name)) in algos.iter().zip(&names).enumerate() {
                let mean = group.iter().map(|t| t.errors[k]).sum::<f64>() / group.len() as f64;
                let size = basis_size(algo, d, args.features);
                rows.push(vec![
                    d.to_string(),
                    name.to_string(),
                    size.to_string(),
                    num(mean),
                    condition(algo, size, max_gamma).map_or(String::new(), num),
                ]);
            }
        }
    });
    let header = ["depth", "algo", "basis_size", "max_abs_error", "condition"];
    emit(args.out.as_ref(), &csv_document(&manifest, &header, &rows)?)
}
