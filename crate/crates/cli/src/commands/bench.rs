use std::time::Instant;

use xtree_core::synth::long_chain;
use xtree_core::{beta_shapley, tree_gradient, treeprob_attribute, BetaParams, ProbabilisticSpec};

use crate::error::{usage, CliResult};
use crate::io::{csv_document, emit, num, RunManifest};
use crate::methods::split_list;
use crate::BenchArgs;

pub fn run(args: &BenchArgs) -> CliResult<()> {
    let leaves = split_list(&args.leaves)
        .iter()
        .map(|s| s.parse::<usize>().map_err(|_| usage(format!("bad leaf count '{s}'"))))
        .collect::<CliResult<Vec<_>>>()?;
    let algos = split_list(&args.algos);
    if let Some(bad) = algos.iter().find(|a| !matches!(**a, "grad" | "shap" | "prob")) {
        return Err(usage(format!("unknown bench algorithm '{bad}' (expected grad, shap or prob)")));
    }
    if args.repeats == 0 || args.features == 0 {
        return Err(usage("--repeats and --features must be positive"));
    }
    let manifest = RunManifest::new("bench", args, Some(args.seed));
    let mut rows = Vec::new();
    for &l in &leaves {
        let (model, x) = long_chain(args.features, l, args.seed)?;
        let z = vec![0.5; args.features];
        for &algo in &algos {
            let mut times: Vec<f64> = (0..args.repeats)
                .map(|_| {
                    let start = Instant::now();
                    let done = match algo {
                        "grad" => tree_gradient(&model, &x, &z).map(|_| ()),
                        "shap" => beta_shapley(&model, &x, BetaParams::SHAPLEY, true).map(|_| ()),
                        _ => treeprob_attribute(&model, &x, &ProbabilisticSpec::shapley()).map(|_| ()),
                    };
                    done.map(|_| start.elapsed().as_secs_f64())
                })
                .collect::<xtree_core::Result<_>>()?;
            times.sort_by(f64::total_cmp);
            rows.push(vec![
                algo.to_string(),
                l.to_string(),
                model.max_depth().to_string(),
                num(times[0]),
                num(times[times.len() / 2]),
            ]);
        }
    }
    let header = ["algo", "leaves", "depth", "min_seconds", "median_seconds"];
    emit(args.out.as_ref(), &csv_document(&manifest, &header, &rows)?)
}
