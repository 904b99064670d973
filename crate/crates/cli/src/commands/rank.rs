use serde_json::json;
use xtree_core::ranker::{select_learning_rate, LEARNING_RATE_CANDIDATES};
use xtree_core::{induce_ranking, rank, Ensemble, Optimizer, RankOutcome, RankerConfig};

use crate::error::{guard_nan, usage, CliResult};
use crate::io::{csv_document, emit, json_document, load_model, load_one_instance, num, RunManifest};
use crate::RankArgs;

pub fn parse_optimizer(s: &str) -> CliResult<Optimizer> {
    match s {
        "ga" => Ok(Optimizer::GradientAscent),
        "adam" => Ok(Optimizer::ADAM),
        _ => Err(usage(format!("unknown optimizer '{s}' (expected ga or adam)"))),
    }
}

/// `None` for `auto`.
pub fn parse_lr(s: &str) -> CliResult<Option<f64>> {
    if s == "auto" {
        return Ok(None);
    }
    match s.parse::<f64>() {
        Ok(v) if v > 0.0 && v.is_finite() => Ok(Some(v)),
        _ => Err(usage(format!("learning rate must be a positive number or auto, got '{s}'"))),
    }
}

/// Runs the ranker, picking the step size first when none is given.
pub fn run_ranker(
    model: &Ensemble,
    x: &[f64],
    optimizer: Optimizer,
    iterations: usize,
    lr: Option<f64>,
    with_trace: bool,
) -> CliResult<(RankOutcome, f64)> {
    if iterations == 0 {
        return Err(usage("iteration count must be positive"));
    }
    let learning_rate = match lr {
        Some(v) => v,
        None => select_learning_rate(model, x, optimizer, iterations, &LEARNING_RATE_CANDIDATES)?,
    };
    let cfg = RankerConfig { optimizer, iterations, learning_rate };
    let out = rank(model, x, &cfg, with_trace)?;
    guard_nan("ranker scores", &out.zeta)?;
    Ok((out, learning_rate))
}

pub fn run(args: &RankArgs) -> CliResult<()> {
    let optimizer = parse_optimizer(&args.optimizer)?;
    let lr = parse_lr(&args.lr)?;
    let mut manifest = RunManifest::new("rank", args, None);
    let model = manifest.time("load", || load_model(&args.model))?;
    let x = manifest.time("load", || load_one_instance(&args.instance, args.skip_header))?;
    let (out, learning_rate) = manifest.time("rank", || {
        run_ranker(&model, &x, optimizer, args.iters, lr, args.trace.is_some())
    })?;
    let ranking = induce_ranking(&out.zeta)?;
    if let (Some(path), Some(trace)) = (&args.trace, &out.trace) {
        let rows: Vec<Vec<String>> = trace
            .iter()
            .enumerate()
            .map(|(t, v)| vec![t.to_string(), num(*v)])
            .collect();
        emit(Some(path), &csv_document(&manifest, &["t", "objective"], &rows)?)?;
    }
    let body = json!({
        "zeta": out.zeta,
        "ranking": ranking,
        "final_z": out.final_z,
        "learning_rate": learning_rate,
    });
    emit(args.out.as_ref(), &json_document(&manifest, body))
}
