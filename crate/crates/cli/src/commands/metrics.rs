use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::json;
use xtree_core::metrics::{
    candidate_scores, curves, default_candidates, mean_curves, select_best, Candidate, Criterion,
    RankingCurves,
};
use xtree_core::{induce_ranking, Ensemble, Optimizer};

use super::explain::{attribute, Value};
use super::rank::run_ranker;
use crate::error::{usage, CliResult};
use crate::io::{csv_document, emit, json_document, load_instances, load_model, num, RunManifest};
use crate::methods::{parse_method, split_list, Algo, Method};
use crate::MetricsArgs;

enum Scorer {
    Value(Value),
    Ranker {
        optimizer: Optimizer,
        iterations: usize,
        learning_rate: Option<f64>,
    },
}

impl Scorer {
    fn parse(s: &str) -> CliResult<Self> {
        Ok(match parse_method(s)? {
            Method::Ranker { optimizer, iterations, learning_rate } => {
                Scorer::Ranker { optimizer, iterations, learning_rate }
            }
            m => Scorer::Value(Value::resolve(m)?),
        })
    }

    fn scores(&self, model: &Ensemble, x: &[f64]) -> CliResult<Vec<f64>> {
        match self {
            // Weight vectors only run through TreeProb; the rest through gradients.
            Scorer::Value(v @ Value::Omega(_)) => Ok(attribute(model, x, Algo::Prob, v, true)?.scores),
            Scorer::Value(v) => Ok(attribute(model, x, Algo::Grad, v, true)?.scores),
            Scorer::Ranker { optimizer, iterations, learning_rate } => {
                Ok(run_ranker(model, x, *optimizer, *iterations, *learning_rate, false)?.0.zeta)
            }
        }
    }
}

/// Curves of one instance for each method, then for each candidate.
struct InstanceCurves {
    methods: Vec<RankingCurves>,
    candidates: Vec<RankingCurves>,
}

fn instance_curves(
    model: &Ensemble,
    x: &[f64],
    scorers: &[Scorer],
    candidates: &[Candidate],
) -> CliResult<InstanceCurves> {
    let curve_of = |scores: Vec<f64>| -> CliResult<RankingCurves> {
        Ok(curves(model, x, &induce_ranking(&scores)?)?)
    };
    Ok(InstanceCurves {
        methods: scorers
            .iter()
            .map(|s| curve_of(s.scores(model, x)?))
            .collect::<CliResult<_>>()?,
        candidates: candidates
            .iter()
            .map(|&c| curve_of(candidate_scores(model, x, c)?))
            .collect::<CliResult<_>>()?,
    })
}

fn curve_rows(name: &str, c: &RankingCurves, prefix: &[String]) -> Vec<Vec<String>> {
    (0..c.insertion.len())
        .map(|k| {
            let mut row = prefix.to_vec();
            row.extend([
                name.to_string(),
                (k + 1).to_string(),
                num(c.insertion[k]),
                num(c.deletion[k]),
            ]);
            row
        })
        .collect()
}

fn summary_entry(name: &str, c: &RankingCurves) -> serde_json::Value {
    json!({
        "method": name,
        "ins": c.ins_metric,
        "del": c.del_metric,
        "joint": c.joint(),
        "argmax_insertion_k": c.argmax_insertion_k,
        "argmin_deletion_k": c.argmin_deletion_k,
    })
}

/// Row indices to use: all of them, or `k` drawn without replacement.
fn choose_rows(n: usize, samples: Option<usize>, seed: u64) -> CliResult<Vec<usize>> {
    match samples {
        Some(0) => Err(usage("--samples must be positive")),
        Some(k) if k < n => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut rows = rand::seq::index::sample(&mut rng, n, k).into_vec();
            rows.sort_unstable();
            Ok(rows)
        }
        _ => Ok((0..n).collect()),
    }
}

pub fn run(args: &MetricsArgs) -> CliResult<()> {
    let names: Vec<&str> = split_list(&args.methods);
    if names.is_empty() {
        return Err(usage("--methods is empty"));
    }
    let scorers = names.iter().map(|s| Scorer::parse(s)).collect::<CliResult<Vec<_>>>()?;
    let candidates: Vec<Candidate> = match &args.candidates {
        None => default_candidates(),
        Some(list) => split_list(list)
            .iter()
            .map(|s| s.parse::<Candidate>().map_err(|e| usage(e.to_string())))
            .collect::<CliResult<_>>()?,
    };
    if candidates.is_empty() {
        return Err(usage("--candidates is empty"));
    }
    let mut manifest = RunManifest::new("metrics", args, Some(args.seed));
    let model = manifest.time("load", || load_model(&args.model))?;
    let (instances, _) = manifest.time("load", || load_instances(&args.instances, args.skip_header))?;
    let rows = choose_rows(instances.len(), args.samples, args.seed)?;
    let per_instance = manifest.time("curves", || {
        rows.par_iter()
            .map(|&r| instance_curves(&model, &instances[r], &scorers, &candidates))
            .collect::<CliResult<Vec<_>>>()
    })?;

    let method_means = (0..scorers.len())
        .map(|m| mean_curves(&per_instance.iter().map(|c| c.methods[m].clone()).collect::<Vec<_>>()))
        .collect::<xtree_core::Result<Vec<_>>>()?;
    let candidate_means = (0..candidates.len())
        .map(|m| mean_curves(&per_instance.iter().map(|c| c.candidates[m].clone()).collect::<Vec<_>>()))
        .collect::<xtree_core::Result<Vec<_>>>()?;

    let mut csv_rows = Vec::new();
    let mut entries = Vec::new();
    for (name, c) in names.iter().zip(&method_means) {
        csv_rows.extend(curve_rows(name, c, &[]));
        entries.push(summary_entry(name, c));
    }
    let mut selection = serde_json::Map::new();
    for (label, criterion) in [
        ("beta-insertion", Criterion::Insertion),
        ("beta-deletion", Criterion::Deletion),
        ("beta-joint", Criterion::Joint),
    ] {
        let w = select_best(&candidate_means, criterion)?;
        let c = &candidate_means[w];
        csv_rows.extend(curve_rows(label, c, &[]));
        let mut entry = summary_entry(label, c);
        entry["winner"] = json!(candidates[w].to_string());
        entries.push(entry);
        selection.insert(
            label.into(),
            json!({
                "winner": candidates[w].to_string(),
                "values": candidate_means.iter().map(|c| criterion.value(c)).collect::<Vec<_>>(),
            }),
        );
    }
    emit(
        args.out.as_ref(),
        &csv_document(&manifest, &["method", "k", "insertion", "deletion"], &csv_rows)?,
    )?;
    if let Some(path) = &args.per_instance {
        let mut rows_out = Vec::new();
        for (&r, curves) in rows.iter().zip(&per_instance) {
            for (name, c) in names.iter().zip(&curves.methods) {
                rows_out.extend(curve_rows(name, c, &[r.to_string()]));
            }
        }
        let doc = csv_document(&manifest, &["row", "method", "k", "insertion", "deletion"], &rows_out)?;
        emit(Some(path), &doc)?;
    }
    if let Some(path) = &args.summary {
        let body = json!({
            "n_instances": rows.len(),
            "rows": rows,
            "methods": entries,
            "candidates": candidates.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
            "selection": selection,
        });
        emit(Some(path), &json_document(&manifest, body))?;
    }
    Ok(())
}
