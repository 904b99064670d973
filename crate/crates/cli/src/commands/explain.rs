use std::fs;
use std::path::Path;

use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;
use xtree_core::baselines::{linear_treeshap_sized, linear_treeshap_v1, treeshap_k};
use xtree_core::oracle::{build_table, exact_probabilistic_value, exact_semivalue};
use xtree_core::{
    banzhaf, beta_shapley, treeprob_attribute, weighted_banzhaf, BetaParams, Ensemble, Measure,
    ProbabilisticSpec,
};

use crate::error::{guard_nan, invalid, usage, CliResult};
use crate::io::{emit, json_document, load_instances, load_model, RunManifest};
use crate::methods::{parse_algo, parse_method, Algo, Baseline, Method};
use crate::ExplainArgs;

/// A method with any weight file already read.
#[derive(Clone, Debug)]
pub enum Value {
    Banzhaf,
    WeightedBanzhaf(f64),
    Beta(BetaParams),
    Omega(Vec<f64>),
}

impl Value {
    pub fn resolve(method: Method) -> CliResult<Self> {
        Ok(match method {
            Method::Banzhaf => Value::Banzhaf,
            Method::WeightedBanzhaf(nu) => Value::WeightedBanzhaf(nu),
            Method::Beta(p) => Value::Beta(p),
            Method::Omega(path) => Value::Omega(read_omega(&path)?),
            Method::Ranker { .. } => {
                return Err(usage("ranker scores come from the rank subcommand"))
            }
        })
    }

    fn measure(&self) -> Option<Measure> {
        match *self {
            Value::Banzhaf => Some(Measure::BANZHAF),
            Value::WeightedBanzhaf(nu) => Some(Measure::Dirac(nu)),
            Value::Beta(p) => Some(Measure::Beta(p)),
            Value::Omega(_) => None,
        }
    }

    fn spec(&self) -> ProbabilisticSpec {
        match (self, self.measure()) {
            (_, Some(m)) => ProbabilisticSpec::SemiValue(m),
            (Value::Omega(w), None) => ProbabilisticSpec::Omega(w.clone()),
            _ => unreachable!("only explicit weights lack a measure"),
        }
    }
}

pub fn read_omega(path: &Path) -> CliResult<Vec<f64>> {
    let text = fs::read_to_string(path).map_err(|e| invalid(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| invalid(format!("{}: expected a JSON array of weights: {e}", path.display())))
}

/// Rejects algorithm and method pairs that have no implementation.
pub fn check_pair(algo: Algo, value: &Value) -> CliResult<()> {
    match (algo, value) {
        (Algo::Grad | Algo::GradScalar, Value::Omega(_)) => Err(usage(
            "explicit weights need --algo prob or --algo oracle",
        )),
        (Algo::Baseline(_), v) if !matches!(v, Value::Beta(p) if *p == BetaParams::SHAPLEY) => {
            Err(usage("the baseline algorithms compute the Shapley value only"))
        }
        _ => Ok(()),
    }
}

#[derive(Debug, Serialize)]
pub struct Record {
    pub scores: Vec<f64>,
    pub null_features: Vec<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub imag_residual: Option<f64>,
}

pub fn attribute(
    model: &Ensemble,
    x: &[f64],
    algo: Algo,
    value: &Value,
    vectorized: bool,
) -> CliResult<Record> {
    let from = |r: xtree_core::AttributionResult| Record {
        scores: r.scores,
        null_features: r.null_features,
        imag_residual: r.imag_residual,
    };
    let plain = |scores: Vec<f64>| Record {
        scores,
        null_features: model.unused_features(),
        imag_residual: None,
    };
    let record = match algo {
        Algo::Grad | Algo::GradScalar => {
            let vectorized = vectorized && algo == Algo::Grad;
            match value {
                Value::Banzhaf => plain(banzhaf(model, x)?.g),
                Value::WeightedBanzhaf(nu) => plain(weighted_banzhaf(model, x, *nu)?.g),
                Value::Beta(p) => from(beta_shapley(model, x, *p, vectorized)?),
                Value::Omega(_) => unreachable!("rejected by check_pair"),
            }
        }
        Algo::Prob => from(treeprob_attribute(model, x, &value.spec())?),
        Algo::Baseline(b) => from(match b {
            Baseline::LinearTreeShap(mode, size) => linear_treeshap_sized(model, x, mode, size)?,
            Baseline::TreeShapK => treeshap_k(model, x)?,
            Baseline::V1 => linear_treeshap_v1(model, x)?,
        }),
        Algo::Oracle => {
            let table = build_table(model, x)?;
            plain(match value.measure() {
                Some(m) => exact_semivalue(&table, &m)?,
                None => match value {
                    Value::Omega(w) => exact_probabilistic_value(&table, w)?,
                    _ => unreachable!("measures handled above"),
                },
            })
        }
    };
    guard_nan("scores", &record.scores)?;
    Ok(record)
}

pub fn run(args: &ExplainArgs) -> CliResult<()> {
    let algo = parse_algo(&args.algo)?;
    let value = Value::resolve(parse_method(&args.method)?)?;
    check_pair(algo, &value)?;
    let mut manifest = RunManifest::new("explain", args, None);
    let model = manifest.time("load", || load_model(&args.model))?;
    let (instances, from_csv) = manifest.time("load", || load_instances(&args.instance, args.skip_header))?;
    let records = manifest.time("attribute", || {
        instances
            .par_iter()
            .map(|x| attribute(&model, x, algo, &value, args.vectorized))
            .collect::<CliResult<Vec<_>>>()
    })?;
    let head = json!({ "algo": args.algo, "method": args.method });
    let mut body = serde_json::to_value(head).expect("head serializes");
    let fields = body.as_object_mut().expect("object");
    if from_csv {
        fields.insert("results".into(), serde_json::to_value(&records).expect("records serialize"));
    } else if let serde_json::Value::Object(r) = serde_json::to_value(&records[0]).expect("record serializes") {
        fields.extend(r);
    }
    emit(args.out.as_ref(), &json_document(&manifest, body))
}
