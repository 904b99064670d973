//! Any probabilistic value in O(L·D) per tree through polynomials encoded at
//! roots of unity.
//!
//! Each leaf contributes a product of binomials `1 + γ_i y`, one per distinct
//! feature on its path, padded with `(1+y)` factors to the common degree
//! `M = min(D, N)`. Scores are inner products of those products, with one
//! binomial divided out, against a weight polynomial determined by the value.

use crate::attribution::AttributionResult;
use crate::encoding::{DegreeMode, EncodedAlgebra, UnityBasis};
use crate::error::Result;
use crate::traverse;
use crate::tree::{EdgeAnnotation, Ensemble};
use crate::values::{q_for_spec, ProbabilisticSpec};

pub fn treeprob_attribute(
    model: &Ensemble,
    x: &[f64],
    spec: &ProbabilisticSpec,
) -> Result<AttributionResult> {
    model.check_instance(x)?;
    let n = model.n_features();
    // Validate the spec even when every tree is a lone leaf.
    q_for_spec(spec, n, n)?;
    let mut phi = vec![0.0; n];
    let mut imag: f64 = 0.0;
    for tree in model.trees() {
        let m = tree.depth().min(n);
        if m == 0 {
            continue;
        }
        let basis = UnityBasis::new(m);
        let q = q_for_spec(spec, n, m)?;
        let alg = EncodedAlgebra::new(
            basis.nodes().to_vec(),
            DegreeMode::Fixed(basis.decode_weights(&q)),
        );
        traverse::run(&alg, &EdgeAnnotation::new(tree, x), &mut phi);
        imag = imag.max(alg.imag_residual());
    }
    let mut result = AttributionResult::new(model, phi)?;
    result.imag_residual = Some(imag);
    Ok(result)
}
