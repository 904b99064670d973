use std::str::FromStr;

use num_complex::Complex64;

use super::chebyshev::{chebyshev_nodes, ChebyshevBasis};
use crate::attribution::AttributionResult;
use crate::encoding::{DegreeMode, EncodedAlgebra, UnityBasis};
use crate::error::{Error, Result};
use crate::traverse;
use crate::tree::{EdgeAnnotation, Ensemble};
use crate::values::shapley_omega;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LinearTreeShapMode {
    /// Every leaf polynomial padded to degree `M`; Chebyshev nodes.
    Fixed,
    /// Degrees tracked per accumulator; one Chebyshev inverse per degree.
    Mitigated,
    /// Fixed degree at the roots of unity.
    WellConditioned,
}

impl FromStr for LinearTreeShapMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fixed" => Ok(LinearTreeShapMode::Fixed),
            "mitigated" => Ok(LinearTreeShapMode::Mitigated),
            "wellcond" => Ok(LinearTreeShapMode::WellConditioned),
            other => Err(Error::InvalidParams(format!(
                "unknown Linear TreeShap mode '{other}' (expected fixed, mitigated or wellcond)"
            ))),
        }
    }
}

/// How many interpolation nodes each tree gets.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum BasisSize {
    /// `min(D, N)`, the smallest size that holds every path polynomial.
    #[default]
    Capped,
    /// The tree depth `D`, padding every polynomial up to it. This is what
    /// the widely used public implementation does.
    TreeDepth,
}

/// Shapley value through `ψ(p) = ⟨p, B_deg(p)⟩`, where
/// `B_d(y) = Σ_k y^k / ((d+1) C(d, k))`.
pub fn linear_treeshap(
    model: &Ensemble,
    x: &[f64],
    mode: LinearTreeShapMode,
) -> Result<AttributionResult> {
    linear_treeshap_sized(model, x, mode, BasisSize::Capped)
}

/// [`linear_treeshap`] with an explicit basis size.
pub fn linear_treeshap_sized(
    model: &Ensemble,
    x: &[f64],
    mode: LinearTreeShapMode,
    size: BasisSize,
) -> Result<AttributionResult> {
    model.check_instance(x)?;
    let n = model.n_features();
    let mut phi = vec![0.0; n];
    for tree in model.trees() {
        let m = match size {
            BasisSize::Capped => tree.depth().min(n),
            BasisSize::TreeDepth => tree.depth(),
        };
        if m == 0 {
            continue;
        }
        let alg = algebra(m, mode)?;
        traverse::run(&alg, &EdgeAnnotation::new(tree, x), &mut phi);
    }
    AttributionResult::new(model, phi)
}

fn to_complex(v: &[f64]) -> Vec<Complex64> {
    v.iter().map(|&x| Complex64::new(x, 0.0)).collect()
}

fn algebra(m: usize, mode: LinearTreeShapMode) -> Result<EncodedAlgebra> {
    // B_{d-1} has the Shapley weights of d players as coefficients.
    Ok(match mode {
        LinearTreeShapMode::Fixed => {
            let basis = ChebyshevBasis::new(m)?;
            let w = basis.decode_weights(&shapley_omega(m));
            EncodedAlgebra::new(basis.complex_nodes(), DegreeMode::Fixed(to_complex(&w)))
        }
        LinearTreeShapMode::Mitigated => {
            let nodes = chebyshev_nodes(m);
            let mut by_degree = vec![Vec::new()];
            for d in 1..=m {
                let basis = ChebyshevBasis::from_nodes(nodes[..d].to_vec())?;
                by_degree.push(to_complex(&basis.decode_weights(&shapley_omega(d))));
            }
            EncodedAlgebra::new(to_complex(&nodes), DegreeMode::Variable(by_degree))
        }
        LinearTreeShapMode::WellConditioned => {
            let basis = UnityBasis::new(m);
            let w = basis.decode_weights(&shapley_omega(m));
            EncodedAlgebra::new(basis.nodes().to_vec(), DegreeMode::Fixed(w))
        }
    })
}
