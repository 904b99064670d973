//! Feature attribution for decision-tree ensembles.
//!
//! The main entry points are [`tree_gradient`] for gradients of the
//! multilinear extension, [`rank`] for the gradient-ascent ranker,
//! [`beta_shapley`] for Beta Shapley values by quadrature and
//! [`treeprob_attribute`] for arbitrary probabilistic values. The
//! [`baselines`] module holds earlier polynomial algorithms for comparison
//! and [`oracle`] holds brute-force ground truth for small `N`.

pub mod attribution;
pub mod baselines;
pub mod beta_shap;
pub mod encoding;
pub mod error;
pub mod metrics;
pub mod oracle;
pub mod quadrature;
pub mod ranker;
pub mod synth;
mod traverse;
pub mod tree;
pub mod treegrad;
pub mod treeprob;
pub mod values;

pub use attribution::AttributionResult;
pub use beta_shap::{beta_shapley, shapley};
pub use error::{Error, Result};
pub use ranker::{induce_ranking, rank, Optimizer, RankOutcome, RankerConfig};
pub use tree::{Ensemble, Node, TreeModel};
pub use treegrad::{banzhaf, tree_gradient, weighted_banzhaf, GradientVector};
pub use treeprob::treeprob_attribute;
pub use values::{BetaParams, Measure, ProbabilisticSpec};
