//! Earlier path-polynomial algorithms for the Shapley value, kept to measure
//! how their rounding error grows with depth. They are implemented as
//! published, without numerical safeguards.

mod chebyshev;
mod condition;
mod linear_treeshap;
mod treeshap_k;
mod v1;

pub use chebyshev::{chebyshev_nodes, ChebyshevBasis};
pub use condition::{condition_estimate, ConditionOperator};
pub use linear_treeshap::{linear_treeshap, linear_treeshap_sized, BasisSize, LinearTreeShapMode};
pub use treeshap_k::{oplus, ominus, treeshap_k};
pub use v1::{boxminus, boxplus, linear_treeshap_v1};
