use thiserror::Error;

/// Errors raised by model ingestion and the attribution routines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("schema violation: {0}")]
    Schema(String),

    #[error("tree {tree}, node {node}: cover monotonicity violation ({detail})")]
    CoverMonotonicity {
        tree: usize,
        node: usize,
        detail: String,
    },

    #[error("tree {tree}, node {node}: {detail}")]
    Structure {
        tree: usize,
        node: usize,
        detail: String,
    },

    #[error("tree {tree}, node {node}: feature index {feature} out of range for {n_features} features")]
    FeatureOutOfRange {
        tree: usize,
        node: usize,
        feature: i64,
        n_features: usize,
    },

    #[error("instance has {got} values but the model expects {expected}")]
    InstanceLength { expected: usize, got: usize },

    #[error("non-finite value in {0}")]
    NonFinite(String),

    #[error("point out of bounds: {0}")]
    OutOfBounds(String),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("invalid weight vector: {0}")]
    InvalidOmega(String),

    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),

    #[error("N over oracle cap: {n} features exceeds the limit of {cap}")]
    OracleCap { n: usize, cap: usize },

    #[error("NaN score at feature {0}")]
    NanScore(usize),

    #[error("unrealizable cover constraint: {0}")]
    Unrealizable(String),

    #[error("no convergence: {0}")]
    NoConvergence(String),

    #[error("singular basis of size {size} (condition estimate {condition:e})")]
    SingularBasis { size: usize, condition: f64 },

    #[error("empty candidate list")]
    EmptyCandidates,

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
