use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tree::Ensemble;

/// Per-feature scores plus metadata.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AttributionResult {
    pub scores: Vec<f64>,
    /// Features no tree splits on; their scores are 0 by construction.
    pub null_features: Vec<usize>,
    /// Largest imaginary part discarded when decoding complex encodings.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub imag_residual: Option<f64>,
}

impl AttributionResult {
    /// Rejects NaN scores.
    pub(crate) fn new(model: &Ensemble, scores: Vec<f64>) -> Result<Self> {
        if let Some(i) = scores.iter().position(|s| s.is_nan()) {
            return Err(Error::NanScore(i));
        }
        Ok(AttributionResult {
            scores,
            null_features: model.unused_features(),
            imag_residual: None,
        })
    }
}
