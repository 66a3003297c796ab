//! Glue from labeled examples to a design matrix.

use alloc::vec::Vec;

use crate::corpus::LabeledExample;
use crate::features::{extract, FeatureError, FeatureRegistry, FeatureVector};
use crate::glm::{DesignMatrix, GlmError};
use crate::lexicon::LexiconBundle;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PipelineError {
    #[error(transparent)]
    Feature(#[from] FeatureError),
    #[error(transparent)]
    Glm(#[from] GlmError),
}

/// Feature vectors for each example, in input order.
pub fn example_features(
    examples: &[LabeledExample],
    bundle: &LexiconBundle,
    registry: &FeatureRegistry,
) -> Result<Vec<FeatureVector>, FeatureError> {
    examples
        .iter()
        .map(|e| extract(&e.to_sentences(), bundle, registry))
        .collect()
}

pub fn design_matrix(
    examples: &[LabeledExample],
    bundle: &LexiconBundle,
    registry: &FeatureRegistry,
) -> Result<DesignMatrix, PipelineError> {
    let rows: Vec<Vec<f64>> = example_features(examples, bundle, registry)?
        .into_iter()
        .map(|v| v.values)
        .collect();
    let labels: Vec<bool> = examples.iter().map(|e| e.label.is_positive()).collect();
    Ok(DesignMatrix::new(&rows, &labels, registry.names())?)
}
