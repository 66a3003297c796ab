//! Per-sentence scoring of a speech draft.

use alloc::string::String;
use alloc::vec::Vec;

use crate::features::{extract, FeatureError, FeatureKind, FeatureRegistry};
use crate::glm::{GlmError, LassoModel};
use crate::lexicon::LexiconBundle;
use crate::text::{split_sentences, Sentence};

/// Ratio features reported per sentence, ranked by `|β_j z_j|`.
pub const TOP_RATIO_DEVICES: usize = 3;

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ScoreResult {
    pub text: String,
    pub probability: f64,
    /// `(feature name, raw value)`: every binary feature that fired, then up
    /// to three ratio features with the largest non-zero contribution.
    pub fired_devices: Vec<(String, f64)>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ScoreError {
    #[error("model was trained with feature registry {model}, but the loaded lexicons produce {registry}")]
    ModelMismatch { model: String, registry: String },
    #[error(transparent)]
    Feature(#[from] FeatureError),
    #[error(transparent)]
    Glm(#[from] GlmError),
}

/// Checks that `model` was trained on the columns `registry` produces.
pub fn check_model(model: &LassoModel, registry: &FeatureRegistry) -> Result<(), ScoreError> {
    let fingerprint = registry.fingerprint();
    if model.registry_fingerprint != fingerprint || model.feature_names != registry.names() {
        return Err(ScoreError::ModelMismatch {
            model: model.registry_fingerprint.clone(),
            registry: fingerprint,
        });
    }
    Ok(())
}

pub fn score_sentence(
    sentence: &Sentence,
    model: &LassoModel,
    bundle: &LexiconBundle,
    registry: &FeatureRegistry,
) -> Result<ScoreResult, ScoreError> {
    let x = extract(core::slice::from_ref(sentence), bundle, registry)?.values;
    let probability = model.predict_proba(&x)?;
    let contributions = model.contributions(&x)?;

    let mut fired: Vec<(String, f64)> = Vec::new();
    let mut ratios: Vec<(usize, f64)> = Vec::new();
    for (j, entry) in registry.entries().iter().enumerate() {
        match entry.kind {
            FeatureKind::Binary if x[j] != 0.0 => fired.push((entry.name.clone(), x[j])),
            FeatureKind::Ratio if contributions[j] != 0.0 => ratios.push((j, libm::fabs(contributions[j]))),
            _ => {}
        }
    }
    // Stable sort keeps registry order among equal magnitudes.
    ratios.sort_by(|a, b| b.1.total_cmp(&a.1));
    fired.extend(
        ratios
            .into_iter()
            .take(TOP_RATIO_DEVICES)
            .map(|(j, _)| (registry.entries()[j].name.clone(), x[j])),
    );
    Ok(ScoreResult {
        text: sentence.text.clone(),
        probability,
        fired_devices: fired,
    })
}

/// Splits `draft` into sentences and scores each one on its own (window 1).
pub fn score_draft(
    model: &LassoModel,
    bundle: &LexiconBundle,
    registry: &FeatureRegistry,
    draft: &str,
) -> Result<Vec<ScoreResult>, ScoreError> {
    check_model(model, registry)?;
    split_sentences(draft)
        .iter()
        .map(|s| score_sentence(s, model, bundle, registry))
        .collect()
}
