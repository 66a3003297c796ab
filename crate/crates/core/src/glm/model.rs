use alloc::string::String;
use alloc::vec::Vec;

use super::cv::{cv_select_lambda, CvCurve};
use super::matrix::{standardize, DesignMatrix};
use super::solver::{sigmoid, LassoFit, LassoSolver};
use super::GlmError;

/// A fitted model. Coefficients live in standardized-feature space; raw
/// inputs are standardized with the stored means and sds before scoring.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LassoModel {
    pub feature_names: Vec<String>,
    pub feature_means: Vec<f64>,
    pub feature_sds: Vec<f64>,
    pub std_coefficients: Vec<f64>,
    pub intercept: f64,
    pub lambda: f64,
    pub seed: u64,
    pub registry_fingerprint: String,
}

impl LassoModel {
    /// Fits at a fixed `lambda` on the standardized `matrix`.
    pub fn fit(
        matrix: &DesignMatrix,
        lambda: f64,
        seed: u64,
        registry_fingerprint: &str,
    ) -> Result<(Self, LassoFit), GlmError> {
        let z = standardize(matrix);
        let fit = LassoSolver::default().fit(&z, matrix.labels(), lambda)?;
        let model = Self {
            feature_names: matrix.feature_names().to_vec(),
            feature_means: z.means.clone(),
            feature_sds: z.sds.clone(),
            std_coefficients: fit.coefficients.clone(),
            intercept: fit.intercept,
            lambda,
            seed,
            registry_fingerprint: registry_fingerprint.into(),
        };
        Ok((model, fit))
    }

    pub fn n_features(&self) -> usize {
        self.feature_names.len()
    }

    fn check_len(&self, x: &[f64]) -> Result<(), GlmError> {
        if x.len() == self.n_features() {
            Ok(())
        } else {
            Err(GlmError::DimensionMismatch {
                expected: self.n_features(),
                found: x.len(),
            })
        }
    }

    /// `(x - mean) / sd` per feature, with zero for constant features.
    pub fn standardize_row(&self, x: &[f64]) -> Result<Vec<f64>, GlmError> {
        self.check_len(x)?;
        Ok(x.iter()
            .zip(self.feature_means.iter().zip(&self.feature_sds))
            .map(|(&v, (&m, &s))| if s > 0.0 { (v - m) / s } else { 0.0 })
            .collect())
    }

    /// Per-feature terms `β_j z_j` of the linear score.
    pub fn contributions(&self, x: &[f64]) -> Result<Vec<f64>, GlmError> {
        let z = self.standardize_row(x)?;
        Ok(z.iter().zip(&self.std_coefficients).map(|(z, b)| z * b).collect())
    }

    pub fn linear_score(&self, x: &[f64]) -> Result<f64, GlmError> {
        Ok(self.intercept + self.contributions(x)?.iter().sum::<f64>())
    }

    /// Probability of the positive class, kept strictly inside (0, 1).
    pub fn predict_proba(&self, x: &[f64]) -> Result<f64, GlmError> {
        let p = sigmoid(self.linear_score(x)?);
        Ok(p.clamp(f64::MIN_POSITIVE, 1.0 - f64::EPSILON / 2.0))
    }

    /// Indices of non-zero coefficients.
    pub fn support(&self) -> Vec<usize> {
        self.std_coefficients
            .iter()
            .enumerate()
            .filter(|(_, &b)| b != 0.0)
            .map(|(j, _)| j)
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrainOptions {
    pub folds: usize,
    pub seed: u64,
    /// Skip cross-validation and fit at this penalty.
    pub lambda: Option<f64>,
}

impl Default for TrainOptions {
    fn default() -> Self {
        Self {
            folds: 10,
            seed: 42,
            lambda: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainedModel {
    pub model: LassoModel,
    pub fit: LassoFit,
    pub cv: Option<CvCurve>,
}

/// Selects λ by k-fold cross-validation (unless overridden) and refits on the
/// whole matrix.
pub fn train_model(
    matrix: &DesignMatrix,
    options: &TrainOptions,
    registry_fingerprint: &str,
) -> Result<TrainedModel, GlmError> {
    let (lambda, cv) = match options.lambda {
        Some(l) => (l, None),
        None => {
            let curve = cv_select_lambda(matrix, options.folds, options.seed)?;
            (curve.lambda(), Some(curve))
        }
    };
    let (model, fit) = LassoModel::fit(matrix, lambda, options.seed, registry_fingerprint)?;
    Ok(TrainedModel { model, fit, cv })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn model(intercept: f64, coefs: Vec<f64>) -> LassoModel {
        let p = coefs.len();
        LassoModel {
            feature_names: (0..p).map(|j| alloc::format!("f{j}")).collect(),
            feature_means: vec![0.0; p],
            feature_sds: vec![1.0; p],
            std_coefficients: coefs,
            intercept,
            lambda: 0.0,
            seed: 0,
            registry_fingerprint: String::new(),
        }
    }

    #[test]
    fn zero_model_predicts_half() {
        assert_eq!(model(0.0, vec![0.0, 0.0]).predict_proba(&[3.0, -1.0]).unwrap(), 0.5);
    }

    #[test]
    fn intercept_only_closed_form() {
        let p = model(libm::log(3.0), vec![0.0]).predict_proba(&[10.0]).unwrap();
        assert!((p - 0.75).abs() < 1e-15);
    }

    #[test]
    fn positive_coefficient_is_monotone() {
        let m = model(-0.3, vec![0.8, -0.2]);
        let mut last = 0.0;
        for k in 0..20 {
            let p = m.predict_proba(&[k as f64 * 0.5, 1.0]).unwrap();
            assert!(p > last);
            last = p;
        }
    }

    #[test]
    fn constant_features_standardize_to_zero() {
        let mut m = model(0.0, vec![5.0]);
        m.feature_sds = vec![0.0];
        assert_eq!(m.standardize_row(&[7.0]).unwrap(), vec![0.0]);
        assert_eq!(m.predict_proba(&[7.0]).unwrap(), 0.5);
    }

    #[test]
    fn dimension_mismatch() {
        assert_eq!(
            model(0.0, vec![1.0, 2.0]).predict_proba(&[1.0]),
            Err(GlmError::DimensionMismatch { expected: 2, found: 1 })
        );
    }

    #[test]
    fn probabilities_stay_inside_unit_interval() {
        let m = model(0.0, vec![1.0]);
        for x in [-1e4, -50.0, 0.0, 50.0, 1e4] {
            let p = m.predict_proba(&[x]).unwrap();
            assert!(p > 0.0 && p < 1.0);
        }
    }
}
