//! Cross-validated classification metrics, per-family ablations and the
//! sentence-window experiment.

use alloc::vec::Vec;

use crate::corpus::{build_corpus_examples, Chunk, CorpusError};
use crate::features::{Family, FeatureRegistry};
use crate::glm::{
    apply_standardization, cv_select_lambda, fit_columns, fold_assignment, sigmoid, Columns, DesignMatrix, GlmError,
    RawColumns, SolverOptions, Standardized,
};
use crate::lexicon::LexiconBundle;
use crate::pipeline::{design_matrix, PipelineError};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EvalError {
    #[error(transparent)]
    Glm(#[from] GlmError),
    #[error(transparent)]
    Pipeline(#[from] PipelineError),
    #[error(transparent)]
    Corpus(#[from] CorpusError),
    #[error("registry has no features in family `{0}`")]
    EmptyFamily(&'static str),
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Confusion {
    pub tp: usize,
    pub fp: usize,
    pub fn_: usize,
    pub tn: usize,
}

impl Confusion {
    pub fn total(&self) -> usize {
        self.tp + self.fp + self.fn_ + self.tn
    }

    pub fn record(&mut self, predicted: bool, actual: bool) {
        match (predicted, actual) {
            (true, true) => self.tp += 1,
            (true, false) => self.fp += 1,
            (false, true) => self.fn_ += 1,
            (false, false) => self.tn += 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Metrics {
    pub precision: f64,
    pub recall: f64,
    pub accuracy: f64,
    pub f1: f64,
    pub confusion: Confusion,
}

fn safe_div(a: f64, b: f64) -> f64 {
    if b == 0.0 {
        0.0
    } else {
        a / b
    }
}

impl Metrics {
    /// Derives the scores from counts; every 0/0 ratio is 0.
    pub fn from_confusion(c: Confusion) -> Self {
        let (tp, fp, fn_, tn) = (c.tp as f64, c.fp as f64, c.fn_ as f64, c.tn as f64);
        let precision = safe_div(tp, tp + fp);
        let recall = safe_div(tp, tp + fn_);
        Self {
            precision,
            recall,
            accuracy: safe_div(tp + tn, tp + fp + fn_ + tn),
            f1: safe_div(2.0 * precision * recall, precision + recall),
            confusion: c,
        }
    }
}

/// Accuracy of always predicting the more frequent class.
pub fn majority_baseline(labels: &[f64]) -> f64 {
    if labels.is_empty() {
        return 0.0;
    }
    let pos = labels.iter().filter(|&&y| y > 0.5).count();
    pos.max(labels.len() - pos) as f64 / labels.len() as f64
}

/// How the penalty is chosen for the fold fits.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LambdaMode {
    /// Use this penalty for every fold.
    Fixed(f64),
    /// Select once by cross-validation on the whole matrix, then reuse it.
    SelectOnce,
    /// Select separately inside each training fold.
    Nested,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalOptions {
    pub folds: usize,
    pub seed: u64,
    pub lambda: LambdaMode,
    /// Probability at or above which an example is predicted positive.
    pub threshold: f64,
}

impl Default for EvalOptions {
    fn default() -> Self {
        Self {
            folds: 10,
            seed: 42,
            lambda: LambdaMode::SelectOnce,
            threshold: 0.5,
        }
    }
}

/// Seed for the nested penalty search inside `fold`.
fn nested_seed(seed: u64, fold: usize) -> u64 {
    seed.wrapping_add(0x9e37_79b9_7f4a_7c15u64.wrapping_mul(fold as u64 + 1))
}

/// Pooled k-fold metrics: every held-out prediction goes into one confusion
/// matrix. Folds whose training part lacks a class are skipped.
pub fn kfold_cv_metrics(matrix: &DesignMatrix, options: &EvalOptions) -> Result<Metrics, EvalError> {
    let n = matrix.n_rows();
    let k = options.folds;
    if k < 2 || n < k {
        return Err(GlmError::InvalidFolds { k, n }.into());
    }
    let shared_lambda = match options.lambda {
        LambdaMode::Fixed(l) => Some(l),
        LambdaMode::SelectOnce => Some(cv_select_lambda(matrix, k, options.seed)?.lambda()),
        LambdaMode::Nested => None,
    };
    let folds = fold_assignment(n, k, options.seed);
    let mut confusion = Confusion::default();
    for fold in 0..k {
        let train_rows: Vec<usize> = (0..n).filter(|&i| folds[i] != fold).collect();
        let test_rows: Vec<usize> = (0..n).filter(|&i| folds[i] == fold).collect();
        let train = RawColumns::from_rows(matrix, &train_rows);
        if !train.has_both_classes() {
            log::warn!("evaluation fold {fold}: training part has a single class; skipped");
            continue;
        }
        let lambda = match shared_lambda {
            Some(l) => l,
            None => {
                let sub = matrix.select_rows(&train_rows)?;
                let inner_k = k.min(sub.n_rows());
                cv_select_lambda(&sub, inner_k, nested_seed(options.seed, fold))?.lambda()
            }
        };
        let z = Standardized::from_raw(train.n, train.p, &train.columns);
        let fit = fit_columns(
            Columns {
                n: train.n,
                p: train.p,
                data: z.data(),
            },
            &train.labels,
            lambda,
            &SolverOptions::default(),
            None,
        )?;
        let test = RawColumns::from_rows(matrix, &test_rows);
        let zt = apply_standardization(&z.means, &z.sds, &test);
        for (i, &actual) in test.labels.iter().enumerate() {
            let eta = fit.intercept
                + fit
                    .coefficients
                    .iter()
                    .enumerate()
                    .map(|(j, b)| b * zt[j * test.n + i])
                    .sum::<f64>();
            confusion.record(sigmoid(eta) >= options.threshold, actual > 0.5);
        }
    }
    Ok(Metrics::from_confusion(confusion))
}

#[derive(Debug, Clone, PartialEq)]
pub struct Ablation {
    pub per_family: Vec<(Family, Metrics)>,
    pub overall: Metrics,
}

impl Ablation {
    pub fn family(&self, family: Family) -> Option<&Metrics> {
        self.per_family.iter().find(|(f, _)| *f == family).map(|(_, m)| m)
    }
}

/// Cross-validated metrics for each family's columns alone, plus all columns.
pub fn family_ablation(
    matrix: &DesignMatrix,
    registry: &FeatureRegistry,
    options: &EvalOptions,
) -> Result<Ablation, EvalError> {
    let mut per_family = Vec::with_capacity(Family::ALL.len());
    for family in Family::ALL {
        let cols = registry.family_indices(family);
        if cols.is_empty() {
            return Err(EvalError::EmptyFamily(family.as_str()));
        }
        per_family.push((family, kfold_cv_metrics(&matrix.select_columns(&cols), options)?));
    }
    let overall = kfold_cv_metrics(matrix, options)?;
    Ok(Ablation { per_family, overall })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WindowPoint {
    pub window_size: usize,
    /// `None` when no usable examples exist at this window size.
    pub accuracy: Option<f64>,
    pub examples: usize,
}

/// Accuracy as a function of the number of sentences before the applause:
/// for each `w` in `1..=max_window`, rebuild the examples with window `w`,
/// extract window features and run [`kfold_cv_metrics`].
pub fn window_experiment(
    chunks: &[Chunk],
    bundle: &LexiconBundle,
    registry: &FeatureRegistry,
    max_window: usize,
    options: &EvalOptions,
) -> Result<Vec<WindowPoint>, EvalError> {
    let mut curve = Vec::with_capacity(max_window);
    for w in 1..=max_window {
        let examples = build_corpus_examples(chunks, w, options.seed)?;
        let accuracy = match design_matrix(&examples, bundle, registry) {
            Ok(m) if m.n_rows() >= options.folds => Some(kfold_cv_metrics(&m, options)?.accuracy),
            Ok(_) | Err(PipelineError::Glm(GlmError::TooFewRows(_) | GlmError::SingleClass)) => {
                log::warn!("window {w}: not enough eligible chunks; point left empty");
                None
            }
            Err(e) => return Err(e.into()),
        };
        curve.push(WindowPoint {
            window_size: w,
            accuracy,
            examples: examples.len(),
        });
    }
    Ok(curve)
}

/// Everything the evaluation commands report.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    pub per_family: Vec<(Family, Metrics)>,
    pub overall: Metrics,
    pub baseline_accuracy: f64,
    pub window_curve: Vec<WindowPoint>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::String;
    use alloc::vec;

    #[test]
    fn metrics_from_counts() {
        let m = Metrics::from_confusion(Confusion { tp: 2, fp: 1, fn_: 1, tn: 2 });
        for v in [m.precision, m.recall, m.accuracy, m.f1] {
            assert!((v - 2.0 / 3.0).abs() < 1e-12);
        }
    }

    #[test]
    fn always_positive_on_balanced_data() {
        let mut c = Confusion::default();
        for i in 0..10 {
            c.record(true, i % 2 == 0);
        }
        let m = Metrics::from_confusion(c);
        assert_eq!(m.accuracy, 0.5);
        assert_eq!(m.recall, 1.0);
    }

    #[test]
    fn zero_over_zero_is_zero() {
        let m = Metrics::from_confusion(Confusion { tp: 0, fp: 0, fn_: 5, tn: 5 });
        assert_eq!((m.precision, m.recall, m.f1), (0.0, 0.0, 0.0));
        assert_eq!(m.accuracy, 0.5);
        let empty = Metrics::from_confusion(Confusion::default());
        assert_eq!(empty.accuracy, 0.0);
    }

    #[test]
    fn baseline() {
        assert_eq!(majority_baseline(&[1.0, 0.0, 1.0, 0.0]), 0.5);
        assert_eq!(majority_baseline(&[1.0, 1.0, 1.0, 0.0]), 0.75);
    }

    fn noisy_matrix(n: usize) -> DesignMatrix {
        let mut rows = Vec::new();
        let mut labels = Vec::new();
        let mut state = 12345u64;
        for i in 0..n {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            let noise = (state >> 33) as f64 / (1u64 << 31) as f64;
            let y = i % 2 == 0;
            rows.push(vec![if y { 1.0 } else { 0.0 } + 0.8 * noise, 3.0]);
            labels.push(y);
        }
        DesignMatrix::new(&rows, &labels, vec![String::from("signal"), String::from("constant")]).unwrap()
    }

    #[test]
    fn pooled_counts_cover_every_row() {
        let m = noisy_matrix(53);
        for mode in [LambdaMode::SelectOnce, LambdaMode::Nested, LambdaMode::Fixed(0.01)] {
            let opts = EvalOptions {
                lambda: mode,
                ..EvalOptions::default()
            };
            let metrics = kfold_cv_metrics(&m, &opts).unwrap();
            assert_eq!(metrics.confusion.total(), 53);
            assert!(metrics.accuracy > 0.8, "{mode:?}: {metrics:?}");
        }
    }

    #[test]
    fn constant_columns_give_chance_accuracy() {
        let m = noisy_matrix(200).select_columns(&[1]);
        let metrics = kfold_cv_metrics(&m, &EvalOptions::default()).unwrap();
        assert!((metrics.accuracy - 0.5).abs() <= 0.1, "{metrics:?}");
    }
}
