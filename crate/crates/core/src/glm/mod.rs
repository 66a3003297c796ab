//! Lasso-penalized logistic regression on standardized features, with
//! cross-validated penalty selection and post-fit diagnostics.

mod cv;
mod inference;
mod matrix;
mod model;
mod solver;

pub use cv::{cv_select_lambda, fold_assignment, lambda_grid, regularization_path, CvCurve, GRID_POINTS, GRID_RATIO};
pub use inference::{
    diagnostics, fdr_adjust, pearson_correlation, relative_importance, significance, FitDiagnostics, Significance,
};
pub use matrix::{standardize, DesignMatrix, Standardized};
pub use model::{train_model, LassoModel, TrainOptions, TrainedModel};
pub use solver::{
    fit_lasso_logistic, lambda_max, logistic_gradient, logistic_loss, null_intercept, LassoFit, LassoSolver,
    SolverOptions,
};

pub(crate) use matrix::{apply_standardization, RawColumns};
pub(crate) use solver::{fit_columns, sigmoid, Columns};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GlmError {
    #[error("expected {expected} values, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("need at least 2 rows, found {0}")]
    TooFewRows(usize),
    #[error("labels contain a single class")]
    SingleClass,
    #[error("design matrix contains a non-finite value")]
    NonFinite,
    #[error("lambda must be finite and non-negative")]
    InvalidLambda,
    #[error("objective became non-finite during fitting")]
    NumericalFailure,
    #[error("need 2 <= k <= n folds (k = {k}, n = {n})")]
    InvalidFolds { k: usize, n: usize },
    #[error("every cross-validation fold was skipped")]
    CvFailure,
    #[error("relative importance is undefined when every coefficient is zero")]
    ImportanceUndefined,
}
