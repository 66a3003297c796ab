use alloc::vec::Vec;

use super::matrix::{DesignMatrix, RawColumns, Standardized};
use super::solver::{fit_columns, lambda_max, softplus, Columns, LassoFit, SolverOptions};
use super::GlmError;

pub const GRID_POINTS: usize = 100;
pub const GRID_RATIO: f64 = 1e-3;

/// `points` log-spaced penalties from `lambda_max` down to
/// `lambda_max * ratio`, largest first. A zero `lambda_max` (no feature
/// varies) gives the single penalty 0.
pub fn lambda_grid(lambda_max: f64, points: usize, ratio: f64) -> Vec<f64> {
    if lambda_max <= 0.0 || points == 0 {
        return alloc::vec![0.0];
    }
    if points == 1 {
        return alloc::vec![lambda_max];
    }
    let log_hi = libm::log(lambda_max);
    let step = libm::log(ratio) / (points - 1) as f64;
    (0..points).map(|i| libm::exp(log_hi + step * i as f64)).collect()
}

/// Seeded shuffled k-fold assignment (unstratified): entry `i` is the fold of
/// row `i`.
pub fn fold_assignment(n: usize, k: usize, seed: u64) -> Vec<usize> {
    crate::rng::fold_assignment(n, k, seed)
}

/// Fits every penalty in `lambdas` (which should be decreasing), warm-starting
/// each fit from the previous one.
pub fn regularization_path(z: &Standardized, labels: &[f64], lambdas: &[f64]) -> Result<Vec<LassoFit>, GlmError> {
    path_columns(
        Columns {
            n: z.n_rows(),
            p: z.n_features(),
            data: z.data(),
        },
        labels,
        lambdas,
    )
}

fn path_columns(x: Columns<'_>, y: &[f64], lambdas: &[f64]) -> Result<Vec<LassoFit>, GlmError> {
    let opts = SolverOptions::default();
    let mut fits: Vec<LassoFit> = Vec::with_capacity(lambdas.len());
    for &lambda in lambdas {
        let warm = fits.last().map(|f| (f.intercept, f.coefficients.as_slice()));
        fits.push(fit_columns(x, y, lambda, &opts, warm)?);
    }
    Ok(fits)
}

/// Cross-validated deviance along the penalty grid.
#[derive(Debug, Clone, PartialEq)]
pub struct CvCurve {
    pub lambdas: Vec<f64>,
    /// Mean held-out binomial deviance per penalty, averaged over used folds.
    pub mean_deviance: Vec<f64>,
    pub folds_used: usize,
    pub best_index: usize,
}

impl CvCurve {
    pub fn lambda(&self) -> f64 {
        self.lambdas[self.best_index]
    }
}

fn mean_deviance(n: usize, test_cols: &[f64], y: &[f64], fit: &LassoFit) -> f64 {
    let eta = super::solver::linear_predictor(n, test_cols, fit.intercept, &fit.coefficients);
    2.0 * eta.iter().zip(y).map(|(&e, &y)| softplus(e) - y * e).sum::<f64>() / n as f64
}

/// Picks λ from a 100-point log grid (λ_max down to λ_max·1e-3) by minimal
/// mean held-out binomial deviance over `k` seeded folds. Each training fold
/// is standardized on its own rows and the held-out rows reuse those
/// parameters. Ties go to the larger λ. Folds whose training or held-out part
/// lacks a class are skipped.
pub fn cv_select_lambda(matrix: &DesignMatrix, k: usize, seed: u64) -> Result<CvCurve, GlmError> {
    let n = matrix.n_rows();
    if k < 2 || n < k {
        return Err(GlmError::InvalidFolds { k, n });
    }
    let full = super::standardize(matrix);
    let lmax = lambda_max(n, full.data(), matrix.labels());
    let lambdas = lambda_grid(lmax, GRID_POINTS, GRID_RATIO);
    let folds = fold_assignment(n, k, seed);

    let mut totals = alloc::vec![0.0; lambdas.len()];
    let mut used = 0usize;
    for fold in 0..k {
        let train_rows: Vec<usize> = (0..n).filter(|&i| folds[i] != fold).collect();
        let test_rows: Vec<usize> = (0..n).filter(|&i| folds[i] == fold).collect();
        let train = RawColumns::from_rows(matrix, &train_rows);
        let test = RawColumns::from_rows(matrix, &test_rows);
        if !train.has_both_classes() || !test.has_both_classes() {
            log::warn!("cross-validation fold {fold} is missing a class; skipped");
            continue;
        }
        let z = Standardized::from_raw(train.n, train.p, &train.columns);
        let test_cols = z.apply_to(&test);
        let fits = regularization_path(&z, &train.labels, &lambdas)?;
        for (total, fit) in totals.iter_mut().zip(&fits) {
            *total += mean_deviance(test.n, &test_cols, &test.labels, fit);
        }
        used += 1;
    }
    if used == 0 {
        return Err(GlmError::CvFailure);
    }
    let mean_deviance: Vec<f64> = totals.iter().map(|t| t / used as f64).collect();
    let mut best_index = 0;
    for (i, &d) in mean_deviance.iter().enumerate().skip(1) {
        let best = mean_deviance[best_index];
        if d < best - 1e-12 * (1.0 + libm::fabs(best)) {
            best_index = i;
        }
    }
    Ok(CvCurve {
        lambdas,
        mean_deviance,
        folds_used: used,
        best_index,
    })
}
