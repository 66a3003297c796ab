//! Post-fit statistics: Wald p-values on the selected support,
//! Benjamini-Hochberg q-values, relative importance and goodness of fit.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use super::matrix::{apply_standardization, DesignMatrix};
use super::model::LassoModel;
use super::solver::{fit_columns, sigmoid, Columns, SolverOptions};
use super::GlmError;

#[derive(Debug, Clone, PartialEq)]
pub struct Significance {
    /// Names of the non-zero-coefficient features, in model order.
    pub features: Vec<String>,
    pub p_values: Vec<f64>,
    /// The unpenalized refit did not converge or its information matrix was
    /// singular; p-values are then reported as 0.
    pub separation: bool,
}

/// Cholesky factorization of a symmetric positive-definite matrix (row-major,
/// `k × k`) and the diagonal of its inverse.
fn inverse_diagonal(a: &[f64], k: usize) -> Option<Vec<f64>> {
    let mut l = vec![0.0; k * k];
    for i in 0..k {
        for j in 0..=i {
            let s = a[i * k + j] - (0..j).map(|m| l[i * k + m] * l[j * k + m]).sum::<f64>();
            if i == j {
                if s <= 1e-12 * a[i * k + i].abs().max(1e-300) {
                    return None;
                }
                l[i * k + i] = libm::sqrt(s);
            } else {
                l[i * k + j] = s / l[j * k + j];
            }
        }
    }
    // diag(A^-1)_i = || L^-1 e_i ||^2
    let mut diag = vec![0.0; k];
    let mut col = vec![0.0; k];
    for i in 0..k {
        for r in 0..k {
            let rhs = if r == i { 1.0 } else { 0.0 };
            let s = rhs - (0..r).map(|m| l[r * k + m] * col[m]).sum::<f64>();
            col[r] = s / l[r * k + r];
        }
        // Rows above i of L^-1 e_i are zero; the column norm covers r >= i.
        diag[i] = col[i..].iter().map(|v| v * v).sum();
        col.iter_mut().for_each(|v| *v = 0.0);
    }
    Some(diag)
}

/// Two-sided normal tail probability of `|z|`.
fn two_sided_p(z: f64) -> f64 {
    libm::erfc(libm::fabs(z) / core::f64::consts::SQRT_2)
}

/// Wald p-values from an unpenalized logistic refit on the model's non-zero
/// features (standardized with the model's parameters).
pub fn significance(matrix: &DesignMatrix, model: &LassoModel) -> Result<Significance, GlmError> {
    let support = model.support();
    let features: Vec<String> = support.iter().map(|&j| model.feature_names[j].clone()).collect();
    if support.is_empty() {
        return Ok(Significance {
            features,
            p_values: Vec::new(),
            separation: false,
        });
    }
    if matrix.n_features() != model.n_features() {
        return Err(GlmError::DimensionMismatch {
            expected: model.n_features(),
            found: matrix.n_features(),
        });
    }
    let sub = matrix.select_columns(&support);
    let means: Vec<f64> = support.iter().map(|&j| model.feature_means[j]).collect();
    let sds: Vec<f64> = support.iter().map(|&j| model.feature_sds[j]).collect();
    let z = apply_standardization(&means, &sds, &sub.raw());
    let n = matrix.n_rows();
    let k = support.len();
    let y = matrix.labels();
    let opts = SolverOptions {
        max_outer: 100,
        ..SolverOptions::default()
    };
    let refit = fit_columns(Columns { n, p: k, data: &z }, y, 0.0, &opts, None)?;

    // Observed information of (intercept, β) with the unscaled likelihood.
    let dim = k + 1;
    let mut info = vec![0.0; dim * dim];
    let eta = super::solver::linear_predictor(n, &z, refit.intercept, &refit.coefficients);
    for i in 0..n {
        let mu = sigmoid(eta[i]);
        let w = mu * (1.0 - mu);
        let xi = |a: usize| if a == 0 { 1.0 } else { z[(a - 1) * n + i] };
        for a in 0..dim {
            let wa = w * xi(a);
            for b in 0..=a {
                info[a * dim + b] += wa * xi(b);
            }
        }
    }
    for a in 0..dim {
        for b in 0..a {
            info[b * dim + a] = info[a * dim + b];
        }
    }
    let inv_diag = if refit.converged { inverse_diagonal(&info, dim) } else { None };
    let Some(inv_diag) = inv_diag else {
        log::warn!("unpenalized refit separated or diverged; p-values reported as 0");
        return Ok(Significance {
            features,
            p_values: vec![0.0; k],
            separation: true,
        });
    };
    let p_values = refit
        .coefficients
        .iter()
        .zip(&inv_diag[1..])
        .map(|(&b, &v)| two_sided_p(b / libm::sqrt(v)))
        .collect();
    Ok(Significance {
        features,
        p_values,
        separation: false,
    })
}

/// Benjamini-Hochberg adjusted p-values, returned in input order:
/// `q_(i) = min_{j >= i} min(1, m p_(j) / j)` over ascending ranks.
pub fn fdr_adjust(p_values: &[f64]) -> Vec<f64> {
    let m = p_values.len();
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| p_values[a].total_cmp(&p_values[b]));
    let mut q = vec![0.0; m];
    let mut running = 1.0f64;
    for (rank, &i) in order.iter().enumerate().rev() {
        running = running.min(p_values[i] * m as f64 / (rank + 1) as f64).min(1.0);
        q[i] = running;
    }
    q
}

/// `|β_j| / Σ|β|` over the non-zero coefficients, in model order.
pub fn relative_importance(model: &LassoModel) -> Result<Vec<(String, f64)>, GlmError> {
    let total: f64 = model.std_coefficients.iter().map(|b| libm::fabs(*b)).sum();
    if total == 0.0 {
        return Err(GlmError::ImportanceUndefined);
    }
    Ok(model
        .support()
        .into_iter()
        .map(|j| (model.feature_names[j].clone(), libm::fabs(model.std_coefficients[j]) / total))
        .collect())
}

/// Pearson correlation; 0 when either side has zero variance.
pub fn pearson_correlation(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len().min(b.len()) as f64;
    if n == 0.0 {
        return 0.0;
    }
    let ma = a.iter().sum::<f64>() / n;
    let mb = b.iter().sum::<f64>() / n;
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        let (dx, dy) = (x - ma, y - mb);
        sab += dx * dy;
        saa += dx * dx;
        sbb += dy * dy;
    }
    if saa == 0.0 || sbb == 0.0 {
        return 0.0;
    }
    (sab / libm::sqrt(saa * sbb)).clamp(-1.0, 1.0)
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitDiagnostics {
    /// Squared correlation between predicted probabilities and labels.
    pub r_squared: f64,
    pub pred_true_correlation: f64,
    pub p_values: Vec<(String, f64)>,
    pub q_values: Vec<(String, f64)>,
    pub importance: Vec<(String, f64)>,
    pub separation: bool,
}

pub fn diagnostics(matrix: &DesignMatrix, model: &LassoModel) -> Result<FitDiagnostics, GlmError> {
    let preds = (0..matrix.n_rows())
        .map(|i| model.predict_proba(&matrix.row(i)))
        .collect::<Result<Vec<_>, _>>()?;
    let r = pearson_correlation(&preds, matrix.labels());
    let sig = significance(matrix, model)?;
    let q = fdr_adjust(&sig.p_values);
    let importance = match relative_importance(model) {
        Ok(w) => w,
        Err(GlmError::ImportanceUndefined) => Vec::new(),
        Err(e) => return Err(e),
    };
    Ok(FitDiagnostics {
        r_squared: r * r,
        pred_true_correlation: r,
        p_values: sig.features.iter().cloned().zip(sig.p_values.iter().copied()).collect(),
        q_values: sig.features.into_iter().zip(q).collect(),
        importance,
        separation: sig.separation,
    })
}
