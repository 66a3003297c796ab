//! L1-penalized logistic regression by coordinate descent.
//!
//! Minimizes
//!
//! ```text
//! (1/n) Σ_i [log(1 + exp(η_i)) - y_i η_i] + λ Σ_j |β_j|,   η = β_0 + Zβ
//! ```
//!
//! with an unpenalized intercept. Each outer iteration builds the quadratic
//! (IRLS) approximation of the loss at the current point, minimizes it plus
//! the L1 term by cyclic coordinate descent with soft-thresholding, and then
//! backtracks along the resulting direction until the true objective
//! decreases sufficiently.

use alloc::vec;
use alloc::vec::Vec;

use super::GlmError;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    /// Convergence threshold on the largest coefficient change of an outer
    /// iteration.
    pub tol: f64,
    /// Cap on coordinate sweeps across the whole fit.
    pub max_sweeps: usize,
    /// Cap on quadratic-approximation (outer) iterations.
    pub max_outer: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            tol: 1e-7,
            max_sweeps: 10_000,
            max_outer: 200,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LassoFit {
    pub intercept: f64,
    pub coefficients: Vec<f64>,
    pub lambda: f64,
    pub converged: bool,
    pub sweeps: usize,
    /// Largest violation of the optimality conditions at the returned point:
    /// `|g_j + λ sign(β_j)|` for non-zero `β_j`, `max(0, |g_j| - λ)` for zero
    /// ones, and `|g_0|` for the intercept, where `g` is the gradient of the
    /// mean logistic loss.
    pub kkt_violation: f64,
}

impl LassoFit {
    pub fn nonzero(&self) -> usize {
        self.coefficients.iter().filter(|&&b| b != 0.0).count()
    }
}

/// Numerically stable `log(1 + exp(x))`.
pub(crate) fn softplus(x: f64) -> f64 {
    if x > 0.0 {
        x + libm::log1p(libm::exp(-x))
    } else {
        libm::log1p(libm::exp(x))
    }
}

pub(crate) fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + libm::exp(-x))
    } else {
        let e = libm::exp(x);
        e / (1.0 + e)
    }
}

/// Dot product with four running sums; the summation order is fixed, so
/// results are reproducible.
fn dot(a: &[f64], b: &[f64]) -> f64 {
    let mut acc = [0.0; 4];
    let (ac, bc) = (a.chunks_exact(4), b.chunks_exact(4));
    let tail: f64 = ac.remainder().iter().zip(bc.remainder()).map(|(x, y)| x * y).sum();
    for (x, y) in ac.zip(bc) {
        for k in 0..4 {
            acc[k] += x[k] * y[k];
        }
    }
    (acc[0] + acc[1]) + (acc[2] + acc[3]) + tail
}

fn soft_threshold(x: f64, t: f64) -> f64 {
    if x > t {
        x - t
    } else if x < -t {
        x + t
    } else {
        0.0
    }
}

/// Mean logistic loss for linear predictor `eta`.
pub fn logistic_loss(eta: &[f64], y: &[f64]) -> f64 {
    let n = eta.len() as f64;
    eta.iter().zip(y).map(|(&e, &y)| softplus(e) - y * e).sum::<f64>() / n
}

/// Gradient of the mean logistic loss: `(g_0, g_1..g_p)`.
pub fn logistic_gradient(n: usize, columns: &[f64], y: &[f64], intercept: f64, beta: &[f64]) -> (f64, Vec<f64>) {
    let eta = linear_predictor(n, columns, intercept, beta);
    let resid: Vec<f64> = eta.iter().zip(y).map(|(&e, &y)| sigmoid(e) - y).collect();
    let nf = n as f64;
    let g0 = resid.iter().sum::<f64>() / nf;
    let g = (0..beta.len())
        .map(|j| {
            let col = &columns[j * n..(j + 1) * n];
            col.iter().zip(&resid).map(|(x, r)| x * r).sum::<f64>() / nf
        })
        .collect();
    (g0, g)
}

pub(crate) fn linear_predictor(n: usize, columns: &[f64], intercept: f64, beta: &[f64]) -> Vec<f64> {
    let mut eta = vec![intercept; n];
    for (j, &b) in beta.iter().enumerate() {
        if b != 0.0 {
            for (e, x) in eta.iter_mut().zip(&columns[j * n..(j + 1) * n]) {
                *e += b * x;
            }
        }
    }
    eta
}

/// Log-odds of the label mean; the intercept of the all-zero model.
pub fn null_intercept(y: &[f64]) -> f64 {
    let mean = y.iter().sum::<f64>() / y.len() as f64;
    libm::log(mean / (1.0 - mean))
}

/// Smallest λ at which every slope is zero: `max_j |(1/n) Σ_i z_ij (y_i - ȳ)|`.
pub fn lambda_max(n: usize, columns: &[f64], y: &[f64]) -> f64 {
    let ybar = y.iter().sum::<f64>() / n as f64;
    let p = columns.len().checked_div(n).unwrap_or(0);
    (0..p)
        .map(|j| {
            let col = &columns[j * n..(j + 1) * n];
            libm::fabs(col.iter().zip(y).map(|(x, y)| x * (y - ybar)).sum::<f64>() / n as f64)
        })
        .fold(0.0, f64::max)
}

fn objective(eta: &[f64], y: &[f64], beta: &[f64], lambda: f64) -> f64 {
    logistic_loss(eta, y) + lambda * beta.iter().map(|b| libm::fabs(*b)).sum::<f64>()
}

fn kkt_violation(n: usize, columns: &[f64], y: &[f64], intercept: f64, beta: &[f64], lambda: f64) -> f64 {
    let (g0, g) = logistic_gradient(n, columns, y, intercept, beta);
    g.iter()
        .zip(beta)
        .map(|(&gj, &bj)| {
            if bj != 0.0 {
                libm::fabs(gj + lambda * bj.signum())
            } else {
                (libm::fabs(gj) - lambda).max(0.0)
            }
        })
        .fold(libm::fabs(g0), f64::max)
}

/// Column-major view of an `n × p` design.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Columns<'a> {
    pub n: usize,
    pub p: usize,
    pub data: &'a [f64],
}

impl Columns<'_> {
    fn column(&self, j: usize) -> &[f64] {
        &self.data[j * self.n..(j + 1) * self.n]
    }
}

/// Core fitting routine; `warm` seeds the intercept and slopes.
pub(crate) fn fit_columns(
    x: Columns<'_>,
    y: &[f64],
    lambda: f64,
    opts: &SolverOptions,
    warm: Option<(f64, &[f64])>,
) -> Result<LassoFit, GlmError> {
    let Columns { n, p, .. } = x;
    if lambda < 0.0 || !lambda.is_finite() {
        return Err(GlmError::InvalidLambda);
    }
    let nf = n as f64;
    // At or above lambda_max the null model is the exact solution; iterating
    // from a rounded intercept could leave ulp-sized slopes behind.
    if lambda >= lambda_max(n, x.data, y) {
        let b0 = null_intercept(y);
        let beta = vec![0.0; p];
        if !b0.is_finite() {
            return Err(GlmError::NumericalFailure);
        }
        let kkt = kkt_violation(n, x.data, y, b0, &beta, lambda);
        return Ok(LassoFit {
            intercept: b0,
            coefficients: beta,
            lambda,
            converged: true,
            sweeps: 0,
            kkt_violation: kkt,
        });
    }
    let (mut b0, mut beta) = match warm {
        Some((b0, b)) => (b0, b.to_vec()),
        None => (null_intercept(y), vec![0.0; p]),
    };
    // Zero columns (constant before standardization) never move.
    let active: Vec<usize> = (0..p).filter(|&j| x.column(j).iter().any(|&v| v != 0.0)).collect();
    for (j, b) in beta.iter_mut().enumerate() {
        if !active.contains(&j) {
            *b = 0.0;
        }
    }

    let mut eta = linear_predictor(n, x.data, b0, &beta);
    let mut f_cur = objective(&eta, y, &beta, lambda);
    if !f_cur.is_finite() {
        return Err(GlmError::NumericalFailure);
    }

    let mut w = vec![0.0; n];
    let mut resid = vec![0.0; n];
    let mut v = vec![0.0; n];
    let mut d = vec![0.0; p];
    let mut diag = vec![0.0; p];
    let mut grad = vec![0.0; p];
    let mut wcol = vec![0.0; n];
    // Intercept column of the weighted Gram matrix, and its other columns,
    // each computed the first time its coordinate moves in an outer
    // iteration. `q = (1/n) Zᵀ W v` for the current direction `v = d_0 + Zd`.
    let mut h0 = vec![0.0; p];
    let mut gram: Vec<Option<Vec<f64>>> = vec![None; p];
    let mut q = vec![0.0; p];
    let mut sweeps = 0usize;
    let mut converged = false;

    for _outer in 0..opts.max_outer {
        for i in 0..n {
            let mu = sigmoid(eta[i]);
            w[i] = (mu * (1.0 - mu)).max(1e-10);
            resid[i] = mu - y[i];
        }
        let h00 = w.iter().sum::<f64>() / nf;
        let g0 = resid.iter().sum::<f64>() / nf;
        for &j in &active {
            let col = x.column(j);
            for ((wc, c), wi) in wcol.iter_mut().zip(col).zip(&w) {
                *wc = wi * c;
            }
            grad[j] = dot(col, &resid) / nf;
            diag[j] = dot(col, &wcol) / nf;
            h0[j] = wcol.iter().sum::<f64>() / nf;
        }
        gram.iter_mut().for_each(|c| *c = None);

        // Coordinate descent on the penalized quadratic model.
        let mut d0 = 0.0;
        let mut q0 = 0.0;
        d.iter_mut().for_each(|e| *e = 0.0);
        q.iter_mut().for_each(|e| *e = 0.0);
        let inner_tol = opts.tol * 1e-2;
        loop {
            let step0 = -(g0 + q0) / h00;
            d0 += step0;
            q0 += h00 * step0;
            for &k in &active {
                q[k] += h0[k] * step0;
            }
            let mut max_change = libm::fabs(step0);

            for &j in &active {
                let a = diag[j];
                let cur = beta[j] + d[j];
                let next = soft_threshold(a * cur - (grad[j] + q[j]), lambda) / a;
                let delta = next - cur;
                if delta != 0.0 {
                    d[j] += delta;
                    if gram[j].is_none() {
                        for ((wc, c), wi) in wcol.iter_mut().zip(x.column(j)).zip(&w) {
                            *wc = wi * c;
                        }
                        let mut c = vec![0.0; p];
                        for &k in &active {
                            // The matrix is symmetric: reuse a known entry.
                            c[k] = match &gram[k] {
                                Some(other) => other[j],
                                None => dot(&wcol, x.column(k)) / nf,
                            };
                        }
                        gram[j] = Some(c);
                    }
                    let col = gram[j].as_deref().expect("column filled above");
                    for &k in &active {
                        q[k] += col[k] * delta;
                    }
                    q0 += h0[j] * delta;
                    max_change = max_change.max(libm::fabs(delta));
                }
            }
            sweeps += 1;
            if max_change < inner_tol || sweeps >= opts.max_sweeps {
                break;
            }
        }
        v.iter_mut().for_each(|e| *e = d0);
        for &j in &active {
            if d[j] != 0.0 {
                for (e, c) in v.iter_mut().zip(x.column(j)) {
                    *e += d[j] * c;
                }
            }
        }

        // Backtracking on the true objective along (d0, d).
        let l1_now: f64 = beta.iter().map(|b| libm::fabs(*b)).sum();
        let l1_next: f64 = beta.iter().zip(&d).map(|(b, d)| libm::fabs(b + d)).sum();
        let descent = g0 * d0 + active.iter().map(|&j| grad[j] * d[j]).sum::<f64>() + lambda * (l1_next - l1_now);
        let mut t = 1.0;
        let mut accepted = None;
        let mut trial_eta = vec![0.0; n];
        let mut trial_beta = beta.clone();
        for _ in 0..50 {
            for i in 0..n {
                trial_eta[i] = eta[i] + t * v[i];
            }
            for &j in &active {
                trial_beta[j] = beta[j] + t * d[j];
            }
            let f_new = objective(&trial_eta, y, &trial_beta, lambda);
            if !f_new.is_finite() {
                return Err(GlmError::NumericalFailure);
            }
            if f_new <= f_cur + 1e-4 * t * descent.min(0.0) {
                accepted = Some(f_new);
                break;
            }
            t *= 0.5;
        }
        let Some(f_new) = accepted else {
            // No decrease possible along the direction: at the optimum up to
            // floating-point resolution.
            converged = true;
            break;
        };

        let max_step = active
            .iter()
            .map(|&j| libm::fabs(t * d[j]))
            .fold(libm::fabs(t * d0), f64::max);
        b0 += t * d0;
        beta.copy_from_slice(&trial_beta);
        core::mem::swap(&mut eta, &mut trial_eta);
        f_cur = f_new;

        if max_step < opts.tol {
            converged = true;
            break;
        }
        if sweeps >= opts.max_sweeps {
            break;
        }
    }

    if !b0.is_finite() || beta.iter().any(|b| !b.is_finite()) {
        return Err(GlmError::NumericalFailure);
    }
    let kkt = kkt_violation(n, x.data, y, b0, &beta, lambda);
    Ok(LassoFit {
        intercept: b0,
        coefficients: beta,
        lambda,
        converged,
        sweeps,
        kkt_violation: kkt,
    })
}

/// Fits the penalized model on standardized features `z` with 0/1 labels.
pub fn fit_lasso_logistic(z: &super::Standardized, labels: &[f64], lambda: f64) -> Result<LassoFit, GlmError> {
    LassoSolver::default().fit(z, labels, lambda)
}

/// Solver with explicit options and optional warm start.
#[derive(Debug, Clone, Copy, Default)]
pub struct LassoSolver {
    pub options: SolverOptions,
}

impl LassoSolver {
    pub fn fit(&self, z: &super::Standardized, labels: &[f64], lambda: f64) -> Result<LassoFit, GlmError> {
        self.fit_warm(z, labels, lambda, None)
    }

    pub fn fit_warm(
        &self,
        z: &super::Standardized,
        labels: &[f64],
        lambda: f64,
        warm: Option<&LassoFit>,
    ) -> Result<LassoFit, GlmError> {
        let n = z.n_rows();
        if labels.len() != n {
            return Err(GlmError::DimensionMismatch {
                expected: n,
                found: labels.len(),
            });
        }
        fit_columns(
            Columns {
                n,
                p: z.n_features(),
                data: z.data(),
            },
            labels,
            lambda,
            &self.options,
            warm.map(|f| (f.intercept, f.coefficients.as_slice())),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fit(n: usize, cols: &[f64], y: &[f64], lambda: f64) -> LassoFit {
        let p = cols.len() / n;
        fit_columns(Columns { n, p, data: cols }, y, lambda, &SolverOptions::default(), None).unwrap()
    }

    #[test]
    fn one_dimensional_closed_form() {
        // Symmetric two-point problem: β0 = 0 and stationarity gives
        // 1 - σ(β) = λ, so β = ln((1 - λ) / λ) = ln 9.
        let f = fit(2, &[1.0, -1.0], &[1.0, 0.0], 0.1);
        assert!(f.converged);
        assert!((f.coefficients[0] - libm::log(9.0)).abs() < 1e-6, "{f:?}");
        assert!(f.intercept.abs() < 1e-8);
        assert!(f.kkt_violation < 1e-6);
    }

    #[test]
    fn full_shrinkage_at_lambda_max() {
        let cols = [0.5, -1.2, 0.3, 1.7, -0.9, -0.4, 1.1, 0.2, -0.6, 0.8, 0.1, -1.3];
        let y = [1.0, 0.0, 1.0, 1.0, 0.0, 0.0];
        let lmax = lambda_max(6, &cols, &y);
        for scale in [1.0, 1.5, 10.0] {
            let f = fit(6, &cols, &y, lmax * scale);
            assert!(f.coefficients.iter().all(|&b| b == 0.0), "{f:?}");
            assert!((f.intercept - libm::log(1.0)).abs() < 1e-8);
        }
        let below = fit(6, &cols, &y, lmax * 0.9);
        assert!(below.nonzero() > 0);
    }

    #[test]
    fn zero_columns_stay_zero() {
        let f = fit(4, &[0.0; 8], &[1.0, 0.0, 1.0, 0.0], 0.0);
        assert_eq!(f.coefficients, vec![0.0, 0.0]);
        assert!(f.intercept.abs() < 1e-12);
        assert!(f.converged);
    }

    #[test]
    fn kkt_holds_across_penalties() {
        let mut state = 7u64;
        let mut next = || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (state >> 11) as f64 / (1u64 << 53) as f64
        };
        let n = 60;
        let p = 5;
        let cols: Vec<f64> = (0..n * p).map(|_| next() * 2.0 - 1.0).collect();
        let y: Vec<f64> = (0..n)
            .map(|i| {
                let eta = 2.0 * cols[i] - 1.5 * cols[n + i];
                if next() < sigmoid(eta) { 1.0 } else { 0.0 }
            })
            .collect();
        let lmax = lambda_max(n, &cols, &y);
        for frac in [0.9, 0.5, 0.1, 0.01, 0.0] {
            let f = fit(n, &cols, &y, lmax * frac);
            assert!(f.converged && f.kkt_violation < 1e-6, "frac {frac}: {f:?}");
        }
    }

    #[test]
    fn negative_lambda_rejected() {
        let r = fit_columns(
            Columns { n: 2, p: 1, data: &[1.0, -1.0] },
            &[1.0, 0.0],
            -1.0,
            &SolverOptions::default(),
            None,
        );
        assert_eq!(r, Err(GlmError::InvalidLambda));
    }
}
