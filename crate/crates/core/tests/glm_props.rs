#[path = "support/grid_oracle.rs"]
mod grid_oracle;

use applause_core::glm::{
    fit_lasso_logistic, lambda_grid, lambda_max, logistic_gradient, logistic_loss, null_intercept,
    regularization_path, relative_importance, standardize, DesignMatrix, LassoModel, Standardized,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

/// Rows drawn from a logistic model with column-specific scales and offsets.
fn random_problem(seed: u64, n: usize, p: usize) -> DesignMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let scales: Vec<f64> = (0..p).map(|_| rng.random_range(0.2..4.0)).collect();
    let shifts: Vec<f64> = (0..p).map(|_| rng.random_range(-2.0..2.0)).collect();
    let beta: Vec<f64> = (0..p).map(|_| rng.random_range(-1.5..1.5)).collect();
    let mut rows = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);
    for _ in 0..n {
        let u: Vec<f64> = (0..p).map(|_| rng.random_range(-1.0..1.0)).collect();
        let eta = 0.2 + u.iter().zip(&beta).map(|(a, b)| a * b * 1.7).sum::<f64>();
        labels.push(rng.random_range(0.0..1.0) < sigmoid(eta));
        rows.push(u.iter().zip(scales.iter().zip(&shifts)).map(|(x, (s, m))| x * s + m).collect());
    }
    labels[0] = true;
    labels[1] = false;
    DesignMatrix::new(&rows, &labels, (0..p).map(|j| format!("x{j}")).collect()).unwrap()
}

fn flat(z: &Standardized) -> Vec<f64> {
    (0..z.n_features()).flat_map(|j| z.column(j).to_vec()).collect()
}

fn eta(n: usize, cols: &[f64], b0: f64, beta: &[f64]) -> Vec<f64> {
    (0..n).map(|i| b0 + beta.iter().enumerate().map(|(j, b)| b * cols[j * n + i]).sum::<f64>()).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn gradient_matches_central_differences(seed in any::<u64>(), n in 5usize..40, p in 1usize..6) {
        let m = random_problem(seed, n, p);
        let cols: Vec<f64> = (0..p).flat_map(|j| m.column(j).to_vec()).collect();
        let y = m.labels();
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 1);
        let b0 = rng.random_range(-1.0..1.0);
        let beta: Vec<f64> = (0..p).map(|_| rng.random_range(-1.0..1.0)).collect();
        let (g0, g) = logistic_gradient(n, &cols, y, b0, &beta);
        let h = 1e-5;
        let fd = |k: usize| {
            let (mut plus, mut minus) = ((b0, beta.clone()), (b0, beta.clone()));
            if k == 0 { plus.0 += h; minus.0 -= h; } else { plus.1[k - 1] += h; minus.1[k - 1] -= h; }
            (logistic_loss(&eta(n, &cols, plus.0, &plus.1), y) - logistic_loss(&eta(n, &cols, minus.0, &minus.1), y)) / (2.0 * h)
        };
        let analytic: Vec<f64> = std::iter::once(g0).chain(g).collect();
        let numeric: Vec<f64> = (0..=p).map(fd).collect();
        let diff = analytic.iter().zip(&numeric).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
        let norm = analytic.iter().map(|a| a * a).sum::<f64>().sqrt();
        prop_assert!(diff / norm.max(1e-8) < 1e-5, "diff {diff} norm {norm}");
    }

    #[test]
    fn kkt_holds_and_full_shrinkage_is_exact(seed in any::<u64>(), n in 10usize..80, p in 1usize..8) {
        let m = random_problem(seed, n, p);
        let z = standardize(&m);
        let y = m.labels();
        let lmax = lambda_max(n, &flat(&z), y);
        for frac in [2.0, 1.0, 0.7, 0.3, 0.1, 0.02] {
            let fit = fit_lasso_logistic(&z, y, lmax * frac).unwrap();
            prop_assert!(fit.converged);
            prop_assert!(fit.kkt_violation < 1e-6, "frac {frac}: {fit:?}");
            if frac >= 1.0 {
                prop_assert!(fit.coefficients.iter().all(|&b| b == 0.0));
                prop_assert!((fit.intercept - null_intercept(y)).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn rescaling_a_raw_column_changes_nothing(seed in any::<u64>(), c in 0.01f64..100.0, j in 0usize..3) {
        let m = random_problem(seed, 40, 3);
        let mut rows: Vec<Vec<f64>> = (0..40).map(|i| m.row(i)).collect();
        for r in rows.iter_mut() {
            r[j] *= c;
        }
        let labels: Vec<bool> = m.labels().iter().map(|&y| y > 0.5).collect();
        let scaled = DesignMatrix::new(&rows, &labels, m.feature_names().to_vec()).unwrap();
        let lambda = 0.3 * lambda_max(40, &flat(&standardize(&m)), m.labels());
        let (a, _) = LassoModel::fit(&m, lambda, 0, "").unwrap();
        let (b, _) = LassoModel::fit(&scaled, lambda, 0, "").unwrap();
        for (x, y) in a.std_coefficients.iter().zip(&b.std_coefficients) {
            prop_assert!((x - y).abs() < 1e-6);
        }
        for i in 0..40 {
            let pa = a.predict_proba(&m.row(i)).unwrap();
            let pb = b.predict_proba(&scaled.row(i)).unwrap();
            prop_assert!((pa - pb).abs() < 1e-6);
        }
        if let (Ok(wa), Ok(wb)) = (relative_importance(&a), relative_importance(&b)) {
            for (x, y) in wa.iter().zip(&wb) {
                prop_assert!((x.1 - y.1).abs() < 1e-6);
            }
        }
    }
}

#[test]
fn path_shrinks_monotonically() {
    for seed in 0..30 {
        let m = random_problem(1000 + seed, 120, 8);
        let z = standardize(&m);
        let y = m.labels();
        let grid = lambda_grid(lambda_max(120, &flat(&z), y), 100, 1e-3);
        let path = regularization_path(&z, y, &grid).unwrap();
        // Walk from the smallest penalty to the largest.
        for w in path.windows(2) {
            let (larger, smaller) = (&w[0], &w[1]);
            let l1 = |f: &applause_core::glm::LassoFit| f.coefficients.iter().map(|b| b.abs()).sum::<f64>();
            assert!(l1(larger) <= l1(smaller) + 1e-7, "seed {seed}");
            assert!(larger.nonzero() <= smaller.nonzero(), "seed {seed} at lambda {}", larger.lambda);
            assert!(larger.kkt_violation < 1e-6 && smaller.kkt_violation < 1e-6);
        }
    }
}

#[test]
fn constant_features_never_enter() {
    let rows: Vec<Vec<f64>> = (0..20).map(|i| vec![1.0, i as f64]).collect();
    let labels: Vec<bool> = (0..20).map(|i| i % 2 == 0).collect();
    let m = DesignMatrix::new(&rows, &labels, vec!["c".into(), "x".into()]).unwrap();
    let (model, fit) = LassoModel::fit(&m, 0.0, 0, "").unwrap();
    assert_eq!(model.std_coefficients[0], 0.0);
    assert_eq!(model.feature_sds[0], 0.0);
    assert!(fit.kkt_violation < 1e-6);
}

#[test]
fn matches_lattice_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for case in 0..12 {
        let p = 1 + case % 3;
        let n = rng.random_range(12..=40);
        let m = random_problem(rng.random(), n, p);
        let z = standardize(&m);
        let y = m.labels();
        let lambda = rng.random_range(0.05..0.9) * lambda_max(n, &flat(&z), y);
        let fit = fit_lasso_logistic(&z, y, lambda).unwrap();
        let cols: Vec<Vec<f64>> = (0..p).map(|j| z.column(j).to_vec()).collect();
        let (beta, b0) = grid_oracle::grid_minimize(&cols, y, lambda, 16.0, 1e-6);
        for (a, b) in fit.coefficients.iter().zip(&beta) {
            assert!((a - b).abs() < 1e-3, "case {case}: solver {:?} oracle {beta:?}", fit.coefficients);
        }
        assert!((fit.intercept - b0).abs() < 1e-3);
    }
}

#[test]
fn one_dimensional_scan() {
    // Scan the slope over [0, 10] at step 1e-4 with the intercept fixed at
    // its symmetric optimum of 0.
    let rows = vec![vec![1.0], vec![-1.0]];
    let m = DesignMatrix::new(&rows, &[true, false], vec!["x".into()]).unwrap();
    let z = standardize(&m);
    let objective = |b: f64| ((1.0 + (-b).exp()).ln() + (1.0 + (-b).exp()).ln()) / 2.0 + 0.1 * b.abs();
    let best = (0..=100_000).map(|k| k as f64 * 1e-4).min_by(|a, b| objective(*a).total_cmp(&objective(*b))).unwrap();
    let fit = fit_lasso_logistic(&z, m.labels(), 0.1).unwrap();
    assert!((fit.coefficients[0] - best).abs() < 1e-4);
}
