//! Brute-force minimizer of the L1-penalized mean logistic loss for a handful
//! of slopes. The intercept is profiled out exactly (one-dimensional Newton on
//! a strictly convex function); the slopes are found by a zooming lattice
//! search that re-centers on the best lattice point and halves the box.

fn softplus(x: f64) -> f64 {
    if x > 0.0 {
        x + (-x).exp().ln_1p()
    } else {
        x.exp().ln_1p()
    }
}

fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

/// Minimizing intercept for a fixed offset vector, warm-started at `b0`.
pub fn best_intercept(offset: &[f64], y: &[f64], mut b0: f64) -> f64 {
    let n = y.len() as f64;
    let ybar = y.iter().sum::<f64>() / n;
    for _ in 0..100 {
        let (mut g, mut h) = (0.0, 0.0);
        for o in offset {
            let mu = sigmoid(b0 + o);
            g += mu;
            h += mu * (1.0 - mu);
        }
        let step = ((g / n - ybar) / (h / n).max(1e-12)).clamp(-5.0, 5.0);
        b0 -= step;
        if step.abs() < 1e-13 {
            break;
        }
    }
    b0
}

/// Penalized objective at `beta` with the intercept profiled out; returns the
/// value and the intercept.
pub fn profiled_objective(columns: &[Vec<f64>], y: &[f64], beta: &[f64], lambda: f64, b0_hint: f64) -> (f64, f64) {
    let n = y.len();
    let offset: Vec<f64> = (0..n).map(|i| columns.iter().zip(beta).map(|(c, b)| c[i] * b).sum()).collect();
    let b0 = best_intercept(&offset, y, b0_hint);
    let loss = offset.iter().zip(y).map(|(o, y)| softplus(b0 + o) - y * (b0 + o)).sum::<f64>() / n as f64;
    (loss + lambda * beta.iter().map(|b| b.abs()).sum::<f64>(), b0)
}

/// Lattice search: `points` per axis (odd), starting box `[-half_width,
/// half_width]^p`, stopping once the lattice spacing drops below `resolution`.
pub fn grid_minimize(columns: &[Vec<f64>], y: &[f64], lambda: f64, half_width: f64, resolution: f64) -> (Vec<f64>, f64) {
    const POINTS: usize = 9;
    let p = columns.len();
    let mut center = vec![0.0; p];
    let mut b0 = 0.0;
    let mut h = half_width;
    loop {
        let step = 2.0 * h / (POINTS - 1) as f64;
        let mut best = (f64::INFINITY, center.clone(), b0);
        let combos = POINTS.pow(p as u32);
        let mut beta = vec![0.0; p];
        for idx in 0..combos {
            let mut rest = idx;
            for b in beta.iter_mut().zip(&center) {
                let k = rest % POINTS;
                rest /= POINTS;
                *b.0 = b.1 + (k as f64 - (POINTS / 2) as f64) * step;
            }
            let (f, b0_here) = profiled_objective(columns, y, &beta, lambda, b0);
            if f < best.0 {
                best = (f, beta.clone(), b0_here);
            }
        }
        center = best.1;
        b0 = best.2;
        if step < resolution {
            return (center, b0);
        }
        h = 2.0 * step;
    }
}
