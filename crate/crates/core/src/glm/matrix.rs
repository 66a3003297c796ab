use alloc::string::String;
use alloc::vec::Vec;

use super::GlmError;

/// Feature rows with 0/1 labels, stored column-major.
#[derive(Debug, Clone, PartialEq)]
pub struct DesignMatrix {
    n: usize,
    p: usize,
    columns: Vec<f64>,
    labels: Vec<f64>,
    feature_names: Vec<String>,
}

impl DesignMatrix {
    /// Validates and packs `rows`. Requires at least two rows, both classes,
    /// equal row widths matching `feature_names`, and finite values.
    pub fn new(rows: &[Vec<f64>], labels: &[bool], feature_names: Vec<String>) -> Result<Self, GlmError> {
        let n = rows.len();
        let p = feature_names.len();
        if n != labels.len() {
            return Err(GlmError::DimensionMismatch {
                expected: n,
                found: labels.len(),
            });
        }
        if n < 2 {
            return Err(GlmError::TooFewRows(n));
        }
        if labels.iter().all(|&l| l) || labels.iter().all(|&l| !l) {
            return Err(GlmError::SingleClass);
        }
        let mut columns = alloc::vec![0.0; n * p];
        for (i, row) in rows.iter().enumerate() {
            if row.len() != p {
                return Err(GlmError::DimensionMismatch {
                    expected: p,
                    found: row.len(),
                });
            }
            for (j, &x) in row.iter().enumerate() {
                if !x.is_finite() {
                    return Err(GlmError::NonFinite);
                }
                columns[j * n + i] = x;
            }
        }
        Ok(Self {
            n,
            p,
            columns,
            labels: labels.iter().map(|&l| if l { 1.0 } else { 0.0 }).collect(),
            feature_names,
        })
    }

    pub fn n_rows(&self) -> usize {
        self.n
    }

    pub fn n_features(&self) -> usize {
        self.p
    }

    pub fn column(&self, j: usize) -> &[f64] {
        &self.columns[j * self.n..(j + 1) * self.n]
    }

    pub fn row(&self, i: usize) -> Vec<f64> {
        (0..self.p).map(|j| self.columns[j * self.n + i]).collect()
    }

    /// Labels as 0.0 / 1.0.
    pub fn labels(&self) -> &[f64] {
        &self.labels
    }

    pub fn feature_names(&self) -> &[String] {
        &self.feature_names
    }

    /// Keeps only the given columns, in the given order.
    pub fn select_columns(&self, cols: &[usize]) -> Self {
        let mut columns = Vec::with_capacity(self.n * cols.len());
        for &j in cols {
            columns.extend_from_slice(self.column(j));
        }
        Self {
            n: self.n,
            p: cols.len(),
            columns,
            labels: self.labels.clone(),
            feature_names: cols.iter().map(|&j| self.feature_names[j].clone()).collect(),
        }
    }

    /// Row subset; fails if the subset loses a class or has fewer than two rows.
    pub fn select_rows(&self, rows: &[usize]) -> Result<Self, GlmError> {
        let data = RawColumns::from_rows(self, rows);
        let labels: Vec<bool> = data.labels.iter().map(|&y| y > 0.5).collect();
        if rows.len() < 2 {
            return Err(GlmError::TooFewRows(rows.len()));
        }
        if labels.iter().all(|&l| l) || labels.iter().all(|&l| !l) {
            return Err(GlmError::SingleClass);
        }
        Ok(Self {
            n: data.n,
            p: data.p,
            columns: data.columns,
            labels: data.labels,
            feature_names: self.feature_names.clone(),
        })
    }

    pub(crate) fn raw(&self) -> RawColumns {
        RawColumns {
            n: self.n,
            p: self.p,
            columns: self.columns.clone(),
            labels: self.labels.clone(),
        }
    }
}

/// Unvalidated column-major data, used for fold subsets.
#[derive(Debug, Clone)]
pub(crate) struct RawColumns {
    pub n: usize,
    pub p: usize,
    pub columns: Vec<f64>,
    pub labels: Vec<f64>,
}

impl RawColumns {
    pub fn from_rows(m: &DesignMatrix, rows: &[usize]) -> Self {
        let n = rows.len();
        let mut columns = Vec::with_capacity(n * m.p);
        for j in 0..m.p {
            let col = m.column(j);
            columns.extend(rows.iter().map(|&i| col[i]));
        }
        Self {
            n,
            p: m.p,
            columns,
            labels: rows.iter().map(|&i| m.labels[i]).collect(),
        }
    }

    pub fn column(&self, j: usize) -> &[f64] {
        &self.columns[j * self.n..(j + 1) * self.n]
    }

    pub fn has_both_classes(&self) -> bool {
        let pos = self.labels.iter().filter(|&&y| y > 0.5).count();
        pos > 0 && pos < self.n
    }
}

/// Column-major matrix with zero-mean, unit-(population)-variance columns.
/// Constant columns become all zeros and record `sd = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct Standardized {
    n: usize,
    p: usize,
    columns: Vec<f64>,
    pub means: Vec<f64>,
    pub sds: Vec<f64>,
}

impl Standardized {
    pub fn n_rows(&self) -> usize {
        self.n
    }

    pub fn n_features(&self) -> usize {
        self.p
    }

    pub fn column(&self, j: usize) -> &[f64] {
        &self.columns[j * self.n..(j + 1) * self.n]
    }

    pub(crate) fn data(&self) -> &[f64] {
        &self.columns
    }

    pub(crate) fn from_raw(n: usize, p: usize, raw: &[f64]) -> Self {
        let mut columns = raw.to_vec();
        let mut means = Vec::with_capacity(p);
        let mut sds = Vec::with_capacity(p);
        for j in 0..p {
            let col = &mut columns[j * n..(j + 1) * n];
            let mean = col.iter().sum::<f64>() / n as f64;
            let var = col.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n as f64;
            let sd = libm::sqrt(var);
            // Columns whose spread is pure rounding noise count as constant.
            let sd = if sd <= 1e-12 * (1.0 + libm::fabs(mean)) { 0.0 } else { sd };
            for x in col.iter_mut() {
                *x = if sd > 0.0 { (*x - mean) / sd } else { 0.0 };
            }
            means.push(mean);
            sds.push(sd);
        }
        Self {
            n,
            p,
            columns,
            means,
            sds,
        }
    }

    /// Standardizes `raw` with these means and sds (e.g. a test fold with
    /// the training fold's parameters).
    pub(crate) fn apply_to(&self, raw: &RawColumns) -> Vec<f64> {
        apply_standardization(&self.means, &self.sds, raw)
    }
}

pub(crate) fn apply_standardization(means: &[f64], sds: &[f64], raw: &RawColumns) -> Vec<f64> {
    let mut out = Vec::with_capacity(raw.columns.len());
    for j in 0..raw.p {
        let (m, s) = (means[j], sds[j]);
        out.extend(raw.column(j).iter().map(|&x| if s > 0.0 { (x - m) / s } else { 0.0 }));
    }
    out
}

/// Standardizes every column of `matrix`.
pub fn standardize(matrix: &DesignMatrix) -> Standardized {
    Standardized::from_raw(matrix.n, matrix.p, &matrix.columns)
}
