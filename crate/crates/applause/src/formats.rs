//! On-disk formats. CSV floats use six decimals; JSON floats use the shortest
//! representation that round-trips.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use applause_core::corpus::LabeledExample;
use applause_core::eval::{Ablation, EvalReport, Metrics, WindowPoint};
use applause_core::features::{FeatureRegistry, FeatureVector};
use applause_core::glm::{FitDiagnostics, LassoModel};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

pub const MODEL_VERSION: u32 = 1;

/// Six-decimal rendering; negative zero prints as zero.
pub fn fmt6(x: f64) -> String {
    let s = format!("{x:.6}");
    if s == "-0.000000" {
        String::from("0.000000")
    } else {
        s
    }
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    Ok(BufWriter::new(File::create(path).with_context(|| format!("creating {}", path.display()))?))
}

fn csv_writer(path: &Path) -> Result<csv::Writer<BufWriter<File>>> {
    Ok(csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(create(path)?))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut w = create(path)?;
    serde_json::to_writer_pretty(&mut w, value)?;
    w.write_all(b"\n")?;
    w.flush()?;
    Ok(())
}

pub fn write_dataset(path: &Path, examples: &[LabeledExample]) -> Result<()> {
    let mut w = create(path)?;
    for e in examples {
        serde_json::to_writer(&mut w, e)?;
        w.write_all(b"\n")?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_dataset(path: &Path) -> Result<Vec<LabeledExample>> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| serde_json::from_str(l).with_context(|| format!("{}:{}", path.display(), i + 1)))
        .collect()
}

/// Registry columns followed by `talk_id` and `label`.
pub fn write_features(
    path: &Path,
    registry: &FeatureRegistry,
    examples: &[LabeledExample],
    vectors: &[FeatureVector],
) -> Result<()> {
    let mut w = csv_writer(path)?;
    let mut header = registry.names();
    header.extend(["talk_id".to_string(), "label".to_string()]);
    w.write_record(&header)?;
    for (e, v) in examples.iter().zip(vectors) {
        let mut row: Vec<String> = v.values.iter().map(|&x| fmt6(x)).collect();
        row.push(e.talk_id.clone());
        row.push(e.label.as_str().to_string());
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelFile {
    pub version: u32,
    #[serde(flatten)]
    pub model: LassoModel,
}

pub fn write_model(path: &Path, model: &LassoModel) -> Result<()> {
    write_json(
        path,
        &ModelFile {
            version: MODEL_VERSION,
            model: model.clone(),
        },
    )
}

/// A model file and the SHA-256 of its bytes.
pub struct LoadedModel {
    pub model: LassoModel,
    pub sha256: String,
}

pub fn read_model(path: &Path) -> Result<LoadedModel> {
    let bytes = std::fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    let file: ModelFile = serde_json::from_slice(&bytes).with_context(|| format!("parsing {}", path.display()))?;
    if file.version != MODEL_VERSION {
        bail!("{}: unsupported model version {}", path.display(), file.version);
    }
    let m = &file.model;
    let p = m.feature_names.len();
    if m.feature_means.len() != p || m.feature_sds.len() != p || m.std_coefficients.len() != p {
        bail!("{}: feature arrays have inconsistent lengths", path.display());
    }
    Ok(LoadedModel {
        model: file.model,
        sha256: hex::encode(Sha256::digest(&bytes)),
    })
}

/// One row per model feature: standardized coefficient, post-selection
/// p-value and q-value (blank when the feature was not selected), and
/// importance weight.
pub fn write_coefficients(path: &Path, model: &LassoModel, diagnostics: &FitDiagnostics) -> Result<()> {
    let lookup = |table: &[(String, f64)], name: &str| table.iter().find(|(n, _)| n == name).map(|(_, v)| *v);
    let mut w = csv_writer(path)?;
    w.write_record(["feature", "beta_standardized", "p_value", "q_value", "importance_weight"])?;
    for (name, beta) in model.feature_names.iter().zip(&model.std_coefficients) {
        let opt = |v: Option<f64>| v.map(fmt6).unwrap_or_default();
        w.write_record([
            name.clone(),
            fmt6(*beta),
            opt(lookup(&diagnostics.p_values, name)),
            opt(lookup(&diagnostics.q_values, name)),
            fmt6(lookup(&diagnostics.importance, name).unwrap_or(0.0)),
        ])?;
    }
    w.flush()?;
    Ok(())
}

fn metrics_row(label: &str, m: &Metrics, baseline: f64) -> Vec<String> {
    let c = m.confusion;
    vec![
        label.to_string(),
        fmt6(m.precision),
        fmt6(m.recall),
        fmt6(m.accuracy),
        fmt6(m.f1),
        c.tp.to_string(),
        c.fp.to_string(),
        c.fn_.to_string(),
        c.tn.to_string(),
        fmt6(baseline),
    ]
}

/// One row per family, then `overall`.
pub fn write_ablation(path: &Path, ablation: &Ablation, baseline: f64) -> Result<()> {
    let mut w = csv_writer(path)?;
    w.write_record([
        "family",
        "precision",
        "recall",
        "accuracy",
        "f1",
        "tp",
        "fp",
        "fn",
        "tn",
        "baseline_accuracy",
    ])?;
    for (family, m) in &ablation.per_family {
        w.write_record(metrics_row(family.as_str(), m, baseline))?;
    }
    w.write_record(metrics_row("overall", &ablation.overall, baseline))?;
    w.flush()?;
    Ok(())
}

/// One row per window size; accuracy is blank for windows without data.
pub fn write_window_curve(path: &Path, curve: &[WindowPoint]) -> Result<()> {
    let mut w = csv_writer(path)?;
    w.write_record(["window_size", "accuracy", "examples"])?;
    for p in curve {
        w.write_record([
            p.window_size.to_string(),
            p.accuracy.map(fmt6).unwrap_or_default(),
            p.examples.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Importance weights, heaviest first; equal weights keep model order.
pub fn sorted_importance(importance: &[(String, f64)]) -> Vec<(String, f64)> {
    let mut rows = importance.to_vec();
    rows.sort_by(|a, b| b.1.total_cmp(&a.1));
    rows
}

pub fn write_importance(path: &Path, importance: &[(String, f64)]) -> Result<()> {
    let mut w = csv_writer(path)?;
    w.write_record(["feature", "weight"])?;
    for (name, weight) in sorted_importance(importance) {
        w.write_record([name, fmt6(weight)])?;
    }
    w.flush()?;
    Ok(())
}

pub const COEFFICIENTS_CSV: &str = "coefficients.csv";
pub const ABLATION_CSV: &str = "ablation.csv";
pub const WINDOW_CSV: &str = "window_curve.csv";
pub const IMPORTANCE_CSV: &str = "importance.csv";

/// Writes the coefficient, ablation, window and importance reports.
pub fn emit_reports(
    report: &EvalReport,
    model: &LassoModel,
    diagnostics: &FitDiagnostics,
    out_dir: &Path,
) -> Result<Vec<PathBuf>> {
    let paths: Vec<PathBuf> = [COEFFICIENTS_CSV, ABLATION_CSV, WINDOW_CSV, IMPORTANCE_CSV]
        .iter()
        .map(|f| out_dir.join(f))
        .collect();
    write_coefficients(&paths[0], model, diagnostics)?;
    let ablation = Ablation {
        per_family: report.per_family.clone(),
        overall: report.overall,
    };
    write_ablation(&paths[1], &ablation, report.baseline_accuracy)?;
    write_window_curve(&paths[2], &report.window_curve)?;
    write_importance(&paths[3], &diagnostics.importance)?;
    Ok(paths)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn six_decimals() {
        assert_eq!(fmt6(1.0 / 3.0), "0.333333");
        assert_eq!(fmt6(-1e-9), "0.000000");
        assert_eq!(fmt6(2.0), "2.000000");
    }

    #[test]
    fn model_round_trip_is_exact() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("m.json");
        let model = LassoModel {
            feature_names: vec!["a".into(), "b".into()],
            feature_means: vec![0.1, 1.0 / 3.0],
            feature_sds: vec![0.0, std::f64::consts::PI],
            std_coefficients: vec![0.0, -1.234_567_890_123_456_7],
            intercept: 1e-17,
            lambda: 0.012_345,
            seed: u64::MAX,
            registry_fingerprint: "00ff".into(),
        };
        write_model(&path, &model).unwrap();
        let loaded = read_model(&path).unwrap();
        assert_eq!(loaded.model, model);
        assert_eq!(loaded.sha256.len(), 64);
        let x = [3.0, 2.5];
        assert_eq!(model.predict_proba(&x).unwrap(), loaded.model.predict_proba(&x).unwrap());
    }

    #[test]
    fn importance_order() {
        let rows = sorted_importance(&[("a".into(), 0.25), ("b".into(), 0.5), ("c".into(), 0.25)]);
        let names: Vec<&str> = rows.iter().map(|r| r.0.as_str()).collect();
        assert_eq!(names, ["b", "a", "c"]);
    }
}
