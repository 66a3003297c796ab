//! The pipeline commands. Each one reads the configured corpus and resources
//! and writes its outputs under the output directory; with a fixed seed the
//! outputs are byte-identical across runs.

use std::path::PathBuf;

use anyhow::{Context, Result};
use applause_core::corpus::{CorpusStats, LabeledExample};
use applause_core::eval::{family_ablation, majority_baseline, window_experiment, Ablation, EvalOptions, LambdaMode};
use applause_core::features::{Family, FeatureRegistry};
use applause_core::glm::{diagnostics, train_model, DesignMatrix, FitDiagnostics, TrainOptions, TrainedModel};
use applause_core::pipeline::{design_matrix, example_features};
use applause_core::score::{score_draft, ScoreResult};
use serde::Serialize;

use crate::data::{Corpus, Resources};
use crate::formats::{
    fmt6, write_ablation, write_coefficients, write_dataset, write_features, write_importance, write_json,
    write_model, write_window_curve, ABLATION_CSV, COEFFICIENTS_CSV, IMPORTANCE_CSV, WINDOW_CSV,
};
use crate::Config;

pub const DATASET_JSONL: &str = "dataset.jsonl";
pub const CORPUS_STATS_JSON: &str = "corpus_stats.json";
pub const FEATURES_CSV: &str = "features.csv";
pub const MODEL_JSON: &str = "model.json";
pub const DIAGNOSTICS_JSON: &str = "diagnostics.json";
pub const REFERENCE_CSV: &str = "reference_comparison.csv";

/// Published corpus and accuracy figures the outputs are compared against.
pub mod reference {
    pub const TALKS: usize = 904;
    pub const APPLAUSE_CHUNKS: usize = 3178;
    pub const EXAMPLES: usize = 6356;
    pub const OVERALL_ACCURACY: f64 = 0.719;
    pub const ACCURACY_TOLERANCE: f64 = 0.07;
    pub const GRATITUDE_PRECISION: f64 = 0.717;
}

/// A loaded configuration with its resources and corpus.
pub struct Session {
    pub config: Config,
    pub resources: Resources,
    pub corpus: Corpus,
}

impl Session {
    pub fn open(config: Config) -> Result<Self> {
        let resources = Resources::load(&config)?;
        let corpus = Corpus::load(&config.corpus_dir)?;
        Ok(Self {
            config,
            resources,
            corpus,
        })
    }

    fn out(&self, file: &str) -> PathBuf {
        self.config.out_dir.join(file)
    }

    pub fn registry(&self) -> &FeatureRegistry {
        &self.resources.registry
    }

    pub fn examples(&self) -> Result<Vec<LabeledExample>> {
        self.corpus.examples(self.config.window, self.config.seed)
    }

    pub fn matrix(&self) -> Result<(Vec<LabeledExample>, DesignMatrix)> {
        let examples = self.examples()?;
        let m = design_matrix(&examples, &self.resources.bundle, &self.resources.registry)
            .context("building the feature matrix")?;
        Ok((examples, m))
    }

    pub fn eval_options(&self) -> EvalOptions {
        EvalOptions {
            folds: self.config.folds,
            seed: self.config.seed,
            lambda: match (self.config.lambda, self.config.nested) {
                (Some(l), _) => LambdaMode::Fixed(l),
                (None, true) => LambdaMode::Nested,
                (None, false) => LambdaMode::SelectOnce,
            },
            threshold: 0.5,
        }
    }

    pub fn train_options(&self) -> TrainOptions {
        TrainOptions {
            folds: self.config.folds,
            seed: self.config.seed,
            lambda: self.config.lambda,
        }
    }
}

#[derive(Serialize)]
struct ReferenceCounts {
    talks: usize,
    applause_chunks: usize,
    examples: usize,
}

#[derive(Serialize)]
struct StatsReport {
    window: usize,
    seed: u64,
    stats: CorpusStats,
    examples: usize,
    reference: ReferenceCounts,
    difference: DifferenceCounts,
}

#[derive(Serialize)]
struct DifferenceCounts {
    talks: i64,
    applause_chunks: i64,
    examples: i64,
}

/// `dataset.jsonl` and `corpus_stats.json`.
pub fn ingest(s: &Session) -> Result<Vec<PathBuf>> {
    let examples = s.examples()?;
    let stats = s.corpus.stats(&examples, s.config.window);
    let (dataset, stats_path) = (s.out(DATASET_JSONL), s.out(CORPUS_STATS_JSON));
    write_dataset(&dataset, &examples)?;
    let diff = |a: usize, b: usize| a as i64 - b as i64;
    write_json(
        &stats_path,
        &StatsReport {
            window: s.config.window,
            seed: s.config.seed,
            stats,
            examples: examples.len(),
            reference: ReferenceCounts {
                talks: reference::TALKS,
                applause_chunks: reference::APPLAUSE_CHUNKS,
                examples: reference::EXAMPLES,
            },
            difference: DifferenceCounts {
                talks: diff(stats.talks, reference::TALKS),
                applause_chunks: diff(stats.applause_chunks, reference::APPLAUSE_CHUNKS),
                examples: diff(examples.len(), reference::EXAMPLES),
            },
        },
    )?;
    log::info!(
        "{} talks, {} applause chunks, {} examples (reference {} / {} / {})",
        stats.talks,
        stats.applause_chunks,
        examples.len(),
        reference::TALKS,
        reference::APPLAUSE_CHUNKS,
        reference::EXAMPLES
    );
    Ok(vec![dataset, stats_path])
}

/// `features.csv`.
pub fn features(s: &Session) -> Result<Vec<PathBuf>> {
    let examples = s.examples()?;
    let vectors = example_features(&examples, &s.resources.bundle, s.registry())?;
    let path = s.out(FEATURES_CSV);
    write_features(&path, s.registry(), &examples, &vectors)?;
    Ok(vec![path])
}

#[derive(Serialize)]
struct DiagnosticsReport {
    lambda: f64,
    lambda_from_cv: bool,
    cv_folds_used: Option<usize>,
    converged: bool,
    kkt_violation: f64,
    nonzero: usize,
    r_squared: f64,
    pred_true_correlation: f64,
    separation: bool,
}

pub struct Trained {
    pub trained: TrainedModel,
    pub diagnostics: FitDiagnostics,
}

pub fn fit(s: &Session) -> Result<Trained> {
    let (_, m) = s.matrix()?;
    let trained = train_model(&m, &s.train_options(), &s.registry().fingerprint()).context("training")?;
    let diagnostics = diagnostics(&m, &trained.model).context("fit diagnostics")?;
    Ok(Trained { trained, diagnostics })
}

/// `model.json`, `coefficients.csv` and `diagnostics.json`.
pub fn train(s: &Session) -> Result<Vec<PathBuf>> {
    let Trained { trained, diagnostics } = fit(s)?;
    let paths = [s.out(MODEL_JSON), s.out(COEFFICIENTS_CSV), s.out(DIAGNOSTICS_JSON)];
    write_model(&paths[0], &trained.model)?;
    write_coefficients(&paths[1], &trained.model, &diagnostics)?;
    write_json(
        &paths[2],
        &DiagnosticsReport {
            lambda: trained.model.lambda,
            lambda_from_cv: trained.cv.is_some(),
            cv_folds_used: trained.cv.as_ref().map(|c| c.folds_used),
            converged: trained.fit.converged,
            kkt_violation: trained.fit.kkt_violation,
            nonzero: trained.fit.nonzero(),
            r_squared: diagnostics.r_squared,
            pred_true_correlation: diagnostics.pred_true_correlation,
            separation: diagnostics.separation,
        },
    )?;
    Ok(paths.to_vec())
}

pub struct Evaluation {
    pub ablation: Ablation,
    pub baseline: f64,
}

pub fn evaluate(s: &Session) -> Result<Evaluation> {
    let (_, m) = s.matrix()?;
    let ablation = family_ablation(&m, s.registry(), &s.eval_options()).context("evaluation")?;
    Ok(Evaluation {
        ablation,
        baseline: majority_baseline(m.labels()),
    })
}

/// Family whose single-family model has the highest precision; the earliest
/// family wins ties.
pub fn top_precision_family(ablation: &Ablation) -> Option<Family> {
    ablation
        .per_family
        .iter()
        .fold(None, |best: Option<(Family, f64)>, (f, m)| match best {
            Some((_, p)) if p >= m.precision => best,
            _ => Some((*f, m.precision)),
        })
        .map(|(f, _)| f)
}

/// Comparison of an evaluation against the published figures.
pub fn reference_rows(e: &Evaluation) -> Vec<[String; 5]> {
    let overall = e.ablation.overall.accuracy;
    let within = (overall - reference::OVERALL_ACCURACY).abs() <= reference::ACCURACY_TOLERANCE;
    let gratitude = e.ablation.family(Family::Gratitude).map_or(0.0, |m| m.precision);
    let top = top_precision_family(&e.ablation);
    vec![
        [
            "overall_accuracy".into(),
            fmt6(overall),
            fmt6(reference::OVERALL_ACCURACY),
            fmt6(reference::ACCURACY_TOLERANCE),
            if within { "within" } else { "outside" }.into(),
        ],
        [
            "gratitude_precision".into(),
            fmt6(gratitude),
            fmt6(reference::GRATITUDE_PRECISION),
            String::new(),
            "report".into(),
        ],
        [
            "top_precision_family".into(),
            top.map_or("", |f| f.as_str()).into(),
            Family::Gratitude.as_str().into(),
            String::new(),
            if top == Some(Family::Gratitude) { "match" } else { "differs" }.into(),
        ],
    ]
}

/// `ablation.csv` and `reference_comparison.csv`.
pub fn eval(s: &Session) -> Result<Vec<PathBuf>> {
    let e = evaluate(s)?;
    let (ablation, comparison) = (s.out(ABLATION_CSV), s.out(REFERENCE_CSV));
    write_ablation(&ablation, &e.ablation, e.baseline)?;
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_path(&comparison)
        .with_context(|| format!("creating {}", comparison.display()))?;
    w.write_record(["metric", "observed", "reference", "tolerance", "status"])?;
    for row in reference_rows(&e) {
        log::info!("{}: observed {} reference {} ({})", row[0], row[1], row[2], row[4]);
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(vec![ablation, comparison])
}

/// `window_curve.csv` with one row per window size `1..=max_window`.
pub fn window(s: &Session) -> Result<Vec<PathBuf>> {
    let curve = window_experiment(
        &s.corpus.chunks,
        &s.resources.bundle,
        s.registry(),
        s.config.max_window,
        &s.eval_options(),
    )
    .context("window experiment")?;
    let path = s.out(WINDOW_CSV);
    write_window_curve(&path, &curve)?;
    Ok(vec![path])
}

/// `importance.csv`.
pub fn importance(s: &Session) -> Result<Vec<PathBuf>> {
    let Trained { diagnostics, .. } = fit(s)?;
    if diagnostics.importance.is_empty() {
        log::warn!("every coefficient is zero; importance weights are undefined");
    }
    let path = s.out(IMPORTANCE_CSV);
    write_importance(&path, &diagnostics.importance)?;
    Ok(vec![path])
}

pub fn score(model: &applause_core::glm::LassoModel, resources: &Resources, text: &str) -> Result<Vec<ScoreResult>> {
    Ok(score_draft(model, &resources.bundle, &resources.registry, text)?)
}
