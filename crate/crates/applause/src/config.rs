//! Run configuration, read from a TOML file.
//!
//! Relative paths are resolved against the directory holding the config file.

use std::path::{Path, PathBuf};

use serde::Deserialize;

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("invalid config {path}: {source}")]
    Parse { path: PathBuf, source: toml::de::Error },
    #[error("missing resources:\n{}", list(.0))]
    MissingResources(Vec<PathBuf>),
    #[error("invalid config value: {0}")]
    Invalid(String),
}

fn list(paths: &[PathBuf]) -> String {
    paths.iter().map(|p| format!("  {}", p.display())).collect::<Vec<_>>().join("\n")
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    phonetic_dict: PathBuf,
    emotion_lexicon: PathBuf,
    category_lexicon: PathBuf,
    names: PathBuf,
    #[serde(default)]
    name_min_count: u64,
    corpus_dir: PathBuf,
    #[serde(default = "default_seed")]
    seed: u64,
    #[serde(default = "default_window")]
    window: usize,
    #[serde(default = "default_max_window")]
    max_window: usize,
    #[serde(default = "default_folds")]
    folds: usize,
    lambda: Option<f64>,
    #[serde(default)]
    nested: bool,
    #[serde(default = "default_out_dir")]
    out_dir: PathBuf,
    #[serde(default = "default_addr")]
    addr: String,
    cors_origin: Option<String>,
}

fn default_seed() -> u64 {
    42
}
fn default_window() -> usize {
    1
}
fn default_max_window() -> usize {
    6
}
fn default_folds() -> usize {
    10
}
fn default_out_dir() -> PathBuf {
    PathBuf::from("out")
}
fn default_addr() -> String {
    String::from("127.0.0.1:8080")
}

#[derive(Debug, Clone, PartialEq)]
pub struct Config {
    pub phonetic_dict: PathBuf,
    pub emotion_lexicon: PathBuf,
    pub category_lexicon: PathBuf,
    pub names: PathBuf,
    /// Entries of a `Name,Sex,Count` list below this count are skipped.
    pub name_min_count: u64,
    pub corpus_dir: PathBuf,
    pub seed: u64,
    pub window: usize,
    pub max_window: usize,
    pub folds: usize,
    /// Fixed penalty; cross-validation picks one when absent.
    pub lambda: Option<f64>,
    /// Select the penalty inside each evaluation fold.
    pub nested: bool,
    pub out_dir: PathBuf,
    pub addr: String,
    /// Allowed browser origin; any origin when absent.
    pub cors_origin: Option<String>,
}

impl Config {
    /// Parses and validates; every missing input path is reported at once.
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Read {
            path: path.to_path_buf(),
            source,
        })?;
        let base = path.parent().unwrap_or(Path::new("."));
        Self::from_toml(&text, base).map_err(|e| match e {
            ConfigError::Parse { source, .. } => ConfigError::Parse {
                path: path.to_path_buf(),
                source,
            },
            other => other,
        })
    }

    pub fn from_toml(text: &str, base: &Path) -> Result<Self, ConfigError> {
        let raw: RawConfig = toml::from_str(text).map_err(|source| ConfigError::Parse {
            path: PathBuf::new(),
            source,
        })?;
        let resolve = |p: PathBuf| if p.is_absolute() { p } else { base.join(p) };
        let config = Config {
            phonetic_dict: resolve(raw.phonetic_dict),
            emotion_lexicon: resolve(raw.emotion_lexicon),
            category_lexicon: resolve(raw.category_lexicon),
            names: resolve(raw.names),
            name_min_count: raw.name_min_count,
            corpus_dir: resolve(raw.corpus_dir),
            seed: raw.seed,
            window: raw.window,
            max_window: raw.max_window,
            folds: raw.folds,
            lambda: raw.lambda,
            nested: raw.nested,
            out_dir: resolve(raw.out_dir),
            addr: raw.addr,
            cors_origin: raw.cors_origin,
        };
        config.validate()?;
        Ok(config)
    }

    fn validate(&self) -> Result<(), ConfigError> {
        if self.window < 1 || self.max_window < 1 {
            return Err(ConfigError::Invalid("window sizes must be at least 1".into()));
        }
        if self.folds < 2 {
            return Err(ConfigError::Invalid("folds must be at least 2".into()));
        }
        if let Some(l) = self.lambda {
            if !(l.is_finite() && l >= 0.0) {
                return Err(ConfigError::Invalid(format!("lambda must be finite and non-negative, got {l}")));
            }
        }
        let missing: Vec<PathBuf> = [
            &self.phonetic_dict,
            &self.emotion_lexicon,
            &self.category_lexicon,
            &self.names,
            &self.corpus_dir,
        ]
        .into_iter()
        .filter(|p| !p.exists())
        .cloned()
        .collect();
        if missing.is_empty() {
            Ok(())
        } else {
            Err(ConfigError::MissingResources(missing))
        }
    }
}
