//! Loading lexicon resources and transcript directories.

use std::path::Path;

use anyhow::{Context, Result};
use applause_core::corpus::{
    build_corpus_examples, parse_transcript, segment_into_chunks, Chunk, CorpusError, CorpusStats, LabeledExample,
    Transcript,
};
use applause_core::features::FeatureRegistry;
use applause_core::lexicon::{
    load_category_lexicon_file, load_emotion_lexicon, load_name_set, load_phonetic_dict, LexiconBundle,
};

use crate::Config;

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

pub struct Resources {
    pub bundle: LexiconBundle,
    pub registry: FeatureRegistry,
}

impl Resources {
    pub fn load(config: &Config) -> Result<Self> {
        let phonetic = load_phonetic_dict(read(&config.phonetic_dict)?.lines())
            .with_context(|| format!("loading {}", config.phonetic_dict.display()))?;
        let emotions = load_emotion_lexicon(read(&config.emotion_lexicon)?.lines())
            .with_context(|| format!("loading {}", config.emotion_lexicon.display()))?;
        let categories = load_category_lexicon_file(read(&config.category_lexicon)?.lines())
            .with_context(|| format!("loading {}", config.category_lexicon.display()))?;
        let names = load_name_set(read(&config.names)?.lines(), config.name_min_count)
            .with_context(|| format!("loading {}", config.names.display()))?;
        let bundle = LexiconBundle::new(phonetic, emotions, categories, names);
        let registry = FeatureRegistry::from_bundle(&bundle);
        Ok(Self { bundle, registry })
    }
}

pub struct Corpus {
    pub transcripts: Vec<Transcript>,
    pub chunks: Vec<Chunk>,
}

impl Corpus {
    /// Reads every `.txt` file of `dir` in file-name order; the file stem is
    /// the talk id. Empty transcripts are skipped with a warning.
    pub fn load(dir: &Path) -> Result<Self> {
        let mut paths: Vec<_> = std::fs::read_dir(dir)
            .with_context(|| format!("listing {}", dir.display()))?
            .map(|e| e.map(|e| e.path()))
            .collect::<std::io::Result<_>>()?;
        paths.retain(|p| p.is_file() && p.extension().is_some_and(|e| e == "txt"));
        paths.sort();
        let mut transcripts = Vec::with_capacity(paths.len());
        for path in &paths {
            let talk_id = path.file_stem().and_then(|s| s.to_str()).context("non UTF-8 file name")?;
            match parse_transcript(talk_id, &read(path)?) {
                Ok(t) => transcripts.push(t),
                Err(CorpusError::EmptyTranscript(id)) => log::warn!("transcript {id} is empty; skipped"),
                Err(e) => return Err(e).with_context(|| format!("parsing {}", path.display())),
            }
        }
        let chunks = transcripts.iter().flat_map(segment_into_chunks).collect();
        Ok(Self { transcripts, chunks })
    }

    pub fn examples(&self, window: usize, seed: u64) -> Result<Vec<LabeledExample>> {
        Ok(build_corpus_examples(&self.chunks, window, seed)?)
    }

    pub fn stats(&self, examples: &[LabeledExample], window: usize) -> CorpusStats {
        CorpusStats::collect(&self.transcripts, &self.chunks, examples, window)
    }
}
