//! Seeded generator of transcript corpora with a controlled gratitude signal.
//!
//! A talk is a run of applause-terminated chunks followed by a tail that ends
//! in end-of-talk applause. Sentences are random draws from a neutral
//! vocabulary; gratitude phrases are only ever placed by the signal rule, so
//! the relationship between labels and the gratitude feature is known.

use std::ops::RangeInclusive;
use std::path::Path;

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Words that match no gratitude or applause-seeking prefix and no name.
pub const NEUTRAL_WORDS: &[&str] = &[
    "the", "a", "and", "of", "to", "in", "we", "i", "you", "my", "our", "they", "it", "this", "that", "with", "for",
    "on", "at", "from", "about", "is", "was", "are", "were", "will", "can", "have", "had", "not", "all", "so", "but",
    "when", "what", "how", "people", "world", "time", "life", "story", "city", "river", "school", "water", "light",
    "house", "family", "children", "future", "idea", "book", "music", "science", "market", "energy", "planet",
    "ocean", "mountain", "machine", "problem", "answer", "dream", "hope", "fear", "love", "anger", "war", "peace",
    "money", "work", "year", "day", "night", "morning", "friend", "mother", "father", "teacher", "student",
    "doctor", "road", "car", "tree", "garden", "computer", "data", "brain", "body", "heart", "voice", "language",
    "country", "village", "street", "island", "forest", "bridge", "build", "walk", "see", "make", "take", "find",
    "learn", "grow", "start", "move", "think", "know", "feel", "remember", "imagine", "discover", "create", "share",
    "change", "leave", "bring", "carry", "write", "read", "sing", "speak", "listen", "watch", "big", "small", "new",
    "old", "good", "bad", "simple", "strange", "beautiful", "difficult", "important", "different", "young",
    "bright", "dark", "quiet", "happy", "sad", "angry", "afraid",
];

pub const GRATITUDE_PHRASES: &[&str] = &["thank you", "thanks so much", "we are grateful", "i appreciate you"];

pub const NAMES: &[&str] = &["Alex", "Daniel", "Maria", "Sarah", "James", "Emma", "David", "Laura"];

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Signal {
    /// The sentence before every in-talk applause has a gratitude phrase and
    /// no other sentence does.
    Planted,
    /// The sentence before every in-talk applause has a gratitude phrase with
    /// probability `final_rate`; every other sentence with `background_rate`.
    LastSentence { final_rate: f64, background_rate: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthOptions {
    pub talks: usize,
    pub chunks_per_talk: RangeInclusive<usize>,
    pub chunk_len: RangeInclusive<usize>,
    /// Sentences after the last in-talk applause.
    pub tail_len: RangeInclusive<usize>,
    pub words_per_sentence: RangeInclusive<usize>,
    /// Chance that a sentence mentions a name.
    pub name_rate: f64,
    /// Chance of a `(Laughter)` stage direction after a sentence.
    pub laughter_rate: f64,
    pub signal: Signal,
    pub seed: u64,
}

impl SynthOptions {
    /// The bundled 20-talk fixture corpus.
    pub fn fixture() -> Self {
        Self {
            talks: 20,
            chunks_per_talk: 3..=6,
            chunk_len: 4..=10,
            tail_len: 2..=5,
            words_per_sentence: 5..=12,
            name_rate: 0.05,
            laughter_rate: 0.05,
            signal: Signal::Planted,
            seed: 7,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SynthTalk {
    pub talk_id: String,
    pub text: String,
    /// In-talk applause markers, excluding the end-of-talk one.
    pub applause_chunks: usize,
}

fn sentence(rng: &mut ChaCha8Rng, opts: &SynthOptions, gratitude: bool) -> String {
    let len = rng.random_range(opts.words_per_sentence.clone());
    let mut words: Vec<String> = (0..len).map(|_| NEUTRAL_WORDS.choose(rng).unwrap().to_string()).collect();
    if rng.random_bool(opts.name_rate) {
        let at = rng.random_range(1..=words.len());
        words.insert(at, NAMES.choose(rng).unwrap().to_string());
    }
    if gratitude {
        let at = rng.random_range(1..=words.len());
        words.insert(at, GRATITUDE_PHRASES.choose(rng).unwrap().to_string());
    }
    let mut text = words.join(" ");
    if let Some(first) = text.get(..1) {
        text.replace_range(..1, &first.to_uppercase());
    }
    text.push('.');
    if rng.random_bool(opts.laughter_rate) {
        text.push_str(" (Laughter)");
    }
    text
}

fn gratitude_for(rng: &mut ChaCha8Rng, signal: Signal, before_applause: bool) -> bool {
    match (signal, before_applause) {
        (Signal::Planted, b) => b,
        (Signal::LastSentence { final_rate, .. }, true) => rng.random_bool(final_rate),
        (Signal::LastSentence { background_rate, .. }, false) => rng.random_bool(background_rate),
    }
}

pub fn generate(opts: &SynthOptions) -> Vec<SynthTalk> {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let width = opts.talks.saturating_sub(1).to_string().len().max(3);
    (0..opts.talks)
        .map(|t| {
            let chunks = rng.random_range(opts.chunks_per_talk.clone());
            let mut lines = Vec::with_capacity(chunks + 1);
            for _ in 0..chunks {
                let len = rng.random_range(opts.chunk_len.clone());
                let mut line: Vec<String> = (0..len)
                    .map(|i| {
                        let g = gratitude_for(&mut rng, opts.signal, i + 1 == len);
                        sentence(&mut rng, opts, g)
                    })
                    .collect();
                line.push("(Applause)".into());
                lines.push(line.join(" "));
            }
            let tail = rng.random_range(opts.tail_len.clone());
            let mut line: Vec<String> = (0..tail)
                .map(|_| {
                    let g = gratitude_for(&mut rng, opts.signal, false);
                    sentence(&mut rng, opts, g)
                })
                .collect();
            line.push("(Applause)".into());
            lines.push(line.join(" "));
            SynthTalk {
                talk_id: format!("talk{t:0width$}"),
                text: lines.join("\n") + "\n",
                applause_chunks: chunks,
            }
        })
        .collect()
}

/// Writes `<talk_id>.txt` per talk.
pub fn write_corpus(dir: &Path, talks: &[SynthTalk]) -> std::io::Result<()> {
    std::fs::create_dir_all(dir)?;
    for t in talks {
        std::fs::write(dir.join(format!("{}.txt", t.talk_id)), &t.text)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use applause_core::corpus::{parse_transcript, segment_into_chunks};
    use applause_core::lexicon::DEFAULT_GRATITUDE_PREFIXES;
    use applause_core::text::tokenize;

    fn has_gratitude(s: &str) -> bool {
        tokenize(s).iter().any(|w| DEFAULT_GRATITUDE_PREFIXES.iter().any(|p| w.starts_with(p)))
    }

    #[test]
    fn vocabulary_is_neutral() {
        for w in NEUTRAL_WORDS {
            assert!(!has_gratitude(w) && !w.starts_with("applau"), "{w}");
            assert!(!NAMES.iter().any(|n| n.eq_ignore_ascii_case(w)), "{w}");
        }
        assert!(GRATITUDE_PHRASES.iter().all(|p| has_gratitude(p)));
    }

    #[test]
    fn planted_signal_sits_before_applause_only() {
        let talks = generate(&SynthOptions::fixture());
        assert_eq!(talks.len(), 20);
        for talk in &talks {
            let t = parse_transcript(&talk.talk_id, &talk.text).unwrap();
            assert!(t.has_terminal_applause());
            let chunks = segment_into_chunks(&t);
            let terminated: Vec<_> = chunks.iter().filter(|c| c.terminated_by_applause).collect();
            assert_eq!(terminated.len(), talk.applause_chunks);
            for c in &chunks {
                for (i, s) in c.sentences.iter().enumerate() {
                    let last = i + 1 == c.sentences.len();
                    assert_eq!(has_gratitude(&s.text), last && c.terminated_by_applause, "{}", s.text);
                    assert!(!s.text.contains('('));
                }
            }
        }
    }

    #[test]
    fn same_seed_same_corpus() {
        let opts = SynthOptions::fixture();
        assert_eq!(generate(&opts), generate(&opts));
        let other = SynthOptions { seed: 8, ..opts.clone() };
        assert_ne!(generate(&opts), generate(&other));
    }
}
