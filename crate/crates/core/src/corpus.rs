//! Transcript parsing, applause-marker segmentation and labeled example
//! construction.

use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec::Vec;

use rand::Rng;

use crate::rng::seeded;
use crate::stable_hash;
pub use crate::text::{split_sentences, Sentence};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CorpusError {
    #[error("transcript `{0}` is empty")]
    EmptyTranscript(String),
    #[error("window size must be at least 1")]
    InvalidWindow,
}

/// A parsed talk. Stage directions are stripped from sentence text and each
/// applause marker is recorded as the index of the sentence it follows.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Transcript {
    pub talk_id: String,
    pub sentences: Vec<Sentence>,
    pub applause_positions: BTreeSet<usize>,
}

impl Transcript {
    /// True when the last sentence of the talk is followed by applause.
    pub fn has_terminal_applause(&self) -> bool {
        !self.sentences.is_empty() && self.applause_positions.contains(&(self.sentences.len() - 1))
    }

    /// Applause positions with the end-of-talk applause removed.
    pub fn inner_applause(&self) -> impl Iterator<Item = usize> + '_ {
        let last = self.sentences.len().checked_sub(1);
        self.applause_positions
            .iter()
            .copied()
            .filter(move |&p| Some(p) != last)
    }
}

/// A run of consecutive sentences of one talk, ending at an applause incidence
/// or at the end of the talk.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Chunk {
    pub talk_id: String,
    pub sentences: Vec<Sentence>,
    pub terminated_by_applause: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Label {
    #[cfg_attr(feature = "serde", serde(rename = "pos"))]
    Positive,
    #[cfg_attr(feature = "serde", serde(rename = "neg"))]
    Negative,
}

impl Label {
    pub fn is_positive(self) -> bool {
        self == Label::Positive
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Label::Positive => "pos",
            Label::Negative => "neg",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LabeledExample {
    pub talk_id: String,
    pub window_size: usize,
    pub label: Label,
    pub sentences: Vec<String>,
}

impl LabeledExample {
    /// Re-derives tokenized sentences from the stored texts.
    pub fn to_sentences(&self) -> Vec<Sentence> {
        self.sentences
            .iter()
            .enumerate()
            .map(|(i, t)| Sentence::new(t, i))
            .collect()
    }
}

enum Marker {
    Applause,
    StageDirection,
}

/// Classifies the parenthesized group whose inner text is `inner`.
fn classify_marker(inner: &str) -> Option<Marker> {
    let inner = inner.trim();
    if inner.eq_ignore_ascii_case("applause") {
        return Some(Marker::Applause);
    }
    // Stage directions are short capitalized phrases: "(Laughter)",
    // "(Music ends)". Ordinary parenthetical speech is left alone.
    let words = inner.split_whitespace().count();
    let starts_upper = inner.chars().next().is_some_and(char::is_uppercase);
    let plain = inner
        .chars()
        .all(|c| c.is_alphabetic() || c.is_whitespace() || c == '-');
    (starts_upper && plain && (1..=4).contains(&words)).then_some(Marker::StageDirection)
}

/// Splits raw text into text pieces separated by applause markers; other
/// stage directions are replaced by a space.
fn split_on_markers(raw: &str) -> Vec<String> {
    let mut pieces = Vec::new();
    let mut current = String::new();
    let mut rest = raw;
    while let Some(open) = rest.find('(') {
        let after = &rest[open + 1..];
        let close = after.find(')');
        let nested = after.find('(');
        let marker = match (close, nested) {
            (Some(c), n) if n.is_none_or(|n| n > c) => classify_marker(&after[..c]).map(|m| (m, c)),
            _ => None,
        };
        match marker {
            Some((kind, c)) => {
                current.push_str(&rest[..open]);
                match kind {
                    Marker::Applause => pieces.push(core::mem::take(&mut current)),
                    Marker::StageDirection => current.push(' '),
                }
                rest = &after[c + 1..];
            }
            None => {
                current.push_str(&rest[..=open]);
                rest = after;
            }
        }
    }
    current.push_str(rest);
    pieces.push(current);
    pieces
}

/// Parses one raw transcript.
///
/// Every `(Applause)` marker (case-insensitive, optional inner whitespace) is
/// removed and recorded as an applause position after the nearest preceding
/// sentence; markers before the first sentence are dropped. Consecutive
/// markers collapse into one position. Markers also act as hard sentence
/// boundaries.
pub fn parse_transcript(talk_id: &str, raw_text: &str) -> Result<Transcript, CorpusError> {
    if raw_text.trim().is_empty() {
        return Err(CorpusError::EmptyTranscript(String::from(talk_id)));
    }
    let pieces = split_on_markers(raw_text);
    let last_piece = pieces.len() - 1;
    let mut sentences = Vec::new();
    let mut applause_positions = BTreeSet::new();
    for (i, piece) in pieces.iter().enumerate() {
        for s in split_sentences(piece) {
            let idx = sentences.len();
            sentences.push(Sentence {
                index_in_talk: idx,
                ..s
            });
        }
        if i < last_piece {
            match sentences.len().checked_sub(1) {
                Some(pos) => {
                    applause_positions.insert(pos);
                }
                None => log::warn!("{talk_id}: applause marker before the first sentence dropped"),
            }
        }
    }
    Ok(Transcript {
        talk_id: String::from(talk_id),
        sentences,
        applause_positions,
    })
}

/// Segments a talk into applause-terminated chunks plus an optional trailing
/// chunk. End-of-talk applause is deleted first, so a talk whose only applause
/// is terminal yields a single non-terminated chunk.
pub fn segment_into_chunks(transcript: &Transcript) -> Vec<Chunk> {
    let mut chunks = Vec::new();
    let mut start = 0;
    for pos in transcript.inner_applause() {
        chunks.push(Chunk {
            talk_id: transcript.talk_id.clone(),
            sentences: transcript.sentences[start..=pos].to_vec(),
            terminated_by_applause: true,
        });
        start = pos + 1;
    }
    if start < transcript.sentences.len() {
        chunks.push(Chunk {
            talk_id: transcript.talk_id.clone(),
            sentences: transcript.sentences[start..].to_vec(),
            terminated_by_applause: false,
        });
    }
    chunks
}

fn window_texts(sentences: &[Sentence]) -> Vec<String> {
    sentences.iter().map(|s| s.text.clone()).collect()
}

/// True when a chunk can supply disjoint positive and negative windows.
pub fn is_eligible(chunk: &Chunk, window_size: usize) -> bool {
    chunk.terminated_by_applause && chunk.sentences.len() >= 2 * window_size
}

/// Builds one positive and one negative example per eligible chunk.
///
/// The positive example is the final `window_size` sentences. The negative
/// window starts at an index drawn uniformly from the first half of the chunk,
/// restricted so the window ends before the positive window begins.
pub fn build_examples(
    chunks: &[Chunk],
    window_size: usize,
    rng_seed: u64,
) -> Result<Vec<LabeledExample>, CorpusError> {
    if window_size < 1 {
        return Err(CorpusError::InvalidWindow);
    }
    let mut rng = seeded(rng_seed);
    let mut out = Vec::new();
    for chunk in chunks.iter().filter(|c| is_eligible(c, window_size)) {
        let len = chunk.sentences.len();
        let positive_start = len - window_size;
        let last_start = (len / 2 - 1).min(positive_start - window_size);
        let negative_start = rng.random_range(0..=last_start);
        out.push(LabeledExample {
            talk_id: chunk.talk_id.clone(),
            window_size,
            label: Label::Positive,
            sentences: window_texts(&chunk.sentences[positive_start..]),
        });
        out.push(LabeledExample {
            talk_id: chunk.talk_id.clone(),
            window_size,
            label: Label::Negative,
            sentences: window_texts(&chunk.sentences[negative_start..negative_start + window_size]),
        });
    }
    Ok(out)
}

/// Seed used for one talk's chunks: the corpus seed mixed with a stable hash
/// of the talk id, so results do not depend on the order talks are processed.
pub fn talk_seed(seed: u64, talk_id: &str) -> u64 {
    seed ^ stable_hash(talk_id.as_bytes())
}

/// [`build_examples`] over a multi-talk chunk list, seeding each talk with
/// [`talk_seed`]. Chunks of the same talk must be contiguous.
pub fn build_corpus_examples(
    chunks: &[Chunk],
    window_size: usize,
    seed: u64,
) -> Result<Vec<LabeledExample>, CorpusError> {
    if window_size < 1 {
        return Err(CorpusError::InvalidWindow);
    }
    let mut out = Vec::new();
    for talk in chunks.chunk_by(|a, b| a.talk_id == b.talk_id) {
        out.extend(build_examples(talk, window_size, talk_seed(seed, &talk[0].talk_id))?);
    }
    Ok(out)
}

/// Counts reported alongside a built corpus.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CorpusStats {
    pub talks: usize,
    /// Talks with at least one applause-terminated chunk.
    pub talks_with_applause: usize,
    pub sentences: usize,
    /// Applause-terminated chunks, i.e. in-talk applause incidences.
    pub applause_chunks: usize,
    pub terminal_applause_deleted: usize,
    pub eligible_chunks: usize,
    pub positives: usize,
    pub negatives: usize,
}

impl CorpusStats {
    pub fn collect(
        transcripts: &[Transcript],
        chunks: &[Chunk],
        examples: &[LabeledExample],
        window_size: usize,
    ) -> Self {
        let talks_with_applause: BTreeSet<&str> = chunks
            .iter()
            .filter(|c| c.terminated_by_applause)
            .map(|c| c.talk_id.as_str())
            .collect();
        let positives = examples.iter().filter(|e| e.label.is_positive()).count();
        Self {
            talks: transcripts.len(),
            talks_with_applause: talks_with_applause.len(),
            sentences: transcripts.iter().map(|t| t.sentences.len()).sum(),
            applause_chunks: chunks.iter().filter(|c| c.terminated_by_applause).count(),
            terminal_applause_deleted: transcripts.iter().filter(|t| t.has_terminal_applause()).count(),
            eligible_chunks: chunks.iter().filter(|c| is_eligible(c, window_size)).count(),
            positives,
            negatives: examples.len() - positives,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::format;
    use alloc::vec;

    fn positions(t: &Transcript) -> Vec<usize> {
        t.applause_positions.iter().copied().collect()
    }

    fn numbered_talk(n: usize, applause_after: &[usize]) -> String {
        let mut s = String::new();
        for i in 0..n {
            s.push_str(&format!("Sentence number {i}. "));
            if applause_after.contains(&i) {
                s.push_str("(Applause) ");
            }
        }
        s
    }

    #[test]
    fn marker_after_first_sentence() {
        let t = parse_transcript("t", "Hello everyone. (Applause) Thanks for coming.").unwrap();
        assert_eq!(t.sentences.len(), 2);
        assert_eq!(positions(&t), vec![0]);
        assert_eq!(t.sentences[1].text, "Thanks for coming.");
    }

    #[test]
    fn no_markers() {
        let t = parse_transcript("t", "No markers here. Just talk.").unwrap();
        assert_eq!(t.sentences.len(), 2);
        assert!(t.applause_positions.is_empty());
    }

    #[test]
    fn terminal_marker_is_recorded_then_flagged() {
        let t = parse_transcript("t", "Great story. (Applause) So today... (Applause)").unwrap();
        assert_eq!(positions(&t), vec![0, 1]);
        assert!(t.has_terminal_applause());
        assert_eq!(t.inner_applause().collect::<Vec<_>>(), vec![0]);
    }

    #[test]
    fn empty_transcript_is_an_error() {
        assert_eq!(
            parse_transcript("x", "  \n"),
            Err(CorpusError::EmptyTranscript("x".into()))
        );
    }

    #[test]
    fn marker_variants_and_stage_directions() {
        let t = parse_transcript(
            "t",
            "(Applause) It was funny. (Laughter) Really funny. ( APPLAUSE ) (applause) Next (as I said) we go.",
        )
        .unwrap();
        let texts: Vec<_> = t.sentences.iter().map(|s| s.text.as_str()).collect();
        assert_eq!(texts, vec!["It was funny.", "Really funny.", "Next (as I said) we go."]);
        assert_eq!(positions(&t), vec![1]);
        for s in &t.sentences {
            assert!(!s.text.to_lowercase().contains("(applause)"));
            assert!(!s.text.contains("Laughter"));
        }
    }

    #[test]
    fn marker_mid_sentence_forces_a_boundary() {
        let t = parse_transcript("t", "We did it (Applause) and then we left.").unwrap();
        assert_eq!(t.sentences.len(), 2);
        assert_eq!(positions(&t), vec![0]);
    }

    #[test]
    fn chunks_follow_applause() {
        let t = parse_transcript("t", &numbered_talk(10, &[3, 7])).unwrap();
        let chunks = segment_into_chunks(&t);
        let shape: Vec<_> = chunks.iter().map(|c| (c.sentences.len(), c.terminated_by_applause)).collect();
        assert_eq!(shape, vec![(4, true), (4, true), (2, false)]);
    }

    #[test]
    fn terminal_applause_is_deleted() {
        let t = parse_transcript("t", &numbered_talk(5, &[4])).unwrap();
        let chunks = segment_into_chunks(&t);
        assert_eq!(chunks.len(), 1);
        assert_eq!(chunks[0].sentences.len(), 5);
        assert!(!chunks[0].terminated_by_applause);
    }

    #[test]
    fn no_applause_single_chunk() {
        let t = parse_transcript("t", &numbered_talk(3, &[])).unwrap();
        let chunks = segment_into_chunks(&t);
        assert_eq!(chunks.len(), 1);
        assert!(!chunks[0].terminated_by_applause);
    }

    fn chunk_of(len: usize) -> Chunk {
        Chunk {
            talk_id: "t".into(),
            sentences: (0..len).map(|i| Sentence::new(&format!("S{i}."), i)).collect(),
            terminated_by_applause: true,
        }
    }

    #[test]
    fn median_chunk_window_one() {
        let chunks = vec![chunk_of(24)];
        for seed in 0..50 {
            let ex = build_examples(&chunks, 1, seed).unwrap();
            assert_eq!(ex.len(), 2);
            assert_eq!(ex[0].label, Label::Positive);
            assert_eq!(ex[0].sentences, vec!["S23."]);
            let neg: usize = ex[1].sentences[0][1..ex[1].sentences[0].len() - 1].parse().unwrap();
            assert!(neg < 12, "negative drawn from sentence {}", neg + 1);
        }
    }

    #[test]
    fn negative_start_covers_first_half() {
        let chunks = vec![chunk_of(24); 400];
        let ex = build_examples(&chunks, 1, 3).unwrap();
        let starts: BTreeSet<String> = ex
            .iter()
            .filter(|e| !e.label.is_positive())
            .map(|e| e.sentences[0].clone())
            .collect();
        assert_eq!(starts.len(), 12);
    }

    #[test]
    fn windows_never_overlap() {
        for len in 2..30 {
            for w in 1..=len / 2 {
                let ex = build_examples(&[chunk_of(len)], w, len as u64 * 31 + w as u64).unwrap();
                assert_eq!(ex.len(), 2);
                let pos: BTreeSet<_> = ex[0].sentences.iter().collect();
                assert!(ex[1].sentences.iter().all(|s| !pos.contains(s)));
                assert_eq!(ex[1].sentences.len(), w);
            }
        }
    }

    #[test]
    fn short_and_open_chunks_are_skipped() {
        assert!(build_examples(&[chunk_of(1)], 1, 0).unwrap().is_empty());
        let mut open = chunk_of(10);
        open.terminated_by_applause = false;
        assert!(build_examples(&[open], 1, 0).unwrap().is_empty());
        assert!(build_examples(&[chunk_of(5)], 3, 0).unwrap().is_empty());
    }

    #[test]
    fn zero_window_is_rejected() {
        assert_eq!(build_examples(&[chunk_of(4)], 0, 0), Err(CorpusError::InvalidWindow));
        assert_eq!(build_corpus_examples(&[chunk_of(4)], 0, 0), Err(CorpusError::InvalidWindow));
    }

    #[test]
    fn corpus_scale_counts() {
        let chunks = vec![chunk_of(3); 3178];
        let ex = build_examples(&chunks, 1, 42).unwrap();
        assert_eq!(ex.len(), 6356);
    }

    #[test]
    fn corpus_build_is_order_independent_per_talk() {
        let mut a = chunk_of(20);
        a.talk_id = "a".into();
        let mut b = chunk_of(20);
        b.talk_id = "b".into();
        let ab = build_corpus_examples(&[a.clone(), b.clone()], 1, 9).unwrap();
        let ba = build_corpus_examples(&[b, a], 1, 9).unwrap();
        assert_eq!(ab[..2], ba[2..]);
        assert_eq!(ab[2..], ba[..2]);
    }
}
