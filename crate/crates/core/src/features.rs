//! Rhetorical-device features.
//!
//! A [`FeatureRegistry`] fixes the order and names of the features for a
//! given [`LexiconBundle`]; [`extract`] turns a window of sentences into a
//! [`FeatureVector`] aligned to it. Ratio features are counts normalized by a
//! word or phoneme total and binary features flag the presence of a device.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt::Write;

use crate::lexicon::{matches_any_prefix, Emotion, LexiconBundle, Phoneme, PhoneticDict};
use crate::stable_hash;
use crate::text::{cased_tokens, Sentence};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FeatureError {
    #[error("feature registry does not match the lexicon bundle")]
    RegistryMismatch,
    #[error("cannot extract features from an empty window")]
    EmptyWindow,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Family {
    LinguisticStyle,
    Emotion,
    Phonetic,
    NameProjection,
    Gratitude,
    Question,
    ApplauseSeeking,
}

impl Family {
    pub const ALL: [Family; 7] = [
        Family::LinguisticStyle,
        Family::Emotion,
        Family::Phonetic,
        Family::NameProjection,
        Family::Gratitude,
        Family::Question,
        Family::ApplauseSeeking,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Family::LinguisticStyle => "linguistic_style",
            Family::Emotion => "emotion",
            Family::Phonetic => "phonetic",
            Family::NameProjection => "name_projection",
            Family::Gratitude => "gratitude",
            Family::Question => "question",
            Family::ApplauseSeeking => "applause_seeking",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum FeatureKind {
    Ratio,
    Binary,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FeatureEntry {
    pub name: String,
    pub family: Family,
    pub kind: FeatureKind,
}

pub const ALLITERATION: &str = "phonetic.alliteration";
pub const RHYME: &str = "phonetic.rhyme";
pub const HOMOGENEITY: &str = "phonetic.homogeneity";
pub const NAME_PROJECTION: &str = "name_projection";
pub const GRATITUDE: &str = "gratitude";
pub const QUESTION: &str = "question";
pub const APPLAUSE_SEEKING: &str = "applause_seeking";

/// Ordered feature names grouped into the seven device families.
///
/// Layout: one `style.<category>` ratio per category lexicon, the ten
/// `emotion.<category>` ratios, the three phonetic ratios, then the four
/// binary detectors.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FeatureRegistry {
    entries: Vec<FeatureEntry>,
}

impl FeatureRegistry {
    pub fn from_bundle(bundle: &LexiconBundle) -> Self {
        let mut entries = Vec::new();
        let mut push = |name: String, family, kind| entries.push(FeatureEntry { name, family, kind });
        for c in &bundle.categories {
            push(format!("style.{}", c.category_name), Family::LinguisticStyle, FeatureKind::Ratio);
        }
        for e in Emotion::ALL {
            push(format!("emotion.{}", e.as_str()), Family::Emotion, FeatureKind::Ratio);
        }
        for name in [ALLITERATION, RHYME, HOMOGENEITY] {
            push(name.into(), Family::Phonetic, FeatureKind::Ratio);
        }
        push(NAME_PROJECTION.into(), Family::NameProjection, FeatureKind::Binary);
        push(GRATITUDE.into(), Family::Gratitude, FeatureKind::Binary);
        push(QUESTION.into(), Family::Question, FeatureKind::Binary);
        push(APPLAUSE_SEEKING.into(), Family::ApplauseSeeking, FeatureKind::Binary);
        Self { entries }
    }

    pub fn entries(&self) -> &[FeatureEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn names(&self) -> Vec<String> {
        self.entries.iter().map(|e| e.name.clone()).collect()
    }

    pub fn position(&self, name: &str) -> Option<usize> {
        self.entries.iter().position(|e| e.name == name)
    }

    /// Column indices of one family, in registry order.
    pub fn family_indices(&self, family: Family) -> Vec<usize> {
        self.entries
            .iter()
            .enumerate()
            .filter(|(_, e)| e.family == family)
            .map(|(i, _)| i)
            .collect()
    }

    /// Hex digest of the entry names, families and kinds. Models record it so
    /// a model is never applied to vectors laid out by a different registry.
    pub fn fingerprint(&self) -> String {
        let mut desc = String::new();
        for e in &self.entries {
            let kind = match e.kind {
                FeatureKind::Ratio => "ratio",
                FeatureKind::Binary => "binary",
            };
            let _ = writeln!(desc, "{}\t{}\t{}", e.name, e.family.as_str(), kind);
        }
        format!("{:016x}", stable_hash(desc.as_bytes()))
    }

    /// True when this registry has the layout `from_bundle(bundle)` would build.
    pub fn is_consistent_with(&self, bundle: &LexiconBundle) -> bool {
        let styles = self.family_indices(Family::LinguisticStyle);
        styles.len() == bundle.categories.len()
            && self.len() == bundle.categories.len() + 17
            && styles
                .iter()
                .zip(&bundle.categories)
                .all(|(&i, c)| self.entries[i].name.strip_prefix("style.") == Some(c.category_name.as_str()))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FeatureVector {
    pub values: Vec<f64>,
    pub word_count: usize,
}

fn ratio(count: usize, total: usize) -> f64 {
    if total == 0 {
        0.0
    } else {
        count as f64 / total as f64
    }
}

/// Category-lexicon ratios followed by the ten emotion ratios: matching
/// token occurrences divided by the number of words.
pub fn style_and_emotion_features<S: AsRef<str>>(words: &[S], bundle: &LexiconBundle) -> Vec<f64> {
    let total = words.len();
    let mut out = Vec::with_capacity(bundle.categories.len() + Emotion::ALL.len());
    for c in &bundle.categories {
        let hits = words.iter().filter(|w| c.match_token(w.as_ref())).count();
        out.push(ratio(hits, total));
    }
    let mut emotion_hits = [0usize; 10];
    for w in words {
        for e in bundle.emotions.categories(w.as_ref()).iter() {
            emotion_hits[e as usize] += 1;
        }
    }
    out.extend(emotion_hits.iter().map(|&h| ratio(h, total)));
    out
}

/// Repeated-phoneme ratio over one end of each in-dictionary word.
///
/// `pick` selects the phoneme (first or last) to compare. The numerator sums
/// `occurrences - 1` over each distinct selected phoneme; the denominator is
/// the total number of phonemes of the in-dictionary words. Out-of-dictionary
/// words are ignored.
fn repeated_edge_score<S: AsRef<str>>(
    words: &[S],
    dict: &PhoneticDict,
    pick: impl Fn(&[Phoneme]) -> Option<Phoneme>,
) -> f64 {
    let mut counts = [0usize; Phoneme::COUNT];
    let mut total = 0usize;
    for pron in words.iter().filter_map(|w| dict.lookup_phonemes(w.as_ref())) {
        total += pron.len();
        if let Some(p) = pick(pron) {
            counts[p.index()] += 1;
        }
    }
    let repeats: usize = counts.iter().map(|&c| c.saturating_sub(1)).sum();
    ratio(repeats, total)
}

pub fn alliteration_score<S: AsRef<str>>(words: &[S], dict: &PhoneticDict) -> f64 {
    repeated_edge_score(words, dict, |p| p.first().copied())
}

pub fn rhyme_score<S: AsRef<str>>(words: &[S], dict: &PhoneticDict) -> f64 {
    repeated_edge_score(words, dict, |p| p.last().copied())
}

/// Distinct phonemes over total phonemes across in-dictionary words.
pub fn homogeneity_score<S: AsRef<str>>(words: &[S], dict: &PhoneticDict) -> f64 {
    let mut seen = [false; Phoneme::COUNT];
    let mut total = 0usize;
    for pron in words.iter().filter_map(|w| dict.lookup_phonemes(w.as_ref())) {
        total += pron.len();
        for p in pron {
            seen[p.index()] = true;
        }
    }
    ratio(seen.iter().filter(|&&s| s).count(), total)
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct BinaryDevices {
    pub name: bool,
    pub gratitude: bool,
    pub question: bool,
    pub applause_seeking: bool,
}

impl BinaryDevices {
    fn union(self, other: Self) -> Self {
        Self {
            name: self.name || other.name,
            gratitude: self.gratitude || other.gratitude,
            question: self.question || other.question,
            applause_seeking: self.applause_seeking || other.applause_seeking,
        }
    }
}

/// Presence of a projected name, a gratitude expression, a question mark and
/// an applause-seeking expression.
///
/// Names are capitalized tokens, other than the sentence-initial one, whose
/// lowercase form is in the name set.
pub fn binary_detectors(sentence: &Sentence, bundle: &LexiconBundle) -> BinaryDevices {
    let name = cased_tokens(&sentence.text)
        .iter()
        .skip(1)
        .filter(|t| t.chars().next().is_some_and(char::is_uppercase))
        .any(|t| bundle.names.contains(&t.to_lowercase()));
    BinaryDevices {
        name,
        gratitude: sentence.words.iter().any(|w| matches_any_prefix(&bundle.gratitude_prefixes, w)),
        question: sentence.text.contains('?'),
        applause_seeking: sentence.words.iter().any(|w| matches_any_prefix(&bundle.applause_prefixes, w)),
    }
}

fn flag(b: bool) -> f64 {
    if b {
        1.0
    } else {
        0.0
    }
}

/// Features of a window of one or more sentences.
///
/// The window's tokens are concatenated and every ratio is computed over the
/// combined list; a binary device fires if it fires in any sentence.
pub fn extract(
    window: &[Sentence],
    bundle: &LexiconBundle,
    registry: &FeatureRegistry,
) -> Result<FeatureVector, FeatureError> {
    if window.is_empty() {
        return Err(FeatureError::EmptyWindow);
    }
    if !registry.is_consistent_with(bundle) {
        return Err(FeatureError::RegistryMismatch);
    }
    let words: Vec<&str> = window.iter().flat_map(|s| s.words.iter().map(String::as_str)).collect();
    let devices = window
        .iter()
        .map(|s| binary_detectors(s, bundle))
        .fold(BinaryDevices::default(), BinaryDevices::union);

    let mut values = style_and_emotion_features(&words, bundle);
    values.push(alliteration_score(&words, &bundle.phonetic));
    values.push(rhyme_score(&words, &bundle.phonetic));
    values.push(homogeneity_score(&words, &bundle.phonetic));
    values.extend([
        flag(devices.name),
        flag(devices.gratitude),
        flag(devices.question),
        flag(devices.applause_seeking),
    ]);
    debug_assert_eq!(values.len(), registry.len());
    Ok(FeatureVector {
        values,
        word_count: words.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lexicon::{
        load_category_lexicon_file, load_emotion_lexicon, load_name_set, load_phonetic_dict, EmotionLexicon,
        NameSet,
    };
    use alloc::vec;

    const DICT: &[&str] = &[
        "PETER  P IY1 T ER0",
        "PIPER  P AY1 P ER0",
        "PICKED  P IH1 K T",
        "CAT  K AE1 T",
        "HAT  HH AE1 T",
        "DOG  D AO1 G",
        "MAMA  M AA1 M AH0",
        "HELLO  HH AH0 L OW1",
    ];

    fn bundle() -> LexiconBundle {
        LexiconBundle::new(
            load_phonetic_dict(DICT).unwrap(),
            load_emotion_lexicon(["happy\tjoy\t1", "happy\tpositive\t1", "hate\tanger\t1"]).unwrap(),
            load_category_lexicon_file(["i\tfirst_person_singular", "my\tfirst_person_singular", "you\tsecond_person"])
                .unwrap(),
            load_name_set(["Alex", "Daniel"], 0).unwrap(),
        )
    }

    fn words(s: &[&str]) -> Vec<String> {
        s.iter().map(|w| String::from(*w)).collect()
    }

    fn approx(a: f64, b: f64) -> bool {
        (a - b).abs() < 1e-12
    }

    #[test]
    fn registry_layout() {
        let b = bundle();
        let r = FeatureRegistry::from_bundle(&b);
        assert_eq!(r.len(), 2 + 10 + 3 + 4);
        assert_eq!(r.family_indices(Family::Phonetic).len(), 3);
        assert_eq!(r.family_indices(Family::Emotion).len(), 10);
        for f in [Family::NameProjection, Family::Gratitude, Family::Question, Family::ApplauseSeeking] {
            let idx = r.family_indices(f);
            assert_eq!(idx.len(), 1);
            assert_eq!(r.entries()[idx[0]].kind, FeatureKind::Binary);
        }
        let names = r.names();
        let mut dedup = names.clone();
        dedup.sort();
        dedup.dedup();
        assert_eq!(dedup.len(), names.len());
        assert_eq!(r.fingerprint(), FeatureRegistry::from_bundle(&bundle()).fingerprint());
    }

    #[test]
    fn fingerprint_tracks_layout() {
        let mut b = bundle();
        let before = FeatureRegistry::from_bundle(&b).fingerprint();
        b.categories.pop();
        assert_ne!(before, FeatureRegistry::from_bundle(&b).fingerprint());
    }

    #[test]
    fn emotion_ratios() {
        let b = bundle();
        let v = style_and_emotion_features(&words(&["i", "am", "happy"]), &b);
        let emo = &v[2..];
        assert!(approx(emo[Emotion::Joy as usize], 1.0 / 3.0));
        assert!(approx(emo[Emotion::Positive as usize], 1.0 / 3.0));
        assert_eq!(emo.iter().filter(|&&x| x != 0.0).count(), 2);
    }

    #[test]
    fn no_matches_all_zero() {
        let v = style_and_emotion_features(&words(&["the", "the", "the"]), &bundle());
        assert!(v.iter().all(|&x| x == 0.0));
        assert!(style_and_emotion_features::<&str>(&[], &bundle()).iter().all(|&x| x == 0.0));
    }

    #[test]
    fn first_person_ratio() {
        let v = style_and_emotion_features(&words(&["i", "love", "my", "dog"]), &bundle());
        assert!(approx(v[0], 0.5));
    }

    #[test]
    fn alliteration_examples() {
        let d = bundle().phonetic;
        assert!(approx(alliteration_score(&words(&["peter", "piper", "picked"]), &d), 2.0 / 12.0));
        assert_eq!(alliteration_score(&words(&["hello"]), &d), 0.0);
        assert_eq!(alliteration_score(&words(&["zzxqv", "qqq"]), &d), 0.0);
    }

    #[test]
    fn rhyme_examples() {
        let d = bundle().phonetic;
        assert!(approx(rhyme_score(&words(&["cat", "hat"]), &d), 1.0 / 6.0));
        assert_eq!(rhyme_score(&words(&["cat", "dog"]), &d), 0.0);
        assert_eq!(rhyme_score::<&str>(&[], &d), 0.0);
    }

    #[test]
    fn homogeneity_examples() {
        let d = bundle().phonetic;
        assert_eq!(homogeneity_score(&words(&["cat"]), &d), 1.0);
        assert!(approx(homogeneity_score(&words(&["mama"]), &d), 0.75));
        assert_eq!(homogeneity_score(&words(&["zzxqv"]), &d), 0.0);
    }

    #[test]
    fn detectors() {
        let b = bundle();
        let d = binary_detectors(&Sentence::new("I want to introduce the creators, Alex and Daniel", 0), &b);
        assert!(d.name);
        let d = binary_detectors(&Sentence::new("I would like to thank you for listening", 0), &b);
        assert!(d.gratitude && !d.name);
        let d = binary_detectors(&Sentence::new("The tank is empty", 0), &b);
        assert!(!d.gratitude && !d.question);
        assert!(binary_detectors(&Sentence::new("Is it?", 0), &b).question);
        assert!(binary_detectors(&Sentence::new("Let's give him an applause.", 0), &b).applause_seeking);
    }

    #[test]
    fn sentence_initial_or_lowercase_names_do_not_fire() {
        let b = bundle();
        assert!(!binary_detectors(&Sentence::new("Alex went home.", 0), &b).name);
        assert!(!binary_detectors(&Sentence::new("We met alex there.", 0), &b).name);
    }

    #[test]
    fn window_concatenation() {
        let b = bundle();
        let r = FeatureRegistry::from_bundle(&b);
        let one = [Sentence::new("Great.", 0)];
        let two = [Sentence::new("Great.", 0), Sentence::new("Thank you.", 1)];
        let g = r.position(GRATITUDE).unwrap();
        assert_eq!(extract(&one, &b, &r).unwrap().values[g], 0.0);
        let v = extract(&two, &b, &r).unwrap();
        assert_eq!(v.values[g], 1.0);
        assert_eq!(v.word_count, 3);
        assert_eq!(v.values.len(), r.len());
    }

    #[test]
    fn single_sentence_window_matches_direct_computation() {
        let b = bundle();
        let r = FeatureRegistry::from_bundle(&b);
        let s = Sentence::new("Peter Piper picked my cat, you know?", 0);
        let v = extract(core::slice::from_ref(&s), &b, &r).unwrap();
        let mut expected = style_and_emotion_features(&s.words, &b);
        expected.push(alliteration_score(&s.words, &b.phonetic));
        expected.push(rhyme_score(&s.words, &b.phonetic));
        expected.push(homogeneity_score(&s.words, &b.phonetic));
        expected.extend([0.0, 0.0, 1.0, 0.0]);
        assert_eq!(v.values, expected);
    }

    #[test]
    fn mismatched_registry_and_empty_window() {
        let b = bundle();
        let r = FeatureRegistry::from_bundle(&b);
        let other = LexiconBundle::new(PhoneticDict::default(), EmotionLexicon::default(), vec![], NameSet::default());
        assert_eq!(extract(&[Sentence::new("Hi.", 0)], &other, &r), Err(FeatureError::RegistryMismatch));
        assert_eq!(extract(&[], &b, &r), Err(FeatureError::EmptyWindow));
    }
}
