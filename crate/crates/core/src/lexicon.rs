//! Lexical resources: CMU-format phonetic dictionary, NRC-format emotion
//! lexicon, open category lexicons and the given-name set.
//!
//! Loaders take any iterator of lines so the std side can feed them from
//! files while tests feed string literals.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LexiconError {
    #[error("line {line}: {reason}")]
    Malformed { line: usize, reason: String },
    #[error("line {line}: unknown emotion category `{name}`")]
    UnknownEmotion { line: usize, name: String },
    #[error("line {line}: unknown phoneme `{symbol}`")]
    UnknownPhoneme { line: usize, symbol: String },
    #[error("name list is empty")]
    EmptyNameSet,
}

fn malformed(line: usize, reason: &str) -> LexiconError {
    LexiconError::Malformed {
        line,
        reason: reason.to_string(),
    }
}

macro_rules! phonemes {
    ($($v:ident),* $(,)?) => {
        /// A stress-free ARPAbet phoneme.
        #[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
        pub enum Phoneme { $($v),* }

        impl Phoneme {
            pub const ALL: &'static [Phoneme] = &[$(Phoneme::$v),*];

            pub fn as_str(self) -> &'static str {
                match self { $(Phoneme::$v => stringify!($v)),* }
            }
        }

        impl FromStr for Phoneme {
            type Err = ();

            /// Parses a symbol, ignoring any trailing stress digit.
            fn from_str(s: &str) -> Result<Self, ()> {
                match strip_stress(s) {
                    $(stringify!($v) => Ok(Phoneme::$v),)*
                    _ => Err(()),
                }
            }
        }
    };
}

phonemes!(
    AA, AE, AH, AO, AW, AY, B, CH, D, DH, EH, ER, EY, F, G, HH, IH, IY, JH, K, L, M, N, NG, OW,
    OY, P, R, S, SH, T, TH, UH, UW, V, W, Y, Z, ZH,
);

impl Phoneme {
    pub const COUNT: usize = Self::ALL.len();

    pub fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for Phoneme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Removes lexical stress markers (0, 1, 2) from a phoneme symbol.
pub fn strip_stress(symbol: &str) -> &str {
    symbol.trim_end_matches(['0', '1', '2'])
}

/// Word to pronunciations, primary first. Keys are uppercase.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PhoneticDict {
    entries: BTreeMap<String, Vec<Vec<Phoneme>>>,
}

impl PhoneticDict {
    /// Primary pronunciation of `word`, looked up case-insensitively.
    pub fn lookup_phonemes(&self, word: &str) -> Option<&[Phoneme]> {
        self.pronunciations(word).and_then(|p| p.first()).map(Vec::as_slice)
    }

    pub fn pronunciations(&self, word: &str) -> Option<&[Vec<Phoneme>]> {
        self.entries.get(&word.to_uppercase()).map(Vec::as_slice)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn words(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }
}

/// Splits `WORD(2)` into `WORD` and whether it is an alternate.
fn split_variant(word: &str) -> (&str, bool) {
    if let Some(stripped) = word.strip_suffix(')') {
        if let Some(open) = stripped.rfind('(') {
            let digits = &stripped[open + 1..];
            if !digits.is_empty() && digits.bytes().all(|b| b.is_ascii_digit()) && open > 0 {
                return (&stripped[..open], true);
            }
        }
    }
    (word, false)
}

/// Parses a CMU pronouncing dictionary.
///
/// Lines starting with `;;;` are comments and a trailing `# ...` comment is
/// ignored. Alternate pronunciations (`WORD(2)`) are appended after the
/// primary one.
pub fn load_phonetic_dict<I, S>(lines: I) -> Result<PhoneticDict, LexiconError>
where
    I: IntoIterator<Item = S>,
    S: AsRef<str>,
{
    let mut entries: BTreeMap<String, Vec<Vec<Phoneme>>> = BTreeMap::new();
    for (i, line) in lines.into_iter().enumerate() {
        let lineno = i + 1;
        let line = line.as_ref();
        if line.starts_with(";;;") || line.trim().is_empty() {
            continue;
        }
        let body = line.split(" #").next().unwrap_or(line);
        let mut fields = body.split_whitespace();
        let word = fields.next().ok_or_else(|| malformed(lineno, "missing word"))?;
        let phones = fields
            .map(|sym| {
                sym.parse::<Phoneme>().map_err(|()| LexiconError::UnknownPhoneme {
                    line: lineno,
                    symbol: sym.to_string(),
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        if phones.is_empty() {
            return Err(malformed(lineno, "entry has no phonemes"));
        }
        let (base, alternate) = split_variant(word);
        let slot = entries.entry(base.to_uppercase()).or_default();
        if alternate {
            slot.push(phones);
        } else {
            slot.insert(0, phones);
        }
    }
    Ok(PhoneticDict { entries })
}

macro_rules! emotions {
    ($($v:ident => $name:literal),* $(,)?) => {
        /// The ten NRC emotion lexicon categories.
        #[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
        pub enum Emotion { $($v),* }

        impl Emotion {
            pub const ALL: [Emotion; 10] = [$(Emotion::$v),*];

            pub fn as_str(self) -> &'static str {
                match self { $(Emotion::$v => $name),* }
            }
        }

        impl FromStr for Emotion {
            type Err = ();

            fn from_str(s: &str) -> Result<Self, ()> {
                match s {
                    $($name => Ok(Emotion::$v),)*
                    _ => Err(()),
                }
            }
        }
    };
}

emotions!(
    Anger => "anger",
    Anticipation => "anticipation",
    Disgust => "disgust",
    Fear => "fear",
    Joy => "joy",
    Sadness => "sadness",
    Surprise => "surprise",
    Trust => "trust",
    Negative => "negative",
    Positive => "positive",
);

/// A subset of [`Emotion`] stored as a bitmask.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct EmotionSet(u16);

impl EmotionSet {
    pub fn insert(&mut self, e: Emotion) {
        self.0 |= 1 << e as u16;
    }

    pub fn contains(self, e: Emotion) -> bool {
        self.0 & (1 << e as u16) != 0
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn iter(self) -> impl Iterator<Item = Emotion> {
        Emotion::ALL.into_iter().filter(move |e| self.contains(*e))
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct EmotionLexicon {
    word_to_categories: BTreeMap<String, EmotionSet>,
}

impl EmotionLexicon {
    pub fn categories(&self, word: &str) -> EmotionSet {
        self.word_to_categories.get(word).copied().unwrap_or_default()
    }

    pub fn len(&self) -> usize {
        self.word_to_categories.len()
    }

    pub fn is_empty(&self) -> bool {
        self.word_to_categories.is_empty()
    }
}

/// Parses the NRC `word<TAB>category<TAB>flag` format; only flag `1` rows
/// are kept.
pub fn load_emotion_lexicon<I, S>(lines: I) -> Result<EmotionLexicon, LexiconError>
where
    I: IntoIterator<Item = S>,
    S: AsRef<str>,
{
    let mut map: BTreeMap<String, EmotionSet> = BTreeMap::new();
    for (i, line) in lines.into_iter().enumerate() {
        let lineno = i + 1;
        let line = line.as_ref().trim_end_matches(['\r', '\n']);
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        let [word, category, flag] = fields[..] else {
            return Err(malformed(lineno, "expected word<TAB>category<TAB>flag"));
        };
        let emotion = category.trim().parse::<Emotion>().map_err(|()| LexiconError::UnknownEmotion {
            line: lineno,
            name: category.to_string(),
        })?;
        match flag.trim() {
            "1" => map.entry(word.trim().to_lowercase()).or_default().insert(emotion),
            "0" => {}
            _ => return Err(malformed(lineno, "association flag must be 0 or 1")),
        }
    }
    Ok(EmotionLexicon {
        word_to_categories: map,
    })
}

/// A word category: exact terms plus prefix terms (written `term*`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CategoryLexicon {
    pub category_name: String,
    pub exact_terms: BTreeSet<String>,
    pub prefix_terms: BTreeSet<String>,
}

impl CategoryLexicon {
    pub fn new(name: &str) -> Self {
        Self {
            category_name: name.to_string(),
            exact_terms: BTreeSet::new(),
            prefix_terms: BTreeSet::new(),
        }
    }

    /// Adds a term; a trailing `*` makes it a prefix term.
    pub fn add_term(&mut self, term: &str) {
        let term = term.trim().to_lowercase();
        match term.strip_suffix('*') {
            Some(prefix) => self.prefix_terms.insert(prefix.to_string()),
            None => self.exact_terms.insert(term),
        };
    }

    pub fn match_token(&self, token: &str) -> bool {
        self.exact_terms.contains(token) || self.prefix_terms.iter().any(|p| token.starts_with(p.as_str()))
    }
}

/// Parses `term<TAB>category` lines into lexicons ordered by first
/// appearance of each category. Blank lines and `#` comments are skipped.
pub fn load_category_lexicon_file<I, S>(lines: I) -> Result<Vec<CategoryLexicon>, LexiconError>
where
    I: IntoIterator<Item = S>,
    S: AsRef<str>,
{
    let mut out: Vec<CategoryLexicon> = Vec::new();
    for (i, line) in lines.into_iter().enumerate() {
        let lineno = i + 1;
        let line = line.as_ref().trim_end_matches(['\r', '\n']);
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let (term, category) = line
            .split_once('\t')
            .ok_or_else(|| malformed(lineno, "expected term<TAB>category"))?;
        let (term, category) = (term.trim(), category.trim());
        if term.trim_end_matches('*').is_empty() || category.is_empty() {
            return Err(malformed(lineno, "empty term or category"));
        }
        let idx = match out.iter().position(|c| c.category_name == category) {
            Some(idx) => idx,
            None => {
                out.push(CategoryLexicon::new(category));
                out.len() - 1
            }
        };
        out[idx].add_term(term);
    }
    Ok(out)
}

/// Lowercase given names.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct NameSet {
    names: BTreeSet<String>,
}

impl NameSet {
    pub fn contains(&self, lowercase: &str) -> bool {
        self.names.contains(lowercase)
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }
}

/// Parses a name list: one name per line, optionally as a comma-separated
/// record whose last field is a frequency count (the SSA `Name,Sex,Count`
/// layout). Names whose count is below `min_count` are skipped.
pub fn load_name_set<I, S>(lines: I, min_count: u64) -> Result<NameSet, LexiconError>
where
    I: IntoIterator<Item = S>,
    S: AsRef<str>,
{
    let mut names = BTreeSet::new();
    for (i, line) in lines.into_iter().enumerate() {
        let lineno = i + 1;
        let line = line.as_ref().trim();
        if line.is_empty() {
            continue;
        }
        let mut fields = line.split(',').map(str::trim);
        let name = fields.next().unwrap_or_default();
        let count = match fields.next_back() {
            Some(c) => c
                .parse::<u64>()
                .map_err(|_| malformed(lineno, "count field is not an integer"))?,
            None => u64::MAX,
        };
        if name.is_empty() || name.split_whitespace().nth(1).is_some() {
            return Err(malformed(lineno, "name must be a single token"));
        }
        if count >= min_count {
            names.insert(name.to_lowercase());
        }
    }
    if names.is_empty() {
        return Err(LexiconError::EmptyNameSet);
    }
    Ok(NameSet { names })
}

pub const DEFAULT_GRATITUDE_PREFIXES: [&str; 5] = ["grateful", "gratitud", "thank", "appreciate", "bless"];
pub const DEFAULT_APPLAUSE_PREFIXES: [&str; 1] = ["applau"];

/// Every lexical resource the feature extractor needs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LexiconBundle {
    pub phonetic: PhoneticDict,
    pub emotions: EmotionLexicon,
    pub categories: Vec<CategoryLexicon>,
    pub names: NameSet,
    pub gratitude_prefixes: Vec<String>,
    pub applause_prefixes: Vec<String>,
}

impl LexiconBundle {
    /// Bundles the loaded resources with the default gratitude and
    /// applause-seeking prefix lists.
    pub fn new(
        phonetic: PhoneticDict,
        emotions: EmotionLexicon,
        categories: Vec<CategoryLexicon>,
        names: NameSet,
    ) -> Self {
        Self {
            phonetic,
            emotions,
            categories,
            names,
            gratitude_prefixes: DEFAULT_GRATITUDE_PREFIXES.iter().map(|s| s.to_string()).collect(),
            applause_prefixes: DEFAULT_APPLAUSE_PREFIXES.iter().map(|s| s.to_string()).collect(),
        }
    }
}

pub(crate) fn matches_any_prefix(prefixes: &[String], token: &str) -> bool {
    prefixes.iter().any(|p| token.starts_with(p.as_str()))
}
