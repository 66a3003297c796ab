//! Tokenization and rule-based sentence splitting.

use alloc::string::String;
use alloc::vec::Vec;

/// Abbreviations that end in a period without ending the sentence. Compared
/// case-insensitively against the word immediately before the period.
const ABBREVIATIONS: &[&str] = &[
    "mr", "mrs", "ms", "dr", "prof", "sr", "jr", "st", "mt", "vs", "gen", "gov", "sen", "rep",
    "capt", "col", "lt", "sgt", "rev", "hon", "fr", "inc", "ltd", "corp", "co", "al", "approx",
    "dept", "est", "fig", "e.g", "i.e", "u.s", "u.k", "u.n", "jan", "feb", "mar", "apr", "aug",
    "sept", "oct", "nov", "dec",
];

const TERMINALS: [char; 3] = ['.', '!', '?'];
const CLOSERS: [char; 6] = ['"', '\'', '\u{201d}', '\u{2019}', ')', ']'];
const OPENERS: [char; 5] = ['"', '\'', '\u{201c}', '\u{2018}', '('];

fn is_apostrophe(c: char) -> bool {
    c == '\'' || c == '\u{2019}'
}

/// One unit of analysis: a sentence with its lowercase word tokens.
#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Sentence {
    pub text: String,
    pub words: Vec<String>,
    pub index_in_talk: usize,
}

impl Sentence {
    /// Whitespace runs in `text` collapse to single spaces.
    pub fn new(text: &str, index_in_talk: usize) -> Self {
        let mut collapsed = String::with_capacity(text.len());
        for piece in text.split_whitespace() {
            if !collapsed.is_empty() {
                collapsed.push(' ');
            }
            collapsed.push_str(piece);
        }
        let text = collapsed;
        let words = tokenize(&text);
        Self {
            text,
            words,
            index_in_talk,
        }
    }
}

/// Calls `f` with each word token in its original case.
///
/// Tokens are maximal runs of alphanumeric characters; an apostrophe is kept
/// only when it sits between two alphanumerics, so "don't" is one token and
/// "'cause" becomes "cause". Curly apostrophes are normalized to `'`.
fn for_each_token(text: &str, mut f: impl FnMut(&str)) {
    let mut current = String::new();
    let mut chars = text.chars().peekable();
    while let Some(c) = chars.next() {
        if c.is_alphanumeric() {
            current.push(c);
        } else if is_apostrophe(c)
            && !current.is_empty()
            && chars.peek().is_some_and(|n| n.is_alphanumeric())
        {
            current.push('\'');
        } else if !current.is_empty() {
            f(&current);
            current.clear();
        }
    }
    if !current.is_empty() {
        f(&current);
    }
}

/// Lowercase word tokens.
pub fn tokenize(text: &str) -> Vec<String> {
    let mut out = Vec::new();
    for_each_token(text, |t| out.push(t.to_lowercase()));
    out
}

/// Word tokens with their original capitalization, used by name detection.
pub fn cased_tokens(text: &str) -> Vec<String> {
    let mut out = Vec::new();
    for_each_token(text, |t| out.push(String::from(t)));
    out
}

/// The run of word characters (letters, digits, inner periods) that ends
/// right before byte offset `end`.
fn word_before(text: &str, end: usize) -> &str {
    let head = &text[..end];
    let start = head
        .char_indices()
        .rev()
        .find(|&(_, c)| !(c.is_alphanumeric() || c == '.'))
        .map_or(0, |(i, c)| i + c.len_utf8());
    &head[start..]
}

fn is_abbreviation(word: &str) -> bool {
    let mut chars = word.chars();
    // Single capital letters are initials ("J. K. Rowling").
    if let (Some(c), None) = (chars.next(), chars.next()) {
        if c.is_uppercase() {
            return true;
        }
    }
    let lower = word.to_lowercase();
    ABBREVIATIONS.contains(&lower.as_str())
}

/// Splits text into sentences.
///
/// A boundary is a run of `.`, `!` or `?` (optionally followed by closing
/// quotes or brackets) that is followed by whitespace and then an uppercase
/// letter or an opening quote, or by the end of the text. A lone period after
/// a stop-listed abbreviation or a single-letter initial is not a boundary.
/// Empty sentences are never produced.
pub fn split_sentences(text: &str) -> Vec<Sentence> {
    let chars: Vec<(usize, char)> = text.char_indices().collect();
    let mut out = Vec::new();
    let mut start = 0usize;
    let push = |piece: &str, out: &mut Vec<Sentence>| {
        if !piece.trim().is_empty() {
            let idx = out.len();
            out.push(Sentence::new(piece, idx));
        }
    };

    let mut i = 0;
    while i < chars.len() {
        let (pos, c) = chars[i];
        if !TERMINALS.contains(&c) {
            i += 1;
            continue;
        }
        let mut last = i;
        while last + 1 < chars.len() && TERMINALS.contains(&chars[last + 1].1) {
            last += 1;
        }
        let lone_period = c == '.' && last == i;
        while last + 1 < chars.len() && CLOSERS.contains(&chars[last + 1].1) {
            last += 1;
        }
        let end = chars[last].0 + chars[last].1.len_utf8();

        let mut next = last + 1;
        if next < chars.len() && !chars[next].1.is_whitespace() {
            i = next;
            continue;
        }
        while next < chars.len() && chars[next].1.is_whitespace() {
            next += 1;
        }
        let boundary = match chars.get(next) {
            None => true,
            Some(&(_, n)) => {
                (n.is_uppercase() || OPENERS.contains(&n))
                    && !(lone_period && is_abbreviation(word_before(text, pos)))
            }
        };
        if boundary {
            push(&text[start..end], &mut out);
            start = chars.get(next).map_or(text.len(), |&(p, _)| p);
        }
        i = next;
    }
    push(&text[start..], &mut out);
    out
}
