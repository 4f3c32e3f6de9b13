//! Text normalization shared by the lexicon, the translator, the scorer and
//! the contextual model.

use unicode_normalization::UnicodeNormalization;

/// Characters treated as separators and dropped during tokenization.
/// Apostrophes are deliberately absent so that forms like "it's" survive.
pub const PUNCTUATION: &[char] = &['.', ',', '!', '?', ';', ':', '"', '(', ')'];

pub fn is_separator(c: char) -> bool {
    c.is_whitespace() || PUNCTUATION.contains(&c)
}

/// NFC-normalizes and lower-cases `s`. Diacritics are preserved.
pub fn normalize(s: &str) -> String {
    s.nfc().collect::<String>().to_lowercase()
}

/// Normalization applied to lexicon surface forms: trim, NFC, lower-case.
pub fn normalize_form(s: &str) -> String {
    normalize(s.trim())
}

/// A word located in a normalized string, in character offsets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Word {
    pub text: String,
    pub start: usize,
    pub end: usize,
    /// true when the gap before this word contains punctuation, which stops
    /// a multi-word phrase from spanning it.
    pub after_punctuation: bool,
}

/// Splits an already-normalized string into words, dropping separators.
pub fn words(normalized: &str) -> Vec<Word> {
    let mut out = Vec::new();
    let mut current = String::new();
    let mut start = 0;
    let mut saw_punct = false;
    let mut pending_punct = false;
    for (i, c) in normalized.chars().enumerate() {
        if is_separator(c) {
            if !current.is_empty() {
                out.push(Word {
                    text: std::mem::take(&mut current),
                    start,
                    end: i,
                    after_punctuation: pending_punct,
                });
                pending_punct = false;
            }
            if !c.is_whitespace() {
                saw_punct = true;
            }
        } else {
            if current.is_empty() {
                start = i;
                pending_punct = saw_punct;
                saw_punct = false;
            }
            current.push(c);
        }
    }
    if !current.is_empty() {
        let end = start + current.chars().count();
        out.push(Word {
            text: current,
            start,
            end,
            after_punctuation: pending_punct,
        });
    }
    out
}

/// Canonical lookup key for a lexicon form: its words joined by one space.
pub fn phrase_key(form: &str) -> String {
    words(&normalize(form))
        .into_iter()
        .map(|w| w.text)
        .collect::<Vec<_>>()
        .join(" ")
}

/// Lower-cased, punctuation-stripped word list.
pub fn simple_tokens(s: &str) -> Vec<String> {
    words(&normalize(s)).into_iter().map(|w| w.text).collect()
}
