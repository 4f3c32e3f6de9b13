//! The six-language sentiment lexicon: domain types, CSV I/O, cleaning,
//! expansion and exploratory statistics.

mod clean;
mod csv_io;
mod eda;

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::text;

pub use clean::{AddRejection, CleaningReport, FormChange, Removal, RejectReason, ValidationIssue, ValidationReport};
pub use csv_io::{HEADER, parse_lexicon, serialize_lexicon, write_lexicon};
pub use eda::{compute_eda, pearson, EdaReport, FiveNumber, HISTOGRAM_BINS};

/// Scores with absolute value at or below this are neutral.
pub const NEUTRAL_EPSILON: f64 = 1e-9;
pub const MIN_SCORE: f64 = -9.0;
pub const MAX_SCORE: f64 = 9.0;

#[derive(Debug, Error, PartialEq)]
pub enum LexiconError {
    #[error("row {row}: expected {expected} columns, found {found}")]
    ColumnCount { row: usize, expected: usize, found: usize },
    #[error("row {row}, field `{field}`: score {value} outside [-9, 9]")]
    ScoreRange { row: usize, field: String, value: f64 },
    #[error("row {row}, field `{field}`: `{value}` is not a decimal number")]
    BadNumber { row: usize, field: String, value: String },
    #[error("row {row}, field `pos`: unknown part-of-speech tag `{value}`")]
    UnknownPos { row: usize, value: String },
    #[error("row {row}, field `french`: the french form is required")]
    MissingFrench { row: usize },
    #[error("header: unknown or misplaced column `{0}`")]
    UnknownColumn(String),
    #[error("header: expected {expected} columns, found {found}")]
    HeaderLength { expected: usize, found: usize },
    #[error("unknown language `{0}`")]
    UnknownLanguage(String),
    #[error("unknown part-of-speech tag `{0}`")]
    UnknownPosTag(String),
    #[error("score {0} outside [-9, 9]")]
    OutOfRange(f64),
    #[error("csv: {0}")]
    Csv(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Language {
    French,
    Ciluba,
    English,
    Afrikaans,
    Sepedi,
    Zulu,
}

impl Language {
    /// Column order of the lexicon file.
    pub const ALL: [Language; 6] = [
        Language::French,
        Language::Ciluba,
        Language::English,
        Language::Afrikaans,
        Language::Sepedi,
        Language::Zulu,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            Language::French => "french",
            Language::Ciluba => "ciluba",
            Language::English => "english",
            Language::Afrikaans => "afrikaans",
            Language::Sepedi => "sepedi",
            Language::Zulu => "zulu",
        }
    }

    /// Suffix of the per-language score column, e.g. `score_nso`.
    pub fn score_suffix(self) -> &'static str {
        match self {
            Language::French => "fr",
            Language::Ciluba => "cil",
            Language::English => "en",
            Language::Afrikaans => "af",
            Language::Sepedi => "nso",
            Language::Zulu => "zu",
        }
    }
}

impl fmt::Display for Language {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Language {
    type Err = LexiconError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let lower = s.trim().to_lowercase();
        Language::ALL
            .into_iter()
            .find(|l| l.name() == lower)
            .ok_or_else(|| LexiconError::UnknownLanguage(s.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PosTag {
    Adjectif,
    Adverb,
    Adverbe,
    Article,
    Conjunction,
    Mot,
    Nombre,
    Pronompersonnel,
    Verbe,
}

impl PosTag {
    pub const ALL: [PosTag; 9] = [
        PosTag::Adjectif,
        PosTag::Adverb,
        PosTag::Adverbe,
        PosTag::Article,
        PosTag::Conjunction,
        PosTag::Mot,
        PosTag::Nombre,
        PosTag::Pronompersonnel,
        PosTag::Verbe,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            PosTag::Adjectif => "adjectif",
            PosTag::Adverb => "adverb",
            PosTag::Adverbe => "adverbe",
            PosTag::Article => "article",
            PosTag::Conjunction => "conjunction",
            PosTag::Mot => "mot",
            PosTag::Nombre => "nombre",
            PosTag::Pronompersonnel => "pronompersonnel",
            PosTag::Verbe => "verbe",
        }
    }

    /// Rank used to pick one entry when a form is ambiguous: mot, then verbe,
    /// then nombre, then the remaining tags alphabetically.
    pub fn disambiguation_rank(self) -> usize {
        match self {
            PosTag::Mot => 0,
            PosTag::Verbe => 1,
            PosTag::Nombre => 2,
            other => 3 + other.index(),
        }
    }
}

impl fmt::Display for PosTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PosTag {
    type Err = LexiconError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let lower = s.trim().to_lowercase();
        PosTag::ALL
            .into_iter()
            .find(|p| p.name() == lower)
            .ok_or_else(|| LexiconError::UnknownPosTag(s.to_string()))
    }
}

/// A sentiment intensity in [-9, 9].
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct SentimentScore(f64);

impl SentimentScore {
    pub fn new(value: f64) -> Result<Self, LexiconError> {
        if value.is_finite() && (MIN_SCORE..=MAX_SCORE).contains(&value) {
            Ok(SentimentScore(value))
        } else {
            Err(LexiconError::OutOfRange(value))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn polarity(self) -> Polarity {
        Polarity::of(self.0)
    }

    pub fn negated(self) -> Self {
        SentimentScore(-self.0)
    }
}

impl TryFrom<f64> for SentimentScore {
    type Error = LexiconError;
    fn try_from(v: f64) -> Result<Self, Self::Error> {
        SentimentScore::new(v)
    }
}

impl From<SentimentScore> for f64 {
    fn from(s: SentimentScore) -> f64 {
        s.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Polarity {
    Negative,
    Neutral,
    Positive,
}

impl Polarity {
    pub const ALL: [Polarity; 3] = [Polarity::Negative, Polarity::Neutral, Polarity::Positive];

    /// Sign classification with the neutral band |x| <= 1e-9.
    pub fn of(score: f64) -> Polarity {
        if score > NEUTRAL_EPSILON {
            Polarity::Positive
        } else if score < -NEUTRAL_EPSILON {
            Polarity::Negative
        } else {
            Polarity::Neutral
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Option<Polarity> {
        Polarity::ALL.get(i).copied()
    }

    pub fn name(self) -> &'static str {
        match self {
            Polarity::Negative => "negative",
            Polarity::Neutral => "neutral",
            Polarity::Positive => "positive",
        }
    }

    pub fn flipped(self) -> Polarity {
        match self {
            Polarity::Negative => Polarity::Positive,
            Polarity::Neutral => Polarity::Neutral,
            Polarity::Positive => Polarity::Negative,
        }
    }
}

impl fmt::Display for Polarity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Polarity {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_lowercase().as_str() {
            "negative" => Ok(Polarity::Negative),
            "neutral" => Ok(Polarity::Neutral),
            "positive" => Ok(Polarity::Positive),
            other => Err(format!("unknown polarity `{other}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct EntryId(pub u32);

impl fmt::Display for EntryId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// One concept across the six languages.
#[derive(Debug, Clone, PartialEq)]
pub struct LexiconEntry {
    pub id: EntryId,
    forms: [Option<String>; 6],
    pub pos: PosTag,
    pub shared_score: SentimentScore,
    scores: [Option<SentimentScore>; 6],
}

impl LexiconEntry {
    /// Builds an entry with the given french form. The id is provisional
    /// until the entry is inserted into a [`Lexicon`].
    pub fn new(french: &str, pos: PosTag, shared_score: SentimentScore) -> Self {
        let mut forms: [Option<String>; 6] = Default::default();
        forms[Language::French.index()] = Some(french.to_string());
        LexiconEntry {
            id: EntryId(0),
            forms,
            pos,
            shared_score,
            scores: [None; 6],
        }
    }

    pub fn with_form(mut self, language: Language, form: &str) -> Self {
        self.set_form(language, Some(form.to_string()));
        self
    }

    pub fn with_score(mut self, language: Language, score: SentimentScore) -> Self {
        self.scores[language.index()] = Some(score);
        self
    }

    pub fn set_form(&mut self, language: Language, form: Option<String>) {
        self.forms[language.index()] = form;
    }

    pub fn set_score(&mut self, language: Language, score: Option<SentimentScore>) {
        self.scores[language.index()] = score;
    }

    pub fn form(&self, language: Language) -> Option<&str> {
        self.forms[language.index()].as_deref()
    }

    pub fn french(&self) -> &str {
        self.form(Language::French).unwrap_or("")
    }

    /// The explicitly recorded score for `language`, if any.
    pub fn explicit_score(&self, language: Language) -> Option<SentimentScore> {
        self.scores[language.index()]
    }

    /// Per-language score with fallback to the shared score.
    pub fn score(&self, language: Language) -> SentimentScore {
        self.scores[language.index()].unwrap_or(self.shared_score)
    }

    /// Mean of the explicitly recorded per-language scores, or the shared
    /// score when none are recorded.
    pub fn mean_score(&self) -> f64 {
        let present: Vec<f64> = self.scores.iter().flatten().map(|s| s.value()).collect();
        if present.is_empty() {
            self.shared_score.value()
        } else {
            present.iter().sum::<f64>() / present.len() as f64
        }
    }

    pub fn polarity(&self) -> Polarity {
        self.shared_score.polarity()
    }

    /// (french form, pos, shared score bits): entries equal under this key
    /// are exact duplicates.
    pub fn dedup_key(&self) -> (String, PosTag, u64) {
        (
            text::normalize_form(self.french()),
            self.pos,
            self.shared_score.value().to_bits(),
        )
    }

    /// Every present form equals its trimmed, NFC, lower-cased version.
    pub fn is_normalized(&self) -> bool {
        self.forms
            .iter()
            .flatten()
            .all(|f| !f.is_empty() && *f == text::normalize_form(f))
    }

    /// Copy with every score negated.
    pub fn negated(&self) -> Self {
        let mut e = self.clone();
        e.shared_score = e.shared_score.negated();
        for s in e.scores.iter_mut().flatten() {
            *s = s.negated();
        }
        e
    }
}

/// An immutable, indexed collection of entries.
#[derive(Debug, Clone, Default)]
pub struct Lexicon {
    entries: Vec<LexiconEntry>,
    positions: HashMap<EntryId, usize>,
    index: [HashMap<String, Vec<EntryId>>; 6],
    max_phrase_len: [usize; 6],
}

impl Lexicon {
    /// Builds a lexicon from entries that already carry distinct ids.
    pub fn from_entries(entries: Vec<LexiconEntry>) -> Self {
        let mut lex = Lexicon {
            entries,
            ..Default::default()
        };
        lex.rebuild_index();
        lex
    }

    /// Builds a lexicon assigning sequential ids in order.
    pub fn from_unnumbered(mut entries: Vec<LexiconEntry>) -> Self {
        for (i, e) in entries.iter_mut().enumerate() {
            e.id = EntryId(i as u32);
        }
        Lexicon::from_entries(entries)
    }

    fn rebuild_index(&mut self) {
        self.positions.clear();
        self.index = Default::default();
        self.max_phrase_len = [0; 6];
        for (pos, e) in self.entries.iter().enumerate() {
            self.positions.insert(e.id, pos);
            for lang in Language::ALL {
                if let Some(form) = e.form(lang) {
                    let key = text::phrase_key(form);
                    if key.is_empty() {
                        continue;
                    }
                    let len = key.split(' ').count();
                    let slot = lang.index();
                    self.max_phrase_len[slot] = self.max_phrase_len[slot].max(len);
                    self.index[slot].entry(key).or_default().push(e.id);
                }
            }
        }
    }

    pub fn entries(&self) -> &[LexiconEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, id: EntryId) -> Option<&LexiconEntry> {
        self.positions.get(&id).map(|&p| &self.entries[p])
    }

    /// Entry ids whose `language` form matches `phrase` (looked up by its
    /// canonical key).
    pub fn lookup(&self, language: Language, phrase: &str) -> &[EntryId] {
        self.index[language.index()]
            .get(&text::phrase_key(phrase))
            .map(Vec::as_slice)
            .unwrap_or(&[])
    }

    pub(crate) fn lookup_key(&self, language: Language, key: &str) -> &[EntryId] {
        self.index[language.index()]
            .get(key)
            .map(Vec::as_slice)
            .unwrap_or(&[])
    }

    /// Longest form, in words, recorded for `language`.
    pub fn max_phrase_len(&self, language: Language) -> usize {
        self.max_phrase_len[language.index()]
    }

    /// Picks one entry among candidates: best POS rank, then file order.
    pub fn disambiguate(&self, candidates: &[EntryId]) -> Option<&LexiconEntry> {
        candidates
            .iter()
            .filter_map(|&id| self.positions.get(&id).map(|&p| (p, &self.entries[p])))
            .min_by_key(|(p, e)| (e.pos.disambiguation_rank(), *p))
            .map(|(_, e)| e)
    }

    pub(crate) fn next_id(&self) -> u32 {
        self.entries.iter().map(|e| e.id.0 + 1).max().unwrap_or(0)
    }

    /// Lexicon with every score negated.
    pub fn negated(&self) -> Lexicon {
        Lexicon::from_entries(self.entries.iter().map(LexiconEntry::negated).collect())
    }

    /// Forms of `language` that occur in two or more entries with at least one
    /// positive and one negative score for that language. Ordered by first
    /// occurrence.
    pub fn context_dependent_forms(&self, language: Language) -> Vec<String> {
        let mut order: Vec<String> = Vec::new();
        let mut seen: HashMap<String, (usize, bool, bool)> = HashMap::new();
        for e in &self.entries {
            let Some(form) = e.form(language) else { continue };
            let key = text::phrase_key(form);
            if key.is_empty() {
                continue;
            }
            let pol = e.score(language).polarity();
            let slot = seen.entry(key.clone()).or_insert_with(|| {
                order.push(key.clone());
                (0, false, false)
            });
            slot.0 += 1;
            slot.1 |= pol == Polarity::Positive;
            slot.2 |= pol == Polarity::Negative;
        }
        order
            .into_iter()
            .filter(|k| {
                let (n, pos, neg) = seen[k];
                n >= 2 && pos && neg
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(v: f64) -> SentimentScore {
        SentimentScore::new(v).unwrap()
    }

    #[test]
    fn language_parsing_is_closed() {
        assert_eq!("Sepedi".parse::<Language>().unwrap(), Language::Sepedi);
        assert!("xhosa".parse::<Language>().is_err());
        assert_eq!(Language::ALL.len(), 6);
    }

    #[test]
    fn pos_keeps_adverb_and_adverbe_distinct() {
        assert_eq!("adverb".parse::<PosTag>().unwrap(), PosTag::Adverb);
        assert_eq!("adverbe".parse::<PosTag>().unwrap(), PosTag::Adverbe);
        assert!("noun".parse::<PosTag>().is_err());
    }

    #[test]
    fn score_bounds() {
        assert!(SentimentScore::new(9.0).is_ok());
        assert!(SentimentScore::new(-9.0).is_ok());
        assert!(SentimentScore::new(9.0001).is_err());
        assert!(SentimentScore::new(f64::NAN).is_err());
    }

    #[test]
    fn polarity_band() {
        assert_eq!(Polarity::of(0.0), Polarity::Neutral);
        assert_eq!(Polarity::of(1e-10), Polarity::Neutral);
        assert_eq!(Polarity::of(-1.0), Polarity::Negative);
        assert_eq!(Polarity::of(0.01), Polarity::Positive);
    }

    #[test]
    fn fallback_and_mean() {
        let e = LexiconEntry::new("vouloir", PosTag::Verbe, s(3.0))
            .with_score(Language::French, s(3.0))
            .with_score(Language::English, s(4.0));
        assert_eq!(e.score(Language::Zulu).value(), 3.0);
        assert_eq!(e.score(Language::English).value(), 4.0);
        assert_eq!(e.mean_score(), 3.5);
        let bare = LexiconEntry::new("x", PosTag::Mot, s(-2.0));
        assert_eq!(bare.mean_score(), -2.0);
    }

    #[test]
    fn disambiguation_prefers_mot_then_verbe() {
        let lex = Lexicon::from_unnumbered(vec![
            LexiconEntry::new("a", PosTag::Adjectif, s(1.0)).with_form(Language::English, "run"),
            LexiconEntry::new("b", PosTag::Verbe, s(2.0)).with_form(Language::English, "run"),
            LexiconEntry::new("c", PosTag::Mot, s(3.0)).with_form(Language::English, "run"),
        ]);
        let ids = lex.lookup(Language::English, "Run");
        assert_eq!(ids.len(), 3);
        assert_eq!(lex.disambiguate(ids).unwrap().french(), "c");
        assert_eq!(lex.disambiguate(&ids[..2]).unwrap().french(), "b");
    }

    #[test]
    fn index_tracks_phrase_length() {
        let lex = Lexicon::from_unnumbered(vec![
            LexiconEntry::new("craindre", PosTag::Verbe, s(0.0)).with_form(Language::Sepedi, "go tšhaba"),
            LexiconEntry::new("aller", PosTag::Verbe, s(1.0)).with_form(Language::Sepedi, "go"),
        ]);
        assert_eq!(lex.max_phrase_len(Language::Sepedi), 2);
        assert_eq!(lex.max_phrase_len(Language::French), 1);
        assert_eq!(lex.max_phrase_len(Language::Zulu), 0);
    }

    #[test]
    fn context_dependent_forms_rule() {
        let lex = Lexicon::from_unnumbered(vec![
            LexiconEntry::new("accuser", PosTag::Verbe, s(3.0)).with_form(Language::English, "accuse"),
            LexiconEntry::new("accuser", PosTag::Mot, s(-4.0)).with_form(Language::English, "accuse"),
            LexiconEntry::new("bon", PosTag::Mot, s(2.0)).with_form(Language::English, "good"),
            LexiconEntry::new("bien", PosTag::Mot, s(5.0)).with_form(Language::English, "good"),
        ]);
        assert_eq!(lex.context_dependent_forms(Language::English), vec!["accuse"]);
        assert!(lex.context_dependent_forms(Language::Zulu).is_empty());
    }
}
