//! Target-word sentiment classification: marked-sentence parsing, a small
//! embedding classifier over the target and its window, class-weighted
//! training and evaluation.

mod generate;
mod model;

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lexicon::{Language, Polarity};
use crate::split::stratified_partition;
use crate::text;

pub use generate::{generate_dataset, generate_dataset_with, GeneratorConfig};
pub use model::{
    evaluate, train, ContextEvaluation, ContextModel, EpochRecord, Gradient, ModelConfig, OutputKind,
    TrainConfig, CONTEXT_FORMAT_VERSION,
};

pub const OPEN_MARKER: &str = "[TARGET]";
pub const CLOSE_MARKER: &str = "[/TARGET]";
pub const N_CLASSES: usize = 3;

#[derive(Debug, Error)]
pub enum ContextError {
    #[error("no [TARGET] ... [/TARGET] span found")]
    NoMarkers,
    #[error("expected exactly one marker pair, found {opens} opening and {closes} closing markers")]
    MultipleMarkers { opens: usize, closes: usize },
    #[error("[/TARGET] appears before [TARGET]")]
    Unbalanced,
    #[error("target span is empty")]
    EmptyTarget,
    #[error("lexicon has no context-dependent forms for {0}")]
    NoContextDependentForms(Language),
    #[error("lexicon has no single-word {0} context forms")]
    EmptyPool(Polarity),
    #[error("training set is empty")]
    EmptyTrainSet,
    #[error("test set is empty")]
    EmptyTestSet,
    #[error("{0} must be at least 1")]
    NonPositive(&'static str),
    #[error("sentence {0} has no label")]
    Unlabeled(usize),
    #[error("need at least 10 items to split, got {0}")]
    TooFewItems(usize),
    #[error("corpus line {line}: {message}")]
    Corpus { line: usize, message: String },
    #[error("unsupported model format version {0}")]
    Version(u32),
    #[error("input has {found} token embeddings of width {width}, expected {expected} of width {dim}")]
    InputShape { expected: usize, found: usize, dim: usize, width: usize },
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

/// Numerically stable softmax; the result sums to 1.
pub fn softmax(logits: &[f64]) -> Vec<f64> {
    let max = logits.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let exp: Vec<f64> = logits.iter().map(|l| (l - max).exp()).collect();
    let z: f64 = exp.iter().sum();
    exp.into_iter().map(|e| e / z).collect()
}

/// A sentence with exactly one marked target. `tokens` holds the context
/// words with the whole target span as a single token at `target_index`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TargetSentence {
    pub text: String,
    pub target: String,
    pub tokens: Vec<String>,
    pub target_index: usize,
    pub label: Option<Polarity>,
}

fn find_all(haystack: &str, needle: &str) -> Vec<usize> {
    haystack.match_indices(needle).map(|(i, _)| i).collect()
}

/// Parses a sentence with one case-insensitive `[TARGET] ... [/TARGET]` pair.
/// Words are lower-cased with punctuation stripped.
pub fn parse_marked(text: &str) -> Result<TargetSentence, ContextError> {
    // ASCII lowering keeps byte offsets aligned with `text`
    let lower = text.to_ascii_lowercase();
    let opens = find_all(&lower, &OPEN_MARKER.to_ascii_lowercase());
    let closes = find_all(&lower, &CLOSE_MARKER.to_ascii_lowercase());
    match (opens.len(), closes.len()) {
        (0, 0) => return Err(ContextError::NoMarkers),
        (1, 1) => {}
        (o, c) => return Err(ContextError::MultipleMarkers { opens: o, closes: c }),
    }
    let (open, close) = (opens[0], closes[0]);
    if close < open {
        return Err(ContextError::Unbalanced);
    }
    let target = text::simple_tokens(&text[open + OPEN_MARKER.len()..close]).join(" ");
    if target.is_empty() {
        return Err(ContextError::EmptyTarget);
    }
    let mut tokens = text::simple_tokens(&text[..open]);
    let target_index = tokens.len();
    tokens.push(target.clone());
    tokens.extend(text::simple_tokens(&text[close + CLOSE_MARKER.len()..]));
    Ok(TargetSentence {
        text: text.to_string(),
        target,
        tokens,
        target_index,
        label: None,
    })
}

impl TargetSentence {
    pub fn with_label(mut self, label: Polarity) -> Self {
        self.label = Some(label);
        self
    }

    /// Context words after the target.
    pub fn tokens_after(&self) -> &[String] {
        &self.tokens[self.target_index + 1..]
    }

    pub fn tokens_before(&self) -> &[String] {
        &self.tokens[..self.target_index]
    }
}

/// Token to dense id map. Ids 0..4 are the reserved specials; the remaining
/// tokens follow in sorted order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(from = "Vec<String>", into = "Vec<String>")]
pub struct Vocabulary {
    tokens: Vec<String>,
    ids: HashMap<String, usize>,
}

impl Vocabulary {
    pub const UNK: usize = 0;
    pub const PAD: usize = 1;
    pub const TARGET_OPEN: usize = 2;
    pub const TARGET_CLOSE: usize = 3;
    pub const SPECIALS: [&'static str; 4] = ["<unk>", "<pad>", OPEN_MARKER, CLOSE_MARKER];

    pub fn build<'a>(sentences: impl IntoIterator<Item = &'a TargetSentence>) -> Vocabulary {
        let mut words: Vec<String> = sentences
            .into_iter()
            .flat_map(|s| s.tokens.iter().cloned())
            .filter(|t| !Self::SPECIALS.contains(&t.as_str()))
            .collect();
        words.sort();
        words.dedup();
        let tokens: Vec<String> = Self::SPECIALS.iter().map(|s| s.to_string()).chain(words).collect();
        Vocabulary::from(tokens)
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    /// Unknown tokens map to [`Vocabulary::UNK`].
    pub fn id(&self, token: &str) -> usize {
        self.ids.get(token).copied().unwrap_or(Self::UNK)
    }

    pub fn token(&self, id: usize) -> Option<&str> {
        self.tokens.get(id).map(String::as_str)
    }
}

impl From<Vec<String>> for Vocabulary {
    fn from(tokens: Vec<String>) -> Self {
        let ids = tokens.iter().enumerate().map(|(i, t)| (t.clone(), i)).collect();
        Vocabulary { tokens, ids }
    }
}

impl From<Vocabulary> for Vec<String> {
    fn from(v: Vocabulary) -> Self {
        v.tokens
    }
}

/// Per-class loss multipliers indexed by [`Polarity::index`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassWeights {
    pub weights: [f64; N_CLASSES],
}

impl ClassWeights {
    pub fn uniform() -> Self {
        ClassWeights { weights: [1.0; N_CLASSES] }
    }

    /// `N / (K * n_c)`; classes absent from `labels` get 1.
    pub fn inverse_frequency(labels: &[Polarity]) -> Self {
        let mut counts = [0usize; N_CLASSES];
        for l in labels {
            counts[l.index()] += 1;
        }
        let n = labels.len() as f64;
        let mut weights = [1.0; N_CLASSES];
        for (w, &c) in weights.iter_mut().zip(&counts) {
            if c > 0 {
                *w = n / (N_CLASSES as f64 * c as f64);
            }
        }
        ClassWeights { weights }
    }

    pub fn get(&self, class: Polarity) -> f64 {
        self.weights[class.index()]
    }
}

impl fmt::Display for ClassWeights {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = Polarity::ALL
            .iter()
            .map(|p| format!("{}={}", p, self.weights[p.index()]))
            .collect();
        write!(f, "{}", parts.join(" "))
    }
}

/// Stratified 70:20:10 partition.
#[derive(Debug, Clone, PartialEq)]
pub struct CorpusSplit {
    pub train: Vec<TargetSentence>,
    pub validation: Vec<TargetSentence>,
    pub test: Vec<TargetSentence>,
    /// Polarity classes with no labeled item.
    pub absent_classes: Vec<Polarity>,
}

pub fn split_70_20_10(data: &[TargetSentence], seed: u64) -> Result<CorpusSplit, ContextError> {
    if data.len() < 10 {
        return Err(ContextError::TooFewItems(data.len()));
    }
    let labels = labels_of(data)?;
    let idx: Vec<usize> = labels.iter().map(|l| l.index()).collect();
    let parts = stratified_partition(&idx, &[0.7, 0.2, 0.1], seed);
    let take = |rows: &[usize]| rows.iter().map(|&i| data[i].clone()).collect::<Vec<_>>();
    let absent_classes = Polarity::ALL
        .into_iter()
        .filter(|p| !labels.contains(p))
        .collect();
    Ok(CorpusSplit {
        train: take(&parts[0]),
        validation: take(&parts[1]),
        test: take(&parts[2]),
        absent_classes,
    })
}

pub(crate) fn labels_of(data: &[TargetSentence]) -> Result<Vec<Polarity>, ContextError> {
    data.iter()
        .enumerate()
        .map(|(i, s)| s.label.ok_or(ContextError::Unlabeled(i)))
        .collect()
}

/// One `marked_sentence<TAB>label` line per sentence.
pub fn write_corpus(data: &[TargetSentence]) -> String {
    let mut out = String::new();
    for s in data {
        let label = s.label.map_or("", |l| l.name());
        out += &format!("{}\t{}\n", s.text, label);
    }
    out
}

/// Blank lines are skipped; line numbers are 1-based.
pub fn read_corpus(source: &str) -> Result<Vec<TargetSentence>, ContextError> {
    let mut out = Vec::new();
    for (i, line) in source.lines().enumerate() {
        let line_no = i + 1;
        if line.trim().is_empty() {
            continue;
        }
        let corpus_err = |message: String| ContextError::Corpus { line: line_no, message };
        let (text, label) = line
            .rsplit_once('\t')
            .ok_or_else(|| corpus_err("missing tab-separated label".into()))?;
        let label: Polarity = label.trim().parse().map_err(|_| corpus_err(format!("bad label {label:?}")))?;
        let sentence = parse_marked(text).map_err(|e| corpus_err(e.to_string()))?;
        out.push(sentence.with_label(label));
    }
    Ok(out)
}

#[cfg(test)]
mod tests;
