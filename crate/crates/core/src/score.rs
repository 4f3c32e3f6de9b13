//! Sentence scoring from lexicon word scores, plus a comparison harness
//! against a pluggable baseline scorer.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use crate::lexicon::{Language, Lexicon, Polarity};
use crate::translate::tokenize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ScoreMode {
    /// Mean of the entry's recorded per-language scores.
    Avg,
    /// The entry's score for the sentence's language.
    V2,
}

impl FromStr for ScoreMode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_lowercase().as_str() {
            "avg" => Ok(ScoreMode::Avg),
            "v2" => Ok(ScoreMode::V2),
            other => Err(format!("unknown score mode `{other}` (expected avg or v2)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScoredSentence {
    pub sentence: String,
    pub language: Language,
    pub mode: ScoreMode,
    pub word_scores: Vec<(String, f64)>,
    /// Plain sum of the word scores; may exceed 9 in magnitude.
    pub total_score: f64,
    pub polarity: Polarity,
}

impl ScoredSentence {
    /// `form:score; form:score`
    pub fn word_scores_string(&self) -> String {
        format_word_scores(&self.word_scores)
    }
}

pub fn format_word_scores(scores: &[(String, f64)]) -> String {
    scores
        .iter()
        .map(|(w, s)| format!("{w}:{s}"))
        .collect::<Vec<_>>()
        .join("; ")
}

pub fn score_sentence(sentence: &str, language: Language, lex: &Lexicon, mode: ScoreMode) -> ScoredSentence {
    let word_scores: Vec<(String, f64)> = tokenize(sentence, language, lex)
        .into_iter()
        .map(|t| {
            let score = t
                .entry_id
                .and_then(|id| lex.get(id))
                .map(|e| match mode {
                    ScoreMode::Avg => e.mean_score(),
                    ScoreMode::V2 => e.score(language).value(),
                })
                .unwrap_or(0.0);
            (t.surface, score)
        })
        .collect();
    let total_score: f64 = word_scores.iter().map(|(_, s)| s).sum();
    ScoredSentence {
        sentence: sentence.to_string(),
        language,
        mode,
        polarity: Polarity::of(total_score),
        word_scores,
        total_score,
    }
}

/// Anything mapping a sentence to a compound score in [-1, 1] and a polarity.
pub trait BaselineScorer: Sync {
    fn score(&self, sentence: &str) -> (f64, Polarity);
}

impl<F> BaselineScorer for F
where
    F: Fn(&str) -> (f64, Polarity) + Sync,
{
    fn score(&self, sentence: &str) -> (f64, Polarity) {
        self(sentence)
    }
}

/// Built-in English valence list used by [`builtin_english_baseline`].
pub const ENGLISH_VALENCE: &[(&str, f64)] = &[
    ("good", 1.9), ("great", 3.1), ("happy", 2.7), ("love", 3.2), ("like", 1.5),
    ("nice", 1.8), ("best", 3.2), ("better", 1.9), ("fun", 2.3), ("joy", 2.8),
    ("glad", 2.0), ("thank", 1.5), ("thanks", 1.9), ("care", 2.2), ("caring", 2.2),
    ("trust", 2.3), ("important", 0.8), ("hope", 1.9), ("enjoy", 2.2), ("beautiful", 2.9),
    ("excellent", 2.7), ("wonderful", 2.7), ("kind", 2.4), ("friend", 2.2), ("safe", 1.9),
    ("win", 2.8), ("smile", 1.5), ("peace", 2.5), ("help", 1.7), ("want", 0.3),
    ("bad", -2.5), ("sad", -2.1), ("hate", -2.7), ("fear", -2.2), ("fall", -0.9),
    ("angry", -2.3), ("terrible", -2.1), ("awful", -2.0), ("worst", -3.1), ("pain", -2.3),
    ("cry", -2.1), ("hurt", -2.4), ("poor", -2.1), ("ugly", -2.3), ("accuse", -1.9),
    ("kill", -3.7), ("lost", -1.3), ("lose", -1.6), ("sick", -2.3), ("wrong", -2.1),
    ("problem", -1.7), ("fail", -2.3), ("danger", -2.4), ("afraid", -2.0), ("worry", -1.9),
    ("badly", -2.1), ("punishment", -2.2), ("guilty", -1.8), ("lonely", -1.6), ("weak", -1.9),
];

const BASELINE_ALPHA: f64 = 15.0;
const BASELINE_THRESHOLD: f64 = 0.05;

/// Sums built-in English valences, maps the sum through x/sqrt(x^2 + 15), and
/// classifies with thresholds +/-0.05.
pub fn builtin_english_baseline(sentence: &str) -> (f64, Polarity) {
    let sum: f64 = sentence
        .to_lowercase()
        .split(|c: char| !(c.is_alphabetic() || c == '\''))
        .filter_map(|w| ENGLISH_VALENCE.iter().find(|(k, _)| *k == w).map(|(_, v)| v))
        .sum();
    let compound = if sum == 0.0 {
        0.0
    } else {
        sum / (sum * sum + BASELINE_ALPHA).sqrt()
    };
    let polarity = if compound >= BASELINE_THRESHOLD {
        Polarity::Positive
    } else if compound <= -BASELINE_THRESHOLD {
        Polarity::Negative
    } else {
        Polarity::Neutral
    };
    (compound, polarity)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonRow {
    pub sentence: String,
    pub language: Language,
    pub total_score_avg: f64,
    pub word_scores_avg: String,
    pub sentiment_avg: Polarity,
    pub total_score_v2: f64,
    pub word_scores_v2: String,
    pub sentiment_v2: Polarity,
    pub baseline_compound: f64,
    pub baseline_sentiment: Polarity,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonReport {
    pub rows: Vec<ComparisonRow>,
    /// Fraction of rows where the v2 polarity equals the baseline polarity;
    /// 0 for an empty batch.
    pub agreement: f64,
    pub polarity_counts: BTreeMap<String, BTreeMap<Polarity, usize>>,
}

/// Scores every row in both modes and with the baseline. Output order equals
/// input order.
pub fn score_batch(rows: &[(String, Language)], lex: &Lexicon, baseline: &dyn BaselineScorer) -> ComparisonReport {
    let out: Vec<ComparisonRow> = rows
        .par_iter()
        .map(|(sentence, language)| {
            let avg = score_sentence(sentence, *language, lex, ScoreMode::Avg);
            let v2 = score_sentence(sentence, *language, lex, ScoreMode::V2);
            let (compound, bpol) = baseline.score(sentence);
            ComparisonRow {
                sentence: sentence.clone(),
                language: *language,
                total_score_avg: avg.total_score,
                word_scores_avg: avg.word_scores_string(),
                sentiment_avg: avg.polarity,
                total_score_v2: v2.total_score,
                word_scores_v2: v2.word_scores_string(),
                sentiment_v2: v2.polarity,
                baseline_compound: compound,
                baseline_sentiment: bpol,
            }
        })
        .collect();

    let agree = out.iter().filter(|r| r.sentiment_v2 == r.baseline_sentiment).count();
    let agreement = if out.is_empty() { 0.0 } else { agree as f64 / out.len() as f64 };
    let mut polarity_counts = BTreeMap::new();
    for (name, pick) in [
        ("avg", (|r: &ComparisonRow| r.sentiment_avg) as fn(&ComparisonRow) -> Polarity),
        ("v2", |r| r.sentiment_v2),
        ("baseline", |r| r.baseline_sentiment),
    ] {
        let mut counts: BTreeMap<Polarity, usize> = Polarity::ALL.iter().map(|&p| (p, 0)).collect();
        for r in &out {
            *counts.get_mut(&pick(r)).unwrap() += 1;
        }
        polarity_counts.insert(name.to_string(), counts);
    }
    ComparisonReport {
        rows: out,
        agreement,
        polarity_counts,
    }
}

/// A baseline that always answers neutral with compound 0.
pub fn null_baseline(_: &str) -> (f64, Polarity) {
    (0.0, Polarity::Neutral)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BaselineKind {
    Builtin,
    None,
}

impl FromStr for BaselineKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "builtin" => Ok(BaselineKind::Builtin),
            "none" => Ok(BaselineKind::None),
            other => Err(format!("unknown baseline `{other}` (expected builtin or none)")),
        }
    }
}

impl fmt::Display for BaselineKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BaselineKind::Builtin => "builtin",
            BaselineKind::None => "none",
        })
    }
}

impl BaselineKind {
    pub fn scorer(self) -> fn(&str) -> (f64, Polarity) {
        match self {
            BaselineKind::Builtin => builtin_english_baseline,
            BaselineKind::None => null_baseline,
        }
    }
}

/// Reads `sentence,language` rows.
pub fn read_score_requests<R: std::io::Read>(source: R) -> Result<Vec<(String, Language)>, crate::translate::BatchError> {
    use crate::translate::BatchError;
    #[derive(serde::Deserialize)]
    struct Row {
        sentence: String,
        language: String,
    }
    let mut reader = csv::Reader::from_reader(source);
    let mut out = Vec::new();
    for (i, rec) in reader.deserialize::<Row>().enumerate() {
        let row = i + 1;
        let rec = rec.map_err(|e| BatchError::Csv(format!("row {row}: {e}")))?;
        let lang = rec
            .language
            .parse()
            .map_err(|_| BatchError::Language { row, value: rec.language.clone() })?;
        out.push((rec.sentence, lang));
    }
    Ok(out)
}

pub fn write_comparison_table<W: std::io::Write>(
    report: &ComparisonReport,
    sink: W,
) -> Result<(), crate::translate::BatchError> {
    let err = |e: csv::Error| crate::translate::BatchError::Csv(e.to_string());
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(sink);
    for r in &report.rows {
        w.serialize(r).map_err(err)?;
    }
    w.flush().map_err(|e| crate::translate::BatchError::Csv(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lexicon::{LexiconEntry, PosTag, SentimentScore};
    use proptest::prelude::*;

    fn s(v: f64) -> SentimentScore {
        SentimentScore::new(v).unwrap()
    }

    fn english() -> Lexicon {
        Lexicon::from_unnumbered(vec![
            LexiconEntry::new("je", PosTag::Pronompersonnel, s(0.0))
                .with_form(Language::English, "i")
                .with_score(Language::English, s(0.0)),
            LexiconEntry::new("vouloir", PosTag::Verbe, s(3.5))
                .with_form(Language::English, "want")
                .with_score(Language::French, s(3.0))
                .with_score(Language::English, s(4.0)),
            LexiconEntry::new("aliment", PosTag::Mot, s(3.0))
                .with_form(Language::English, "food")
                .with_score(Language::English, s(3.0)),
        ])
    }

    #[test]
    fn avg_and_v2_totals() {
        let lex = english();
        let avg = score_sentence("i want food", Language::English, &lex, ScoreMode::Avg);
        assert_eq!(avg.total_score, 6.5);
        assert_eq!(avg.polarity, Polarity::Positive);
        assert_eq!(avg.word_scores_string(), "i:0; want:3.5; food:3");
        let v2 = score_sentence("I want food.", Language::English, &lex, ScoreMode::V2);
        assert_eq!(v2.total_score, 7.0);
    }

    #[test]
    fn empty_and_unknown_sentences_neutral() {
        let lex = english();
        let e = score_sentence("", Language::Zulu, &lex, ScoreMode::Avg);
        assert_eq!((e.total_score, e.polarity), (0.0, Polarity::Neutral));
        assert!(e.word_scores.is_empty());
        let u = score_sentence("qwer tyui", Language::English, &lex, ScoreMode::V2);
        assert_eq!((u.total_score, u.polarity), (0.0, Polarity::Neutral));
        assert_eq!(u.word_scores.len(), 2);
    }

    #[test]
    fn baseline_examples() {
        assert_eq!(builtin_english_baseline(""), (0.0, Polarity::Neutral));
        assert_eq!(builtin_english_baseline("go tšhaba go wa"), (0.0, Polarity::Neutral));
        let (c, p) = builtin_english_baseline("happy happy happy");
        let expected = 8.1 / (8.1f64 * 8.1 + 15.0).sqrt();
        assert!((c - expected).abs() < 1e-12);
        assert!((c - 0.902).abs() < 1e-3);
        assert_eq!(p, Polarity::Positive);
    }

    #[test]
    fn batch_against_self_agrees() {
        let lex = english();
        let rows = vec![("i want food".to_string(), Language::English), ("qq".to_string(), Language::English)];
        let lex2 = lex.clone();
        let v2_baseline = move |s: &str| {
            let r = score_sentence(s, Language::English, &lex2, ScoreMode::V2);
            (r.total_score.clamp(-1.0, 1.0), r.polarity)
        };
        let report = score_batch(&rows, &lex, &v2_baseline);
        assert_eq!(report.agreement, 1.0);
        assert_eq!(report.rows[0].sentence, "i want food");
        assert_eq!(report.polarity_counts["v2"].values().sum::<usize>(), 2);
    }

    #[test]
    fn comparison_csv_header() {
        let report = score_batch(&[("i want food".into(), Language::English)], &english(), &null_baseline);
        let mut buf = Vec::new();
        write_comparison_table(&report, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with(
            "sentence,language,total_score_avg,word_scores_avg,sentiment_avg,total_score_v2,word_scores_v2,sentiment_v2,baseline_compound,baseline_sentiment\n"
        ));
        assert!(text.contains("i:0; want:3.5; food:3"));
    }

    proptest! {
        #[test]
        fn negation_flips_polarity(idx in proptest::collection::vec(0usize..80, 0..6), avg in any::<bool>()) {
            let lex = crate::synth::synthetic_lexicon(80, 11);
            let neg = lex.negated();
            let mode = if avg { ScoreMode::Avg } else { ScoreMode::V2 };
            let sentence = idx.iter().filter_map(|&i| lex.entries()[i].form(Language::Zulu)).collect::<Vec<_>>().join(" ");
            let a = score_sentence(&sentence, Language::Zulu, &lex, mode);
            let b = score_sentence(&sentence, Language::Zulu, &neg, mode);
            prop_assert!((a.total_score + b.total_score).abs() < 1e-12);
            prop_assert_eq!(a.polarity.flipped(), b.polarity);
        }

        #[test]
        fn modes_agree_when_scores_uniform(idx in proptest::collection::vec(0usize..50, 0..6)) {
            let base = crate::synth::synthetic_lexicon(50, 4);
            let uniform = Lexicon::from_entries(base.entries().iter().map(|e| {
                let mut e = e.clone();
                for l in Language::ALL { e.set_score(l, Some(e.shared_score)); }
                e
            }).collect());
            let sentence = idx.iter().filter_map(|&i| uniform.entries()[i].form(Language::English)).collect::<Vec<_>>().join(" ");
            let a = score_sentence(&sentence, Language::English, &uniform, ScoreMode::Avg);
            let b = score_sentence(&sentence, Language::English, &uniform, ScoreMode::V2);
            prop_assert_eq!(a.word_scores, b.word_scores);
            prop_assert_eq!(a.total_score, b.total_score);
        }

        #[test]
        fn additivity(a in proptest::collection::vec(0usize..50, 0..5), b in proptest::collection::vec(0usize..50, 0..5)) {
            let lex = crate::synth::synthetic_lexicon(50, 6);
            // punctuation between the halves forbids cross-boundary phrases
            let join = |ix: &[usize]| ix.iter().filter_map(|&i| lex.entries()[i].form(Language::English)).collect::<Vec<_>>().join(" ");
            let (s1, s2) = (join(&a), join(&b));
            let both = format!("{s1}. {s2}");
            let t = |s: &str| score_sentence(s, Language::English, &lex, ScoreMode::V2).total_score;
            prop_assert!((t(&both) - (t(&s1) + t(&s2))).abs() < 1e-9);
        }

        #[test]
        fn baseline_compound_bounded(s in ".{0,60}") {
            let (c, _) = builtin_english_baseline(&s);
            prop_assert!((-1.0..=1.0).contains(&c));
        }
    }
}
