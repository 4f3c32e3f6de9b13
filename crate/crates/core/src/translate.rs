//! Greedy longest-match tokenization against the lexicon and word-by-word
//! translation between any two of its languages.

use serde::Serialize;

use crate::lexicon::{EntryId, Language, Lexicon};
use crate::text;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum TokenKind {
    Lexical,
    Unknown,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Token {
    pub surface: String,
    pub kind: TokenKind,
    pub entry_id: Option<EntryId>,
    /// Character offsets `[start, end)` into the normalized sentence.
    pub span: (usize, usize),
    /// Number of entries the surface matched before disambiguation.
    pub candidates: usize,
}

impl Token {
    pub fn is_lexical(&self) -> bool {
        self.kind == TokenKind::Lexical
    }

    fn unknown(surface: String, span: (usize, usize)) -> Self {
        Token {
            surface,
            kind: TokenKind::Unknown,
            entry_id: None,
            span,
            candidates: 0,
        }
    }
}

/// Segments `sentence` left to right, at each position taking the longest
/// run of words (up to the lexicon's longest `language` phrase) that names a
/// lexicon form. Phrases never cross punctuation.
pub fn tokenize(sentence: &str, language: Language, lex: &Lexicon) -> Vec<Token> {
    let normalized = text::normalize(sentence);
    let words = text::words(&normalized);
    let max_len = lex.max_phrase_len(language).max(1);
    let mut tokens = Vec::with_capacity(words.len());
    let mut i = 0;
    while i < words.len() {
        let mut matched = None;
        let mut limit = 1;
        while limit < max_len && i + limit < words.len() && !words[i + limit].after_punctuation {
            limit += 1;
        }
        for len in (1..=limit).rev() {
            let key = words[i..i + len]
                .iter()
                .map(|w| w.text.as_str())
                .collect::<Vec<_>>()
                .join(" ");
            let ids = lex.lookup_key(language, &key);
            if let Some(entry) = lex.disambiguate(ids) {
                matched = Some((len, key, entry.id, ids.len()));
                break;
            }
        }
        let span_of = |len: usize| (words[i].start, words[i + len - 1].end);
        match matched {
            Some((len, key, id, candidates)) => {
                tokens.push(Token {
                    surface: key,
                    kind: TokenKind::Lexical,
                    entry_id: Some(id),
                    span: span_of(len),
                    candidates,
                });
                i += len;
            }
            None => {
                tokens.push(Token::unknown(words[i].text.clone(), span_of(1)));
                i += 1;
            }
        }
    }
    tokens
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TranslationResult {
    pub source_language: Language,
    pub target_language: Language,
    pub source_text: String,
    pub translated_text: String,
    pub tokens: Vec<Token>,
    pub unknown_count: usize,
    /// Indices into `tokens` whose surface matched several entries.
    pub ambiguous_tokens: Vec<usize>,
}

/// Replaces each lexical token by its entry's `dst` form. Tokens whose entry
/// lacks a `dst` form are downgraded to unknown and passed through verbatim.
pub fn translate(sentence: &str, src: Language, dst: Language, lex: &Lexicon) -> TranslationResult {
    let mut tokens = tokenize(sentence, src, lex);
    let mut out: Vec<String> = Vec::with_capacity(tokens.len());
    for token in tokens.iter_mut() {
        if src == dst {
            out.push(token.surface.clone());
            continue;
        }
        let target = token
            .entry_id
            .and_then(|id| lex.get(id))
            .and_then(|e| e.form(dst));
        match target {
            Some(form) => out.push(text::phrase_key(form)),
            None => {
                token.kind = TokenKind::Unknown;
                token.entry_id = None;
                out.push(token.surface.clone());
            }
        }
    }
    let translated_text = if src == dst {
        text::normalize(sentence)
    } else {
        out.join(" ")
    };
    let unknown_count = tokens.iter().filter(|t| !t.is_lexical()).count();
    let ambiguous_tokens = tokens
        .iter()
        .enumerate()
        .filter(|(_, t)| t.candidates > 1)
        .map(|(i, _)| i)
        .collect();
    TranslationResult {
        source_language: src,
        target_language: dst,
        source_text: sentence.to_string(),
        translated_text,
        tokens,
        unknown_count,
        ambiguous_tokens,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, serde::Deserialize, Serialize)]
pub struct TranslationRequest {
    pub sentence: String,
    pub source_language: String,
    pub target_language: String,
}

/// One row of the batch output table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TranslationRow {
    pub sentence: String,
    pub source_language: Language,
    pub target_language: Language,
    pub translated_text: String,
}

/// Reads `sentence,source_language,target_language` rows.
pub fn read_translation_requests<R: std::io::Read>(
    source: R,
) -> Result<Vec<(String, Language, Language)>, BatchError> {
    let mut reader = csv::Reader::from_reader(source);
    let mut rows = Vec::new();
    for (i, rec) in reader.deserialize::<TranslationRequest>().enumerate() {
        let row = i + 1;
        let rec = rec.map_err(|e| BatchError::Csv(format!("row {row}: {e}")))?;
        let src = rec
            .source_language
            .parse()
            .map_err(|_| BatchError::Language { row, value: rec.source_language.clone() })?;
        let dst = rec
            .target_language
            .parse()
            .map_err(|_| BatchError::Language { row, value: rec.target_language.clone() })?;
        rows.push((rec.sentence, src, dst));
    }
    Ok(rows)
}

pub fn translate_batch(rows: &[(String, Language, Language)], lex: &Lexicon) -> Vec<TranslationRow> {
    use rayon::prelude::*;
    rows.par_iter()
        .map(|(sentence, src, dst)| TranslationRow {
            sentence: sentence.clone(),
            source_language: *src,
            target_language: *dst,
            translated_text: translate(sentence, *src, *dst, lex).translated_text,
        })
        .collect()
}

pub fn write_translation_table<W: std::io::Write>(
    rows: &[TranslationRow],
    sink: W,
) -> Result<(), BatchError> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(sink);
    for r in rows {
        w.serialize(r).map_err(|e| BatchError::Csv(e.to_string()))?;
    }
    w.flush().map_err(|e| BatchError::Csv(e.to_string()))
}

#[derive(Debug, thiserror::Error)]
pub enum BatchError {
    #[error("csv: {0}")]
    Csv(String),
    #[error("row {row}: unknown language `{value}`")]
    Language { row: usize, value: String },
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lexicon::{LexiconEntry, PosTag, SentimentScore};
    use proptest::prelude::*;

    fn s(v: f64) -> SentimentScore {
        SentimentScore::new(v).unwrap()
    }

    fn sepedi_lex() -> Lexicon {
        Lexicon::from_unnumbered(vec![
            LexiconEntry::new("craindre", PosTag::Verbe, s(0.0))
                .with_form(Language::Sepedi, "go tšhaba")
                .with_form(Language::English, "to fear"),
            LexiconEntry::new("tomber", PosTag::Verbe, s(-1.0))
                .with_form(Language::Sepedi, "go wa")
                .with_form(Language::English, "to fall"),
            LexiconEntry::new("aller", PosTag::Verbe, s(1.0)).with_form(Language::Sepedi, "go"),
        ])
    }

    #[test]
    fn phrase_tokens() {
        let toks = tokenize("Go tšhaba go wa.", Language::Sepedi, &sepedi_lex());
        let surfaces: Vec<_> = toks.iter().map(|t| t.surface.as_str()).collect();
        assert_eq!(surfaces, vec!["go tšhaba", "go wa"]);
        assert!(toks.iter().all(Token::is_lexical));
        assert_eq!(toks[0].span, (0, 9));
    }

    #[test]
    fn empty_sentence() {
        assert!(tokenize("", Language::English, &sepedi_lex()).is_empty());
    }

    #[test]
    fn longest_match_beats_short_segmentation() {
        let lex = sepedi_lex();
        // The two candidate segmentations of "go tšhaba": [go][tšhaba] leaves
        // "tšhaba" unknown, [go tšhaba] covers everything. Greedy picks the latter.
        let short = lex.lookup(Language::Sepedi, "go").len() + lex.lookup(Language::Sepedi, "tšhaba").len();
        let long = lex.lookup(Language::Sepedi, "go tšhaba").len();
        assert_eq!((short, long), (1, 1));
        let toks = tokenize("go tšhaba", Language::Sepedi, &lex);
        assert_eq!(toks.len(), 1);
        assert_eq!(toks[0].surface, "go tšhaba");
    }

    #[test]
    fn phrases_do_not_cross_punctuation() {
        let toks = tokenize("go, wa", Language::Sepedi, &sepedi_lex());
        assert_eq!(toks.len(), 2);
        assert_eq!(toks[0].surface, "go");
        assert!(!toks[1].is_lexical());
    }

    #[test]
    fn translation_and_passthrough() {
        let lex = sepedi_lex();
        let r = translate("Go tšhaba go wa.", Language::Sepedi, Language::English, &lex);
        assert_eq!(r.translated_text, "to fear to fall");
        assert_eq!(r.unknown_count, 0);

        let r = translate("xyzzy", Language::English, Language::Zulu, &lex);
        assert_eq!(r.translated_text, "xyzzy");
        assert_eq!(r.unknown_count, 1);

        // "go" has no english form: downgraded to unknown
        let r = translate("go", Language::Sepedi, Language::English, &lex);
        assert_eq!(r.translated_text, "go");
        assert_eq!(r.unknown_count, 1);
        assert_eq!(r.tokens[0].entry_id, None);
    }

    #[test]
    fn identity_translation_returns_normalized_input() {
        let r = translate("Go Wa!", Language::Sepedi, Language::Sepedi, &sepedi_lex());
        assert_eq!(r.translated_text, "go wa!");
    }

    #[test]
    fn ambiguity_reported() {
        let lex = Lexicon::from_unnumbered(vec![
            LexiconEntry::new("accuser", PosTag::Verbe, s(3.0)).with_form(Language::English, "accuse"),
            LexiconEntry::new("accusation", PosTag::Mot, s(-4.0)).with_form(Language::English, "accuse"),
        ]);
        let r = translate("accuse", Language::English, Language::French, &lex);
        assert_eq!(r.translated_text, "accusation");
        assert_eq!(r.ambiguous_tokens, vec![0]);
    }

    #[test]
    fn batch_table_layout() {
        let lex = sepedi_lex();
        let rows = read_translation_requests(
            "sentence,source_language,target_language\nGo tšhaba go wa.,sepedi,english\n".as_bytes(),
        )
        .unwrap();
        let out = translate_batch(&rows, &lex);
        let mut buf = Vec::new();
        write_translation_table(&out, &mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "sentence,source_language,target_language,translated_text\nGo tšhaba go wa.,sepedi,english,to fear to fall\n"
        );
        assert!(read_translation_requests("sentence,source_language,target_language\nx,klingon,english\n".as_bytes()).is_err());
    }

    proptest! {
        #[test]
        fn spans_reconstruct_source(words in proptest::collection::vec("[a-z]{1,6}", 0..8)) {
            let lex = crate::synth::synthetic_lexicon(40, 2);
            let sentence = words.join(" ");
            let toks = tokenize(&sentence, Language::Sepedi, &lex);
            let chars: Vec<char> = sentence.chars().collect();
            let mut last = 0;
            for t in &toks {
                prop_assert!(t.span.0 >= last && t.span.1 > t.span.0);
                let slice: String = chars[t.span.0..t.span.1].iter().collect();
                prop_assert_eq!(&slice, &t.surface);
                last = t.span.1;
            }
            let rebuilt: Vec<String> = toks.iter().map(|t| t.surface.clone()).collect();
            prop_assert_eq!(rebuilt.join(" "), sentence);
        }

        #[test]
        fn round_trip_single_forms(i in 0usize..60) {
            let lex = crate::synth::synthetic_lexicon(60, 5);
            let e = &lex.entries()[i];
            if let (Some(zu), Some(_)) = (e.form(Language::Zulu), e.form(Language::Afrikaans)) {
                let there = translate(zu, Language::Zulu, Language::Afrikaans, &lex);
                let back = translate(&there.translated_text, Language::Afrikaans, Language::Zulu, &lex);
                prop_assert_eq!(back.translated_text, zu.to_string());
                prop_assert!(there.tokens.len() <= tokenize(zu, Language::Zulu, &lex).len());
            }
        }
    }
}
