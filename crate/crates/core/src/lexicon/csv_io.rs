use std::io::{Read, Write};

use super::{Language, Lexicon, LexiconEntry, LexiconError, PosTag, SentimentScore, EntryId};

pub const HEADER: [&str; 14] = [
    "french", "ciluba", "english", "afrikaans", "sepedi", "zulu", "pos", "score", "score_fr",
    "score_cil", "score_en", "score_af", "score_nso", "score_zu",
];

const POS_COL: usize = 6;
const SCORE_COL: usize = 7;

/// Parses the lexicon CSV. Rows are numbered from 1, header excluded.
/// Forms are kept verbatim; see [`super::clean`] for normalization.
pub fn parse_lexicon<R: Read>(source: R) -> Result<Lexicon, LexiconError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(source);
    let mut records = reader.records();

    let header = match records.next() {
        Some(h) => h.map_err(|e| LexiconError::Csv(e.to_string()))?,
        None => return Ok(Lexicon::default()),
    };
    check_header(&header)?;

    let mut entries = Vec::new();
    for (i, record) in records.enumerate() {
        let row = i + 1;
        let record = record.map_err(|e| LexiconError::Csv(format!("row {row}: {e}")))?;
        let mut entry = parse_row(row, &record)?;
        entry.id = EntryId(i as u32);
        entries.push(entry);
    }
    Ok(Lexicon::from_entries(entries))
}

fn check_header(header: &csv::StringRecord) -> Result<(), LexiconError> {
    for (i, name) in header.iter().enumerate() {
        let name = name.trim().trim_start_matches('\u{feff}').to_lowercase();
        if HEADER.get(i) != Some(&name.as_str()) {
            return Err(LexiconError::UnknownColumn(name));
        }
    }
    if header.len() != HEADER.len() {
        return Err(LexiconError::HeaderLength {
            expected: HEADER.len(),
            found: header.len(),
        });
    }
    Ok(())
}

fn parse_score(row: usize, field: &str, raw: &str) -> Result<Option<SentimentScore>, LexiconError> {
    let raw = raw.trim();
    if raw.is_empty() {
        return Ok(None);
    }
    let value: f64 = raw.parse().map_err(|_| LexiconError::BadNumber {
        row,
        field: field.to_string(),
        value: raw.to_string(),
    })?;
    SentimentScore::new(value)
        .map(Some)
        .map_err(|_| LexiconError::ScoreRange {
            row,
            field: field.to_string(),
            value,
        })
}

fn parse_row(row: usize, record: &csv::StringRecord) -> Result<LexiconEntry, LexiconError> {
    if record.len() != HEADER.len() {
        return Err(LexiconError::ColumnCount {
            row,
            expected: HEADER.len(),
            found: record.len(),
        });
    }
    let french = &record[0];
    if french.is_empty() {
        return Err(LexiconError::MissingFrench { row });
    }
    let pos: PosTag = record[POS_COL]
        .parse()
        .map_err(|_| LexiconError::UnknownPos {
            row,
            value: record[POS_COL].to_string(),
        })?;
    let shared = parse_score(row, "score", &record[SCORE_COL])?.ok_or_else(|| {
        LexiconError::BadNumber {
            row,
            field: "score".into(),
            value: String::new(),
        }
    })?;
    let mut entry = LexiconEntry::new(french, pos, shared);
    for lang in Language::ALL {
        let form = &record[lang.index()];
        entry.set_form(lang, (!form.is_empty()).then(|| form.to_string()));
        let col = SCORE_COL + 1 + lang.index();
        entry.set_score(lang, parse_score(row, HEADER[col], &record[col])?);
    }
    Ok(entry)
}

/// Writes the canonical CSV form of `lex`.
pub fn write_lexicon<W: Write>(lex: &Lexicon, sink: W) -> Result<(), LexiconError> {
    let mut writer = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(sink);
    let err = |e: csv::Error| LexiconError::Csv(e.to_string());
    writer.write_record(HEADER).map_err(err)?;
    for e in lex.entries() {
        let mut row: Vec<String> = Vec::with_capacity(HEADER.len());
        for lang in Language::ALL {
            row.push(e.form(lang).unwrap_or("").to_string());
        }
        row.push(e.pos.name().to_string());
        row.push(e.shared_score.value().to_string());
        for lang in Language::ALL {
            row.push(
                e.explicit_score(lang)
                    .map(|s| s.value().to_string())
                    .unwrap_or_default(),
            );
        }
        writer.write_record(&row).map_err(err)?;
    }
    writer.flush().map_err(|e| LexiconError::Csv(e.to_string()))
}

pub fn serialize_lexicon(lex: &Lexicon) -> String {
    let mut buf = Vec::new();
    write_lexicon(lex, &mut buf).expect("writing to memory");
    String::from_utf8(buf).expect("csv output is utf-8")
}
