//! Word-level translation with greedy longest-match phrase segmentation.

use polylex::lexicon::{parse_lexicon, Language};
use polylex::translate::translate;

const LEXICON: &str = include_str!("../data/mini_lexicon.csv");

fn main() -> anyhow::Result<()> {
    let lex = parse_lexicon(LEXICON.as_bytes())?;
    let requests = [
        ("Ek vertrou haar", Language::Afrikaans, Language::English),
        ("Go tšhaba go wa.", Language::Sepedi, Language::English),
        ("O rata go letela tše mpe.", Language::Sepedi, Language::English),
        ("Thank you.", Language::English, Language::French),
        ("Thank you.", Language::English, Language::Ciluba),
        ("I want to dance with Josh.", Language::English, Language::French),
    ];
    for (text, from, to) in requests {
        let result = translate(text, from, to, &lex);
        let tokens: Vec<&str> = result.tokens.iter().map(|t| t.surface.as_str()).collect();
        println!(
            "{:<28} {:>9} -> {:<8} {:<32} tokens {:?}, unknown {}",
            text,
            from.name(),
            to.name(),
            result.translated_text,
            tokens,
            result.unknown_count
        );
    }
    Ok(())
}
