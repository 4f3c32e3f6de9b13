//! Sentence scoring in both modes next to the built-in English baseline.

use polylex::lexicon::{parse_lexicon, Language};
use polylex::score::{builtin_english_baseline, score_sentence, ScoreMode};

const LEXICON: &str = include_str!("../data/mini_lexicon.csv");

fn main() -> anyhow::Result<()> {
    let lex = parse_lexicon(LEXICON.as_bytes())?;
    let sentences = [
        ("I am happy today.", Language::English),
        ("Have you eaten?", Language::English),
        ("Ke motho le go tšhaba kotlo.", Language::Sepedi),
        ("Go tšhaba go wa.", Language::Sepedi),
        ("uthanda izinto ezimbi", Language::Zulu),
    ];
    for (text, language) in sentences {
        let avg = score_sentence(text, language, &lex, ScoreMode::Avg);
        let v2 = score_sentence(text, language, &lex, ScoreMode::V2);
        println!("{text} ({})", language.name());
        println!("  avg {:>8.4} {:<9} {}", avg.total_score, avg.polarity.name(), avg.word_scores_string());
        println!("  v2  {:>8.4} {:<9} {}", v2.total_score, v2.polarity.name(), v2.word_scores_string());
        if language == Language::English {
            let (compound, polarity) = builtin_english_baseline(text);
            println!("  baseline compound {compound:.4} {}", polarity.name());
        }
    }
    Ok(())
}
