//! Generates a synthetic lexicon, dirties it, cleans it and prints summary
//! statistics. Pass a path to also write the clean lexicon as CSV.

use polylex::lexicon::{compute_eda, serialize_lexicon, Language};
use polylex::synth::synthetic_lexicon;

fn main() -> anyhow::Result<()> {
    let lex = synthetic_lexicon(400, 11);
    let validation = lex.validate();
    println!("{} entries, {} validation issues", validation.entries, validation.issues.len());

    let (clean, report) = lex.clean();
    println!(
        "clean: {} -> {} entries, {} forms rewritten",
        report.entries_before,
        report.entries_after,
        report.modifications.len()
    );

    let eda = compute_eda(&clean).expect("lexicon is not empty");
    println!("polarity counts: {:?}", eda.polarity_counts);
    for (pos, stats) in &eda.per_pos_five_number {
        println!("  {:<16} median {:>5.2}  range [{}, {}]", pos.name(), stats.median, stats.min, stats.max);
    }
    let en = Language::English.index();
    for (i, lang) in eda.languages.iter().enumerate() {
        match eda.cross_language_correlation[en][i] {
            Some(r) => println!("  r(english, {}) = {r:.3}", lang.name()),
            None => println!("  r(english, {}) undefined", lang.name()),
        }
    }

    if let Some(path) = std::env::args().nth(1) {
        std::fs::write(&path, serialize_lexicon(&clean))?;
        println!("wrote {path}");
    }
    Ok(())
}
