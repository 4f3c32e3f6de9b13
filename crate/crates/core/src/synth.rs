//! Seeded synthetic lexicons for demos, tests and benchmarks. The real
//! lexicon is distributed separately; these generators only mimic its shape.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::lexicon::{Language, Lexicon, LexiconEntry, PosTag, SentimentScore};

const SYLLABLES: [&str; 20] = [
    "ka", "mo", "ba", "le", "tu", "si", "na", "ro", "di", "we", "zu", "pa", "go", "ne", "ti", "lu",
    "fa", "ma", "ye", "ko",
];

fn code(mut i: usize) -> String {
    let mut out = String::new();
    loop {
        out.push_str(SYLLABLES[i % SYLLABLES.len()]);
        i /= SYLLABLES.len();
        if i == 0 {
            break;
        }
    }
    out
}

fn score(v: f64) -> SentimentScore {
    SentimentScore::new(v.clamp(-9.0, 9.0)).expect("clamped")
}

/// `n` entries with forms in all six languages (a few missing), a skew
/// toward positive scores, and per-language scores that stay close to the
/// shared score. Forms are unique per language.
pub fn synthetic_lexicon(n: usize, seed: u64) -> Lexicon {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let weights = [1usize, 1, 5, 2, 7, 120, 16, 5, 60];
    let total: usize = weights.iter().sum();
    let entries = (0..n)
        .map(|i| {
            let mut pick = rng.gen_range(0..total);
            let mut pos = PosTag::Mot;
            for (tag, w) in PosTag::ALL.iter().zip(weights) {
                if pick < w {
                    pos = *tag;
                    break;
                }
                pick -= w;
            }
            let shared: f64 = if rng.gen_bool(0.25) {
                0.0
            } else if rng.gen_bool(0.75) {
                rng.gen_range(1..=9) as f64
            } else {
                -(rng.gen_range(1..=9) as f64)
            };
            let mut entry = LexiconEntry::new(
                &format!("{}{}", SYLLABLES[i % 7], code(i)),
                pos,
                score(shared),
            );
            for (li, lang) in Language::ALL.into_iter().enumerate() {
                if lang != Language::French {
                    if rng.gen_bool(0.05) {
                        continue;
                    }
                    let head = SYLLABLES[(li * 3 + i) % SYLLABLES.len()];
                    let form = if lang == Language::Sepedi && rng.gen_bool(0.1) {
                        format!("go {head}{}", code(i))
                    } else {
                        format!("{head}{}", code(i))
                    };
                    entry = entry.with_form(lang, &form);
                }
                if rng.gen_bool(0.9) {
                    let jitter = rng.gen_range(-2..=2) as f64 * 0.25;
                    entry = entry.with_score(lang, score(shared + jitter));
                }
            }
            entry
        })
        .collect();
    Lexicon::from_unnumbered(entries)
}

/// A small English-centred lexicon for contextual experiments: `per_polarity`
/// positive, negative and neutral context words plus `targets` forms that each
/// appear twice, once positive and once negative.
pub fn contextual_lexicon(per_polarity: usize, targets: usize, seed: u64) -> Lexicon {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut entries = Vec::new();
    let mut idx = 0usize;
    let mut push = |entries: &mut Vec<LexiconEntry>, english: String, pos: PosTag, v: f64| {
        entries.push(
            LexiconEntry::new(&format!("fr{}", code(idx)), pos, score(v))
                .with_form(Language::English, &english)
                .with_score(Language::English, score(v)),
        );
        idx += 1;
    };
    for i in 0..per_polarity {
        let v = rng.gen_range(2..=9) as f64;
        push(&mut entries, format!("pos{}", code(i)), PosTag::Mot, v);
        let v = -(rng.gen_range(2..=9) as f64);
        push(&mut entries, format!("neg{}", code(i)), PosTag::Mot, v);
        push(&mut entries, format!("neu{}", code(i)), PosTag::Mot, 0.0);
    }
    let mut target_names: Vec<String> = (0..targets).map(|i| format!("tgt{}", code(i))).collect();
    target_names.shuffle(&mut rng);
    for t in target_names {
        push(&mut entries, t.clone(), PosTag::Verbe, rng.gen_range(1..=6) as f64);
        push(&mut entries, t, PosTag::Mot, -(rng.gen_range(1..=6) as f64));
    }
    Lexicon::from_unnumbered(entries)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_and_clean() {
        let a = synthetic_lexicon(300, 9);
        let b = synthetic_lexicon(300, 9);
        assert_eq!(a.entries(), b.entries());
        assert!(a.validate().is_clean());
        for lang in Language::ALL {
            let forms: std::collections::HashSet<_> =
                a.entries().iter().filter_map(|e| e.form(lang)).collect();
            let count = a.entries().iter().filter(|e| e.form(lang).is_some()).count();
            assert_eq!(forms.len(), count, "{lang} forms collide");
        }
    }

    #[test]
    fn contextual_has_ambiguous_targets() {
        let lex = contextual_lexicon(10, 4, 1);
        assert_eq!(lex.context_dependent_forms(Language::English).len(), 4);
    }
}
