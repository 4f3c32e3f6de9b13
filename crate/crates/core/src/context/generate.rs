use std::collections::{BTreeMap, BTreeSet};

use rand::distributions::{Distribution, WeightedIndex};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{parse_marked, ContextError, TargetSentence, CLOSE_MARKER, OPEN_MARKER};
use crate::lexicon::{Language, Lexicon, Polarity};
use crate::text;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeneratorConfig {
    /// Relative label frequencies indexed by [`Polarity::index`].
    pub label_weights: [f64; 3],
    /// Inclusive range of context words before the target.
    pub before: (usize, usize),
    pub after: (usize, usize),
    /// Probability that a context slot of a polar sentence holds a neutral
    /// word instead of a label-matched one.
    pub filler_rate: f64,
}

impl Default for GeneratorConfig {
    fn default() -> Self {
        GeneratorConfig {
            label_weights: [1.0, 1.0, 1.0],
            before: (1, 4),
            after: (1, 4),
            filler_rate: 0.3,
        }
    }
}

/// Single-word forms of `language` grouped by the polarity of their score in
/// that language; forms with more than one polarity are left out. Sorted.
fn pools(lex: &Lexicon, language: Language) -> [Vec<String>; 3] {
    let mut seen: BTreeMap<String, BTreeSet<usize>> = BTreeMap::new();
    for e in lex.entries() {
        let Some(form) = e.form(language).map(text::phrase_key) else { continue };
        if form.is_empty() || form.contains(' ') {
            continue;
        }
        seen.entry(form)
            .or_default()
            .insert(e.score(language).polarity().index());
    }
    let mut pools: [Vec<String>; 3] = Default::default();
    for (form, polarities) in seen {
        if polarities.len() == 1 {
            pools[*polarities.first().expect("non-empty")].push(form);
        }
    }
    pools
}

pub fn generate_dataset(
    lex: &Lexicon,
    language: Language,
    n: usize,
    seed: u64,
) -> Result<Vec<TargetSentence>, ContextError> {
    generate_dataset_with(lex, language, n, seed, &GeneratorConfig::default())
}

/// Template sentences around context-dependent targets. A polar sentence has
/// at least one context word of its label's polarity and none of the
/// opposite one; a neutral sentence has only neutral context words.
pub fn generate_dataset_with(
    lex: &Lexicon,
    language: Language,
    n: usize,
    seed: u64,
    config: &GeneratorConfig,
) -> Result<Vec<TargetSentence>, ContextError> {
    let targets = lex.context_dependent_forms(language);
    if targets.is_empty() {
        return Err(ContextError::NoContextDependentForms(language));
    }
    let pools = pools(lex, language);
    for p in Polarity::ALL {
        let needed = config.label_weights[p.index()] > 0.0
            || (p == Polarity::Neutral && config.filler_rate > 0.0);
        if needed && pools[p.index()].is_empty() {
            return Err(ContextError::EmptyPool(p));
        }
    }
    if n == 0 {
        return Ok(Vec::new());
    }
    let labels = WeightedIndex::new(config.label_weights).map_err(|_| ContextError::NonPositive("label weight sum"))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let neutral = &pools[Polarity::Neutral.index()];

    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        let label = Polarity::from_index(labels.sample(&mut rng)).expect("three weights");
        let target = targets.choose(&mut rng).expect("non-empty");
        let nb = rng.gen_range(config.before.0..=config.before.1);
        let na = rng.gen_range(config.after.0..=config.after.1).max(usize::from(nb == 0));
        let matched = &pools[label.index()];
        let mut slots: Vec<String> = (0..nb + na)
            .map(|_| {
                let pool = if label == Polarity::Neutral || rng.gen_bool(config.filler_rate) {
                    neutral
                } else {
                    matched
                };
                pool.choose(&mut rng).expect("non-empty").clone()
            })
            .collect();
        if label != Polarity::Neutral && !slots.iter().any(|w| matched.binary_search(w).is_ok()) {
            let k = rng.gen_range(0..slots.len());
            slots[k] = matched.choose(&mut rng).expect("non-empty").clone();
        }
        let (before, after) = slots.split_at(nb);
        let mut parts: Vec<String> = before.to_vec();
        parts.push(format!("{OPEN_MARKER} {target} {CLOSE_MARKER}"));
        parts.extend_from_slice(after);
        let text = format!("{}.", parts.join(" "));
        out.push(parse_marked(&text)?.with_label(label));
    }
    Ok(out)
}
