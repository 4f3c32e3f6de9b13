use std::collections::BTreeMap;

use serde::Serialize;

use super::{Language, Lexicon, Polarity, PosTag};

/// 19 unit-width bins centred on the integers -9..=9.
pub const HISTOGRAM_BINS: usize = 19;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FiveNumber {
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub max: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EdaReport {
    pub entries: usize,
    pub polarity_counts: BTreeMap<Polarity, usize>,
    pub pos_by_polarity: BTreeMap<PosTag, BTreeMap<Polarity, usize>>,
    /// Bin centres -9..=9, shared by every histogram.
    pub histogram_centres: Vec<i32>,
    /// Counts of the explicitly recorded per-language scores.
    pub per_language_histograms: BTreeMap<Language, Vec<usize>>,
    pub languages: Vec<Language>,
    /// Pearson r over entries carrying explicit scores for both languages;
    /// `None` where fewer than two pairs exist or a column is constant.
    pub cross_language_correlation: Vec<Vec<Option<f64>>>,
    pub per_pos_five_number: BTreeMap<PosTag, FiveNumber>,
}

fn bin_of(score: f64) -> usize {
    ((score + 9.5).floor().max(0.0) as usize).min(HISTOGRAM_BINS - 1)
}

/// Pearson correlation coefficient. `None` for fewer than two points or zero
/// variance in either input.
pub fn pearson(x: &[f64], y: &[f64]) -> Option<f64> {
    assert_eq!(x.len(), y.len(), "pearson inputs must have equal length");
    let n = x.len();
    if n < 2 {
        return None;
    }
    let mx = x.iter().sum::<f64>() / n as f64;
    let my = y.iter().sum::<f64>() / n as f64;
    let (mut sxx, mut syy, mut sxy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return None;
    }
    Some((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}

fn quantile(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

fn five_number(mut values: Vec<f64>) -> FiveNumber {
    values.sort_by(f64::total_cmp);
    FiveNumber {
        min: values[0],
        q1: quantile(&values, 0.25),
        median: quantile(&values, 0.5),
        q3: quantile(&values, 0.75),
        max: values[values.len() - 1],
    }
}

/// Exploratory statistics over a lexicon. Returns `None` for an empty one.
pub fn compute_eda(lex: &Lexicon) -> Option<EdaReport> {
    if lex.is_empty() {
        return None;
    }
    let mut polarity_counts: BTreeMap<Polarity, usize> =
        Polarity::ALL.iter().map(|&p| (p, 0)).collect();
    let mut pos_by_polarity: BTreeMap<PosTag, BTreeMap<Polarity, usize>> = BTreeMap::new();
    let mut per_pos_scores: BTreeMap<PosTag, Vec<f64>> = BTreeMap::new();
    let mut histograms: BTreeMap<Language, Vec<usize>> = Language::ALL
        .iter()
        .map(|&l| (l, vec![0; HISTOGRAM_BINS]))
        .collect();

    for e in lex.entries() {
        let pol = e.polarity();
        *polarity_counts.get_mut(&pol).unwrap() += 1;
        *pos_by_polarity
            .entry(e.pos)
            .or_insert_with(|| Polarity::ALL.iter().map(|&p| (p, 0)).collect())
            .get_mut(&pol)
            .unwrap() += 1;
        per_pos_scores.entry(e.pos).or_default().push(e.shared_score.value());
        for lang in Language::ALL {
            if let Some(s) = e.explicit_score(lang) {
                histograms.get_mut(&lang).unwrap()[bin_of(s.value())] += 1;
            }
        }
    }

    let correlation = Language::ALL
        .iter()
        .map(|&a| {
            Language::ALL
                .iter()
                .map(|&b| {
                    let (xs, ys): (Vec<f64>, Vec<f64>) = lex
                        .entries()
                        .iter()
                        .filter_map(|e| Some((e.explicit_score(a)?.value(), e.explicit_score(b)?.value())))
                        .unzip();
                    pearson(&xs, &ys)
                })
                .collect()
        })
        .collect();

    Some(EdaReport {
        entries: lex.len(),
        polarity_counts,
        pos_by_polarity,
        histogram_centres: (-9..=9).collect(),
        per_language_histograms: histograms,
        languages: Language::ALL.to_vec(),
        cross_language_correlation: correlation,
        per_pos_five_number: per_pos_scores
            .into_iter()
            .map(|(p, v)| (p, five_number(v)))
            .collect(),
    })
}
