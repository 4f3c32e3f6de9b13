//! Integrated Gradients: path attributions along the straight line from a
//! baseline to the input, with a completeness diagnostic.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::context::{ContextError, ContextModel, OutputKind, TargetSentence, Vocabulary};
use crate::lexicon::Polarity;

#[derive(Debug, Error)]
pub enum XaiError {
    #[error("steps must be at least 1")]
    ZeroSteps,
    #[error("input has {input} coordinates but baseline has {baseline}")]
    Shape { input: usize, baseline: usize },
    #[error("model has no vocabulary")]
    Untrained,
    #[error("nothing to attribute: empty token list")]
    Empty,
    #[error(transparent)]
    Model(#[from] ContextError),
}

/// A scalar function with an exact gradient.
pub trait Differentiable {
    fn value(&self, x: &[f64]) -> f64;
    fn gradient(&self, x: &[f64]) -> Vec<f64>;
}

/// `w . x + b`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearScorer {
    pub weights: Vec<f64>,
    pub bias: f64,
}

impl Differentiable for LinearScorer {
    fn value(&self, x: &[f64]) -> f64 {
        self.weights.iter().zip(x).map(|(w, v)| w * v).sum::<f64>() + self.bias
    }

    fn gradient(&self, _: &[f64]) -> Vec<f64> {
        self.weights.clone()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IgResult {
    pub attributions: Vec<f64>,
    pub f_input: f64,
    pub f_baseline: f64,
    /// `sum(attributions) - (f_input - f_baseline)`.
    pub delta: f64,
}

/// Right-endpoint Riemann sum with `steps` points:
/// `(x - x') * mean_k grad F(x' + (k/m)(x - x'))` for `k = 1..=m`. The mean is
/// a running mean, exact when every gradient is equal.
pub fn integrated_gradients<F: Differentiable + ?Sized>(
    f: &F,
    input: &[f64],
    baseline: &[f64],
    steps: usize,
) -> Result<IgResult, XaiError> {
    if steps == 0 {
        return Err(XaiError::ZeroSteps);
    }
    if input.len() != baseline.len() {
        return Err(XaiError::Shape { input: input.len(), baseline: baseline.len() });
    }
    let diff: Vec<f64> = input.iter().zip(baseline).map(|(x, b)| x - b).collect();
    let mut mean = vec![0.0; input.len()];
    let mut point = vec![0.0; input.len()];
    for k in 1..=steps {
        let alpha = k as f64 / steps as f64;
        for ((p, b), d) in point.iter_mut().zip(baseline).zip(&diff) {
            *p = b + alpha * d;
        }
        if k == steps {
            point.copy_from_slice(input);
        }
        let g = f.gradient(&point);
        for (m, gi) in mean.iter_mut().zip(&g) {
            *m += (gi - *m) / k as f64;
        }
    }
    let attributions: Vec<f64> = diff.iter().zip(&mean).map(|(d, m)| d * m).collect();
    let f_input = f.value(input);
    let f_baseline = f.value(baseline);
    let delta = attributions.iter().sum::<f64>() - (f_input - f_baseline);
    Ok(IgResult {
        attributions,
        f_input,
        f_baseline,
        delta,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum BaselineKind {
    /// All-zero embeddings.
    #[default]
    Zero,
    /// The padding token's embedding at every position.
    Pad,
}

impl FromStr for BaselineKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "zero" => Ok(BaselineKind::Zero),
            "pad" => Ok(BaselineKind::Pad),
            other => Err(format!("unknown baseline `{other}` (zero | pad)")),
        }
    }
}

impl fmt::Display for BaselineKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BaselineKind::Zero => "zero",
            BaselineKind::Pad => "pad",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IgConfig {
    pub steps: usize,
    pub baseline: BaselineKind,
    pub output: OutputKind,
    /// Class to explain; the predicted class when `None`.
    pub target_class: Option<Polarity>,
}

impl Default for IgConfig {
    fn default() -> Self {
        IgConfig {
            steps: 50,
            baseline: BaselineKind::Zero,
            output: OutputKind::Logit,
            target_class: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TokenAttribution {
    pub token: String,
    pub attribution: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AttributionMap {
    pub sentence: String,
    pub target: String,
    pub target_index: usize,
    pub target_class: Polarity,
    pub predicted_class: Polarity,
    pub confidence: f64,
    pub per_token: Vec<TokenAttribution>,
    /// Attribution of the target token alone.
    pub target_attribution: f64,
    /// Sum of `per_token` in order.
    pub total_attribution: f64,
    /// `total_attribution - (f_input - f_baseline)`.
    pub convergence_delta: f64,
    pub f_input: f64,
    pub f_baseline: f64,
    pub steps: usize,
    pub baseline_kind: BaselineKind,
    pub output_kind: OutputKind,
}

/// The contextual model's class output as a function of the flattened token
/// embeddings.
struct ContextOutput<'a> {
    model: &'a ContextModel,
    n_tokens: usize,
    target_index: usize,
    class: Polarity,
    kind: OutputKind,
}

impl ContextOutput<'_> {
    fn rows(&self, x: &[f64]) -> Vec<Vec<f64>> {
        x.chunks(self.model.dim()).map(<[f64]>::to_vec).collect()
    }

    fn eval(&self, x: &[f64]) -> (f64, Vec<Vec<f64>>) {
        debug_assert_eq!(x.len(), self.n_tokens * self.model.dim());
        self.model
            .output_gradient(&self.rows(x), self.target_index, self.class, self.kind)
            .expect("shape checked before integration")
    }
}

impl Differentiable for ContextOutput<'_> {
    fn value(&self, x: &[f64]) -> f64 {
        self.eval(x).0
    }

    fn gradient(&self, x: &[f64]) -> Vec<f64> {
        self.eval(x).1.concat()
    }
}

/// Token-level attributions for one sentence. Reads the model only.
pub fn explain(model: &ContextModel, sentence: &TargetSentence, config: &IgConfig) -> Result<AttributionMap, XaiError> {
    if model.vocabulary.is_empty() {
        return Err(XaiError::Untrained);
    }
    if sentence.tokens.is_empty() {
        return Err(XaiError::Empty);
    }
    let inputs = model.input_embeddings(sentence);
    model.logits_from_inputs(&inputs, sentence.target_index)?;
    let (predicted_class, confidence) = model.predict(sentence);
    let class = config.target_class.unwrap_or(predicted_class);
    let e = model.dim();
    let baseline_row = match config.baseline {
        BaselineKind::Zero => vec![0.0; e],
        BaselineKind::Pad => model.embedding(Vocabulary::PAD).to_vec(),
    };
    let baseline: Vec<f64> = baseline_row.repeat(inputs.len());
    let f = ContextOutput {
        model,
        n_tokens: inputs.len(),
        target_index: sentence.target_index,
        class,
        kind: config.output,
    };
    let ig = integrated_gradients(&f, &inputs.concat(), &baseline, config.steps)?;
    let per_token: Vec<TokenAttribution> = sentence
        .tokens
        .iter()
        .zip(ig.attributions.chunks(e))
        .map(|(t, a)| TokenAttribution { token: t.clone(), attribution: a.iter().sum() })
        .collect();
    let total_attribution: f64 = per_token.iter().map(|t| t.attribution).sum();
    Ok(AttributionMap {
        sentence: sentence.text.clone(),
        target: sentence.target.clone(),
        target_index: sentence.target_index,
        target_class: class,
        predicted_class,
        confidence,
        target_attribution: per_token[sentence.target_index].attribution,
        total_attribution,
        convergence_delta: total_attribution - (ig.f_input - ig.f_baseline),
        f_input: ig.f_input,
        f_baseline: ig.f_baseline,
        per_token,
        steps: config.steps,
        baseline_kind: config.baseline,
        output_kind: config.output,
    })
}

/// Explains every sentence; output order follows input order.
pub fn explain_batch(
    model: &ContextModel,
    sentences: &[TargetSentence],
    config: &IgConfig,
) -> Result<Vec<AttributionMap>, XaiError> {
    sentences.par_iter().map(|s| explain(model, s, config)).collect()
}

pub fn to_jsonl(maps: &[AttributionMap]) -> String {
    maps.iter()
        .map(|m| serde_json::to_string(m).expect("map serializes") + "\n")
        .collect()
}

fn title_case(p: Polarity) -> String {
    let name = p.name();
    name[..1].to_uppercase() + &name[1..]
}

/// Pipe table: sentence, predicted sentiment with confidence, target-token
/// attribution and convergence delta.
pub fn summary_table(maps: &[AttributionMap]) -> String {
    let mut out = String::from("| Sentence | Predicted Sentiment | Attribution | Convergence Delta |\n|---|---|---|---|\n");
    for m in maps {
        out += &format!(
            "| {} | {} (Confidence: {:.2}) | {:.2} | {:.4} |\n",
            m.sentence.replace('|', "\\|"),
            title_case(m.predicted_class),
            m.confidence,
            m.target_attribution,
            m.convergence_delta
        );
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HeatCell {
    pub token: String,
    pub attribution: f64,
    /// Min-max normalized attribution; 0.5 when all attributions are equal.
    pub color: f64,
}

pub fn heatmap_cells(map: &AttributionMap) -> Vec<HeatCell> {
    let values: Vec<f64> = map.per_token.iter().map(|t| t.attribution).collect();
    let lo = values.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    map.per_token
        .iter()
        .map(|t| HeatCell {
            token: t.token.clone(),
            attribution: t.attribution,
            color: if hi > lo { (t.attribution - lo) / (hi - lo) } else { 0.5 },
        })
        .collect()
}

pub fn heatmap_csv(cells: &[HeatCell]) -> String {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    w.write_record(["token", "attribution", "color"]).expect("in-memory write");
    for c in cells {
        w.write_record([c.token.clone(), c.attribution.to_string(), c.color.to_string()])
            .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 input")
}

pub fn heatmap_svg(map: &AttributionMap) -> String {
    let cells = heatmap_cells(map);
    let tokens: Vec<String> = cells.iter().map(|c| c.token.clone()).collect();
    let raw: Vec<f64> = cells.iter().map(|c| c.attribution).collect();
    let colours: Vec<f64> = cells.iter().map(|c| c.color).collect();
    let title = format!(
        "{} ({:.2}), target \"{}\"",
        title_case(map.predicted_class),
        map.confidence,
        map.target
    );
    crate::svg::token_heatmap(&title, &tokens, &raw, &colours)
}
