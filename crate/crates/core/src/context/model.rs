use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{labels_of, softmax, ClassWeights, ContextError, TargetSentence, Vocabulary, N_CLASSES};
use crate::lexicon::Polarity;
use crate::metrics::{self, ConfusionMatrix, MetricsReport, RocCurve};
use crate::split::rng_for;

pub const CONTEXT_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelConfig {
    pub embedding_dim: usize,
    /// Context radius around the target, in tokens.
    pub window: usize,
    /// Initial parameters are uniform in `[-init_scale, init_scale]`.
    pub init_scale: f64,
}

impl Default for ModelConfig {
    fn default() -> Self {
        ModelConfig {
            embedding_dim: 32,
            window: 5,
            init_scale: 0.1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub model: ModelConfig,
    pub epochs: usize,
    pub learning_rate: f64,
    pub batch_size: usize,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            model: ModelConfig::default(),
            epochs: 30,
            learning_rate: 0.5,
            batch_size: 32,
            seed: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainingRecord {
    pub config: TrainConfig,
    pub class_weights: ClassWeights,
    pub train_size: usize,
}

/// Embedding classifier over `[target embedding ; mean window embedding]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContextModel {
    pub format_version: u32,
    pub config: ModelConfig,
    pub seed: u64,
    pub vocabulary: Vocabulary,
    /// Row-major `|V| x E`.
    pub embeddings: Vec<f64>,
    /// Row-major `3 x 2E`.
    pub weights: Vec<f64>,
    pub bias: Vec<f64>,
    pub training: Option<TrainingRecord>,
}

/// Which scalar of the model output is differentiated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum OutputKind {
    /// Pre-softmax score of the class.
    #[default]
    Logit,
    /// Softmax probability of the class.
    Probability,
}

impl std::str::FromStr for OutputKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "logit" => Ok(OutputKind::Logit),
            "probability" | "prob" => Ok(OutputKind::Probability),
            other => Err(format!("unknown output kind `{other}` (logit | probability)")),
        }
    }
}

/// Same layout as the model parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct Gradient {
    pub embeddings: Vec<f64>,
    pub weights: Vec<f64>,
    pub bias: Vec<f64>,
}

impl Gradient {
    fn zeros_like(m: &ContextModel) -> Gradient {
        Gradient {
            embeddings: vec![0.0; m.embeddings.len()],
            weights: vec![0.0; m.weights.len()],
            bias: vec![0.0; m.bias.len()],
        }
    }

    pub fn norm(&self) -> f64 {
        self.embeddings
            .iter()
            .chain(&self.weights)
            .chain(&self.bias)
            .map(|g| g * g)
            .sum::<f64>()
            .sqrt()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Encoded {
    pub ids: Vec<usize>,
    pub target_index: usize,
    pub label: Option<usize>,
}

/// Positions within `window` of `target`, excluding the target itself.
pub fn window_positions(len: usize, target: usize, window: usize) -> Vec<usize> {
    let lo = target.saturating_sub(window);
    let hi = (target + window).min(len.saturating_sub(1));
    (lo..=hi).filter(|&j| j != target).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpochRecord {
    pub epoch: usize,
    pub train_loss: f64,
    pub val_loss: Option<f64>,
    pub val_accuracy: Option<f64>,
}

impl EpochRecord {
    pub fn csv(records: &[EpochRecord]) -> String {
        let opt = |v: Option<f64>| v.map_or(String::new(), |x| x.to_string());
        let mut out = String::from("epoch,train_loss,val_loss,val_accuracy\n");
        for r in records {
            out += &format!("{},{},{},{}\n", r.epoch, r.train_loss, opt(r.val_loss), opt(r.val_accuracy));
        }
        out
    }
}

impl ContextModel {
    /// Fresh parameters drawn from the stream derived from `(seed, 0)`.
    pub fn initialize(config: ModelConfig, vocabulary: Vocabulary, seed: u64) -> ContextModel {
        let mut rng = rng_for(seed, 0);
        let s = config.init_scale;
        let mut draw = |n: usize| -> Vec<f64> {
            (0..n)
                .map(|_| if s > 0.0 { rng.gen_range(-s..=s) } else { 0.0 })
                .collect()
        };
        let embeddings = draw(vocabulary.len() * config.embedding_dim);
        let weights = draw(N_CLASSES * 2 * config.embedding_dim);
        ContextModel {
            format_version: CONTEXT_FORMAT_VERSION,
            config,
            seed,
            vocabulary,
            embeddings,
            weights,
            bias: vec![0.0; N_CLASSES],
            training: None,
        }
    }

    pub fn dim(&self) -> usize {
        self.config.embedding_dim
    }

    pub fn embedding(&self, id: usize) -> &[f64] {
        let e = self.dim();
        &self.embeddings[id * e..(id + 1) * e]
    }

    pub(crate) fn encode(&self, s: &TargetSentence) -> Encoded {
        Encoded {
            ids: s.tokens.iter().map(|t| self.vocabulary.id(t)).collect(),
            target_index: s.target_index,
            label: s.label.map(Polarity::index),
        }
    }

    /// Token embeddings of the sentence, one row per token.
    pub fn input_embeddings(&self, s: &TargetSentence) -> Vec<Vec<f64>> {
        self.encode(s).ids.iter().map(|&id| self.embedding(id).to_vec()).collect()
    }

    fn check_inputs(&self, inputs: &[Vec<f64>], target_index: usize) -> Result<(), ContextError> {
        let width_ok = inputs.iter().all(|r| r.len() == self.dim());
        if target_index >= inputs.len() || !width_ok {
            return Err(ContextError::InputShape {
                expected: target_index + 1,
                found: inputs.len(),
                dim: self.dim(),
                width: inputs.iter().map(Vec::len).find(|&w| w != self.dim()).unwrap_or(self.dim()),
            });
        }
        Ok(())
    }

    fn features_from<'a>(&self, rows: impl Fn(usize) -> &'a [f64], len: usize, target: usize) -> Vec<f64> {
        let e = self.dim();
        let mut h = vec![0.0; 2 * e];
        h[..e].copy_from_slice(rows(target));
        let ctx = window_positions(len, target, self.config.window);
        if !ctx.is_empty() {
            for &j in &ctx {
                for (hk, x) in h[e..].iter_mut().zip(rows(j)) {
                    *hk += x;
                }
            }
            let n = ctx.len() as f64;
            h[e..].iter_mut().for_each(|v| *v /= n);
        }
        h
    }

    fn logits_of(&self, h: &[f64]) -> Vec<f64> {
        let d = h.len();
        (0..N_CLASSES)
            .map(|c| {
                self.weights[c * d..(c + 1) * d].iter().zip(h).map(|(w, x)| w * x).sum::<f64>() + self.bias[c]
            })
            .collect()
    }

    fn encoded_features(&self, x: &Encoded) -> Vec<f64> {
        self.features_from(|i| self.embedding(x.ids[i]), x.ids.len(), x.target_index)
    }

    pub fn logits(&self, s: &TargetSentence) -> Vec<f64> {
        self.logits_of(&self.encoded_features(&self.encode(s)))
    }

    pub fn proba(&self, s: &TargetSentence) -> Vec<f64> {
        softmax(&self.logits(s))
    }

    /// Most probable class and its probability.
    pub fn predict(&self, s: &TargetSentence) -> (Polarity, f64) {
        let p = self.proba(s);
        let c = crate::ml::argmax(&p);
        (Polarity::from_index(c).expect("three classes"), p[c])
    }

    /// Logits for explicit token embeddings in place of the table lookups.
    pub fn logits_from_inputs(&self, inputs: &[Vec<f64>], target_index: usize) -> Result<Vec<f64>, ContextError> {
        self.check_inputs(inputs, target_index)?;
        Ok(self.logits_of(&self.features_from(|i| &inputs[i], inputs.len(), target_index)))
    }

    /// The chosen output scalar for `class` and its gradient with respect to
    /// every input embedding row.
    pub fn output_gradient(
        &self,
        inputs: &[Vec<f64>],
        target_index: usize,
        class: Polarity,
        kind: OutputKind,
    ) -> Result<(f64, Vec<Vec<f64>>), ContextError> {
        self.check_inputs(inputs, target_index)?;
        let e = self.dim();
        let h = self.features_from(|i| &inputs[i], inputs.len(), target_index);
        let z = self.logits_of(&h);
        let c = class.index();
        let (value, dz) = match kind {
            OutputKind::Logit => {
                let mut dz = vec![0.0; N_CLASSES];
                dz[c] = 1.0;
                (z[c], dz)
            }
            OutputKind::Probability => {
                let p = softmax(&z);
                let dz = (0..N_CLASSES)
                    .map(|k| p[c] * (f64::from(u8::from(k == c)) - p[k]))
                    .collect();
                (p[c], dz)
            }
        };
        let dh = self.backprop_features(&dz, 2 * e);
        let mut grad = vec![vec![0.0; e]; inputs.len()];
        grad[target_index].copy_from_slice(&dh[..e]);
        let ctx = window_positions(inputs.len(), target_index, self.config.window);
        let n = ctx.len() as f64;
        for &j in &ctx {
            for (g, d) in grad[j].iter_mut().zip(&dh[e..]) {
                *g = d / n;
            }
        }
        Ok((value, grad))
    }

    fn backprop_features(&self, dz: &[f64], d: usize) -> Vec<f64> {
        let mut dh = vec![0.0; d];
        for (c, g) in dz.iter().enumerate() {
            for (dk, w) in dh.iter_mut().zip(&self.weights[c * d..(c + 1) * d]) {
                *dk += w * g;
            }
        }
        dh
    }

    /// Mean class-weighted cross-entropy and its exact gradient.
    pub(crate) fn loss_and_gradient(&self, batch: &[&Encoded], weights: &ClassWeights) -> (f64, Gradient) {
        let e = self.dim();
        let d = 2 * e;
        let b = batch.len() as f64;
        let mut grad = Gradient::zeros_like(self);
        let mut loss = 0.0;
        for x in batch {
            let y = x.label.expect("labeled training data");
            let h = self.encoded_features(x);
            let z = self.logits_of(&h);
            let p = softmax(&z);
            let w = weights.weights[y];
            loss += w * cross_entropy(&z, y);
            let dz: Vec<f64> = (0..N_CLASSES)
                .map(|k| w / b * (p[k] - f64::from(u8::from(k == y))))
                .collect();
            for (c, g) in dz.iter().enumerate() {
                grad.bias[c] += g;
                for (gw, hk) in grad.weights[c * d..(c + 1) * d].iter_mut().zip(&h) {
                    *gw += g * hk;
                }
            }
            let dh = self.backprop_features(&dz, d);
            let t = x.ids[x.target_index];
            for (g, v) in grad.embeddings[t * e..(t + 1) * e].iter_mut().zip(&dh[..e]) {
                *g += v;
            }
            let ctx = window_positions(x.ids.len(), x.target_index, self.config.window);
            let n = ctx.len() as f64;
            for &j in &ctx {
                let id = x.ids[j];
                for (g, v) in grad.embeddings[id * e..(id + 1) * e].iter_mut().zip(&dh[e..]) {
                    *g += v / n;
                }
            }
        }
        (loss / b, grad)
    }

    /// Mean class-weighted cross-entropy of labeled sentences and its gradient.
    pub fn batch_gradient(
        &self,
        batch: &[TargetSentence],
        weights: &ClassWeights,
    ) -> Result<(f64, Gradient), ContextError> {
        labels_of(batch)?;
        if batch.is_empty() {
            return Err(ContextError::EmptyTrainSet);
        }
        let enc: Vec<Encoded> = batch.iter().map(|s| self.encode(s)).collect();
        let refs: Vec<&Encoded> = enc.iter().collect();
        Ok(self.loss_and_gradient(&refs, weights))
    }

    pub fn loss(&self, data: &[TargetSentence], weights: &ClassWeights) -> Result<f64, ContextError> {
        self.batch_gradient(data, weights).map(|(l, _)| l)
    }

    fn apply(&mut self, g: &Gradient, lr: f64) {
        let step = |p: &mut [f64], g: &[f64]| p.iter_mut().zip(g).for_each(|(p, g)| *p -= lr * g);
        step(&mut self.embeddings, &g.embeddings);
        step(&mut self.weights, &g.weights);
        step(&mut self.bias, &g.bias);
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("model serializes")
    }

    pub fn from_json(text: &str) -> Result<ContextModel, ContextError> {
        #[derive(Deserialize)]
        struct Probe {
            format_version: u32,
        }
        let probe: Probe = serde_json::from_str(text)?;
        if probe.format_version != CONTEXT_FORMAT_VERSION {
            return Err(ContextError::Version(probe.format_version));
        }
        Ok(serde_json::from_str(text)?)
    }
}

/// `logsumexp(z) - z[y]`.
pub(crate) fn cross_entropy(z: &[f64], y: usize) -> f64 {
    let max = z.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let lse = max + z.iter().map(|v| (v - max).exp()).sum::<f64>().ln();
    lse - z[y]
}

fn accuracy(model: &ContextModel, data: &[TargetSentence]) -> f64 {
    let hits = data.iter().filter(|s| Some(model.predict(s).0) == s.label).count();
    hits as f64 / data.len() as f64
}

/// Mini-batch gradient descent on the class-weighted loss. The vocabulary
/// comes from `train_set`; epoch `k` shuffles with the stream `(seed, k)`.
pub fn train(
    config: &TrainConfig,
    train_set: &[TargetSentence],
    val_set: &[TargetSentence],
    class_weights: &ClassWeights,
) -> Result<(ContextModel, Vec<EpochRecord>), ContextError> {
    if config.epochs == 0 {
        return Err(ContextError::NonPositive("epochs"));
    }
    if config.batch_size == 0 {
        return Err(ContextError::NonPositive("batch_size"));
    }
    if train_set.is_empty() {
        return Err(ContextError::EmptyTrainSet);
    }
    labels_of(train_set)?;
    labels_of(val_set)?;

    let vocabulary = Vocabulary::build(train_set);
    let mut model = ContextModel::initialize(config.model, vocabulary, config.seed);
    let encoded: Vec<Encoded> = train_set.iter().map(|s| model.encode(s)).collect();
    let mut order: Vec<usize> = (0..encoded.len()).collect();
    let mut log = Vec::with_capacity(config.epochs);
    for epoch in 1..=config.epochs {
        order.shuffle(&mut rng_for(config.seed, epoch as u64));
        for chunk in order.chunks(config.batch_size) {
            let batch: Vec<&Encoded> = chunk.iter().map(|&i| &encoded[i]).collect();
            let (_, g) = model.loss_and_gradient(&batch, class_weights);
            model.apply(&g, config.learning_rate);
        }
        let all: Vec<&Encoded> = encoded.iter().collect();
        let train_loss = model.loss_and_gradient(&all, class_weights).0;
        let (val_loss, val_accuracy) = if val_set.is_empty() {
            (None, None)
        } else {
            (Some(model.loss(val_set, class_weights)?), Some(accuracy(&model, val_set)))
        };
        log.push(EpochRecord {
            epoch,
            train_loss,
            val_loss,
            val_accuracy,
        });
    }
    model.training = Some(TrainingRecord {
        config: *config,
        class_weights: *class_weights,
        train_size: train_set.len(),
    });
    Ok((model, log))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ContextEvaluation {
    pub report: MetricsReport,
    pub confusion: ConfusionMatrix,
    /// One-vs-rest curve per polarity; `None` when the test set lacks
    /// positives or negatives for that class.
    pub roc: Vec<(String, Option<RocCurve>)>,
}

pub fn evaluate(model: &ContextModel, test_set: &[TargetSentence]) -> Result<ContextEvaluation, ContextError> {
    if test_set.is_empty() {
        return Err(ContextError::EmptyTestSet);
    }
    let y_true: Vec<usize> = labels_of(test_set)?.into_iter().map(Polarity::index).collect();
    let proba: Vec<Vec<f64>> = test_set.iter().map(|s| model.proba(s)).collect();
    let y_pred: Vec<usize> = proba.iter().map(|p| crate::ml::argmax(p)).collect();
    let classes: Vec<String> = Polarity::ALL.iter().map(|p| p.name().to_string()).collect();
    let confusion = metrics::confusion(&y_true, &y_pred, &classes).expect("labels are class indices");
    let report = metrics::metrics(&confusion);
    let roc = metrics::roc_one_vs_rest(&y_true, &proba, &classes)
        .into_iter()
        .map(|(name, r)| (name, r.ok()))
        .collect();
    Ok(ContextEvaluation {
        report,
        confusion,
        roc,
    })
}
