//! Classical classifiers over lexicon-derived feature vectors: decision
//! tree, random forest, Gaussian naive Bayes and a one-vs-rest linear SVM.

mod forest;
mod gnb;
mod svm;
mod tree;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lexicon::{Language, Lexicon, PosTag};
use crate::metrics::{self, ConfusionMatrix, MetricsReport, RocCurve};
use crate::split::stratified_partition;

pub use forest::{ForestParams, RandomForest};
pub use gnb::GaussianNb;
pub use svm::{LinearSvm, SvmParams};
pub use tree::{best_split, gini, DecisionTree, Node, TreeParams};

pub const MODEL_FORMAT_VERSION: u32 = 1;

pub const FEATURE_NAMES: [&str; 9] = [
    "score", "score_fr", "score_cil", "score_en", "score_af", "score_nso", "score_zu",
    "english_chars", "english_words",
];

#[derive(Debug, Error)]
pub enum MlError {
    #[error("expected {expected} features, got {found}")]
    Arity { expected: usize, found: usize },
    #[error("dataset is empty")]
    EmptyDataset,
    #[error("invalid hyperparameter: {0}")]
    Hyperparameter(String),
    #[error("unsupported model format version {0}")]
    Version(u32),
    #[error("unknown model kind `{0}`")]
    UnknownKind(String),
    #[error("unknown task `{0}`")]
    UnknownTask(String),
    #[error("row {row}: {message}")]
    Row { row: usize, message: String },
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error("csv: {0}")]
    Csv(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Task {
    /// Predict the part-of-speech tag.
    Pos,
    /// Predict the polarity of the shared score.
    Polarity,
}

impl FromStr for Task {
    type Err = MlError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "pos" => Ok(Task::Pos),
            "polarity" => Ok(Task::Polarity),
            other => Err(MlError::UnknownTask(other.into())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureVector {
    pub values: Vec<f64>,
    pub label: usize,
    /// Id of the lexicon entry the vector came from.
    pub provenance: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    pub feature_names: Vec<String>,
    pub vectors: Vec<FeatureVector>,
    pub class_names: Vec<String>,
    pub task: Task,
}

impl Dataset {
    /// Shared score, six per-language scores (falling back to the shared
    /// score), and the English form's length in characters and words.
    pub fn from_lexicon(lex: &Lexicon, task: Task) -> Dataset {
        let class_names: Vec<String> = match task {
            Task::Pos => PosTag::ALL.iter().map(|p| p.name().to_string()).collect(),
            Task::Polarity => crate::lexicon::Polarity::ALL
                .iter()
                .map(|p| p.name().to_string())
                .collect(),
        };
        let vectors = lex
            .entries()
            .iter()
            .map(|e| {
                let mut values = vec![e.shared_score.value()];
                values.extend(Language::ALL.iter().map(|&l| e.score(l).value()));
                let english = e.form(Language::English).unwrap_or("");
                values.push(english.chars().count() as f64);
                values.push(english.split_whitespace().count() as f64);
                FeatureVector {
                    values,
                    label: match task {
                        Task::Pos => e.pos.index(),
                        Task::Polarity => e.polarity().index(),
                    },
                    provenance: e.id.0,
                }
            })
            .collect();
        Dataset {
            feature_names: FEATURE_NAMES.iter().map(|s| s.to_string()).collect(),
            vectors,
            class_names,
            task,
        }
    }

    pub fn n_features(&self) -> usize {
        self.feature_names.len()
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn labels(&self) -> Vec<usize> {
        self.vectors.iter().map(|v| v.label).collect()
    }

    pub fn subset(&self, rows: &[usize]) -> Dataset {
        Dataset {
            feature_names: self.feature_names.clone(),
            vectors: rows.iter().map(|&i| self.vectors[i].clone()).collect(),
            class_names: self.class_names.clone(),
            task: self.task,
        }
    }

    /// CSV with one column per feature, then `label` and `entry_id`.
    pub fn to_csv(&self) -> String {
        let mut out = self.feature_names.join(",");
        out += ",label,entry_id\n";
        for v in &self.vectors {
            for x in &v.values {
                out += &format!("{x},");
            }
            out += &format!("{},{}\n", self.class_names[v.label], v.provenance);
        }
        out
    }

    pub fn from_csv(text: &str, class_names: Vec<String>, task: Task) -> Result<Dataset, MlError> {
        let mut reader = csv::Reader::from_reader(text.as_bytes());
        let header = reader.headers().map_err(|e| MlError::Csv(e.to_string()))?.clone();
        let d = header.len().saturating_sub(2);
        let feature_names = header.iter().take(d).map(String::from).collect();
        let mut vectors = Vec::new();
        for (i, rec) in reader.records().enumerate() {
            let row = i + 1;
            let rec = rec.map_err(|e| MlError::Csv(e.to_string()))?;
            let bad = |message: String| MlError::Row { row, message };
            let values = rec
                .iter()
                .take(d)
                .map(|s| s.parse::<f64>().map_err(|e| bad(format!("{s}: {e}"))))
                .collect::<Result<Vec<_>, _>>()?;
            let label = class_names
                .iter()
                .position(|c| c == &rec[d])
                .ok_or_else(|| bad(format!("unknown label `{}`", &rec[d])))?;
            let provenance = rec[d + 1].parse().map_err(|e| bad(format!("entry id: {e}")))?;
            vectors.push(FeatureVector { values, label, provenance });
        }
        Ok(Dataset {
            feature_names,
            vectors,
            class_names,
            task,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Split {
    pub train: Dataset,
    pub test: Dataset,
    /// Classes with a single member; that member was placed in `train`.
    pub singleton_classes: Vec<usize>,
}

/// Stratified shuffle split. The test part holds `round(n * (1 - train_fraction))`
/// items among the non-singleton classes.
pub fn split(data: &Dataset, train_fraction: f64, seed: u64) -> Result<Split, MlError> {
    if !(train_fraction > 0.0 && train_fraction < 1.0) {
        return Err(MlError::Hyperparameter(format!(
            "train_fraction must lie in (0, 1), got {train_fraction}"
        )));
    }
    let k = data.class_names.len();
    let mut counts = vec![0usize; k];
    for v in &data.vectors {
        counts[v.label] += 1;
    }
    let singleton_classes: Vec<usize> = (0..k).filter(|&c| counts[c] == 1).collect();
    let (single_rows, rest): (Vec<usize>, Vec<usize>) =
        (0..data.len()).partition(|&i| counts[data.vectors[i].label] == 1);
    let labels: Vec<usize> = rest.iter().map(|&i| data.vectors[i].label).collect();
    let parts = stratified_partition(&labels, &[train_fraction, 1.0 - train_fraction], seed);
    let mut train: Vec<usize> = parts[0].iter().map(|&j| rest[j]).chain(single_rows).collect();
    train.sort_unstable();
    let test: Vec<usize> = parts[1].iter().map(|&j| rest[j]).collect();
    Ok(Split {
        train: data.subset(&train),
        test: data.subset(&test),
        singleton_classes,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    DecisionTree,
    RandomForest,
    GaussianNb,
    LinearSvm,
}

impl ModelKind {
    pub const ALL: [ModelKind; 4] = [
        ModelKind::RandomForest,
        ModelKind::LinearSvm,
        ModelKind::DecisionTree,
        ModelKind::GaussianNb,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ModelKind::DecisionTree => "decision_tree",
            ModelKind::RandomForest => "random_forest",
            ModelKind::GaussianNb => "gaussian_nb",
            ModelKind::LinearSvm => "linear_svm",
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ModelKind {
    type Err = MlError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "decision_tree" | "dt" => Ok(ModelKind::DecisionTree),
            "random_forest" | "rf" => Ok(ModelKind::RandomForest),
            "gaussian_nb" | "gnb" => Ok(ModelKind::GaussianNb),
            "linear_svm" | "svm" => Ok(ModelKind::LinearSvm),
            other => Err(MlError::UnknownKind(other.into())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "state", rename_all = "snake_case")]
pub enum Model {
    DecisionTree(DecisionTree),
    RandomForest(RandomForest),
    GaussianNb(GaussianNb),
    LinearSvm(LinearSvm),
}

/// A fitted classifier with everything needed to reproduce it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainedModel {
    pub format_version: u32,
    pub seed: u64,
    pub task: Task,
    pub feature_names: Vec<String>,
    pub class_names: Vec<String>,
    pub model: Model,
}

/// Default hyperparameters for every kind.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Hyperparameters {
    pub tree: TreeParams,
    pub forest: ForestParams,
    pub var_smoothing: f64,
    pub svm: SvmParams,
}

impl Default for Hyperparameters {
    fn default() -> Self {
        Hyperparameters {
            tree: TreeParams::default(),
            forest: ForestParams::default(),
            var_smoothing: 1e-9,
            svm: SvmParams::default(),
        }
    }
}

fn wrap(data: &Dataset, seed: u64, model: Model) -> TrainedModel {
    TrainedModel {
        format_version: MODEL_FORMAT_VERSION,
        seed,
        task: data.task,
        feature_names: data.feature_names.clone(),
        class_names: data.class_names.clone(),
        model,
    }
}

fn non_empty(data: &Dataset) -> Result<(), MlError> {
    if data.is_empty() {
        Err(MlError::EmptyDataset)
    } else {
        Ok(())
    }
}

pub fn train_decision_tree(data: &Dataset, params: TreeParams, seed: u64) -> Result<TrainedModel, MlError> {
    non_empty(data)?;
    Ok(wrap(data, seed, Model::DecisionTree(DecisionTree::fit(data, params))))
}

pub fn train_random_forest(data: &Dataset, params: ForestParams, seed: u64) -> Result<TrainedModel, MlError> {
    non_empty(data)?;
    if params.n_trees == 0 {
        return Err(MlError::Hyperparameter("n_trees must be at least 1".into()));
    }
    Ok(wrap(data, seed, Model::RandomForest(RandomForest::fit(data, params, seed))))
}

pub fn train_gaussian_nb(data: &Dataset, var_smoothing: f64) -> Result<TrainedModel, MlError> {
    non_empty(data)?;
    if !(var_smoothing > 0.0) {
        return Err(MlError::Hyperparameter("var_smoothing must be positive".into()));
    }
    Ok(wrap(data, 0, Model::GaussianNb(GaussianNb::fit(data, var_smoothing))))
}

pub fn train_linear_svm(data: &Dataset, params: SvmParams, seed: u64) -> Result<TrainedModel, MlError> {
    non_empty(data)?;
    if !(params.lambda > 0.0) || params.epochs == 0 {
        return Err(MlError::Hyperparameter("lambda must be > 0 and epochs >= 1".into()));
    }
    Ok(wrap(data, seed, Model::LinearSvm(LinearSvm::fit(data, params, seed))))
}

pub fn train(kind: ModelKind, data: &Dataset, hp: &Hyperparameters, seed: u64) -> Result<TrainedModel, MlError> {
    match kind {
        ModelKind::DecisionTree => train_decision_tree(data, hp.tree, seed),
        ModelKind::RandomForest => train_random_forest(data, hp.forest, seed),
        ModelKind::GaussianNb => train_gaussian_nb(data, hp.var_smoothing),
        ModelKind::LinearSvm => train_linear_svm(data, hp.svm, seed),
    }
}

/// Index of the largest value; ties resolve to the lowest index.
pub fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, v) in values.iter().enumerate() {
        if *v > values[best] {
            best = i;
        }
    }
    best
}

impl TrainedModel {
    pub fn kind(&self) -> ModelKind {
        match self.model {
            Model::DecisionTree(_) => ModelKind::DecisionTree,
            Model::RandomForest(_) => ModelKind::RandomForest,
            Model::GaussianNb(_) => ModelKind::GaussianNb,
            Model::LinearSvm(_) => ModelKind::LinearSvm,
        }
    }

    fn check(&self, x: &[f64]) -> Result<(), MlError> {
        if x.len() != self.feature_names.len() {
            Err(MlError::Arity {
                expected: self.feature_names.len(),
                found: x.len(),
            })
        } else {
            Ok(())
        }
    }

    pub fn predict_proba(&self, x: &[f64]) -> Result<Vec<f64>, MlError> {
        self.check(x)?;
        Ok(match &self.model {
            Model::DecisionTree(t) => t.leaf_distribution(x).to_vec(),
            Model::RandomForest(f) => f.proba(x),
            Model::GaussianNb(g) => g.proba(x),
            Model::LinearSvm(s) => s.proba(x),
        })
    }

    /// `argmax(predict_proba(x))`, lowest index on ties.
    pub fn predict(&self, x: &[f64]) -> Result<usize, MlError> {
        Ok(argmax(&self.predict_proba(x)?))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("model serializes")
    }

    pub fn from_json(text: &str) -> Result<TrainedModel, MlError> {
        let model: TrainedModel = serde_json::from_str(text)?;
        if model.format_version != MODEL_FORMAT_VERSION {
            return Err(MlError::Version(model.format_version));
        }
        Ok(model)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Evaluation {
    pub confusion: ConfusionMatrix,
    pub report: MetricsReport,
    /// One-vs-rest curves; classes without both positives and negatives in
    /// the evaluation set are omitted.
    pub roc: Vec<RocCurve>,
}

pub fn evaluate(model: &TrainedModel, data: &Dataset) -> Result<Evaluation, MlError> {
    let mut y_pred = Vec::with_capacity(data.len());
    let mut proba = Vec::with_capacity(data.len());
    for v in &data.vectors {
        let p = model.predict_proba(&v.values)?;
        y_pred.push(argmax(&p));
        proba.push(p);
    }
    let y_true = data.labels();
    let confusion = metrics::confusion(&y_true, &y_pred, &model.class_names)
        .expect("labels come from the same class list");
    let report = metrics::metrics(&confusion);
    let roc = metrics::roc_one_vs_rest(&y_true, &proba, &model.class_names)
        .into_iter()
        .filter_map(|(_, c)| c.ok())
        .collect();
    Ok(Evaluation {
        confusion,
        report,
        roc,
    })
}
