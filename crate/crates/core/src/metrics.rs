//! Confusion matrices, per-class precision/recall/F1, macro and weighted
//! averages, ROC curves and AUC.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum MetricsError {
    #[error("y_true has {0} labels but y_pred has {1}")]
    LengthMismatch(usize, usize),
    #[error("label {0} is not one of the {1} classes")]
    UnknownLabel(usize, usize),
    #[error("ROC needs at least one positive and one negative instance")]
    SingleClass,
    #[error("scores contain a non-finite value")]
    NonFinite,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub classes: Vec<String>,
    /// `counts[i][j]`: instances of true class i predicted as class j.
    pub counts: Vec<Vec<u64>>,
}

impl ConfusionMatrix {
    pub fn new(y_true: &[usize], y_pred: &[usize], classes: &[String]) -> Result<Self, MetricsError> {
        if y_true.len() != y_pred.len() {
            return Err(MetricsError::LengthMismatch(y_true.len(), y_pred.len()));
        }
        let k = classes.len();
        let mut counts = vec![vec![0u64; k]; k];
        for (&t, &p) in y_true.iter().zip(y_pred) {
            for label in [t, p] {
                if label >= k {
                    return Err(MetricsError::UnknownLabel(label, k));
                }
            }
            counts[t][p] += 1;
        }
        Ok(ConfusionMatrix {
            classes: classes.to_vec(),
            counts,
        })
    }

    /// Builds a matrix from explicit counts.
    pub fn from_counts(classes: &[&str], counts: Vec<Vec<u64>>) -> Self {
        assert!(counts.len() == classes.len() && counts.iter().all(|r| r.len() == classes.len()));
        ConfusionMatrix {
            classes: classes.iter().map(|s| s.to_string()).collect(),
            counts,
        }
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().flatten().sum()
    }

    pub fn row_sum(&self, i: usize) -> u64 {
        self.counts[i].iter().sum()
    }

    pub fn column_sum(&self, j: usize) -> u64 {
        self.counts.iter().map(|r| r[j]).sum()
    }

    pub fn trace(&self) -> u64 {
        (0..self.classes.len()).map(|i| self.counts[i][i]).sum()
    }
}

/// Convenience wrapper over [`ConfusionMatrix::new`].
pub fn confusion(y_true: &[usize], y_pred: &[usize], classes: &[String]) -> Result<ConfusionMatrix, MetricsError> {
    ConfusionMatrix::new(y_true, y_pred, classes)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassMetrics {
    pub class: String,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub support: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Averages {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub per_class: Vec<ClassMetrics>,
    pub accuracy: f64,
    pub macro_avg: Averages,
    pub weighted_avg: Averages,
    pub support: u64,
}

fn ratio(num: u64, den: u64) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

pub fn f1_score(precision: f64, recall: f64) -> f64 {
    if precision + recall > 0.0 {
        2.0 * precision * recall / (precision + recall)
    } else {
        0.0
    }
}

/// Unweighted and support-weighted means of per-class values.
pub fn averages(per_class: &[ClassMetrics]) -> (Averages, Averages) {
    let k = per_class.len() as f64;
    let total: u64 = per_class.iter().map(|c| c.support).sum();
    let mean = |f: fn(&ClassMetrics) -> f64| {
        if per_class.is_empty() {
            0.0
        } else {
            per_class.iter().map(f).sum::<f64>() / k
        }
    };
    let weighted = |f: fn(&ClassMetrics) -> f64| {
        if total == 0 {
            0.0
        } else {
            per_class.iter().map(|c| f(c) * c.support as f64).sum::<f64>() / total as f64
        }
    };
    (
        Averages {
            precision: mean(|c| c.precision),
            recall: mean(|c| c.recall),
            f1: mean(|c| c.f1),
        },
        Averages {
            precision: weighted(|c| c.precision),
            recall: weighted(|c| c.recall),
            f1: weighted(|c| c.f1),
        },
    )
}

/// Undefined ratios (empty row or column) count as 0.
pub fn metrics(cm: &ConfusionMatrix) -> MetricsReport {
    let per_class: Vec<ClassMetrics> = cm
        .classes
        .iter()
        .enumerate()
        .map(|(i, name)| {
            let precision = ratio(cm.counts[i][i], cm.column_sum(i));
            let recall = ratio(cm.counts[i][i], cm.row_sum(i));
            ClassMetrics {
                class: name.clone(),
                precision,
                recall,
                f1: f1_score(precision, recall),
                support: cm.row_sum(i),
            }
        })
        .collect();
    let (macro_avg, weighted_avg) = averages(&per_class);
    MetricsReport {
        accuracy: ratio(cm.trace(), cm.total()),
        support: cm.total(),
        per_class,
        macro_avg,
        weighted_avg,
    }
}

impl MetricsReport {
    /// Aligned two-decimal table: `class, Precision, Recall, F1-score, Support`.
    pub fn to_table(&self) -> String {
        let width = self
            .per_class
            .iter()
            .map(|c| c.class.chars().count())
            .chain(["weighted avg".len()])
            .max()
            .unwrap_or(0);
        let mut out = format!(
            "{:>width$} {:>9} {:>9} {:>9} {:>9}\n",
            "", "Precision", "Recall", "F1-score", "Support"
        );
        for c in &self.per_class {
            out += &format!(
                "{:>width$} {:>9.2} {:>9.2} {:>9.2} {:>9}\n",
                c.class, c.precision, c.recall, c.f1, c.support
            );
        }
        out += &format!("{:>width$} {:>9} {:>9} {:>9.2} {:>9}\n", "accuracy", "", "", self.accuracy, self.support);
        for (name, a) in [("macro avg", self.macro_avg), ("weighted avg", self.weighted_avg)] {
            out += &format!(
                "{:>width$} {:>9.2} {:>9.2} {:>9.2} {:>9}\n",
                name, a.precision, a.recall, a.f1, self.support
            );
        }
        out
    }
}

/// Rounds to two decimals the way the display table does.
pub fn round2(x: f64) -> f64 {
    format!("{x:.2}").parse().expect("formatted float")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RocCurve {
    pub positive_class: String,
    /// (false positive rate, true positive rate), from (0,0) to (1,1).
    pub points: Vec<(f64, f64)>,
    pub auc: f64,
}

/// ROC curve over distinct score thresholds, descending. Tied scores move
/// together in one step. AUC uses the trapezoid rule on integer counts.
pub fn roc(y_true: &[bool], scores: &[f64], positive_class: &str) -> Result<RocCurve, MetricsError> {
    if y_true.len() != scores.len() {
        return Err(MetricsError::LengthMismatch(y_true.len(), scores.len()));
    }
    if scores.iter().any(|s| !s.is_finite()) {
        return Err(MetricsError::NonFinite);
    }
    let p = y_true.iter().filter(|&&y| y).count() as u64;
    let n = y_true.len() as u64 - p;
    if p == 0 || n == 0 {
        return Err(MetricsError::SingleClass);
    }
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]));

    let mut points = vec![(0.0, 0.0)];
    let (mut tp, mut fp) = (0u64, 0u64);
    let (mut prev_tp, mut prev_fp) = (0u64, 0u64);
    // twice the area, in units of 1/(p*n)
    let mut doubled_area: u128 = 0;
    let mut i = 0;
    while i < order.len() {
        let threshold = scores[order[i]];
        while i < order.len() && scores[order[i]] == threshold {
            if y_true[order[i]] {
                tp += 1;
            } else {
                fp += 1;
            }
            i += 1;
        }
        doubled_area += ((fp - prev_fp) as u128) * ((tp + prev_tp) as u128);
        points.push((fp as f64 / n as f64, tp as f64 / p as f64));
        prev_tp = tp;
        prev_fp = fp;
    }
    Ok(RocCurve {
        positive_class: positive_class.to_string(),
        points,
        auc: doubled_area as f64 / (2.0 * p as f64 * n as f64),
    })
}

/// One curve per class, treating column `c` of `proba` as that class's score.
pub fn roc_one_vs_rest(
    y_true: &[usize],
    proba: &[Vec<f64>],
    classes: &[String],
) -> Vec<(String, Result<RocCurve, MetricsError>)> {
    classes
        .iter()
        .enumerate()
        .map(|(c, name)| {
            let flags: Vec<bool> = y_true.iter().map(|&y| y == c).collect();
            let scores: Vec<f64> = proba.iter().map(|p| p[c]).collect();
            (name.clone(), roc(&flags, &scores, name))
        })
        .collect()
}

impl RocCurve {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("false_positive_rate,true_positive_rate\n");
        for (x, y) in &self.points {
            out += &format!("{x},{y}\n");
        }
        out
    }
}
