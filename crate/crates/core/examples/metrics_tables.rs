//! Classification report, ROC curve and AUC from raw counts and scores.

use polylex::metrics::{metrics, roc, ConfusionMatrix};

fn main() -> anyhow::Result<()> {
    let cm = ConfusionMatrix::from_counts(
        &["negative", "neutral", "positive"],
        vec![vec![151, 0, 0], vec![3, 0, 0], vec![0, 0, 154]],
    );
    print!("{}", metrics(&cm).to_table());

    let labels = [true, true, false, true, false, false, true, false];
    let scores = [0.9, 0.8, 0.7, 0.6, 0.55, 0.4, 0.3, 0.1];
    let curve = roc(&labels, &scores, "positive")?;
    println!("\nROC points (fpr, tpr): {:?}", curve.points);
    println!("AUC {:.4}", curve.auc);
    Ok(())
}
