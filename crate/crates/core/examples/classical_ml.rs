//! Trains every classical classifier on lexicon features and compares them on
//! a stratified held-out split.

use polylex::ml::{self, Dataset, Hyperparameters, ModelKind, Task};
use polylex::synth::synthetic_lexicon;

fn main() -> anyhow::Result<()> {
    let lex = synthetic_lexicon(800, 5);
    for task in [Task::Polarity, Task::Pos] {
        let data = Dataset::from_lexicon(&lex, task);
        let split = ml::split(&data, 0.8, 42)?;
        println!("task {task:?}: {} train / {} test rows", split.train.len(), split.test.len());
        let hp = Hyperparameters::default();
        for kind in ModelKind::ALL {
            let model = ml::train(kind, &split.train, &hp, 42)?;
            let eval = ml::evaluate(&model, &split.test)?;
            let auc: Vec<String> = eval.roc.iter().map(|c| format!("{}={:.2}", c.positive_class, c.auc)).collect();
            println!(
                "  {:<14} accuracy {:.3}  weighted F1 {:.3}  AUC {}",
                kind.name(),
                eval.report.accuracy,
                eval.report.weighted_avg.f1,
                auc.join(" ")
            );
        }
    }
    Ok(())
}
