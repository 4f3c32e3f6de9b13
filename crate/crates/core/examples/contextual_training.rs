//! Generates a target-marked corpus from context-dependent lexicon forms,
//! trains the contextual classifier with class weighting and evaluates it.

use polylex::context::{evaluate, generate_dataset, split_70_20_10, train, ClassWeights, TrainConfig};
use polylex::lexicon::{Language, Polarity};
use polylex::synth::contextual_lexicon;

fn main() -> anyhow::Result<()> {
    let lex = contextual_lexicon(40, 10, 1);
    let corpus = generate_dataset(&lex, Language::English, 1000, 1)?;
    println!("example: {} -> {:?}", corpus[0].text, corpus[0].label);

    let split = split_70_20_10(&corpus, 1)?;
    let labels: Vec<Polarity> = split.train.iter().filter_map(|s| s.label).collect();
    let weights = ClassWeights::inverse_frequency(&labels);
    println!("class weights {weights}");

    let (model, log) = train(&TrainConfig::default(), &split.train, &split.validation, &weights)?;
    for record in log.iter().step_by(5) {
        println!(
            "epoch {:>2}  train loss {:.4}  val accuracy {:.3}",
            record.epoch,
            record.train_loss,
            record.val_accuracy.unwrap_or(f64::NAN)
        );
    }
    let eval = evaluate(&model, &split.test)?;
    print!("{}", eval.report.to_table());
    Ok(())
}
