//! Token attributions for a trained contextual model, with the completeness
//! residual for both explained outputs.

use polylex::context::{generate_dataset, split_70_20_10, train, ClassWeights, OutputKind, TrainConfig};
use polylex::lexicon::{Language, Polarity};
use polylex::synth::contextual_lexicon;
use polylex::xai::{explain_batch, heatmap_cells, summary_table, IgConfig};

fn main() -> anyhow::Result<()> {
    let lex = contextual_lexicon(40, 10, 1);
    let corpus = generate_dataset(&lex, Language::English, 1000, 1)?;
    let split = split_70_20_10(&corpus, 1)?;
    let labels: Vec<Polarity> = split.train.iter().filter_map(|s| s.label).collect();
    let weights = ClassWeights::inverse_frequency(&labels);
    let (model, _) = train(&TrainConfig::default(), &split.train, &split.validation, &weights)?;

    let sentences = &split.test[..5];
    let maps = explain_batch(&model, sentences, &IgConfig::default())?;
    print!("{}", summary_table(&maps));
    for cell in heatmap_cells(&maps[0]) {
        println!("  {:<14} {:>9.4} {}", cell.token, cell.attribution, cell.color);
    }

    for output in [OutputKind::Logit, OutputKind::Probability] {
        for steps in [8, 64, 512] {
            let config = IgConfig { steps, output, ..IgConfig::default() };
            let maps = explain_batch(&model, sentences, &config)?;
            let worst = maps.iter().map(|m| m.convergence_delta.abs()).fold(0.0, f64::max);
            println!("{output:?} output, {steps:>3} steps: max |delta| {worst:.3e}");
        }
    }
    Ok(())
}
