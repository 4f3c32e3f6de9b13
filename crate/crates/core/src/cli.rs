//! Command-line front end. Exit codes: 0 success, 1 usage error, 2 data
//! error. Diagnostics go to stderr; data goes to files or stdout.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::context::{
    self, generate_dataset_with, read_corpus, split_70_20_10, write_corpus, ClassWeights, ContextModel,
    EpochRecord, GeneratorConfig, ModelConfig, OutputKind, TrainConfig,
};
use crate::lexicon::{compute_eda, parse_lexicon, serialize_lexicon, Language, Lexicon, Polarity};
use crate::metrics::MetricsReport;
use crate::ml::{self, Dataset, ForestParams, Hyperparameters, ModelKind, SvmParams, Task, TrainedModel, TreeParams};
use crate::score::{self, BaselineKind, ScoreMode};
use crate::svg;
use crate::translate::{self, read_translation_requests, translate_batch, write_translation_table};
use crate::xai::{self, BaselineKind as IgBaseline, IgConfig};

pub const LEXICON_ENV: &str = "POLYLEX_LEXICON";

#[derive(Debug, Parser, Serialize)]
#[command(name = "polylex", version, about = "Multilingual lexicon sentiment, translation and classification toolkit")]
pub struct Cli {
    /// Worker threads for parallel stages (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand, Serialize)]
pub enum Command {
    /// Lexicon validation, cleaning and statistics.
    #[command(subcommand)]
    Lexicon(LexiconCommand),
    /// Word-level translation of one sentence or a CSV batch.
    Translate(TranslateArgs),
    /// Sentence scores in both modes plus the baseline.
    Score(ScoreArgs),
    /// Translation and sentiment tables with agreement summary.
    Compare(CompareArgs),
    /// Classical classifiers over lexicon features.
    #[command(subcommand)]
    Ml(MlCommand),
    /// Contextual target-word model.
    #[command(subcommand)]
    Ctx(CtxCommand),
    /// Integrated Gradients attributions for a contextual model.
    Explain(ExplainArgs),
}

#[derive(Debug, Args, Serialize)]
pub struct LexiconSource {
    /// Lexicon CSV.
    #[arg(long = "lex", env = LEXICON_ENV)]
    pub lex: PathBuf,
}

#[derive(Debug, Subcommand, Serialize)]
pub enum LexiconCommand {
    /// Report duplicates and unnormalized forms; exits 2 when any are found.
    Validate {
        #[arg(long = "in")]
        input: PathBuf,
        /// Report JSON path (stdout when absent).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Normalize forms and drop duplicates.
    Clean {
        #[arg(long = "in")]
        input: PathBuf,
        /// Cleaned lexicon CSV.
        #[arg(long)]
        out: PathBuf,
        /// Cleaning report JSON.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Exploratory statistics as JSON plus SVG charts.
    Stats {
        #[arg(long = "in")]
        input: PathBuf,
        /// Output directory.
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Debug, Args, Serialize)]
pub struct TranslateArgs {
    #[command(flatten)]
    pub lexicon: LexiconSource,
    /// Sentence to translate; prints the translation.
    #[arg(long, conflicts_with = "input", required_unless_present = "input")]
    pub text: Option<String>,
    #[arg(long, requires = "text")]
    pub from: Option<Language>,
    #[arg(long, requires = "text")]
    pub to: Option<Language>,
    /// CSV `sentence,source_language,target_language`.
    #[arg(long = "in")]
    pub input: Option<PathBuf>,
    /// Output CSV for batch mode (stdout when absent).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct ScoreArgs {
    #[command(flatten)]
    pub lexicon: LexiconSource,
    /// Single sentence; prints its total, word scores and polarity.
    #[arg(long, conflicts_with = "input", required_unless_present = "input")]
    pub text: Option<String>,
    #[arg(long, requires = "text")]
    pub language: Option<Language>,
    /// CSV `sentence,language`.
    #[arg(long = "in")]
    pub input: Option<PathBuf>,
    /// Mode for single-sentence output; batch output always carries both.
    #[arg(long, default_value = "v2")]
    pub mode: ScoreMode,
    #[arg(long, default_value = "builtin")]
    #[serde(serialize_with = "display")]
    pub baseline: BaselineKind,
    /// Comparison CSV (stdout when absent).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct CompareArgs {
    #[command(flatten)]
    pub lexicon: LexiconSource,
    /// CSV `sentence,language`.
    #[arg(long = "in")]
    pub input: PathBuf,
    /// Language of the translations table.
    #[arg(long, default_value = "english")]
    pub to: Language,
    #[arg(long, default_value = "builtin")]
    #[serde(serialize_with = "display")]
    pub baseline: BaselineKind,
    /// Output directory.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Subcommand, Serialize)]
pub enum MlCommand {
    /// Train on a stratified split and evaluate on the held-out part.
    Train(MlTrainArgs),
    /// Evaluate a saved model on the features of a lexicon.
    Eval(MlEvalArgs),
}

#[derive(Debug, Args, Serialize)]
pub struct MlTrainArgs {
    #[command(flatten)]
    pub lexicon: LexiconSource,
    #[arg(long, default_value = "pos")]
    pub task: Task,
    /// dt | rf | gnb | svm | all.
    #[arg(long, default_value = "all")]
    pub model: String,
    #[arg(long, default_value_t = 0.8)]
    pub train_fraction: f64,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    #[arg(long, default_value_t = 12)]
    pub max_depth: usize,
    #[arg(long, default_value_t = 100)]
    pub n_trees: usize,
    #[arg(long, default_value_t = 1e-9)]
    pub var_smoothing: f64,
    #[arg(long, default_value_t = 1e-4)]
    pub lambda: f64,
    #[arg(long, default_value_t = 50)]
    pub svm_epochs: usize,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct MlEvalArgs {
    #[command(flatten)]
    pub lexicon: LexiconSource,
    /// Model JSON written by `ml train`.
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Subcommand, Serialize)]
pub enum CtxCommand {
    /// Generate a marked corpus from context-dependent lexicon forms.
    Generate(CtxGenerateArgs),
    /// Train on a 70:20:10 split of a corpus.
    Train(CtxTrainArgs),
    /// Evaluate a saved model on a corpus.
    Eval(CtxEvalArgs),
}

#[derive(Debug, Args, Serialize)]
pub struct CtxGenerateArgs {
    #[command(flatten)]
    pub lexicon: LexiconSource,
    #[arg(long, default_value = "english")]
    pub language: Language,
    #[arg(long, default_value_t = 1000)]
    pub n: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Relative negative,neutral,positive frequencies.
    #[arg(long, default_value = "1,1,1", value_parser = parse_triple)]
    pub label_weights: [f64; 3],
    /// Corpus TSV.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum WeightScheme {
    Inverse,
    Uniform,
}

#[derive(Debug, Args, Serialize)]
pub struct CtxTrainArgs {
    /// Corpus TSV.
    #[arg(long)]
    pub corpus: PathBuf,
    #[arg(long, default_value_t = 30)]
    pub epochs: usize,
    #[arg(long, default_value_t = 0.5)]
    pub learning_rate: f64,
    #[arg(long, default_value_t = 32)]
    pub batch_size: usize,
    #[arg(long, default_value_t = 32)]
    pub embedding_dim: usize,
    #[arg(long, default_value_t = 5)]
    pub window: usize,
    #[arg(long, value_enum, default_value = "inverse")]
    pub class_weights: WeightScheme,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct CtxEvalArgs {
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long)]
    pub corpus: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct ExplainArgs {
    #[arg(long)]
    pub model: PathBuf,
    /// One marked sentence.
    #[arg(long, conflicts_with = "corpus", required_unless_present = "corpus")]
    pub text: Option<String>,
    /// Corpus TSV; labels are ignored.
    #[arg(long)]
    pub corpus: Option<PathBuf>,
    #[arg(long, default_value_t = 50)]
    pub steps: usize,
    #[arg(long, default_value = "zero")]
    #[serde(serialize_with = "display")]
    pub baseline: IgBaseline,
    /// Explained scalar: logit | probability.
    #[arg(long, default_value = "logit")]
    pub output: OutputKind,
    /// Class to explain instead of the predicted one.
    #[arg(long)]
    pub class: Option<Polarity>,
    #[arg(long)]
    pub out: PathBuf,
}

fn display<T: std::fmt::Display, S: serde::Serializer>(v: &T, s: S) -> Result<S::Ok, S::Error> {
    s.collect_str(v)
}

fn parse_triple(s: &str) -> Result<[f64; 3], String> {
    let parts: Vec<f64> = s
        .split(',')
        .map(|p| p.trim().parse::<f64>().map_err(|e| format!("`{p}`: {e}")))
        .collect::<Result<_, _>>()?;
    match parts.as_slice() {
        &[a, b, c] if parts.iter().all(|v| v.is_finite() && *v >= 0.0) => Ok([a, b, c]),
        _ => Err("expected three non-negative numbers: negative,neutral,positive".into()),
    }
}

/// Collects written files and finishes with `config.json` and `manifest.json`.
struct OutputDir {
    root: PathBuf,
    files: Vec<String>,
}

#[derive(Serialize)]
struct Manifest<'a> {
    command: &'a str,
    config: &'a str,
    files: Vec<ManifestEntry<'a>>,
}

#[derive(Serialize)]
struct ManifestEntry<'a> {
    path: &'a str,
    bytes: u64,
}

impl OutputDir {
    fn create(root: &Path) -> Result<OutputDir> {
        fs::create_dir_all(root).with_context(|| format!("creating {}", root.display()))?;
        Ok(OutputDir { root: root.to_path_buf(), files: Vec::new() })
    }

    fn write(&mut self, name: &str, contents: impl AsRef<[u8]>) -> Result<()> {
        let path = self.root.join(name);
        fs::write(&path, contents).with_context(|| format!("writing {}", path.display()))?;
        self.files.push(name.to_string());
        Ok(())
    }

    fn json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<()> {
        self.write(name, serde_json::to_string_pretty(value)? + "\n")
    }

    fn finish(mut self, command: &str, cli: &Cli) -> Result<()> {
        self.json("config.json", cli)?;
        let mut files = Vec::new();
        for name in &self.files {
            let bytes = fs::metadata(self.root.join(name))?.len();
            files.push(ManifestEntry { path: name, bytes });
        }
        let manifest = Manifest { command, config: "config.json", files };
        let text = serde_json::to_string_pretty(&manifest)? + "\n";
        fs::write(self.root.join("manifest.json"), text)?;
        Ok(())
    }
}

fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn load_lexicon(path: &Path) -> Result<Lexicon> {
    let file = fs::File::open(path).with_context(|| format!("opening {}", path.display()))?;
    parse_lexicon(file).with_context(|| format!("parsing {}", path.display()))
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    if let Some(n) = cli.threads {
        if n == 0 {
            eprintln!("error: --threads must be at least 1");
            return 1;
        }
        // a pool configured earlier in the process is kept
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    match dispatch(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            2
        }
    }
}

fn dispatch(cli: &Cli) -> Result<i32> {
    match &cli.command {
        Command::Lexicon(c) => lexicon_command(c, cli),
        Command::Translate(a) => translate_command(a),
        Command::Score(a) => score_command(a),
        Command::Compare(a) => compare_command(a, cli),
        Command::Ml(MlCommand::Train(a)) => ml_train(a, cli),
        Command::Ml(MlCommand::Eval(a)) => ml_eval(a, cli),
        Command::Ctx(CtxCommand::Generate(a)) => ctx_generate(a),
        Command::Ctx(CtxCommand::Train(a)) => ctx_train(a, cli),
        Command::Ctx(CtxCommand::Eval(a)) => ctx_eval(a, cli),
        Command::Explain(a) => explain_command(a, cli),
    }
}

fn lexicon_command(c: &LexiconCommand, cli: &Cli) -> Result<i32> {
    match c {
        LexiconCommand::Validate { input, out } => {
            let report = load_lexicon(input)?.validate();
            emit(out.as_deref(), &(serde_json::to_string_pretty(&report)? + "\n"))?;
            if !report.is_clean() {
                eprintln!("{} issue(s) found", report.issues.len());
                return Ok(2);
            }
            Ok(0)
        }
        LexiconCommand::Clean { input, out, report } => {
            let (clean, rep) = load_lexicon(input)?.clean();
            if out == input {
                bail!("refusing to overwrite the input lexicon");
            }
            fs::write(out, serialize_lexicon(&clean)).with_context(|| format!("writing {}", out.display()))?;
            if let Some(r) = report {
                fs::write(r, serde_json::to_string_pretty(&rep)? + "\n")?;
            }
            eprintln!(
                "{} -> {} entries, {} form change(s), {} removal(s)",
                rep.entries_before,
                rep.entries_after,
                rep.modifications.len(),
                rep.removals.len()
            );
            Ok(0)
        }
        LexiconCommand::Stats { input, out } => {
            let lex = load_lexicon(input)?;
            let Some(eda) = compute_eda(&lex) else { bail!("lexicon is empty") };
            let mut dir = OutputDir::create(out)?;
            dir.json("eda.json", &eda)?;
            write_eda_charts(&mut dir, &eda)?;
            dir.finish("lexicon stats", cli)?;
            Ok(0)
        }
    }
}

fn write_eda_charts(dir: &mut OutputDir, eda: &crate::lexicon::EdaReport) -> Result<()> {
    let labels: Vec<String> = eda.polarity_counts.keys().map(|p| p.to_string()).collect();
    let values: Vec<f64> = eda.polarity_counts.values().map(|&c| c as f64).collect();
    dir.write("polarity.svg", svg::bar_chart("Entries by polarity", &labels, &values))?;

    let rows: Vec<String> = eda.pos_by_polarity.keys().map(|p| p.to_string()).collect();
    let cols: Vec<String> = Polarity::ALL.iter().map(|p| p.to_string()).collect();
    let counts: Vec<Vec<Option<f64>>> = eda
        .pos_by_polarity
        .values()
        .map(|m| Polarity::ALL.iter().map(|p| Some(*m.get(p).unwrap_or(&0) as f64)).collect())
        .collect();
    let max = counts.iter().flatten().flatten().cloned().fold(0.0, f64::max).max(1.0);
    dir.write(
        "pos_polarity.svg",
        svg::matrix_heatmap("Part of speech by polarity", &rows, &cols, &counts, |v| svg::sequential_colour(v / max)),
    )?;

    let series: Vec<(String, Vec<(f64, f64)>)> = eda
        .per_language_histograms
        .iter()
        .map(|(lang, counts)| {
            let total = counts.iter().sum::<usize>().max(1) as f64;
            let pts = eda
                .histogram_centres
                .iter()
                .zip(counts)
                .map(|(&c, &n)| (c as f64, n as f64 / total))
                .collect();
            (lang.to_string(), pts)
        })
        .collect();
    dir.write("score_density.svg", svg::line_chart("Score distribution by language", "score", "share of entries", &series))?;

    let names: Vec<String> = eda.languages.iter().map(|l| l.to_string()).collect();
    dir.write(
        "correlation.svg",
        svg::matrix_heatmap("Cross-language score correlation", &names, &names, &eda.cross_language_correlation, svg::diverging_colour),
    )
}

fn translate_command(a: &TranslateArgs) -> Result<i32> {
    let lex = load_lexicon(&a.lexicon.lex)?;
    if let Some(text) = &a.text {
        let (Some(from), Some(to)) = (a.from, a.to) else { bail!("--text needs --from and --to") };
        let r = translate::translate(text, from, to, &lex);
        println!("{}", r.translated_text);
        if r.unknown_count > 0 {
            eprintln!("{} token(s) had no {to} form", r.unknown_count);
        }
        return Ok(0);
    }
    let input = a.input.as_ref().expect("clap requires --text or --in");
    let requests = read_translation_requests(fs::File::open(input)?)?;
    let rows = translate_batch(&requests, &lex);
    let mut buf = Vec::new();
    write_translation_table(&rows, &mut buf)?;
    emit(a.out.as_deref(), &String::from_utf8(buf)?)?;
    Ok(0)
}

fn score_command(a: &ScoreArgs) -> Result<i32> {
    let lex = load_lexicon(&a.lexicon.lex)?;
    if let Some(text) = &a.text {
        let Some(language) = a.language else { bail!("--text needs --language") };
        let s = score::score_sentence(text, language, &lex, a.mode);
        println!("{}\t{}\t{}", s.total_score, s.word_scores_string(), s.polarity);
        return Ok(0);
    }
    let input = a.input.as_ref().expect("clap requires --text or --in");
    let rows = score::read_score_requests(fs::File::open(input)?)?;
    let report = score::score_batch(&rows, &lex, &a.baseline.scorer());
    let mut buf = Vec::new();
    score::write_comparison_table(&report, &mut buf)?;
    emit(a.out.as_deref(), &String::from_utf8(buf)?)?;
    eprintln!("agreement(v2, baseline) = {:.4}", report.agreement);
    Ok(0)
}

fn compare_command(a: &CompareArgs, cli: &Cli) -> Result<i32> {
    let lex = load_lexicon(&a.lexicon.lex)?;
    let rows = score::read_score_requests(fs::File::open(&a.input)?)?;
    let requests: Vec<(String, Language, Language)> = rows.iter().map(|(s, l)| (s.clone(), *l, a.to)).collect();
    let translations = translate_batch(&requests, &lex);
    let report = score::score_batch(&rows, &lex, &a.baseline.scorer());

    let mut dir = OutputDir::create(&a.out)?;
    let mut buf = Vec::new();
    write_translation_table(&translations, &mut buf)?;
    dir.write("translations.csv", &buf)?;
    buf.clear();
    score::write_comparison_table(&report, &mut buf)?;
    dir.write("sentiment.csv", &buf)?;
    #[derive(Serialize)]
    struct Summary<'a> {
        rows: usize,
        agreement_v2_baseline: f64,
        polarity_counts: &'a std::collections::BTreeMap<String, std::collections::BTreeMap<Polarity, usize>>,
    }
    dir.json(
        "summary.json",
        &Summary { rows: report.rows.len(), agreement_v2_baseline: report.agreement, polarity_counts: &report.polarity_counts },
    )?;
    let modes: Vec<String> = report.polarity_counts.keys().cloned().collect();
    let cols: Vec<String> = Polarity::ALL.iter().map(|p| p.to_string()).collect();
    let matrix: Vec<Vec<Option<f64>>> = report
        .polarity_counts
        .values()
        .map(|m| Polarity::ALL.iter().map(|p| Some(m[p] as f64)).collect())
        .collect();
    let max = report.rows.len().max(1) as f64;
    dir.write(
        "polarity_by_scorer.svg",
        svg::matrix_heatmap("Polarity by scorer", &modes, &cols, &matrix, |v| svg::sequential_colour(v / max)),
    )?;
    dir.finish("compare", cli)?;
    Ok(0)
}

fn parse_kinds(spec: &str) -> Result<Vec<ModelKind>> {
    if spec == "all" {
        return Ok(ModelKind::ALL.to_vec());
    }
    spec.split(',').map(|s| s.trim().parse::<ModelKind>().map_err(anyhow::Error::msg)).collect()
}

fn write_evaluation(dir: &mut OutputDir, prefix: &str, eval: &ml::Evaluation) -> Result<()> {
    dir.json(&format!("{prefix}metrics.json"), &eval.report)?;
    dir.write(&format!("{prefix}report.txt"), eval.report.to_table())?;
    dir.json(&format!("{prefix}confusion.json"), &eval.confusion)?;
    write_roc(dir, prefix, eval.roc.iter())
}

fn write_roc<'a>(dir: &mut OutputDir, prefix: &str, curves: impl Iterator<Item = &'a crate::metrics::RocCurve>) -> Result<()> {
    let mut series = Vec::new();
    for c in curves {
        dir.write(&format!("{prefix}roc_{}.csv", c.positive_class), c.to_csv())?;
        series.push((format!("{} (AUC {:.2})", c.positive_class, c.auc), c.points.clone()));
    }
    if !series.is_empty() {
        dir.write(
            &format!("{prefix}roc.svg"),
            svg::line_chart("One-vs-rest ROC", "false positive rate", "true positive rate", &series),
        )?;
    }
    Ok(())
}

fn ml_train(a: &MlTrainArgs, cli: &Cli) -> Result<i32> {
    let kinds = parse_kinds(&a.model)?;
    let lex = load_lexicon(&a.lexicon.lex)?;
    let data = Dataset::from_lexicon(&lex, a.task);
    let split = ml::split(&data, a.train_fraction, a.seed)?;
    let tree = TreeParams { max_depth: a.max_depth, ..TreeParams::default() };
    let hp = Hyperparameters {
        tree,
        forest: ForestParams { n_trees: a.n_trees, tree, ..ForestParams::default() },
        var_smoothing: a.var_smoothing,
        svm: SvmParams { lambda: a.lambda, epochs: a.svm_epochs, ..SvmParams::default() },
    };
    let mut dir = OutputDir::create(&a.out)?;
    dir.write("features.csv", data.to_csv())?;
    dir.write("train.csv", split.train.to_csv())?;
    dir.write("test.csv", split.test.to_csv())?;
    let mut summary: Vec<(String, MetricsReport)> = Vec::new();
    for kind in kinds {
        let model = ml::train(kind, &split.train, &hp, a.seed)?;
        dir.write(&format!("model_{}.json", kind.name()), model.to_json() + "\n")?;
        let eval = ml::evaluate(&model, &split.test)?;
        write_evaluation(&mut dir, &format!("{}_", kind.name()), &eval)?;
        eprintln!("{}: accuracy {:.4} on {} test rows", kind.name(), eval.report.accuracy, split.test.len());
        summary.push((kind.name().to_string(), eval.report));
    }
    let labels: Vec<String> = summary.iter().map(|(k, _)| k.clone()).collect();
    let acc: Vec<f64> = summary.iter().map(|(_, r)| r.accuracy).collect();
    dir.write("accuracy.svg", svg::bar_chart("Test accuracy by model", &labels, &acc))?;
    dir.json("summary.json", &summary)?;
    dir.finish("ml train", cli)?;
    Ok(0)
}

fn ml_eval(a: &MlEvalArgs, cli: &Cli) -> Result<i32> {
    let model = TrainedModel::from_json(&read_text(&a.model)?)?;
    let lex = load_lexicon(&a.lexicon.lex)?;
    let data = Dataset::from_lexicon(&lex, model.task);
    let eval = ml::evaluate(&model, &data)?;
    let mut dir = OutputDir::create(&a.out)?;
    write_evaluation(&mut dir, "", &eval)?;
    print!("{}", eval.report.to_table());
    dir.finish("ml eval", cli)?;
    Ok(0)
}

fn ctx_generate(a: &CtxGenerateArgs) -> Result<i32> {
    let lex = load_lexicon(&a.lexicon.lex)?;
    let config = GeneratorConfig { label_weights: a.label_weights, ..GeneratorConfig::default() };
    let data = generate_dataset_with(&lex, a.language, a.n, a.seed, &config)?;
    fs::write(&a.out, write_corpus(&data)).with_context(|| format!("writing {}", a.out.display()))?;
    eprintln!("{} sentences", data.len());
    Ok(0)
}

fn write_ctx_evaluation(dir: &mut OutputDir, eval: &context::ContextEvaluation) -> Result<()> {
    dir.json("metrics.json", &eval.report)?;
    dir.write("report.txt", eval.report.to_table())?;
    dir.json("confusion.json", &eval.confusion)?;
    write_roc(dir, "", eval.roc.iter().filter_map(|(_, c)| c.as_ref()))
}

fn ctx_train(a: &CtxTrainArgs, cli: &Cli) -> Result<i32> {
    let data = read_corpus(&read_text(&a.corpus)?)?;
    let split = split_70_20_10(&data, a.seed)?;
    if !split.absent_classes.is_empty() {
        eprintln!("classes absent from the corpus: {:?}", split.absent_classes);
    }
    let labels = context::labels_of(&split.train)?;
    let weights = match a.class_weights {
        WeightScheme::Inverse => ClassWeights::inverse_frequency(&labels),
        WeightScheme::Uniform => ClassWeights::uniform(),
    };
    let config = TrainConfig {
        model: ModelConfig { embedding_dim: a.embedding_dim, window: a.window, ..ModelConfig::default() },
        epochs: a.epochs,
        learning_rate: a.learning_rate,
        batch_size: a.batch_size,
        seed: a.seed,
    };
    let (model, log) = context::train(&config, &split.train, &split.validation, &weights)?;
    let eval = context::evaluate(&model, &split.test)?;

    let mut dir = OutputDir::create(&a.out)?;
    dir.write("model.json", model.to_json() + "\n")?;
    dir.write("loss.csv", EpochRecord::csv(&log))?;
    let curve = |f: fn(&EpochRecord) -> Option<f64>| log.iter().filter_map(|r| f(r).map(|v| (r.epoch as f64, v))).collect();
    dir.write(
        "loss.svg",
        svg::line_chart(
            "Class-weighted loss",
            "epoch",
            "loss",
            &[("train".into(), curve(|r| Some(r.train_loss))), ("validation".into(), curve(|r| r.val_loss))],
        ),
    )?;
    dir.write("train.tsv", write_corpus(&split.train))?;
    dir.write("validation.tsv", write_corpus(&split.validation))?;
    dir.write("test.tsv", write_corpus(&split.test))?;
    write_ctx_evaluation(&mut dir, &eval)?;
    eprintln!("class weights: {weights}");
    eprintln!("test accuracy {:.4} on {} sentences", eval.report.accuracy, split.test.len());
    dir.finish("ctx train", cli)?;
    Ok(0)
}

fn ctx_eval(a: &CtxEvalArgs, cli: &Cli) -> Result<i32> {
    let model = ContextModel::from_json(&read_text(&a.model)?)?;
    let data = read_corpus(&read_text(&a.corpus)?)?;
    let eval = context::evaluate(&model, &data)?;
    let mut dir = OutputDir::create(&a.out)?;
    write_ctx_evaluation(&mut dir, &eval)?;
    print!("{}", eval.report.to_table());
    dir.finish("ctx eval", cli)?;
    Ok(0)
}

fn explain_command(a: &ExplainArgs, cli: &Cli) -> Result<i32> {
    let model = ContextModel::from_json(&read_text(&a.model)?)?;
    let sentences = match (&a.text, &a.corpus) {
        (Some(t), _) => vec![context::parse_marked(t)?],
        (None, Some(p)) => read_corpus(&read_text(p)?)?,
        (None, None) => unreachable!("clap requires --text or --corpus"),
    };
    let config = IgConfig { steps: a.steps, baseline: a.baseline, output: a.output, target_class: a.class };
    let maps = xai::explain_batch(&model, &sentences, &config)?;
    let mut dir = OutputDir::create(&a.out)?;
    dir.write("attributions.jsonl", xai::to_jsonl(&maps))?;
    let table = xai::summary_table(&maps);
    dir.write("summary.md", &table)?;
    for (i, m) in maps.iter().enumerate() {
        dir.write(&format!("heatmap_{i:04}.csv"), xai::heatmap_csv(&xai::heatmap_cells(m)))?;
        dir.write(&format!("heatmap_{i:04}.svg"), xai::heatmap_svg(m))?;
    }
    print!("{table}");
    dir.finish("explain", cli)?;
    Ok(0)
}
