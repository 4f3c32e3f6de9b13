use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use polylex::lexicon::serialize_lexicon;
use polylex::synth::{contextual_lexicon, synthetic_lexicon};

const MINI: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/data/mini_lexicon.csv");
const SENTENCES: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/data/mini_sentences.csv");

fn polylex(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_polylex"))
        .args(args)
        .env_remove("POLYLEX_LEXICON")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn write_synthetic(dir: &Path) -> PathBuf {
    let p = dir.join("synthetic.csv");
    fs::write(&p, serialize_lexicon(&synthetic_lexicon(300, 4))).unwrap();
    p
}

fn read_dir_sorted(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<(String, Vec<u8>)> = fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().to_string_lossy().into_owned(), fs::read(e.path()).unwrap())
        })
        .collect();
    files.sort();
    files
}

#[test]
fn usage_errors_exit_one_and_help_exits_zero() {
    assert_eq!(polylex(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(polylex(&["score", "--bogus"]).status.code(), Some(1));
    let help = polylex(&["--help"]);
    assert_eq!(help.status.code(), Some(0));
    assert!(stdout(&help).contains("translate"));
}

#[test]
fn data_errors_exit_two() {
    let tmp = tempfile::tempdir().unwrap();
    let missing = tmp.path().join("nope.csv");
    let o = polylex(&["lexicon", "validate", "--in", path(&missing)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(!o.stderr.is_empty());

    let bad = tmp.path().join("bad.csv");
    fs::write(&bad, "french,english\nx,y\n").unwrap();
    assert_eq!(polylex(&["lexicon", "validate", "--in", path(&bad)]).status.code(), Some(2));
}

#[test]
fn translate_single_sentence() {
    let o = polylex(&["translate", "--lex", MINI, "--text", "Ek vertrou haar", "--from", "afrikaans", "--to", "english"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "i trust her");
}

#[test]
fn lexicon_path_from_environment() {
    let o = Command::new(env!("CARGO_BIN_EXE_polylex"))
        .args(["translate", "--text", "Thank you.", "--from", "english", "--to", "french"])
        .env("POLYLEX_LEXICON", MINI)
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "merci");
}

#[test]
fn score_single_sentence_reports_total() {
    let o = polylex(&["score", "--lex", MINI, "--text", "Go tšhaba go wa.", "--language", "sepedi"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.starts_with("-1"), "{out}");
    assert!(out.contains("negative"));
}

#[test]
fn validate_flags_unnormalized_forms() {
    let tmp = tempfile::tempdir().unwrap();
    let dirty = tmp.path().join("dirty.csv");
    let text = fs::read_to_string(MINI).unwrap().replace("food", " Food");
    fs::write(&dirty, text).unwrap();
    let o = polylex(&["lexicon", "validate", "--in", path(&dirty)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stdout(&o).contains("unnormalized"));

    let cleaned = tmp.path().join("clean.csv");
    let report = tmp.path().join("report.json");
    let o = polylex(&["lexicon", "clean", "--in", path(&dirty), "--out", path(&cleaned), "--report", path(&report)]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(polylex(&["lexicon", "validate", "--in", path(&cleaned)]).status.code(), Some(0));
    assert_eq!(fs::read_to_string(MINI).unwrap(), fs::read_to_string(&cleaned).unwrap());
}

#[test]
fn stats_writes_report_and_charts() {
    let tmp = tempfile::tempdir().unwrap();
    let lex = write_synthetic(tmp.path());
    let out = tmp.path().join("stats");
    assert_eq!(polylex(&["lexicon", "stats", "--in", path(&lex), "--out", path(&out)]).status.code(), Some(0));
    for f in ["eda.json", "polarity.svg", "pos_polarity.svg", "score_density.svg", "correlation.svg", "manifest.json"] {
        assert!(out.join(f).is_file(), "missing {f}");
    }
    let eda: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("eda.json")).unwrap()).unwrap();
    assert_eq!(eda["entries"], 300);
    assert!(fs::read_to_string(out.join("polarity.svg")).unwrap().starts_with("<svg"));
}

#[test]
fn commands_do_not_modify_inputs_and_are_deterministic() {
    let tmp = tempfile::tempdir().unwrap();
    let lex = write_synthetic(tmp.path());
    let before = fs::read(&lex).unwrap();
    let run = |name: &str| {
        let out = tmp.path().join(name);
        let o = polylex(&[
            "ml", "train", "--lex", path(&lex), "--task", "polarity", "--model", "all", "--n-trees", "5",
            "--svm-epochs", "5", "--seed", "3", "--out", path(&out),
        ]);
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
        out
    };
    let (a, b) = (run("a"), run("b"));
    assert_eq!(fs::read(&lex).unwrap(), before);
    let (fa, fb) = (read_dir_sorted(&a), read_dir_sorted(&b));
    let names: Vec<&String> = fa.iter().map(|(n, _)| n).collect();
    for model in ["decision_tree", "random_forest", "gaussian_nb", "linear_svm"] {
        assert!(names.iter().any(|n| n.starts_with(&format!("model_{model}"))), "no {model} model in {names:?}");
    }
    for ((na, ca), (nb, cb)) in fa.iter().zip(&fb) {
        assert_eq!(na, nb);
        if na != "config.json" && na != "manifest.json" {
            assert_eq!(ca, cb, "{na} differs between runs");
        }
    }

    let model = a.join("model_gaussian_nb.json");
    let eval = tmp.path().join("eval");
    let o = polylex(&["ml", "eval", "--lex", path(&lex), "--model", path(&model), "--out", path(&eval)]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("weighted avg"));
}

#[test]
fn compare_writes_tables() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("cmp");
    let o = polylex(&["compare", "--lex", MINI, "--in", SENTENCES, "--to", "english", "--out", path(&out)]);
    assert_eq!(o.status.code(), Some(0));
    let summary: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["rows"], 21);
    let translations = fs::read_to_string(out.join("translations.csv")).unwrap();
    assert!(translations.contains("i trust her"));
    assert!(out.join("polarity_by_scorer.svg").is_file());
}

#[test]
fn contextual_pipeline_end_to_end() {
    let tmp = tempfile::tempdir().unwrap();
    let lex = tmp.path().join("ctx_lexicon.csv");
    fs::write(&lex, serialize_lexicon(&contextual_lexicon(20, 6, 2))).unwrap();
    let corpus = tmp.path().join("corpus.tsv");
    let o = polylex(&["ctx", "generate", "--lex", path(&lex), "--n", "300", "--seed", "5", "--out", path(&corpus)]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(fs::read_to_string(&corpus).unwrap().lines().count(), 300);

    let trained = tmp.path().join("trained");
    let o = polylex(&["ctx", "train", "--corpus", path(&corpus), "--epochs", "8", "--out", path(&trained)]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    for f in ["model.json", "loss.csv", "loss.svg", "train.tsv", "validation.tsv", "test.tsv", "metrics.json"] {
        assert!(trained.join(f).is_file(), "missing {f}");
    }
    assert_eq!(fs::read_to_string(trained.join("loss.csv")).unwrap().lines().count(), 9);

    let model = trained.join("model.json");
    let eval = tmp.path().join("eval");
    let o = polylex(&["ctx", "eval", "--model", path(&model), "--corpus", path(&trained.join("test.tsv")), "--out", path(&eval)]);
    assert_eq!(o.status.code(), Some(0));
    assert!(eval.join("confusion.json").is_file());

    let explained = tmp.path().join("explain");
    let o = polylex(&[
        "explain", "--model", path(&model), "--corpus", path(&trained.join("test.tsv")), "--steps", "16", "--out",
        path(&explained),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let lines = fs::read_to_string(explained.join("attributions.jsonl")).unwrap();
    let n = lines.lines().count();
    assert_eq!(n, 30);
    assert!(explained.join(format!("heatmap_{:04}.svg", n - 1)).is_file());
    assert!(stdout(&o).contains("Confidence"));

    let o = polylex(&["explain", "--model", path(&model), "--text", "no markers here", "--out", path(&explained)]);
    assert_eq!(o.status.code(), Some(2));
}
