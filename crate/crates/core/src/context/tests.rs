use super::model::{cross_entropy, window_positions};
use super::*;
use crate::lexicon::Lexicon;
use crate::synth::contextual_lexicon;

fn corpus(n: usize, seed: u64) -> Vec<TargetSentence> {
    generate_dataset(&contextual_lexicon(12, 4, 3), Language::English, n, seed).unwrap()
}

fn small_model(data: &[TargetSentence], seed: u64) -> ContextModel {
    let config = ModelConfig { embedding_dim: 4, window: 2, init_scale: 0.5 };
    let mut m = ContextModel::initialize(config, Vocabulary::build(data), seed);
    m.bias = vec![0.1, -0.2, 0.05];
    m
}

#[test]
fn parse_marked_examples() {
    let s = parse_marked("[TARGET] earth [/TARGET] is the third planet from the sun.").unwrap();
    assert_eq!(s.target, "earth");
    assert_eq!(s.target_index, 0);
    assert_eq!(s.tokens_after().len(), 7);
    assert_eq!(s.tokens_after()[6], "sun");

    let s = parse_marked("They [target] Go Wa [/Target] today!").unwrap();
    assert_eq!(s.target, "go wa");
    assert_eq!(s.tokens, vec!["they", "go wa", "today"]);
    assert_eq!(s.tokens_before(), ["they"]);

    assert!(matches!(parse_marked("no markers here"), Err(ContextError::NoMarkers)));
    assert!(matches!(
        parse_marked("[TARGET] a [/TARGET] [TARGET] b [/TARGET]"),
        Err(ContextError::MultipleMarkers { opens: 2, closes: 2 })
    ));
    assert!(matches!(parse_marked("x [TARGET] only"), Err(ContextError::MultipleMarkers { .. })));
    assert!(matches!(parse_marked("[TARGET] , [/TARGET] x"), Err(ContextError::EmptyTarget)));
    assert!(matches!(parse_marked("[/TARGET] a [TARGET]"), Err(ContextError::Unbalanced)));
}

#[test]
fn vocabulary_layout() {
    let data = corpus(20, 1);
    let v = Vocabulary::build(&data);
    for (i, s) in Vocabulary::SPECIALS.iter().enumerate() {
        assert_eq!(v.id(s), i);
    }
    assert_eq!(v.id("never-seen"), Vocabulary::UNK);
    let rest: Vec<&str> = (4..v.len()).map(|i| v.token(i).unwrap()).collect();
    assert!(rest.windows(2).all(|w| w[0] < w[1]));
    for i in 0..v.len() {
        assert_eq!(v.id(v.token(i).unwrap()), i);
    }
    let json = serde_json::to_string(&v).unwrap();
    assert_eq!(serde_json::from_str::<Vocabulary>(&json).unwrap(), v);
}

#[test]
fn inverse_frequency_weights() {
    use Polarity::*;
    let labels = [vec![Negative; 6], vec![Neutral; 1], vec![Positive; 3]].concat();
    let w = ClassWeights::inverse_frequency(&labels);
    assert_eq!(w.weights, [10.0 / 18.0, 10.0 / 3.0, 10.0 / 9.0]);
    let w = ClassWeights::inverse_frequency(&[Positive, Negative]);
    assert_eq!(w.weights, [2.0 / 3.0, 1.0, 2.0 / 3.0]);
    let w = ClassWeights::inverse_frequency(&[Positive, Positive, Negative, Negative, Negative, Negative]);
    assert_eq!(w.weights, [0.5, 1.0, 1.0]);
}

#[test]
fn softmax_is_normalized() {
    for z in [vec![0.0, 0.0, 0.0], vec![1000.0, -1000.0, 3.0], vec![-745.0, -744.0, -746.0], vec![1e-300, 5.0, -2.0]] {
        let p = softmax(&z);
        assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        assert!(p.iter().all(|v| v.is_finite() && *v >= 0.0));
    }
}

fn assert_close(analytic: f64, numeric: f64, what: &str) {
    let scale = analytic.abs().max(numeric.abs());
    if scale < 1e-7 {
        assert!((analytic - numeric).abs() < 1e-9, "{what}: {analytic} vs {numeric}");
    } else {
        assert!((analytic - numeric).abs() / scale < 1e-4, "{what}: {analytic} vs {numeric}");
    }
}

#[test]
fn parameter_gradients_match_finite_differences() {
    let data = corpus(40, 2);
    let batch = &data[..7];
    let model = small_model(&data, 9);
    let weights = ClassWeights { weights: [0.7, 2.5, 1.3] };
    let (_, g) = model.batch_gradient(batch, &weights).unwrap();
    let h = 1e-6;
    let loss = |m: &ContextModel| m.loss(batch, &weights).unwrap();

    macro_rules! check_group {
        ($field:ident) => {
            for i in 0..model.$field.len() {
                let mut plus = model.clone();
                plus.$field[i] += h;
                let mut minus = model.clone();
                minus.$field[i] -= h;
                let numeric = (loss(&plus) - loss(&minus)) / (2.0 * h);
                assert_close(g.$field[i], numeric, concat!(stringify!($field), " coordinate"));
            }
        };
    }
    check_group!(embeddings);
    check_group!(weights);
    check_group!(bias);
}

#[test]
fn input_gradients_match_finite_differences() {
    let data = corpus(30, 4);
    let model = small_model(&data, 5);
    let h = 1e-6;
    for s in &data[..5] {
        let x = model.input_embeddings(s);
        for kind in [OutputKind::Logit, OutputKind::Probability] {
            for class in Polarity::ALL {
                let (value, grad) = model.output_gradient(&x, s.target_index, class, kind).unwrap();
                let f = |inp: &[Vec<f64>]| {
                    let z = model.logits_from_inputs(inp, s.target_index).unwrap();
                    match kind {
                        OutputKind::Logit => z[class.index()],
                        OutputKind::Probability => softmax(&z)[class.index()],
                    }
                };
                assert_eq!(value, f(&x));
                for i in 0..x.len() {
                    for k in 0..model.dim() {
                        let mut plus = x.clone();
                        plus[i][k] += h;
                        let mut minus = x.clone();
                        minus[i][k] -= h;
                        assert_close(grad[i][k], (f(&plus) - f(&minus)) / (2.0 * h), "input coordinate");
                    }
                }
            }
        }
    }
}

#[test]
fn uniform_weights_give_plain_cross_entropy() {
    let data = corpus(25, 6);
    let model = small_model(&data, 2);
    let weighted = model.loss(&data, &ClassWeights::uniform()).unwrap();
    let plain: f64 = data
        .iter()
        .map(|s| -model.proba(s)[s.label.unwrap().index()].ln())
        .sum::<f64>()
        / data.len() as f64;
    assert!((weighted - plain).abs() < 1e-12);
    assert_eq!(cross_entropy(&[0.0, 0.0, 0.0], 1), 3f64.ln());
}

#[test]
fn duplicated_data_keeps_mean_gradient() {
    let data = corpus(20, 8);
    let model = small_model(&data, 1);
    let w = ClassWeights::inverse_frequency(&labels_of(&data).unwrap());
    let (l1, g1) = model.batch_gradient(&data, &w).unwrap();
    let doubled = [data.clone(), data.clone()].concat();
    let (l2, g2) = model.batch_gradient(&doubled, &w).unwrap();
    assert!((l1 - l2).abs() < 1e-12);
    let (n1, n2) = (g1.norm(), g2.norm());
    let pairs = g1.embeddings.iter().zip(&g2.embeddings).chain(g1.weights.iter().zip(&g2.weights));
    for (a, b) in pairs.chain(g1.bias.iter().zip(&g2.bias)) {
        assert!((a / n1 - b / n2).abs() < 1e-12);
    }
}

#[test]
fn zero_learning_rate_leaves_parameters() {
    let data = corpus(50, 3);
    let config = TrainConfig { learning_rate: 0.0, epochs: 3, ..Default::default() };
    let (model, log) = train(&config, &data, &[], &ClassWeights::uniform()).unwrap();
    let fresh = ContextModel::initialize(config.model, Vocabulary::build(&data), config.seed);
    assert_eq!(model.embeddings, fresh.embeddings);
    assert_eq!(model.weights, fresh.weights);
    assert_eq!(model.bias, fresh.bias);
    assert_eq!(log.len(), 3);
    assert!(log.iter().all(|r| r.val_loss.is_none()));
}

#[test]
fn training_is_deterministic_and_learns() {
    let data = corpus(300, 5);
    let split = split_70_20_10(&data, 1).unwrap();
    let w = ClassWeights::inverse_frequency(&labels_of(&split.train).unwrap());
    let config = TrainConfig { epochs: 15, ..Default::default() };
    let (a, log_a) = train(&config, &split.train, &split.validation, &w).unwrap();
    let (b, log_b) = train(&config, &split.train, &split.validation, &w).unwrap();
    assert_eq!(a, b);
    assert_eq!(log_a, log_b);
    assert!(log_a.last().unwrap().train_loss < log_a[0].train_loss);
    assert!(log_a.last().unwrap().val_accuracy.unwrap() >= 0.9);
    let csv = EpochRecord::csv(&log_a);
    assert_eq!(csv.lines().count(), 16);
}

#[test]
fn training_rejects_bad_input() {
    let data = corpus(12, 1);
    let w = ClassWeights::uniform();
    assert!(matches!(
        train(&TrainConfig { epochs: 0, ..Default::default() }, &data, &[], &w),
        Err(ContextError::NonPositive("epochs"))
    ));
    assert!(matches!(train(&TrainConfig::default(), &[], &[], &w), Err(ContextError::EmptyTrainSet)));
    let unlabeled = vec![parse_marked("[TARGET] x [/TARGET] y").unwrap()];
    assert!(matches!(train(&TrainConfig::default(), &unlabeled, &[], &w), Err(ContextError::Unlabeled(0))));
}

#[test]
fn logits_ignore_tokens_outside_window() {
    let data = corpus(10, 1);
    let model = small_model(&data, 3);
    let s = parse_marked("a b c d e [TARGET] f [/TARGET] g h i j k").unwrap();
    assert_eq!(window_positions(s.tokens.len(), s.target_index, 2), vec![3, 4, 6, 7]);
    let base = model.logits(&s);
    for i in [0, 1, 2, 8, 9, 10] {
        let mut edited = s.clone();
        edited.tokens[i] = data[0].tokens[0].clone();
        assert_eq!(model.logits(&edited), base, "position {i}");
    }
    let mut inside = s.clone();
    inside.tokens[4] = data[0].tokens[0].clone();
    assert_ne!(model.logits(&inside), base);
}

#[test]
fn logits_are_finite_for_all_vocabulary() {
    let data = corpus(40, 2);
    let model = small_model(&data, 2);
    for id in 0..model.vocabulary.len() {
        let tok = model.vocabulary.token(id).unwrap().to_string();
        let s = TargetSentence {
            text: String::new(),
            target: tok.clone(),
            tokens: vec![tok.clone(), tok],
            target_index: 0,
            label: None,
        };
        let p = model.proba(&s);
        assert!(model.logits(&s).iter().all(|z| z.is_finite()));
        assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-9);
    }
}

/// Label implied by the generating rule, read off the lexicon alone.
fn rule_label(s: &TargetSentence, lex: &Lexicon) -> Polarity {
    let polarity_of = |w: &str| {
        lex.lookup(Language::English, w)
            .first()
            .map(|&id| lex.get(id).unwrap().score(Language::English).polarity())
    };
    let ctx: Vec<Option<Polarity>> = s
        .tokens
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != s.target_index)
        .map(|(_, w)| polarity_of(w))
        .collect();
    if ctx.contains(&Some(Polarity::Positive)) {
        Polarity::Positive
    } else if ctx.contains(&Some(Polarity::Negative)) {
        Polarity::Negative
    } else {
        Polarity::Neutral
    }
}

#[test]
fn generated_corpus_properties() {
    let lex = contextual_lexicon(12, 4, 3);
    let a = generate_dataset(&lex, Language::English, 1000, 1).unwrap();
    assert_eq!(a.len(), 1000);
    assert_eq!(a, generate_dataset(&lex, Language::English, 1000, 1).unwrap());
    assert_ne!(a, generate_dataset(&lex, Language::English, 1000, 2).unwrap());
    assert!(generate_dataset(&lex, Language::English, 0, 1).unwrap().is_empty());
    let targets = lex.context_dependent_forms(Language::English);
    for s in &a {
        assert_eq!(&parse_marked(&s.text).unwrap().tokens, &s.tokens);
        assert!(targets.contains(&s.target));
        assert_eq!(rule_label(s, &lex), s.label.unwrap(), "{}", s.text);
        let has = |p: Polarity| s.tokens.iter().any(|w| rule_label_word(w, &lex) == Some(p));
        match s.label.unwrap() {
            Polarity::Positive => assert!(!has(Polarity::Negative)),
            Polarity::Negative => assert!(!has(Polarity::Positive)),
            Polarity::Neutral => {}
        }
    }
    let counts = Polarity::ALL.map(|p| a.iter().filter(|s| s.label == Some(p)).count());
    assert!(counts.iter().all(|&c| c > 250), "{counts:?}");

    let skewed = GeneratorConfig { label_weights: [10.0, 1.0, 10.0], ..Default::default() };
    let b = generate_dataset_with(&lex, Language::English, 2100, 1, &skewed).unwrap();
    let neutral = b.iter().filter(|s| s.label == Some(Polarity::Neutral)).count();
    assert!((60..=150).contains(&neutral), "{neutral}");

    let plain = crate::synth::synthetic_lexicon(50, 1);
    assert!(matches!(
        generate_dataset(&plain, Language::English, 10, 1),
        Err(ContextError::NoContextDependentForms(Language::English))
    ));
}

fn rule_label_word(w: &str, lex: &Lexicon) -> Option<Polarity> {
    let ids = lex.lookup(Language::English, w);
    let pols: Vec<Polarity> = ids.iter().map(|&id| lex.get(id).unwrap().score(Language::English).polarity()).collect();
    (pols.len() == 1).then(|| pols[0])
}

#[test]
fn split_sizes_and_partition() {
    let data = corpus(1000, 1);
    let s = split_70_20_10(&data, 4).unwrap();
    assert_eq!((s.train.len(), s.validation.len(), s.test.len()), (700, 200, 100));
    assert!(s.absent_classes.is_empty());
    assert_eq!(s, split_70_20_10(&data, 4).unwrap());
    let mut union: Vec<String> = s.train.iter().chain(&s.validation).chain(&s.test).map(|x| x.text.clone()).collect();
    let mut input: Vec<String> = data.iter().map(|x| x.text.clone()).collect();
    union.sort();
    input.sort();
    assert_eq!(union, input);

    let ten = corpus(10, 3);
    let s = split_70_20_10(&ten, 1).unwrap();
    assert_eq!((s.train.len(), s.validation.len(), s.test.len()), (7, 2, 1));
    assert!(matches!(split_70_20_10(&ten[..9], 1), Err(ContextError::TooFewItems(9))));

    let only_polar: Vec<TargetSentence> = data.iter().filter(|x| x.label != Some(Polarity::Neutral)).take(50).cloned().collect();
    assert_eq!(split_70_20_10(&only_polar, 1).unwrap().absent_classes, vec![Polarity::Neutral]);
}

#[test]
fn evaluate_constant_positive_model() {
    let data: Vec<TargetSentence> = corpus(200, 2).into_iter().filter(|s| s.label == Some(Polarity::Positive)).collect();
    let mut model = small_model(&data, 1);
    model.weights.iter_mut().for_each(|w| *w = 0.0);
    model.bias = vec![0.0, 0.0, 5.0];
    let ev = evaluate(&model, &data).unwrap();
    assert_eq!(ev.report.accuracy, 1.0);
    assert_eq!(ev.roc.len(), 3);
    assert!(ev.roc.iter().all(|(_, r)| r.is_none()));
    assert!(matches!(evaluate(&model, &[]), Err(ContextError::EmptyTestSet)));

    let mixed = corpus(60, 9);
    let ev = evaluate(&small_model(&mixed, 4), &mixed).unwrap();
    assert!(ev.roc.iter().all(|(_, r)| r.is_some()));
    assert_eq!(ev.report.support, 60);
    assert_eq!(ev.confusion.classes, vec!["negative", "neutral", "positive"]);
}

#[test]
fn corpus_and_model_round_trips() {
    let data = corpus(30, 7);
    let text = write_corpus(&data);
    assert_eq!(read_corpus(&text).unwrap(), data);
    let err = read_corpus("[TARGET] a [/TARGET] b\tpositive\n\n[TARGET] c [/TARGET]\tgood\n").unwrap_err();
    assert!(matches!(err, ContextError::Corpus { line: 3, .. }), "{err}");
    assert!(matches!(read_corpus("no tab here\n"), Err(ContextError::Corpus { line: 1, .. })));

    let config = TrainConfig { epochs: 2, ..Default::default() };
    let (model, _) = train(&config, &data, &[], &ClassWeights::uniform()).unwrap();
    let json = model.to_json();
    let back = ContextModel::from_json(&json).unwrap();
    assert_eq!(back, model);
    assert_eq!(back.to_json(), json);
    let bad = json.replacen("\"format_version\": 1", "\"format_version\": 7", 1);
    assert!(matches!(ContextModel::from_json(&bad), Err(ContextError::Version(7))));
}

#[test]
fn input_shape_is_checked() {
    let data = corpus(10, 1);
    let model = small_model(&data, 1);
    assert!(matches!(model.logits_from_inputs(&[vec![0.0; 3]], 0), Err(ContextError::InputShape { .. })));
    assert!(matches!(model.logits_from_inputs(&[vec![0.0; 4]], 1), Err(ContextError::InputShape { .. })));
}
